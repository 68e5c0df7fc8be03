"""
Metrics Tests
=============

Run with: pytest tests/test_metrics.py -v
"""

import warnings

import numpy as np
import pytest

from prakriti.errors import ArgumentError
from prakriti.metrics import CSV_COLUMNS, ConfusionMatrix, confusion, evaluate, report


# ══════════════════════════════════════════════════════════════════════════════
# CONFUSION MATRIX TESTS
# ══════════════════════════════════════════════════════════════════════════════

class TestConfusion:
    """Test confusion matrix tallies"""

    def test_counts(self):
        """Rows are true classes, columns predicted classes"""
        cm = confusion([0, 0, 1, 1], [0, 1, 1, 1], 2)
        assert cm.counts.tolist() == [[1, 1], [0, 2]]
        assert cm.tp.tolist() == [1, 2]
        assert cm.fp.tolist() == [0, 1]
        assert cm.fn.tolist() == [1, 0]
        assert cm.tn.tolist() == [2, 1]

    def test_length_mismatch(self):
        """Sequences of different length are rejected"""
        with pytest.raises(ArgumentError):
            confusion([0, 1], [0], 2)

    def test_index_out_of_range(self):
        """Class indices must lie in [0, class_count)"""
        with pytest.raises(ArgumentError):
            confusion([0, 2], [0, 1], 2)


# ══════════════════════════════════════════════════════════════════════════════
# REPORT TESTS
# ══════════════════════════════════════════════════════════════════════════════

class TestReport:
    """Test weighted metrics"""

    def test_two_class_example(self):
        """[0,0,1,1] vs [0,1,1,1]: accuracy 0.75, weighted precision 0.8333"""
        metrics = evaluate([0, 0, 1, 1], [0, 1, 1, 1], ('a', 'b'))
        assert metrics.accuracy == pytest.approx(0.75)
        assert metrics.precision_weighted == pytest.approx(0.833333, abs=1e-6)
        assert metrics.recall_weighted == pytest.approx(0.75)
        assert metrics.f1_weighted == pytest.approx(0.733333, abs=1e-6)

    def test_three_class_example(self):
        """Hand-computed per-class and weighted values for three classes"""
        metrics = evaluate([0, 0, 1, 1, 2, 2], [0, 1, 1, 1, 2, 0], ('Vata', 'Pita', 'Kapha'))
        per_class = {c.name: c for c in metrics.per_class}
        assert per_class['Vata'].precision == pytest.approx(0.5)
        assert per_class['Pita'].f1 == pytest.approx(0.8)
        assert per_class['Kapha'].recall == pytest.approx(0.5)
        assert metrics.precision_weighted == pytest.approx((0.5 + 2 / 3 + 1.0) / 3)
        assert metrics.f1_weighted == pytest.approx((0.5 + 0.8 + 2 / 3) / 3)
        assert metrics.accuracy == pytest.approx(4 / 6)

    def test_perfect_predictions(self):
        """Perfect predictions score 1.0 everywhere"""
        y = [0, 1, 2, 3, 4, 5, 6] * 3
        metrics = evaluate(y, y, tuple('abcdefg'))
        for value in (
            metrics.accuracy,
            metrics.precision_weighted,
            metrics.recall_weighted,
            metrics.f1_weighted,
        ):
            assert value == pytest.approx(1.0)
        assert metrics.zero_division_events == 0

    def test_weighted_recall_is_accuracy(self):
        """Weighted recall equals accuracy on 1,000 random matrices"""
        rng = np.random.default_rng(99)
        for _ in range(1000):
            c = int(rng.integers(2, 8))
            counts = rng.integers(0, 20, size=(c, c))
            counts[0, 0] += 1
            metrics = report(ConfusionMatrix(counts=counts))
            recall = np.divide(
                np.diag(counts), counts.sum(axis=1),
                out=np.zeros(c), where=counts.sum(axis=1) > 0,
            )
            expected = float(np.dot(counts.sum(axis=1) / counts.sum(), recall))
            assert metrics.recall_weighted == pytest.approx(expected, abs=1e-12)
            assert metrics.recall_weighted == metrics.accuracy

    def test_class_relabel_invariance(self):
        """Renaming classes consistently in truth and prediction keeps the aggregates"""
        rng = np.random.default_rng(41)
        relabel = np.array([4, 2, 0, 5, 1, 3, 6])
        for _ in range(50):
            y_true = rng.integers(0, 7, size=120)
            y_pred = np.where(rng.random(120) < 0.7, y_true, rng.integers(0, 7, size=120))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                a = report(confusion(y_true, y_pred, 7))
                b = report(confusion(relabel[y_true], relabel[y_pred], 7))
            assert b.accuracy == a.accuracy
            assert b.precision_weighted == pytest.approx(a.precision_weighted, abs=1e-12)
            assert b.f1_weighted == pytest.approx(a.f1_weighted, abs=1e-12)
            assert b.recall_weighted == a.recall_weighted

    def test_zero_division_warns(self):
        """A class that is never predicted has precision 0 and a warning"""
        with pytest.warns(UserWarning, match="zero-division"):
            metrics = evaluate([0, 1, 1], [1, 1, 1], ('a', 'b'))
        assert metrics.per_class[0].precision == 0.0
        assert metrics.zero_division_events >= 1

    def test_metrics_in_unit_interval(self):
        """All aggregates stay in [0, 1]"""
        rng = np.random.default_rng(5)
        for _ in range(100):
            counts = rng.integers(0, 10, size=(4, 4))
            counts[1, 1] += 1
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                metrics = report(ConfusionMatrix(counts=counts))
            for value in (metrics.accuracy, metrics.precision_weighted, metrics.f1_weighted):
                assert 0.0 <= value <= 1.0

    def test_empty_matrix(self):
        """An empty confusion matrix cannot be reported"""
        with pytest.raises(ArgumentError):
            report(ConfusionMatrix(counts=np.zeros((2, 2), dtype=int)))

    def test_csv_row_order(self):
        """csv_row follows the sweep column order"""
        metrics = evaluate([0, 0, 1, 1], [0, 1, 1, 1], ('a', 'b'))
        row = metrics.csv_row(0.2, 20)
        assert len(row) == len(CSV_COLUMNS)
        assert row[:2] == [0.2, 20]
        assert row[CSV_COLUMNS.index('recall')] == metrics.recall_weighted
        assert row[CSV_COLUMNS.index('f_score')] == metrics.f1_weighted

    def test_to_dict_keys(self):
        """Report dictionaries carry the CSV metric names and the confusion matrix"""
        data = evaluate([0, 1], [0, 1], ('a', 'b')).to_dict()
        assert {'accuracy', 'precision', 'recall', 'f_score', 'confusion'} <= set(data)
        assert data['confusion']['counts'] == [[1, 0], [0, 1]]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
