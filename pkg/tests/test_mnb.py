"""
Multinomial Naive Bayes Tests
=============================

Run with: pytest tests/test_mnb.py -v
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from prakriti import mnb
from prakriti.dataset import MISSING, UNSEEN, concat_rows, train_test_split
from prakriti.errors import ArgumentError, StateError
from prakriti.metrics import evaluate

from tests.helpers import make_table


def joint_table_oracle(cells, labels, n_classes, vocab_sizes, alpha=1):
    """
    Exact joint P(class, row) over every row of the product space.

    Smoothed counts are taken with plain loops and multiplied as
    fractions, so the table is exact and must sum to one.
    """
    n = len(labels)
    joint = {}
    for c in range(n_classes):
        members = [r for r, l in zip(cells, labels) if l == c]
        prior = Fraction(len(members) + alpha, n + alpha * n_classes)
        for row in itertools.product(*(range(v) for v in vocab_sizes)):
            p = prior
            for j, value in enumerate(row):
                hits = sum(1 for r in members if r[j] == value)
                p *= Fraction(hits + alpha, len(members) + alpha * vocab_sizes[j])
            joint[(c, row)] = p
    return joint


# ══════════════════════════════════════════════════════════════════════════════
# FITTING TESTS
# ══════════════════════════════════════════════════════════════════════════════

class TestFit:
    """Test parameter estimation"""

    def _table(self):
        return make_table([[0], [0], [1], [1]], labels=[0, 0, 0, 1])

    def test_hand_counted_parameters(self):
        """Priors and likelihoods match Laplace-smoothed hand counts"""
        model = mnb.fit(self._table(), alpha=1.0)
        assert np.exp(model.log_prior) == pytest.approx([4 / 6, 2 / 6])
        assert np.exp(model.log_likelihood[0]) == pytest.approx(
            np.array([[3 / 5, 1 / 3], [2 / 5, 2 / 3]])
        )
        assert model.feature_counts[0].tolist() == [[2, 0], [1, 1]]

    def test_hand_counted_prediction(self):
        """Row f0=c1 scores 8/30 for k0 and 4/18 for k1"""
        model = mnb.fit(self._table())
        scores = mnb.predict_log_scores(model, [1])
        assert scores == pytest.approx([math.log(8 / 30), math.log(4 / 18)])
        assert mnb.predict(model, [1]) == 0
        proba = mnb.predict_proba(model, make_table([[1]], vocab_size=2))
        assert proba[0] == pytest.approx([6 / 11, 5 / 11])

    def test_duplicated_rows_double_counts(self):
        """Training on every row twice doubles all counts"""
        table = self._table()
        doubled = make_table([[0], [0], [1], [1]] * 2, labels=[0, 0, 0, 1] * 2)
        a = mnb.fit(table)
        b = mnb.fit(doubled)
        assert b.class_counts.tolist() == (2 * a.class_counts).tolist()
        assert b.feature_counts[0].tolist() == (2 * a.feature_counts[0]).tolist()

    def test_duplicated_rows_vanishing_alpha(self, strong_table):
        """As alpha shrinks, doubling the data leaves the estimates unchanged"""
        doubled = concat_rows([strong_table, strong_table])
        for alpha in (1e-3, 1e-6, 1e-9):
            a = mnb.fit(strong_table, alpha=alpha)
            b = mnb.fit(doubled, alpha=alpha)
            assert np.exp(b.log_prior) == pytest.approx(np.exp(a.log_prior), abs=10 * alpha)
            for la, lb in zip(a.log_likelihood, b.log_likelihood):
                assert np.exp(lb) == pytest.approx(np.exp(la), abs=10 * alpha)

    def test_invalid_alpha(self):
        """alpha must be positive"""
        for alpha in (0.0, -1.0):
            with pytest.raises(ArgumentError):
                mnb.fit(self._table(), alpha=alpha)

    def test_unlabelled(self):
        """Unlabelled tables cannot be fitted"""
        with pytest.raises(StateError):
            mnb.fit(make_table([[0], [1]]))

    def test_missing_cells(self):
        """Missing cells must be imputed first"""
        table = make_table([[0], [MISSING]], labels=[0, 1], vocab_size=1)
        with pytest.raises(StateError):
            mnb.fit(table)

    def test_from_counts_matches_fit(self):
        """Rebuilding from stored counts reproduces the log parameters"""
        model = mnb.fit(self._table(), alpha=0.5)
        again = mnb.from_counts(
            0.5,
            model.class_counts.tolist(),
            [c.tolist() for c in model.feature_counts],
        )
        assert again.log_prior == pytest.approx(model.log_prior)
        assert again.log_likelihood[0] == pytest.approx(model.log_likelihood[0])
        assert again.log_floor == pytest.approx(model.log_floor)


# ══════════════════════════════════════════════════════════════════════════════
# PREDICTION TESTS
# ══════════════════════════════════════════════════════════════════════════════

class TestPredict:
    """Test posterior scoring"""

    def test_probabilities_sum_to_one(self, strong_table):
        """Posterior rows sum to 1"""
        model = mnb.fit(strong_table)
        proba = mnb.predict_proba(model, strong_table)
        assert proba.sum(axis=1) == pytest.approx(np.ones(strong_table.row_count))
        assert np.all(proba >= 0)

    @pytest.mark.parametrize("n_features", [1, 2, 3, 4, 5])
    @pytest.mark.parametrize("n_categories", [2, 3])
    def test_matches_joint_enumeration(self, n_features, n_categories):
        """Scores of every possible row equal the exact joint table"""
        for seed in (0, 1):
            rng = np.random.default_rng(100 * n_features + 10 * n_categories + seed)
            cells = rng.integers(0, n_categories, size=(30, n_features)).tolist()
            labels = rng.integers(0, 3, size=30).tolist()
            labels[:3] = [0, 1, 2]
            vocab = [n_categories] * n_features
            table = make_table(cells, labels=labels, vocab_size=n_categories)
            model = mnb.fit(table, alpha=1.0)

            joint = joint_table_oracle(cells, labels, 3, vocab)
            assert sum(joint.values()) == 1

            rows = list(itertools.product(*(range(v) for v in vocab)))
            proba = mnb.predict_proba(model, make_table([list(r) for r in rows], vocab_size=n_categories))
            for i, row in enumerate(rows):
                expected = [math.log(joint[(c, row)]) for c in range(3)]
                assert mnb.predict_log_scores(model, row) == pytest.approx(expected, abs=1e-9)
                evidence = sum(joint[(c, row)] for c in range(3))
                posterior = [float(joint[(c, row)] / evidence) for c in range(3)]
                assert proba[i] == pytest.approx(posterior, abs=1e-9)

    def test_unseen_and_missing_use_floor(self):
        """Marker cells contribute log(alpha / (n_c + alpha * |V|))"""
        table = make_table([[0, 0], [1, 1], [0, 1]], labels=[0, 1, 0])
        model = mnb.fit(table)
        base = mnb.predict_log_scores(model, [0, 0])
        for marker in (UNSEEN, MISSING):
            scores = mnb.predict_log_scores(model, [0, marker])
            floor = np.log(1.0 / (model.class_counts + 2))
            expected = base - model.log_likelihood[1][0] + floor
            assert scores == pytest.approx(expected)

    def test_argmax_tie_lowest(self):
        """Equal scores resolve to the lowest class index"""
        table = make_table([[0], [0]], labels=[0, 1])
        model = mnb.fit(table)
        assert mnb.predict(model, [0]) == 0

    def test_batch_matches_single(self, strong_table):
        """Batch prediction agrees with row-by-row prediction"""
        model = mnb.fit(strong_table)
        batch = mnb.predict_batch(model, strong_table)
        single = [mnb.predict(model, row) for row in strong_table.cells[:40]]
        assert batch[:40].tolist() == single

    def test_column_order_invariance(self, strong_table):
        """Reordering the feature columns leaves predictions unchanged"""
        order = np.random.default_rng(5).permutation(strong_table.column_count)
        shuffled = strong_table.select_columns([int(j) for j in order])
        a = mnb.predict_batch(mnb.fit(strong_table), strong_table)
        b = mnb.predict_batch(mnb.fit(shuffled), shuffled)
        assert b.tolist() == a.tolist()
        scores_a = mnb.predict_log_scores(mnb.fit(strong_table), strong_table.cells[0])
        scores_b = mnb.predict_log_scores(mnb.fit(shuffled), shuffled.cells[0])
        assert scores_b == pytest.approx(scores_a, abs=1e-9)

    def test_wrong_width(self):
        """Rows of the wrong width are rejected"""
        model = mnb.fit(make_table([[0, 1], [1, 0]], labels=[0, 1]))
        with pytest.raises(ArgumentError):
            mnb.predict(model, [0])

    def test_strong_signal_accuracy(self, strong_table):
        """Held-out accuracy is high on strongly planted data"""
        split = train_test_split(strong_table, 0.2, seed=1)
        model = mnb.fit(split.train)
        predicted = mnb.predict_batch(model, split.test)
        metrics = evaluate(split.test.labels, predicted, split.test.label_names)
        assert metrics.accuracy >= 0.9


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
