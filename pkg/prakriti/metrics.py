"""
Prakriti Metrics Module
=======================

Confusion matrix and support-weighted classification metrics.

    accuracy     = Σ TP_i / N
    precision_i  = TP_i / (TP_i + FP_i)
    recall_i     = TP_i / (TP_i + FN_i)
    f1_i         = 2 · precision_i · recall_i / (precision_i + recall_i)
    weighted(m)  = Σ_i (support_i / N) · m_i

Support weighting makes weighted recall equal to accuracy for every
matrix; it is computed directly as Σ TP_i / N so the identity holds
bit-for-bit. A zero denominator yields 0 and is counted in
``zero_division_events``.

Author: [Your Name]
License: MIT
"""

import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ArgumentError

CSV_COLUMNS = ('test_size', 'n_features', 'accuracy', 'precision', 'f_score', 'recall')


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """counts[i, j] = rows of true class i predicted as class j."""

    counts: np.ndarray
    classes: Tuple[str, ...] = ()

    @property
    def class_count(self) -> int:
        return int(self.counts.shape[0])

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def tp(self) -> np.ndarray:
        return np.diag(self.counts)

    @property
    def fp(self) -> np.ndarray:
        return self.counts.sum(axis=0) - self.tp

    @property
    def fn(self) -> np.ndarray:
        return self.counts.sum(axis=1) - self.tp

    @property
    def tn(self) -> np.ndarray:
        return self.total - self.tp - self.fp - self.fn

    @property
    def support(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def to_dict(self) -> Dict:
        return {'classes': list(self.classes), 'counts': self.counts.tolist()}


@dataclass(frozen=True)
class ClassMetrics:
    """Precision, recall, F1 and support of one class."""

    name: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    """Aggregate metrics of one evaluation."""

    accuracy: float
    precision_weighted: float
    recall_weighted: float
    f1_weighted: float
    per_class: Tuple[ClassMetrics, ...] = ()
    zero_division_events: int = 0
    confusion: Optional[ConfusionMatrix] = field(default=None, compare=False)

    def to_dict(self) -> Dict:
        report = {
            'accuracy': self.accuracy,
            'precision': self.precision_weighted,
            'recall': self.recall_weighted,
            'f_score': self.f1_weighted,
            'zero_division_events': self.zero_division_events,
            'per_class': [
                {
                    'class': c.name,
                    'precision': c.precision,
                    'recall': c.recall,
                    'f1': c.f1,
                    'support': c.support,
                }
                for c in self.per_class
            ],
        }
        if self.confusion is not None:
            report['confusion'] = self.confusion.to_dict()
        return report

    def csv_row(self, test_size: Optional[float], n_features: int) -> List:
        """Values in CSV_COLUMNS order."""
        return [
            test_size,
            n_features,
            self.accuracy,
            self.precision_weighted,
            self.f1_weighted,
            self.recall_weighted,
        ]

    def summary(self) -> str:
        """Return formatted per-class table plus the weighted aggregates"""
        lines = [
            f"{'class':<18} {'precision':>9} {'recall':>9} {'f1':>9} {'support':>8}",
            '─' * 57,
        ]
        for c in self.per_class:
            lines.append(
                f"{c.name:<18} {c.precision:>9.4f} {c.recall:>9.4f} {c.f1:>9.4f} {c.support:>8d}"
            )
        lines.append('─' * 57)
        lines.append(
            f"{'weighted':<18} {self.precision_weighted:>9.4f} "
            f"{self.recall_weighted:>9.4f} {self.f1_weighted:>9.4f}"
        )
        lines.append(f"accuracy {self.accuracy:.4f}")
        if self.zero_division_events:
            lines.append(f"zero-division events: {self.zero_division_events}")
        return '\n'.join(lines)


def confusion(
    y_true: Sequence[int],
    y_pred: Sequence[int],
    class_count: int,
    classes: Sequence[str] = (),
) -> ConfusionMatrix:
    """
    Tally (true, predicted) pairs.

    Raises
    ------
    ArgumentError
        Length mismatch or a class index outside [0, class_count)
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ArgumentError(f"length mismatch: {y_true.size} true vs {y_pred.size} predicted")
    if class_count < 1:
        raise ArgumentError("class_count must be positive")
    for name, values in (('true', y_true), ('predicted', y_pred)):
        if values.size and (values.min() < 0 or values.max() >= class_count):
            raise ArgumentError(f"{name} class index outside [0, {class_count})")
    counts = np.bincount(
        y_true * class_count + y_pred, minlength=class_count * class_count
    ).reshape(class_count, class_count)
    return ConfusionMatrix(counts=counts, classes=tuple(classes))


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> Tuple[np.ndarray, int]:
    zero = den == 0
    out = np.zeros(num.shape, dtype=float)
    np.divide(num, den, out=out, where=~zero)
    return out, int(np.count_nonzero(zero))


def report(cm: ConfusionMatrix) -> MetricsReport:
    """
    Weighted metrics from a confusion matrix.

    Parameters
    ----------
    cm : ConfusionMatrix
        At least one evaluated row

    Returns
    -------
    MetricsReport
    """
    total = cm.total
    if total == 0:
        raise ArgumentError("cannot report on an empty confusion matrix")

    tp = cm.tp.astype(float)
    support = cm.support
    precision, p_events = _safe_ratio(tp, (cm.tp + cm.fp).astype(float))
    recall, r_events = _safe_ratio(tp, support.astype(float))
    f1, f_events = _safe_ratio(2.0 * precision * recall, precision + recall)

    events = p_events + r_events + f_events
    if events:
        warnings.warn(
            f"{events} zero-division cases set to 0 in per-class metrics",
            UserWarning,
            stacklevel=2,
        )

    weights = support / total
    accuracy = float(cm.tp.sum() / total)
    names = cm.classes or tuple(str(i) for i in range(cm.class_count))
    per_class = tuple(
        ClassMetrics(
            name=names[i],
            precision=float(precision[i]),
            recall=float(recall[i]),
            f1=float(f1[i]),
            support=int(support[i]),
        )
        for i in range(cm.class_count)
    )
    return MetricsReport(
        accuracy=accuracy,
        precision_weighted=float(np.clip(np.dot(weights, precision), 0.0, 1.0)),
        recall_weighted=accuracy,
        f1_weighted=float(np.clip(np.dot(weights, f1), 0.0, 1.0)),
        per_class=per_class,
        zero_division_events=events,
        confusion=cm,
    )


def evaluate(
    y_true: Sequence[int], y_pred: Sequence[int], classes: Sequence[str]
) -> MetricsReport:
    """confusion() followed by report()."""
    return report(confusion(y_true, y_pred, len(classes), classes))
