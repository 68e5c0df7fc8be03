"""
Prakriti Multinomial Naive Bayes Module
=======================================

Naive Bayes over one-hot encoded categorical features with Laplace
smoothing. Every feature contributes exactly one indicator per row, so the
multinomial likelihood reduces to a per-feature categorical one:

    log P(c)        = log((n_c + α) / (n + α·C))
    log P(f = v | c) = log((count(f = v, c) + α) / (n_c + α·|V_f|))

    score(c | x) = log P(c) + Σ_f log P(f = x_f | c)

Cells whose code is MISSING or UNSEEN score the smoothing floor
log(α / (n_c + α·|V_f|)), the likelihood of a category never seen with c.

Author: [Your Name]
License: MIT
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .dataset import MISSING, CategoricalTable
from .errors import ArgumentError, FitError, StateError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MnbModel:
    """Fitted Multinomial Naive Bayes parameters (immutable)."""

    alpha: float
    class_counts: np.ndarray
    """Training rows per class, shape (C,)"""

    feature_counts: Tuple[np.ndarray, ...]
    """Per feature, shape (|V_f|, C) co-occurrence counts"""

    log_prior: np.ndarray
    """Shape (C,)"""

    log_likelihood: Tuple[np.ndarray, ...]
    """Per feature, shape (|V_f|, C)"""

    log_floor: np.ndarray
    """Shape (n_features, C), score of an unseen / missing cell"""

    feature_names: Tuple[str, ...] = ()
    vocabularies: Tuple[Tuple[str, ...], ...] = ()
    label_names: Tuple[str, ...] = ()

    @property
    def class_count(self) -> int:
        return int(self.class_counts.shape[0])

    @property
    def feature_count(self) -> int:
        return len(self.feature_counts)


def _log_parameters(
    alpha: float,
    class_counts: np.ndarray,
    feature_counts: Sequence[np.ndarray],
) -> Tuple[np.ndarray, Tuple[np.ndarray, ...], np.ndarray]:
    n = class_counts.sum()
    n_classes = class_counts.shape[0]
    log_prior = np.log((class_counts + alpha) / (n + alpha * n_classes))

    log_likelihood = []
    floors = []
    for counts in feature_counts:
        denom = class_counts + alpha * counts.shape[0]
        log_likelihood.append(np.log((counts + alpha) / denom[np.newaxis, :]))
        floors.append(np.log(alpha / denom))
    return log_prior, tuple(log_likelihood), np.array(floors).reshape(len(floors), n_classes)


def fit(table: CategoricalTable, alpha: float = 1.0) -> MnbModel:
    """
    Estimate class priors and per-feature likelihoods.

    Parameters
    ----------
    table : CategoricalTable
        Labelled training rows without missing cells
    alpha : float
        Laplace smoothing, > 0 (default 1)

    Returns
    -------
    MnbModel
    """
    if alpha <= 0:
        raise ArgumentError(f"alpha must be positive, got {alpha}")
    if not table.has_labels:
        raise StateError("naive Bayes needs a labelled table", stage='fit')
    if table.row_count == 0:
        raise FitError("cannot fit on an empty table", stage='fit')
    if np.any(table.cells == MISSING):
        raise StateError("table has missing cells; impute first", stage='fit')

    n_classes = table.class_count
    labels = table.labels
    class_counts = np.bincount(labels, minlength=n_classes).astype(np.int64)

    feature_counts = []
    for j, vocab in enumerate(table.vocabularies):
        codes = table.cells[:, j]
        valid = codes >= 0
        flat = codes[valid] * n_classes + labels[valid]
        feature_counts.append(
            np.bincount(flat, minlength=len(vocab) * n_classes).reshape(len(vocab), n_classes)
        )

    log_prior, log_likelihood, log_floor = _log_parameters(alpha, class_counts, feature_counts)
    logger.debug(
        "naive Bayes fitted on %d rows, %d features, %d classes",
        table.row_count, table.column_count, n_classes,
    )
    return MnbModel(
        alpha=float(alpha),
        class_counts=class_counts,
        feature_counts=tuple(feature_counts),
        log_prior=log_prior,
        log_likelihood=log_likelihood,
        log_floor=log_floor,
        feature_names=table.column_names,
        vocabularies=table.vocabularies,
        label_names=table.label_names,
    )


def from_counts(
    alpha: float,
    class_counts: Sequence[int],
    feature_counts: Sequence[Sequence[Sequence[int]]],
    feature_names: Sequence[str] = (),
    vocabularies: Sequence[Sequence[str]] = (),
    label_names: Sequence[str] = (),
) -> MnbModel:
    """Rebuild a model from stored counts (used when loading saved models)."""
    class_counts = np.asarray(class_counts, dtype=np.int64)
    counts = tuple(
        np.asarray(c, dtype=np.int64).reshape(-1, class_counts.shape[0]) for c in feature_counts
    )
    log_prior, log_likelihood, log_floor = _log_parameters(alpha, class_counts, counts)
    return MnbModel(
        alpha=float(alpha),
        class_counts=class_counts,
        feature_counts=counts,
        log_prior=log_prior,
        log_likelihood=log_likelihood,
        log_floor=log_floor,
        feature_names=tuple(feature_names),
        vocabularies=tuple(tuple(v) for v in vocabularies),
        label_names=tuple(label_names),
    )


def _joint_log_scores(model: MnbModel, cells: np.ndarray) -> np.ndarray:
    """Shape (n_rows, C) unnormalised log posterior."""
    cells = np.atleast_2d(cells)
    if cells.shape[1] != model.feature_count:
        raise ArgumentError(
            f"rows have {cells.shape[1]} cells, model expects {model.feature_count}"
        )
    scores = np.tile(model.log_prior, (cells.shape[0], 1))
    for j, table in enumerate(model.log_likelihood):
        codes = cells[:, j]
        known = codes >= 0
        contribution = np.tile(model.log_floor[j], (cells.shape[0], 1))
        contribution[known] = table[codes[known]]
        scores += contribution
    return scores


def predict_log_scores(model: MnbModel, row: Sequence[int]) -> np.ndarray:
    """
    Per-class log score of one encoded row.

    score(c) = log P(c) + Σ_f log P(f = row[f] | c). The evidence term
    log P(x) is the same for every class and is left out.
    """
    row = np.asarray(row, dtype=np.int64)
    if row.ndim != 1:
        raise ArgumentError("expected a single row")
    return _joint_log_scores(model, row[np.newaxis, :])[0]


def predict(model: MnbModel, row: Sequence[int]) -> int:
    """Most probable class index for one row (ties → lowest index)."""
    return int(np.argmax(predict_log_scores(model, row)))


def predict_batch(model: MnbModel, table: CategoricalTable) -> np.ndarray:
    """Most probable class for every row of ``table``."""
    return np.argmax(_joint_log_scores(model, table.cells), axis=1)


def predict_proba(model: MnbModel, table: CategoricalTable) -> np.ndarray:
    """Normalised posterior per row, shape (n_rows, C)."""
    scores = _joint_log_scores(model, table.cells)
    scores -= scores.max(axis=1, keepdims=True)
    probs = np.exp(scores)
    return probs / probs.sum(axis=1, keepdims=True)
