"""
Prakriti Synthetic Data Module
==============================

Seeded generator of categorical questionnaires with a planted class
structure, used in place of the survey data for tests and desk-scale runs.

Cell model
----------
Each class owns a preferred category on every informative feature. An
informative cell takes its class's preferred category with probability
``signal`` and is drawn uniformly otherwise; non-informative cells are
always uniform. Missing cells are then blanked at ``missing_rate``
(labels are never blanked).

    signal = 1  → informative features determine the class
    signal = 0  → every feature is independent of the class

Author: [Your Name]
License: MIT
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .config import DOSHA_NAMES
from .dataset import MISSING, CategoricalTable, apportion
from .errors import ArgumentError
from .seeding import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratorSpec:
    """
    Shape and signal strength of a synthetic table.

    Example
    -------
    >>> spec = GeneratorSpec(rows=1000, features=147, informative_features=20)
    >>> table = generate(spec, seed=2023)
    """

    rows: int = 1000
    features: int = 147
    categories_per_feature: Union[int, Tuple[int, ...]] = 3
    """One count for all features, or one per feature (each ≥ 2)"""

    informative_features: int = 20
    signal: float = 0.9
    """Probability an informative cell takes its class-preferred category"""

    missing_rate: float = 0.0
    class_names: Tuple[str, ...] = DOSHA_NAMES
    class_balance: Optional[Tuple[float, ...]] = None
    """Class proportions (None = equal shares)"""

    def __post_init__(self):
        if self.rows < 0:
            raise ArgumentError(f"rows must be >= 0, got {self.rows}")
        if self.features < 1:
            raise ArgumentError(f"features must be >= 1, got {self.features}")
        if not 0 <= self.informative_features <= self.features:
            raise ArgumentError(
                f"informative_features must be in [0, {self.features}], "
                f"got {self.informative_features}"
            )
        if not 0.0 <= self.signal <= 1.0:
            raise ArgumentError(f"signal must be in [0, 1], got {self.signal}")
        if not 0.0 <= self.missing_rate < 1.0:
            raise ArgumentError(f"missing_rate must be in [0, 1), got {self.missing_rate}")
        if len(self.class_names) < 1 or len(set(self.class_names)) != len(self.class_names):
            raise ArgumentError("class_names must be non-empty and unique")

        cats = self.category_counts
        if cats.shape != (self.features,) or np.any(cats < 2):
            raise ArgumentError("every feature needs at least 2 categories")

        if self.class_balance is not None:
            balance = np.asarray(self.class_balance, dtype=float)
            if balance.shape != (len(self.class_names),) or np.any(balance < 0):
                raise ArgumentError("class_balance needs one non-negative share per class")
            if abs(balance.sum() - 1.0) > 1e-9:
                raise ArgumentError(f"class_balance must sum to 1, got {balance.sum()}")

    @property
    def category_counts(self) -> np.ndarray:
        """Categories per feature, shape (features,)"""
        if isinstance(self.categories_per_feature, (int, np.integer)):
            return np.full(self.features, int(self.categories_per_feature), dtype=np.int64)
        return np.asarray(self.categories_per_feature, dtype=np.int64)

    @property
    def balance(self) -> np.ndarray:
        if self.class_balance is None:
            return np.full(len(self.class_names), 1.0 / len(self.class_names))
        return np.asarray(self.class_balance, dtype=float)


@dataclass(frozen=True, eq=False)
class PlantedTruth:
    """What the generator planted, for checking recovered structure."""

    informative_columns: np.ndarray
    """Sorted column indices of the informative features"""

    preferred: np.ndarray
    """Shape (classes, informative), preferred category per class"""

    labels: np.ndarray
    """Per-row class index (same as the table's labels)"""


def column_names_for(features: int) -> Tuple[str, ...]:
    """f000, f001, ... (zero padded to at least three digits)."""
    width = max(3, len(str(features - 1)))
    return tuple(f"f{j:0{width}d}" for j in range(features))


def generate_with_truth(spec: GeneratorSpec, seed: int) -> Tuple[CategoricalTable, PlantedTruth]:
    """
    Draw a labelled table and report the planted structure.

    Draw order (fixed, one PCG64 stream): informative column subset,
    preferred categories, label permutation, uniform cells, signal coins,
    missing mask.
    """
    rng = make_rng(seed)
    cats = spec.category_counts
    n_classes = len(spec.class_names)

    informative = np.sort(
        rng.choice(spec.features, size=spec.informative_features, replace=False)
    ).astype(np.int64)
    preferred = np.floor(
        rng.random((n_classes, informative.size)) * cats[informative][np.newaxis, :]
    ).astype(np.int64)

    quotas = apportion(spec.rows, spec.balance)
    labels = np.repeat(np.arange(n_classes, dtype=np.int64), quotas)
    labels = labels[rng.permutation(spec.rows)]

    cells = np.floor(rng.random((spec.rows, spec.features)) * cats[np.newaxis, :]).astype(np.int64)
    follow = rng.random((spec.rows, informative.size)) < spec.signal
    cells[:, informative] = np.where(follow, preferred[labels], cells[:, informative])

    if spec.missing_rate > 0:
        cells[rng.random(cells.shape) < spec.missing_rate] = MISSING

    table = CategoricalTable(
        column_names=column_names_for(spec.features),
        vocabularies=tuple(tuple(f"c{v}" for v in range(m)) for m in cats.tolist()),
        cells=cells,
        labels=labels,
        label_names=tuple(spec.class_names),
    )
    logger.debug(
        "generated %d x %d table (%d informative, signal %.2f, %d missing cells)",
        spec.rows, spec.features, informative.size, spec.signal, table.missing_count,
    )
    truth = PlantedTruth(informative_columns=informative, preferred=preferred, labels=table.labels)
    return table, truth


def generate(spec: GeneratorSpec, seed: int) -> CategoricalTable:
    """
    Draw a labelled synthetic table.

    Parameters
    ----------
    spec : GeneratorSpec
        Shape and signal of the table
    seed : int
        PCG64 seed; identical (spec, seed) give identical tables

    Returns
    -------
    CategoricalTable
        Labels hit the class_balance quotas to within one row per class
    """
    return generate_with_truth(spec, seed)[0]


def spec_for(
    rows: int,
    features: int,
    categories: Union[int, Sequence[int]] = 3,
    informative: int = 20,
    signal: float = 0.9,
    missing_rate: float = 0.0,
) -> GeneratorSpec:
    """GeneratorSpec with the informative count clipped to the feature count."""
    if not isinstance(categories, (int, np.integer)):
        categories = tuple(int(c) for c in categories)
    return GeneratorSpec(
        rows=rows,
        features=features,
        categories_per_feature=categories,
        informative_features=min(informative, features),
        signal=signal,
        missing_rate=missing_rate,
    )
