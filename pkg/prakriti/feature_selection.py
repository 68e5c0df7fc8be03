"""
Prakriti Feature Selection Module
=================================

Chi-square ranking of categorical features against the class label, and
SelectKBest reduction to the top K.

Each original feature is tested as a whole through its contingency table
with the label (not one indicator column per category), so the ranking
names the questionnaire attributes themselves.

    χ² = Σ (O − E)² / E          E_ij = row_i × col_j / N

The upper-tail p-value is the regularized upper incomplete gamma function
Q(dof/2, χ²/2), evaluated by ``scipy.special.gammaincc`` (Cephes: power
series for x < a + 1, continued fraction otherwise).

Author: [Your Name]
License: MIT
"""

import json
import logging
from dataclasses import asdict, dataclass
from typing import List, Tuple

import numpy as np
import pandas as pd
from scipy.special import gammaincc

from .dataset import MISSING, CategoricalTable, ColumnRef
from .errors import ArgumentError, StateError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """
    Observed counts of (feature category, class) pairs.

    ``observed[i, j]`` counts rows whose feature takes category ``i`` and
    whose label is class ``j``. Categories or classes that never occur keep
    an all-zero row / column.
    """

    observed: np.ndarray
    feature_name: str = ''

    @property
    def row_totals(self) -> np.ndarray:
        return self.observed.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.observed.sum(axis=0)

    @property
    def grand_total(self) -> int:
        return int(self.observed.sum())

    @property
    def expected(self) -> np.ndarray:
        """E_ij = row_i × col_j / N under independence."""
        total = self.grand_total
        if total == 0:
            return np.zeros_like(self.observed, dtype=float)
        return np.outer(self.row_totals, self.col_totals) / total


@dataclass(frozen=True)
class FeatureScore:
    """Chi-square test result for one feature."""

    feature_name: str
    statistic: float
    dof: int
    p_value: float
    column_index: int


def build_contingency(table: CategoricalTable, feature: ColumnRef) -> ContingencyTable:
    """
    Cross-tabulate one feature against the label.

    Parameters
    ----------
    table : CategoricalTable
        Labelled table without missing cells
    feature : int or str
        Column index or name

    Returns
    -------
    ContingencyTable
        Shape (vocabulary size of the feature, class count)
    """
    if not table.has_labels:
        raise StateError("contingency needs a labelled table")
    j = table.column_index(feature)
    codes = table.cells[:, j]
    if np.any(codes == MISSING):
        raise StateError(
            f"column '{table.column_names[j]}' has missing cells; impute first", stage='select'
        )

    n_categories = len(table.vocabularies[j])
    n_classes = table.class_count
    valid = codes >= 0
    flat = codes[valid] * n_classes + table.labels[valid]
    observed = np.bincount(flat, minlength=n_categories * n_classes).reshape(
        n_categories, n_classes
    )
    return ContingencyTable(observed=observed, feature_name=table.column_names[j])


def chi_square_statistic(ct: ContingencyTable) -> Tuple[float, int]:
    """
    Pearson chi-square statistic and degrees of freedom.

    Cells with E == 0 (categories or classes that never occur) are skipped;
    dof counts only rows and columns with nonzero totals,
    (r' − 1)(c' − 1), floored at 1.

    Returns
    -------
    statistic : float
    dof : int

    Raises
    ------
    ArgumentError
        The table holds no observations
    """
    if ct.grand_total <= 0:
        raise ArgumentError("empty contingency table")
    observed = ct.observed.astype(float)
    expected = ct.expected
    used = expected > 0
    statistic = float(np.sum((observed[used] - expected[used]) ** 2 / expected[used]))

    r = int(np.count_nonzero(ct.row_totals))
    c = int(np.count_nonzero(ct.col_totals))
    dof = max((r - 1) * (c - 1), 1)
    return statistic, dof


def chi_square_p_value(statistic: float, dof: int) -> float:
    """
    Upper-tail probability of the chi-square distribution.

    P(X ≥ statistic) for X ~ χ²(dof), computed as Q(dof/2, statistic/2).
    """
    if statistic < 0:
        raise ArgumentError(f"chi-square statistic must be non-negative, got {statistic}")
    if dof < 1:
        raise ArgumentError(f"degrees of freedom must be at least 1, got {dof}")
    return float(min(max(gammaincc(dof / 2.0, statistic / 2.0), 0.0), 1.0))


def score_features(table: CategoricalTable) -> List[FeatureScore]:
    """FeatureScore for every column, in column order."""
    scores = []
    for j, name in enumerate(table.column_names):
        ct = build_contingency(table, j)
        statistic, dof = chi_square_statistic(ct)
        scores.append(
            FeatureScore(
                feature_name=name,
                statistic=statistic,
                dof=dof,
                p_value=chi_square_p_value(statistic, dof),
                column_index=j,
            )
        )
    return scores


def rank_scores(scores: List[FeatureScore]) -> List[FeatureScore]:
    """Statistic descending, then smaller p-value, then column order."""
    return sorted(scores, key=lambda s: (-s.statistic, s.p_value, s.column_index))


def select_k_best(table: CategoricalTable, k: int) -> Tuple[List[FeatureScore], CategoricalTable]:
    """
    Rank all features and keep the top ``k``.

    Parameters
    ----------
    table : CategoricalTable
        Labelled table without missing cells
    k : int
        Number of features to keep, 1 ≤ k ≤ column_count

    Returns
    -------
    ranked : list of FeatureScore
        All features, best first
    reduced : CategoricalTable
        The top k features in their original column order
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ArgumentError(f"k must be a positive integer, got {k!r}")
    if k > table.column_count:
        raise ArgumentError(f"k={k} exceeds the {table.column_count} available features")

    ranked = rank_scores(score_features(table))
    keep = sorted(s.column_index for s in ranked[:k])
    logger.debug(
        "top features: %s",
        ', '.join(f"{s.feature_name} ({s.statistic:.1f})" for s in ranked[:5]),
    )
    return ranked, table.select_columns(keep)


def write_ranking(scores: List[FeatureScore], path: str, fmt: str = 'csv') -> None:
    """Write a ranking as CSV (feature,statistic,dof,p_value) or JSON."""
    if fmt == 'json':
        rows = [
            {k: v for k, v in asdict(s).items() if k != 'column_index'}
            for s in scores
        ]
        with open(path, 'w', encoding='utf-8') as fh:
            json.dump(rows, fh, indent=2)
            fh.write('\n')
        return
    frame = pd.DataFrame(
        [(s.feature_name, s.statistic, s.dof, s.p_value) for s in scores],
        columns=['feature', 'statistic', 'dof', 'p_value'],
    )
    frame.to_csv(path, index=False, encoding='utf-8', lineterminator='\n')
