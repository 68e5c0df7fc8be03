"""
Prakriti Decision Tree Module
=============================

ID3-style classification tree for categorical features: multiway splits
chosen by information gain, with optional reduced-error post-pruning.

Entropy and gain
----------------
    H(S)       = −Σ_i p_i log2 p_i
    Gain(S, f) = H(S) − Σ_v (|S_v| / |S|) · H(S_v)

Growth stops at a pure node, when no unused feature remains, at the depth
cap, below ``min_samples_split`` rows, or when the best gain does not
exceed ``min_gain``. A row whose category has no child at some node is
classified by that node's majority class.

Author: [Your Name]
License: MIT
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from .dataset import MISSING, CategoricalTable, ColumnRef, train_test_split
from .errors import ArgumentError, FitError, PruneError, StateError

logger = logging.getLogger(__name__)

GAIN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TreeParams:
    """Growth and pruning controls."""

    max_depth: Optional[int] = None
    """Depth cap (0 = a single leaf, None = unlimited)"""

    min_samples_split: int = 2
    """Nodes with fewer rows become leaves"""

    min_gain: float = 0.0
    """A split must gain strictly more than this (bits)"""

    prune: bool = False
    """Reduced-error pruning against a holdout carved from the training rows"""

    prune_fraction: float = 0.2
    """Share of the training rows held out for pruning"""

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 0:
            raise ArgumentError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.min_samples_split < 2:
            raise ArgumentError("min_samples_split must be at least 2")
        if self.min_gain < 0:
            raise ArgumentError("min_gain must be non-negative")
        if not 0.0 < self.prune_fraction < 1.0:
            raise ArgumentError(f"prune_fraction must be in (0, 1), got {self.prune_fraction}")


@dataclass(frozen=True, eq=False)
class TreeNode:
    """
    One node of a fitted tree.

    Leaves have ``feature is None`` and no children; internal nodes split
    on ``feature`` with one child per category code seen in their
    partition. ``majority_class`` is the prediction at a leaf and the
    fallback for unseen categories at an internal node.
    """

    majority_class: int
    sample_count: int
    class_counts: np.ndarray
    feature: Optional[int] = None
    children: Dict[int, 'TreeNode'] = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def as_leaf(self) -> 'TreeNode':
        return TreeNode(
            majority_class=self.majority_class,
            sample_count=self.sample_count,
            class_counts=self.class_counts,
        )


# ═══════════════════════════════════════════════════════════════════════════════
# ENTROPY
# ═══════════════════════════════════════════════════════════════════════════════

def entropy(class_counts: Sequence[int]) -> float:
    """Shannon entropy in bits of a class-count vector."""
    counts = np.asarray(class_counts, dtype=float)
    if np.any(counts < 0):
        raise ArgumentError("class counts must be non-negative")
    total = counts.sum()
    if total <= 0:
        raise ArgumentError("entropy of an empty count vector")
    p = counts[counts > 0] / total
    return float(-np.sum(p * np.log2(p)))


def _split_counts(codes: np.ndarray, labels: np.ndarray, n_values: int, n_classes: int) -> np.ndarray:
    """Shape (n_values, n_classes) counts of (category, class)."""
    return np.bincount(codes * n_classes + labels, minlength=n_values * n_classes).reshape(
        n_values, n_classes
    )


def _gain(codes: np.ndarray, labels: np.ndarray, n_values: int, n_classes: int) -> float:
    parent = np.bincount(labels, minlength=n_classes)
    n = parent.sum()
    counts = _split_counts(codes, labels, n_values, n_classes)
    remainder = sum(
        (row.sum() / n) * entropy(row) for row in counts if row.sum() > 0
    )
    return max(entropy(parent) - remainder, 0.0)


def information_gain(partition: CategoricalTable, feature: ColumnRef) -> float:
    """
    Entropy reduction from splitting ``partition`` on ``feature``.

    Parameters
    ----------
    partition : CategoricalTable
        Non-empty labelled rows
    feature : int or str
        Column index or name

    Returns
    -------
    float
        Gain in bits, ≥ 0
    """
    if not partition.has_labels:
        raise StateError("information gain needs a labelled table")
    if partition.row_count == 0:
        raise ArgumentError("information gain of an empty partition")
    j = partition.column_index(feature)
    codes = partition.cells[:, j]
    if np.any(codes < 0):
        raise StateError(f"column '{partition.column_names[j]}' has marker cells")
    return _gain(codes, partition.labels, len(partition.vocabularies[j]), partition.class_count)


# ═══════════════════════════════════════════════════════════════════════════════
# GROWTH
# ═══════════════════════════════════════════════════════════════════════════════

def _grow(
    cells: np.ndarray,
    labels: np.ndarray,
    candidates: Sequence[int],
    depth: int,
    params: TreeParams,
    vocab_sizes: Sequence[int],
    n_classes: int,
) -> TreeNode:
    class_counts = np.bincount(labels, minlength=n_classes)
    node = TreeNode(
        majority_class=int(np.argmax(class_counts)),
        sample_count=int(labels.size),
        class_counts=class_counts,
    )
    if (
        np.count_nonzero(class_counts) <= 1
        or not candidates
        or (params.max_depth is not None and depth >= params.max_depth)
        or labels.size < params.min_samples_split
    ):
        return node

    gains = [_gain(cells[:, j], labels, vocab_sizes[j], n_classes) for j in candidates]
    best = int(np.argmax(gains))
    if gains[best] <= params.min_gain + GAIN_TOLERANCE:
        return node

    feature = candidates[best]
    remaining = [j for j in candidates if j != feature]
    children = {}
    for value in np.unique(cells[:, feature]).tolist():
        mask = cells[:, feature] == value
        children[int(value)] = _grow(
            cells[mask], labels[mask], remaining, depth + 1, params, vocab_sizes, n_classes
        )
    return TreeNode(
        majority_class=node.majority_class,
        sample_count=node.sample_count,
        class_counts=class_counts,
        feature=int(feature),
        children=children,
    )


def fit(train: CategoricalTable, params: Optional[TreeParams] = None, seed: int = 0) -> TreeNode:
    """
    Grow a tree on ``train``.

    Parameters
    ----------
    train : CategoricalTable
        Labelled rows without missing cells
    params : TreeParams, optional
        Growth / pruning controls (defaults: unlimited depth, no pruning)
    seed : int
        Seed for the pruning holdout split (unused without pruning)

    Returns
    -------
    TreeNode
        Root of the fitted (and, when requested, pruned) tree
    """
    params = params or TreeParams()
    if not train.has_labels:
        raise StateError("decision tree needs a labelled table", stage='fit')
    if train.row_count == 0:
        raise FitError("cannot fit on an empty table", stage='fit')
    if np.any(train.cells == MISSING):
        raise StateError("table has missing cells; impute first", stage='fit')

    grow_on = train
    holdout = None
    if params.prune:
        split = train_test_split(train, params.prune_fraction, seed)
        if split.test.row_count == 0 or split.train.row_count == 0:
            warnings.warn(
                f"pruning skipped: {train.row_count} rows are too few for a "
                f"{params.prune_fraction:.0%} holdout",
                UserWarning,
                stacklevel=2,
            )
        else:
            grow_on, holdout = split.train, split.test

    root = _grow(
        grow_on.cells,
        grow_on.labels,
        list(range(grow_on.column_count)),
        0,
        params,
        grow_on.vocabulary_sizes,
        grow_on.class_count,
    )
    if holdout is not None:
        root = prune(root, holdout)
    logger.debug(
        "tree fitted on %d rows: depth %d, %d nodes, %d leaves",
        grow_on.row_count, depth(root), node_count(root), leaf_count(root),
    )
    return root


# ═══════════════════════════════════════════════════════════════════════════════
# PREDICTION
# ═══════════════════════════════════════════════════════════════════════════════

def predict(tree: TreeNode, row: Sequence[int], n_features: Optional[int] = None) -> int:
    """
    Class index for one encoded row.

    Descends by the row's category at each split; a category without a
    child returns the current node's majority class.
    """
    row = np.asarray(row, dtype=np.int64)
    if row.ndim != 1:
        raise ArgumentError("expected a single row")
    if n_features is not None and row.size != n_features:
        raise ArgumentError(f"row has {row.size} cells, tree expects {n_features}")
    node = tree
    while not node.is_leaf:
        if node.feature >= row.size:
            raise ArgumentError(f"row has {row.size} cells, tree splits on column {node.feature}")
        child = node.children.get(int(row[node.feature]))
        if child is None:
            return node.majority_class
        node = child
    return node.majority_class


def predict_batch(tree: TreeNode, table: CategoricalTable) -> np.ndarray:
    """Class index for every row of ``table``."""
    return np.array(
        [predict(tree, row, table.column_count) for row in table.cells],
        dtype=np.int64,
    )


# ═══════════════════════════════════════════════════════════════════════════════
# PRUNING
# ═══════════════════════════════════════════════════════════════════════════════

def _prune_node(node: TreeNode, cells: np.ndarray, labels: np.ndarray) -> TreeNode:
    """Bottom-up reduced-error pass over the validation rows reaching ``node``."""
    if node.is_leaf:
        return node

    codes = cells[:, node.feature]
    children = {}
    for value, child in node.children.items():
        mask = codes == value
        children[value] = _prune_node(child, cells[mask], labels[mask])
    kept = TreeNode(
        majority_class=node.majority_class,
        sample_count=node.sample_count,
        class_counts=node.class_counts,
        feature=node.feature,
        children=children,
    )

    subtree_correct = sum(
        1 for row, label in zip(cells, labels) if predict(kept, row) == label
    )
    leaf_correct = int(np.count_nonzero(labels == node.majority_class))
    if leaf_correct >= subtree_correct:
        return kept.as_leaf()
    return kept


def prune(tree: TreeNode, validation: CategoricalTable) -> TreeNode:
    """
    Reduced-error pruning.

    Every internal node, children first, is replaced by a leaf predicting
    its majority class when that does not lower the number of validation
    rows it classifies correctly (ties prune). Nodes that no validation row
    reaches therefore collapse. Returns a new tree; ``tree`` is unchanged.

    Raises
    ------
    PruneError
        ``validation`` is empty
    """
    if validation.row_count == 0:
        raise PruneError("empty validation set", stage='prune')
    if not validation.has_labels:
        raise StateError("pruning needs a labelled validation table", stage='prune')
    pruned = _prune_node(tree, validation.cells, validation.labels)
    logger.debug("pruned %d nodes down to %d", node_count(tree), node_count(pruned))
    return pruned


# ═══════════════════════════════════════════════════════════════════════════════
# SHAPE
# ═══════════════════════════════════════════════════════════════════════════════

def depth(tree: TreeNode) -> int:
    if tree.is_leaf:
        return 0
    return 1 + max(depth(child) for child in tree.children.values())


def node_count(tree: TreeNode) -> int:
    return 1 + sum(node_count(child) for child in tree.children.values())


def leaf_count(tree: TreeNode) -> int:
    if tree.is_leaf:
        return 1
    return sum(leaf_count(child) for child in tree.children.values())
