"""
Prakriti K-Modes Module
=======================

K-modes clustering of categorical records (Huang, 1998): k-means with the
per-column mode in place of the mean and simple-matching dissimilarity in
place of Euclidean distance.

Iteration (batch form)
----------------------
    1. assign every row to its nearest mode (ties → lowest cluster id)
    2. refill any emptied cluster with the row farthest from its own mode
       (ties → lowest row id), taken from a cluster of two or more rows
    3. recompute each mode column-wise as the cluster's most frequent
       category (ties → lowest category index)
    4. record total cost and number of reassigned rows; stop when no row
       moved or after ``max_iter`` iterations

Every step can only lower the total dissimilarity, so the cost trace is
non-increasing; ``fit`` asserts this.

Author: [Your Name]
License: MIT
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_K, DEFAULT_MAX_ITER
from .dataset import MISSING, CategoricalTable
from .errors import ArgumentError, InitializationError, StateError
from .seeding import derive_seed, make_rng

logger = logging.getLogger(__name__)

INIT_METHODS = ('random', 'huang')


@dataclass(frozen=True, eq=False)
class ClusterModel:
    """Fitted K-modes state (immutable)."""

    k: int
    modes: np.ndarray
    """Shape (k, n_features), category codes"""

    assignments: np.ndarray
    """Cluster id per training row"""

    cost_trace: Tuple[int, ...]
    """Total dissimilarity after each iteration"""

    moves_trace: Tuple[int, ...]
    """Rows that changed cluster in each iteration"""

    iterations_run: int
    seed: int
    max_iter: int = DEFAULT_MAX_ITER
    init: str = 'random'
    feature_names: Tuple[str, ...] = ()
    vocabularies: Tuple[Tuple[str, ...], ...] = ()

    @property
    def cost(self) -> int:
        """Final total dissimilarity"""
        return self.cost_trace[-1] if self.cost_trace else 0

    @property
    def converged(self) -> bool:
        return bool(self.moves_trace) and self.moves_trace[-1] == 0

    @property
    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)

    def decoded_modes(self) -> List[List[str]]:
        """Modes as category strings."""
        return [
            [self.vocabularies[j][v] for j, v in enumerate(mode)]
            for mode in self.modes.tolist()
        ]


@dataclass(frozen=True)
class ClusterNaming:
    """Majority-vote names for the clusters of a ClusterModel."""

    mapping: Dict[int, str]
    purity: Dict[int, float]
    sizes: Dict[int, int] = field(default_factory=dict)
    warnings: Tuple[str, ...] = ()

    def summary(self) -> str:
        lines = [f"{'cluster':>8}  {'size':>6}  {'purity':>6}  label"]
        for cid in sorted(self.mapping):
            lines.append(
                f"{cid:>8}  {self.sizes.get(cid, 0):>6}  {self.purity[cid]:>6.2f}  {self.mapping[cid]}"
            )
        lines.extend(f"warning: {w}" for w in self.warnings)
        return '\n'.join(lines)


# ═══════════════════════════════════════════════════════════════════════════════
# DISSIMILARITY
# ═══════════════════════════════════════════════════════════════════════════════

def dissimilarity(a: Sequence[int], b: Sequence[int]) -> int:
    """Simple matching: number of positions where ``a`` and ``b`` differ."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ArgumentError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return int(np.count_nonzero(a != b))


def _distances(cells: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Shape (n_rows, k) matching dissimilarities."""
    return (cells[:, np.newaxis, :] != modes[np.newaxis, :, :]).sum(axis=2)


def _column_modes(cells: np.ndarray, vocab_sizes: Sequence[int]) -> np.ndarray:
    """Per-column most frequent code (ties → lowest code)."""
    return np.array(
        [np.argmax(np.bincount(cells[:, j], minlength=vocab_sizes[j])) for j in range(cells.shape[1])],
        dtype=np.int64,
    )


# ═══════════════════════════════════════════════════════════════════════════════
# INITIALISATION
# ═══════════════════════════════════════════════════════════════════════════════

def _distinct_rows(cells: np.ndarray) -> np.ndarray:
    """Index of the first occurrence of each distinct row, ascending."""
    _, first = np.unique(cells, axis=0, return_index=True)
    return np.sort(first)


def _init_random(cells: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    distinct = _distinct_rows(cells)
    if distinct.size < k:
        raise InitializationError(
            f"k={k} exceeds the {distinct.size} distinct records", stage='cluster'
        )
    chosen = np.sort(rng.choice(distinct.size, size=k, replace=False))
    return cells[distinct[chosen]].copy()


def _init_huang(
    cells: np.ndarray, k: int, rng: np.random.Generator, vocab_sizes: Sequence[int]
) -> np.ndarray:
    """
    Frequency-based initialisation.

    Each provisional mode draws its categories column-wise with
    probability proportional to the category frequency, then is replaced
    by the closest record not already used as a mode.
    """
    distinct = _distinct_rows(cells)
    if distinct.size < k:
        raise InitializationError(
            f"k={k} exceeds the {distinct.size} distinct records", stage='cluster'
        )
    n_features = cells.shape[1]
    modes = np.empty((k, n_features), dtype=np.int64)
    for j in range(n_features):
        freq = np.bincount(cells[:, j], minlength=vocab_sizes[j]).astype(float)
        modes[:, j] = rng.choice(len(freq), size=k, p=freq / freq.sum())

    candidates = cells[distinct]
    taken = np.zeros(distinct.size, dtype=bool)
    for c in range(k):
        dist = (candidates != modes[c]).sum(axis=1)
        dist[taken] = n_features + 1
        pick = int(np.argmin(dist))
        taken[pick] = True
        modes[c] = candidates[pick]
    return modes


# ═══════════════════════════════════════════════════════════════════════════════
# FITTING
# ═══════════════════════════════════════════════════════════════════════════════

def _refill_empty(
    assignments: np.ndarray, row_dist: np.ndarray, k: int
) -> np.ndarray:
    """Give each empty cluster the farthest row of a cluster with ≥ 2 rows."""
    assignments = assignments.copy()
    row_dist = row_dist.copy()
    for c in range(k):
        sizes = np.bincount(assignments, minlength=k)
        if sizes[c] > 0:
            continue
        donors = sizes[assignments] >= 2
        candidate_dist = np.where(donors, row_dist, -1)
        row = int(np.argmax(candidate_dist))
        logger.debug("cluster %d emptied; refilled with row %d", c, row)
        assignments[row] = c
        row_dist[row] = 0
    return assignments


def fit(
    table: CategoricalTable,
    k: int = DEFAULT_K,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    init: str = 'random',
) -> ClusterModel:
    """
    Cluster the rows of ``table`` into ``k`` groups.

    Parameters
    ----------
    table : CategoricalTable
        Records without missing cells (labels, if any, are ignored)
    k : int
        Number of clusters (7 for the dosha scheme)
    seed : int
        Seed for the initial mode draw
    max_iter : int
        Iteration cap (default 100)
    init : str
        'random': k distinct records drawn uniformly;
        'huang': frequency-based draw snapped to the nearest records

    Returns
    -------
    ClusterModel
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ArgumentError(f"k must be a positive integer, got {k!r}")
    if max_iter < 1:
        raise ArgumentError(f"max_iter must be positive, got {max_iter}")
    if init not in INIT_METHODS:
        raise ArgumentError(f"init must be one of {INIT_METHODS}")
    if np.any(table.cells == MISSING):
        raise StateError("table has missing cells; impute first", stage='cluster')
    if k > table.row_count:
        raise InitializationError(
            f"k={k} exceeds the {table.row_count} rows", stage='cluster'
        )

    cells = table.cells
    vocab_sizes = table.vocabulary_sizes
    rng = make_rng(seed)
    if init == 'huang':
        modes = _init_huang(cells, k, rng, vocab_sizes)
    else:
        modes = _init_random(cells, k, rng)

    n = table.row_count
    assignments = np.full(n, -1, dtype=np.int64)
    cost_trace: List[int] = []
    moves_trace: List[int] = []

    for iteration in range(1, max_iter + 1):
        dist = _distances(cells, modes)
        new_assign = np.argmin(dist, axis=1)
        row_dist = dist[np.arange(n), new_assign]
        if np.bincount(new_assign, minlength=k).min() == 0:
            new_assign = _refill_empty(new_assign, row_dist, k)

        moves = int(np.count_nonzero(new_assign != assignments))
        assignments = new_assign

        for c in range(k):
            members = cells[assignments == c]
            modes[c] = _column_modes(members, vocab_sizes)

        total = int(_distances(cells, modes)[np.arange(n), assignments].sum())
        if cost_trace:
            assert total <= cost_trace[-1], "k-modes cost increased"
        cost_trace.append(total)
        moves_trace.append(moves)
        logger.debug("iteration %d/%d: cost %d, moves %d", iteration, max_iter, total, moves)
        if moves == 0:
            break

    modes.setflags(write=False)
    assignments.setflags(write=False)
    return ClusterModel(
        k=int(k),
        modes=modes,
        assignments=assignments,
        cost_trace=tuple(cost_trace),
        moves_trace=tuple(moves_trace),
        iterations_run=len(cost_trace),
        seed=int(seed),
        max_iter=int(max_iter),
        init=init,
        feature_names=table.column_names,
        vocabularies=table.vocabularies,
    )


def fit_best(
    table: CategoricalTable,
    k: int = DEFAULT_K,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    restarts: int = 1,
    init: str = 'random',
) -> ClusterModel:
    """
    Run ``restarts`` independent fits and keep the lowest final cost.

    Restart ``r`` uses ``derive_seed(seed, f"kmodes/restart={r}")``; a
    single restart uses ``seed`` itself. Ties keep the earliest restart.
    """
    if restarts < 1:
        raise ArgumentError(f"restarts must be at least 1, got {restarts}")
    if restarts == 1:
        return fit(table, k, seed, max_iter, init)

    best: Optional[ClusterModel] = None
    for r in range(restarts):
        model = fit(table, k, derive_seed(seed, f"kmodes/restart={r}"), max_iter, init)
        logger.info("restart %d/%d: cost %d after %d iterations", r + 1, restarts, model.cost, model.iterations_run)
        if best is None or model.cost < best.cost:
            best = model
    return best


def cost_curve(
    table: CategoricalTable,
    ks: Sequence[int],
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
) -> Dict[int, int]:
    """Final cost per k (elbow inspection)."""
    return {int(k): fit(table, k, seed, max_iter).cost for k in ks}


# ═══════════════════════════════════════════════════════════════════════════════
# PREDICTION
# ═══════════════════════════════════════════════════════════════════════════════

def predict(model: ClusterModel, row: Sequence[int]) -> int:
    """
    Nearest mode for one encoded row (ties → lowest cluster id).

    Negative codes (MISSING / UNSEEN) never equal a mode entry, so they
    count as a mismatch against every mode.
    """
    row = np.asarray(row, dtype=np.int64)
    if row.shape != (model.modes.shape[1],):
        raise ArgumentError(
            f"row has {row.size} cells, model expects {model.modes.shape[1]}"
        )
    return int(np.argmin((model.modes != row[np.newaxis, :]).sum(axis=1)))


def predict_batch(model: ClusterModel, table: CategoricalTable) -> np.ndarray:
    """Nearest mode for every row of ``table``."""
    if table.column_count != model.modes.shape[1]:
        raise ArgumentError(
            f"table has {table.column_count} columns, model expects {model.modes.shape[1]}"
        )
    return np.argmin(_distances(table.cells, model.modes), axis=1)


def cost(model: ClusterModel, table: CategoricalTable) -> int:
    """Total dissimilarity of ``table`` rows to their nearest modes."""
    if table.column_count != model.modes.shape[1]:
        raise ArgumentError(
            f"table has {table.column_count} columns, model expects {model.modes.shape[1]}"
        )
    if table.row_count == 0:
        return 0
    return int(_distances(table.cells, model.modes).min(axis=1).sum())


# ═══════════════════════════════════════════════════════════════════════════════
# NAMING
# ═══════════════════════════════════════════════════════════════════════════════

def name_clusters(
    model: ClusterModel,
    labels: Sequence[int],
    label_names: Sequence[str],
) -> ClusterNaming:
    """
    Name each cluster after its majority label.

    Parameters
    ----------
    model : ClusterModel
        Fitted model
    labels : sequence of int
        Class index of every training row (aligned with model.assignments)
    label_names : sequence of str
        Class vocabulary (the seven dosha names)

    Returns
    -------
    ClusterNaming
        Majority label per cluster (ties → lexicographically smallest
        name) and the majority share as purity. Empty clusters are left
        out of the mapping and reported in ``warnings``.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape[0] != model.assignments.shape[0]:
        raise ArgumentError(
            f"{labels.shape[0]} labels for {model.assignments.shape[0]} clustered rows"
        )

    mapping: Dict[int, str] = {}
    purity: Dict[int, float] = {}
    sizes: Dict[int, int] = {}
    notes: List[str] = []
    for c in range(model.k):
        members = labels[model.assignments == c]
        if members.size == 0:
            message = f"cluster {c} is empty and has no name"
            notes.append(message)
            warnings.warn(message, UserWarning, stacklevel=2)
            continue
        counts = np.bincount(members, minlength=len(label_names))
        top = counts.max()
        name = min(label_names[i] for i in np.flatnonzero(counts == top))
        mapping[c] = name
        purity[c] = float(top / members.size)
        sizes[c] = int(members.size)
    return ClusterNaming(mapping=mapping, purity=purity, sizes=sizes, warnings=tuple(notes))


def positional_naming(model: ClusterModel, label_names: Sequence[str]) -> ClusterNaming:
    """Cluster c → label_names[c], for tables without reference labels."""
    if model.k > len(label_names):
        raise ArgumentError(f"{model.k} clusters but only {len(label_names)} label names")
    sizes = model.cluster_sizes
    return ClusterNaming(
        mapping={c: label_names[c] for c in range(model.k)},
        purity={c: 1.0 for c in range(model.k)},
        sizes={c: int(sizes[c]) for c in range(model.k)},
    )


def apply_naming(
    model: ClusterModel, naming: ClusterNaming, label_names: Sequence[str]
) -> np.ndarray:
    """Per-row class index into ``label_names`` from cluster assignments."""
    lookup = {name: i for i, name in enumerate(label_names)}
    per_cluster = np.array(
        [lookup[naming.mapping[c]] if c in naming.mapping else -1 for c in range(model.k)],
        dtype=np.int64,
    )
    labels = per_cluster[model.assignments]
    if np.any(labels < 0):
        raise StateError("some rows belong to an unnamed cluster", stage='label')
    return labels
