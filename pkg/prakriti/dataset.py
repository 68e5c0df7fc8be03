"""
Prakriti Dataset Module
=======================

Load, validate, impute, encode and split categorical tabular data.

A ``CategoricalTable`` stores every column as small integer codes into a
per-column vocabulary (first-appearance order), plus an optional label
vector with its own vocabulary (normally the seven dosha names). Tables
are immutable: every operation returns a new table.

Cell markers
------------
MISSING (-1)
    The cell was empty / a missing token in the source file.
UNSEEN (-2)
    The category string is not in a frozen vocabulary (only produced by
    ``conform`` when re-encoding new data against a trained schema).

Author: [Your Name]
License: MIT
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .config import DEFAULT_LABEL_COLUMN, DEFAULT_MISSING_TOKENS
from .errors import ArgumentError, ImputationError, IngestError, SchemaError
from .seeding import make_rng

logger = logging.getLogger(__name__)

MISSING = -1
UNSEEN = -2

ColumnRef = Union[int, str]


@dataclass(frozen=True)
class IngestOptions:
    """How to read a CSV file into a CategoricalTable."""

    label_column: Optional[str] = DEFAULT_LABEL_COLUMN
    """Column holding the class; None when the file has no labels"""

    missing_tokens: Tuple[str, ...] = DEFAULT_MISSING_TOKENS
    """Cell values treated as missing (compared after stripping whitespace)"""

    label_names: Optional[Tuple[str, ...]] = None
    """
    Fixed label vocabulary. When given, labels are encoded against it
    (unknown label → IngestError); otherwise the vocabulary is built in
    first-appearance order.
    """

    require_label: bool = False
    """Raise SchemaError when label_column is not in the header"""


@dataclass(frozen=True, eq=False)
class CategoricalTable:
    """
    Column-oriented table of category-encoded records.

    Attributes
    ----------
    column_names : tuple of str
        Unique feature names in column order
    vocabularies : tuple of tuple of str
        Per column, the distinct category strings; a cell value ``v >= 0``
        decodes to ``vocabularies[j][v]``
    cells : np.ndarray
        Shape (row_count, column_count), int64 codes or MISSING / UNSEEN
    labels : np.ndarray, optional
        Per-row class index into ``label_names``
    label_names : tuple of str, optional
        Class vocabulary
    row_ids : np.ndarray
        Position of each row in the table it was first loaded / generated as
    """

    column_names: Tuple[str, ...]
    vocabularies: Tuple[Tuple[str, ...], ...]
    cells: np.ndarray
    labels: Optional[np.ndarray] = None
    label_names: Optional[Tuple[str, ...]] = None
    row_ids: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int64)
        if cells.ndim != 2:
            raise SchemaError(f"cells must be a 2-D matrix, got {cells.ndim} dimensions")
        n_rows, n_cols = cells.shape

        if n_cols != len(self.column_names):
            raise SchemaError(
                f"cells have {n_cols} columns but {len(self.column_names)} names were given"
            )
        if len(self.vocabularies) != n_cols:
            raise SchemaError("one vocabulary per column is required")
        if len(set(self.column_names)) != n_cols:
            raise SchemaError("column names must be unique")
        for name, vocab in zip(self.column_names, self.vocabularies):
            if len(set(vocab)) != len(vocab):
                raise SchemaError(f"vocabulary of column '{name}' has duplicate entries")
        if n_rows:
            sizes = np.array([len(v) for v in self.vocabularies], dtype=np.int64)
            if np.any(cells >= sizes[np.newaxis, :]):
                raise SchemaError("cell code outside its column vocabulary")
            if np.any(cells < UNSEEN):
                raise SchemaError("negative cell code that is not a marker")

        labels = None
        label_names = None
        if self.labels is not None:
            if self.label_names is None:
                raise SchemaError("labels require label_names")
            label_names = tuple(self.label_names)
            labels = np.array(self.labels, dtype=np.int64).reshape(-1)
            if labels.shape[0] != n_rows:
                raise SchemaError(
                    f"label vector has {labels.shape[0]} entries for {n_rows} rows"
                )
            if labels.size and (labels.min() < 0 or labels.max() >= len(label_names)):
                raise SchemaError("label index outside the label vocabulary")
            labels.setflags(write=False)

        row_ids = (
            np.arange(n_rows, dtype=np.int64)
            if self.row_ids is None
            else np.array(self.row_ids, dtype=np.int64).reshape(-1)
        )
        if row_ids.shape[0] != n_rows:
            raise SchemaError("row_ids length must equal row_count")

        cells.setflags(write=False)
        row_ids.setflags(write=False)
        object.__setattr__(self, 'column_names', tuple(self.column_names))
        object.__setattr__(self, 'vocabularies', tuple(tuple(v) for v in self.vocabularies))
        object.__setattr__(self, 'cells', cells)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'label_names', label_names)
        object.__setattr__(self, 'row_ids', row_ids)

    # ═══════════════════════════════════════════════════════════════════════
    # DERIVED PROPERTIES
    # ═══════════════════════════════════════════════════════════════════════

    @property
    def row_count(self) -> int:
        return int(self.cells.shape[0])

    @property
    def column_count(self) -> int:
        return int(self.cells.shape[1])

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    @property
    def class_count(self) -> int:
        return len(self.label_names) if self.label_names is not None else 0

    @property
    def missing_count(self) -> int:
        return int(np.count_nonzero(self.cells == MISSING))

    @property
    def has_missing(self) -> bool:
        return self.missing_count > 0

    @property
    def vocabulary_sizes(self) -> Tuple[int, ...]:
        return tuple(len(v) for v in self.vocabularies)

    # ═══════════════════════════════════════════════════════════════════════
    # ENCODING
    # ═══════════════════════════════════════════════════════════════════════

    def column_index(self, column: ColumnRef) -> int:
        """Resolve a column name or index to an index."""
        if isinstance(column, (int, np.integer)):
            if not 0 <= column < self.column_count:
                raise ArgumentError(f"column index {column} out of range")
            return int(column)
        try:
            return self.column_names.index(column)
        except ValueError:
            raise ArgumentError(f"unknown column '{column}'") from None

    def encode(self, column: ColumnRef, category: str) -> int:
        """Category string → code, UNSEEN when not in the vocabulary."""
        vocab = self.vocabularies[self.column_index(column)]
        try:
            return vocab.index(category)
        except ValueError:
            return UNSEEN

    def decode(self, column: ColumnRef, code: int) -> Optional[str]:
        """Code → category string; None for MISSING / UNSEEN."""
        if code < 0:
            return None
        return self.vocabularies[self.column_index(column)][code]

    # ═══════════════════════════════════════════════════════════════════════
    # DERIVED TABLES
    # ═══════════════════════════════════════════════════════════════════════

    def take_rows(self, indices: Sequence[int]) -> 'CategoricalTable':
        """Rows at ``indices`` (in that order), same schema."""
        idx = np.asarray(indices, dtype=np.int64)
        return CategoricalTable(
            column_names=self.column_names,
            vocabularies=self.vocabularies,
            cells=self.cells[idx],
            labels=None if self.labels is None else self.labels[idx],
            label_names=self.label_names,
            row_ids=self.row_ids[idx],
        )

    def select_columns(self, columns: Sequence[ColumnRef]) -> 'CategoricalTable':
        """Keep ``columns`` in the order given."""
        idx = [self.column_index(c) for c in columns]
        return CategoricalTable(
            column_names=tuple(self.column_names[j] for j in idx),
            vocabularies=tuple(self.vocabularies[j] for j in idx),
            cells=self.cells[:, np.asarray(idx, dtype=np.int64)],
            labels=self.labels,
            label_names=self.label_names,
            row_ids=self.row_ids,
        )

    def with_labels(self, labels: Sequence[int], label_names: Sequence[str]) -> 'CategoricalTable':
        """Same features, new label vector."""
        return CategoricalTable(
            column_names=self.column_names,
            vocabularies=self.vocabularies,
            cells=self.cells,
            labels=np.asarray(labels, dtype=np.int64),
            label_names=tuple(label_names),
            row_ids=self.row_ids,
        )

    def equals(self, other: 'CategoricalTable') -> bool:
        """Structural equality (schema, cells, labels, row ids)."""
        if (
            self.column_names != other.column_names
            or self.vocabularies != other.vocabularies
            or self.label_names != other.label_names
            or self.cells.shape != other.cells.shape
        ):
            return False
        if (self.labels is None) != (other.labels is None):
            return False
        labels_equal = self.labels is None or np.array_equal(self.labels, other.labels)
        return (
            labels_equal
            and np.array_equal(self.cells, other.cells)
            and np.array_equal(self.row_ids, other.row_ids)
        )

    def to_frame(self, label_column: Optional[str] = DEFAULT_LABEL_COLUMN) -> pd.DataFrame:
        """Decoded pandas DataFrame (markers become empty strings)."""
        data: Dict[str, List[str]] = {}
        for j, name in enumerate(self.column_names):
            vocab = np.array(self.vocabularies[j] + ('',), dtype=object)
            codes = self.cells[:, j]
            data[name] = vocab[np.where(codes >= 0, codes, len(vocab) - 1)].tolist()
        if self.labels is not None and label_column is not None:
            names = np.array(self.label_names, dtype=object)
            data[label_column] = names[self.labels].tolist()
        return pd.DataFrame(data, columns=list(data.keys()))


@dataclass(frozen=True, eq=False)
class SplitPair:
    """Disjoint train/test partition of one table."""

    train: CategoricalTable
    test: CategoricalTable
    seed: int
    test_fraction: float


# ═══════════════════════════════════════════════════════════════════════════════
# INGESTION
# ═══════════════════════════════════════════════════════════════════════════════

def _read_records(path: str) -> Tuple[List[str], List[List[str]]]:
    """Header and data rows via the RFC 4180 reader, with structural checks."""
    try:
        with open(path, newline='', encoding='utf-8-sig') as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise SchemaError(f"{path}: empty file (no header)")
            header = [h.strip() for h in header]
            seen = set()
            for name in header:
                if name in seen:
                    raise SchemaError(f"{path}: duplicate header name '{name}'")
                seen.add(name)

            rows = []
            for record in reader:
                if not record:
                    continue  # blank line
                if len(record) != len(header):
                    raise IngestError(
                        f"{path}: ragged row at line {reader.line_num} "
                        f"({len(record)} cells, header has {len(header)})"
                    )
                rows.append([cell.strip() for cell in record])
    except UnicodeDecodeError as exc:
        raise IngestError(f"{path}: not valid UTF-8 ({exc})") from exc
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    return header, rows


def _factorize(values: pd.Series, missing: set) -> Tuple[np.ndarray, Tuple[str, ...]]:
    """First-appearance codes, MISSING for missing tokens."""
    masked = values.where(~values.isin(missing))
    codes, uniques = pd.factorize(masked, use_na_sentinel=True)
    return codes.astype(np.int64), tuple(str(u) for u in uniques)


def load_csv(path: str, options: Optional[IngestOptions] = None) -> CategoricalTable:
    """
    Read a categorical CSV file.

    Parameters
    ----------
    path : str
        UTF-8 comma-separated file (a leading byte-order mark is dropped),
        first line is the header
    options : IngestOptions, optional
        Label column and missing-token set (defaults: 'dosha', {'', 'NA'})

    Returns
    -------
    CategoricalTable
        Vocabularies in first-appearance order, missing cells = MISSING,
        the label column removed from the features and stored as labels

    Raises
    ------
    SchemaError
        Empty file or duplicate header name
    IngestError
        Ragged row (the message names the line) or unreadable file
    """
    options = options or IngestOptions()
    header, rows = _read_records(path)
    missing = set(options.missing_tokens)

    frame = pd.DataFrame(rows, columns=header, dtype=object)
    label_column = options.label_column
    if label_column is not None and label_column not in header:
        if options.require_label:
            raise SchemaError(f"{path}: label column '{label_column}' not in header")
        label_column = None

    feature_names = [h for h in header if h != label_column]
    codes = np.empty((len(rows), len(feature_names)), dtype=np.int64)
    vocabularies = []
    for j, name in enumerate(feature_names):
        codes[:, j], vocab = _factorize(frame[name], missing)
        vocabularies.append(vocab)

    labels = None
    label_names = None
    if label_column is not None:
        raw = frame[label_column]
        if raw.isin(missing).any():
            first = int(np.flatnonzero(raw.isin(missing).to_numpy())[0])
            raise IngestError(f"{path}: missing label at data row {first + 1}")
        if options.label_names is not None:
            label_names = tuple(options.label_names)
            lookup = {name: i for i, name in enumerate(label_names)}
            unknown = sorted(set(raw) - set(lookup))
            if unknown:
                raise IngestError(f"{path}: unknown labels {unknown}")
            labels = raw.map(lookup).to_numpy(dtype=np.int64)
        else:
            labels, label_names = _factorize(raw, set())

    table = CategoricalTable(
        column_names=tuple(feature_names),
        vocabularies=tuple(vocabularies),
        cells=codes,
        labels=labels,
        label_names=label_names,
    )
    logger.info(
        "loaded %s: %d rows x %d features, %d missing cells%s",
        path, table.row_count, table.column_count, table.missing_count,
        f", {table.class_count} classes" if table.has_labels else "",
    )
    return table


def conform(
    table: CategoricalTable,
    column_names: Sequence[str],
    vocabularies: Sequence[Sequence[str]],
    label_names: Optional[Sequence[str]] = None,
) -> CategoricalTable:
    """
    Re-encode ``table`` against a frozen schema.

    Columns are matched by name (extra columns are dropped), categories by
    string; categories outside the frozen vocabulary become UNSEEN. Labels
    are re-encoded against ``label_names`` when both sides have labels.

    Raises
    ------
    SchemaError
        A schema column is absent from ``table`` or a label is unknown
    """
    missing_cols = [c for c in column_names if c not in table.column_names]
    if missing_cols:
        raise SchemaError(f"input lacks model feature columns: {missing_cols[:5]}")

    cells = np.empty((table.row_count, len(column_names)), dtype=np.int64)
    for j, (name, vocab) in enumerate(zip(column_names, vocabularies)):
        src = table.column_index(name)
        lookup = {cat: i for i, cat in enumerate(vocab)}
        mapping = np.array(
            [lookup.get(cat, UNSEEN) for cat in table.vocabularies[src]] + [UNSEEN, MISSING],
            dtype=np.int64,
        )
        codes = table.cells[:, src]
        # marker codes index the two sentinel slots at the end of mapping
        cells[:, j] = mapping[np.where(codes >= 0, codes, len(mapping) + codes)]

    labels = None
    new_label_names = None
    if table.labels is not None:
        if label_names is None:
            labels, new_label_names = table.labels, table.label_names
        else:
            new_label_names = tuple(label_names)
            lookup = {name: i for i, name in enumerate(new_label_names)}
            remap = np.array([lookup.get(n, -1) for n in table.label_names], dtype=np.int64)
            labels = remap[table.labels]
            if np.any(labels < 0):
                unknown = sorted({table.label_names[i] for i in table.labels[labels < 0]})
                raise SchemaError(f"labels not known to the model: {unknown}")

    return CategoricalTable(
        column_names=tuple(column_names),
        vocabularies=tuple(tuple(v) for v in vocabularies),
        cells=cells,
        labels=labels,
        label_names=new_label_names,
        row_ids=table.row_ids,
    )


def write_csv(
    table: CategoricalTable,
    path: str,
    label_column: Optional[str] = DEFAULT_LABEL_COLUMN,
) -> None:
    """Write ``table`` in the loader's dialect (missing cells are empty)."""
    table.to_frame(label_column).to_csv(path, index=False, encoding='utf-8', lineterminator='\n')


def concat_rows(parts: Sequence[CategoricalTable]) -> CategoricalTable:
    """Stack tables that share one schema."""
    if not parts:
        raise ArgumentError("nothing to concatenate")
    first = parts[0]
    for part in parts[1:]:
        if (
            part.column_names != first.column_names
            or part.vocabularies != first.vocabularies
            or part.label_names != first.label_names
        ):
            raise SchemaError("tables to concatenate must share one schema")
    labels = None
    if first.labels is not None:
        labels = np.concatenate([p.labels for p in parts])
    return CategoricalTable(
        column_names=first.column_names,
        vocabularies=first.vocabularies,
        cells=np.concatenate([p.cells for p in parts], axis=0),
        labels=labels,
        label_names=first.label_names,
        row_ids=np.concatenate([p.row_ids for p in parts]),
    )


# ═══════════════════════════════════════════════════════════════════════════════
# IMPUTATION
# ═══════════════════════════════════════════════════════════════════════════════

def column_mode(codes: np.ndarray, vocab_size: int) -> int:
    """Most frequent non-negative code; ties → lowest code, -1 if none."""
    observed = codes[codes >= 0]
    if observed.size == 0:
        return MISSING
    return int(np.argmax(np.bincount(observed, minlength=vocab_size)))


def forward_fill(table: CategoricalTable) -> CategoricalTable:
    """
    Forward-fill missing cells down each column.

    Each missing cell copies the nearest preceding observed cell in its
    column. Leading missing cells (no predecessor) take the column mode over
    observed cells, ties broken by the lowest vocabulary index. The result
    has no MISSING cells; UNSEEN cells are left as they are.

    Raises
    ------
    ImputationError
        A column with missing cells has no observed value at all
    """
    if not table.has_missing:
        return table

    cells = table.cells
    frame = pd.DataFrame(np.where(cells == MISSING, np.nan, cells))
    filled = frame.ffill()

    for j, name in enumerate(table.column_names):
        column = cells[:, j]
        if not np.any(column == MISSING):
            continue
        mode = column_mode(column, len(table.vocabularies[j]))
        if mode == MISSING:
            raise ImputationError(f"column '{name}' is entirely missing", stage='impute')
        filled[j] = filled[j].fillna(mode)

    logger.debug("forward fill replaced %d missing cells", table.missing_count)
    return CategoricalTable(
        column_names=table.column_names,
        vocabularies=table.vocabularies,
        cells=filled.to_numpy(dtype=np.int64),
        labels=table.labels,
        label_names=table.label_names,
        row_ids=table.row_ids,
    )


# ═══════════════════════════════════════════════════════════════════════════════
# SPLITTING
# ═══════════════════════════════════════════════════════════════════════════════

def round_half_up(x: float) -> int:
    """Round to nearest integer, halves away from zero (x >= 0)."""
    return int(math.floor(x + 0.5))


def apportion(total: int, weights: np.ndarray) -> np.ndarray:
    """
    Integer allocation of ``total`` proportional to ``weights``.

    Floors first, then hands out the remainder by largest fractional part
    (ties → lowest index); every share is within 1 of its exact target.
    """
    exact = total * weights / weights.sum()
    base = np.floor(exact).astype(np.int64)
    remainder = total - int(base.sum())
    if remainder > 0:
        order = np.lexsort((np.arange(len(exact)), -(exact - base)))
        base[order[:remainder]] += 1
    return base


def train_test_split(
    table: CategoricalTable,
    test_fraction: float,
    seed: int,
    stratified: bool = False,
) -> SplitPair:
    """
    Seeded random train/test split.

    Parameters
    ----------
    table : CategoricalTable
        Source table
    test_fraction : float
        Share of rows held out, strictly between 0 and 1
    seed : int
        Seed for the PCG64 generator
    stratified : bool
        Keep per-class test counts within 1 of their proportional targets

    Returns
    -------
    SplitPair
        ``test`` has round(row_count * test_fraction) rows (halves up); both
        parts keep their rows in source order

    Notes
    -----
    Unstratified: one permutation of all row positions, the first n_test
    go to test. Stratified: the n_test budget is apportioned over classes
    by largest remainder, then each class draws its share from its own
    permutation (classes in index order, same generator).
    """
    if not 0.0 < test_fraction < 1.0:
        raise ArgumentError(f"test_fraction must be in (0, 1), got {test_fraction}")
    if stratified and not table.has_labels:
        raise ArgumentError("stratified split needs a labelled table")

    n = table.row_count
    n_test = round_half_up(n * test_fraction)
    rng = make_rng(seed)

    if not stratified:
        order = rng.permutation(n)
        test_idx = np.sort(order[:n_test])
    else:
        counts = np.bincount(table.labels, minlength=table.class_count)
        present = np.flatnonzero(counts)
        shares = np.zeros_like(counts)
        if present.size:
            shares[present] = apportion(n_test, counts[present].astype(float))
        chosen = []
        for c in range(table.class_count):
            members = np.flatnonzero(table.labels == c)
            if members.size:
                chosen.append(members[rng.permutation(members.size)[:shares[c]]])
        test_idx = np.sort(np.concatenate(chosen)) if chosen else np.array([], dtype=np.int64)

    mask = np.zeros(n, dtype=bool)
    mask[test_idx] = True
    train_idx = np.flatnonzero(~mask)

    return SplitPair(
        train=table.take_rows(train_idx),
        test=table.take_rows(test_idx),
        seed=int(seed),
        test_fraction=float(test_fraction),
    )
