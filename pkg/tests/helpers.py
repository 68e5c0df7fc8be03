"""Table builders shared by the test modules."""

from prakriti.dataset import CategoricalTable


def make_table(cells, labels=None, label_names=None, vocab_size=None, names=None):
    """Small CategoricalTable from integer codes (categories named c0, c1, ...)."""
    n_cols = len(cells[0])
    if vocab_size is None:
        vocab_size = max(max(v for v in row) for row in cells) + 1
    if label_names is None and labels is not None:
        label_names = tuple(f"k{i}" for i in range(max(labels) + 1))
    return CategoricalTable(
        column_names=tuple(names or (f"f{j}" for j in range(n_cols))),
        vocabularies=tuple(tuple(f"c{v}" for v in range(vocab_size)) for _ in range(n_cols)),
        cells=cells,
        labels=labels,
        label_names=label_names,
    )
