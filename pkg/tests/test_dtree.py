"""
Decision Tree Tests
===================

Run with: pytest tests/test_dtree.py -v
"""

import numpy as np
import pytest

from prakriti import dtree
from prakriti.dataset import train_test_split
from prakriti.dtree import TreeNode, TreeParams
from prakriti.errors import ArgumentError, PruneError, StateError
from prakriti.synth import GeneratorSpec, generate

from tests.helpers import make_table


def leaf(cls, counts):
    return TreeNode(majority_class=cls, sample_count=int(sum(counts)), class_counts=np.array(counts))


def accuracy(tree, table):
    return float(np.mean(dtree.predict_batch(tree, table) == table.labels))


# ══════════════════════════════════════════════════════════════════════════════
# ENTROPY AND GAIN TESTS
# ══════════════════════════════════════════════════════════════════════════════

class TestEntropy:
    """Test Shannon entropy and information gain"""

    def test_nine_five(self):
        """[9, 5] has entropy 0.94029 bits"""
        assert dtree.entropy([9, 5]) == pytest.approx(0.94029, abs=1e-5)

    def test_even_split(self):
        """[1, 1] has entropy 1 bit"""
        assert dtree.entropy([1, 1]) == pytest.approx(1.0)

    def test_pure(self):
        """A single class has entropy 0"""
        assert dtree.entropy([0, 7, 0]) == pytest.approx(0.0)

    def test_empty(self):
        """An all-zero count vector is rejected"""
        with pytest.raises(ArgumentError):
            dtree.entropy([0, 0])

    def test_perfect_split_gain(self):
        """A feature equal to the label gains the full parent entropy"""
        table = make_table([[0], [0], [1], [1]], labels=[0, 0, 1, 1])
        assert dtree.information_gain(table, 'f0') == pytest.approx(1.0)

    def test_gain_non_negative(self):
        """Gain is >= 0 on 1,000 random partitions"""
        rng = np.random.default_rng(31)
        for _ in range(1000):
            n = int(rng.integers(2, 30))
            cells = rng.integers(0, 4, size=(n, 1)).tolist()
            labels = rng.integers(0, 3, size=n).tolist()
            table = make_table(cells, labels=labels, vocab_size=4, label_names=('a', 'b', 'c'))
            assert dtree.information_gain(table, 0) >= 0.0

    def test_unlabelled(self):
        """Gain needs labels"""
        with pytest.raises(StateError):
            dtree.information_gain(make_table([[0], [1]]), 0)


# ══════════════════════════════════════════════════════════════════════════════
# GROWTH TESTS
# ══════════════════════════════════════════════════════════════════════════════

class TestFit:
    """Test tree growth"""

    def test_perfect_split(self):
        """One informative column gives a depth-1 tree on that column"""
        table = make_table([[1, 0], [0, 0], [1, 1], [0, 1]], labels=[0, 0, 1, 1])
        tree = dtree.fit(table)
        assert tree.feature == 1
        assert dtree.depth(tree) == 1
        assert dtree.leaf_count(tree) == 2
        assert dtree.node_count(tree) == 3
        assert accuracy(tree, table) == 1.0

    def test_max_depth_zero(self):
        """max_depth 0 gives a single majority leaf"""
        table = make_table([[0], [1], [1]], labels=[1, 0, 1])
        tree = dtree.fit(table, TreeParams(max_depth=0))
        assert tree.is_leaf
        assert tree.majority_class == 1

    def test_gain_tie_lowest_column(self):
        """Equal gains split on the lowest column index"""
        table = make_table([[0, 0], [1, 1]], labels=[0, 1])
        assert dtree.fit(table).feature == 0

    def test_noiseless_training_accuracy(self):
        """Fully grown trees memorise noiseless planted data"""
        spec = GeneratorSpec(rows=300, features=12, informative_features=10, signal=1.0)
        table = generate(spec, seed=4)
        tree = dtree.fit(table)
        assert accuracy(tree, table) == 1.0

    def test_min_samples_split(self):
        """Nodes below the size floor are not split"""
        table = make_table([[0], [1], [0], [1]], labels=[0, 1, 0, 1])
        tree = dtree.fit(table, TreeParams(min_samples_split=5))
        assert tree.is_leaf

    def test_invalid_params(self):
        """Parameter ranges are validated"""
        with pytest.raises(ArgumentError):
            TreeParams(max_depth=-1)
        with pytest.raises(ArgumentError):
            TreeParams(min_samples_split=1)
        with pytest.raises(ArgumentError):
            TreeParams(prune_fraction=1.0)

    def test_unlabelled(self):
        """Fitting needs labels"""
        with pytest.raises(StateError):
            dtree.fit(make_table([[0], [1]]))

    def test_prune_flag_shrinks_tree(self, strong_table):
        """Pruned fits are never larger than unpruned ones on the same rows"""
        split = train_test_split(strong_table, 0.2, seed=3)
        full = dtree.fit(split.train)
        pruned = dtree.fit(strong_table, TreeParams(prune=True), seed=3)
        assert dtree.node_count(pruned) <= dtree.node_count(full)

    def test_prune_skipped_on_tiny_table(self):
        """Too few rows for a holdout warns and keeps the full tree"""
        table = make_table([[0], [1]], labels=[0, 1])
        with pytest.warns(UserWarning, match="pruning skipped"):
            tree = dtree.fit(table, TreeParams(prune=True, prune_fraction=0.1))
        assert tree.feature == 0


# ══════════════════════════════════════════════════════════════════════════════
# PREDICTION TESTS
# ══════════════════════════════════════════════════════════════════════════════

class TestPredict:
    """Test tree descent"""

    def test_unseen_category_uses_node_majority(self):
        """A category without a child returns the node's majority class"""
        table = make_table([[0], [0], [1]], labels=[1, 1, 0], vocab_size=3)
        tree = dtree.fit(table)
        assert dtree.predict(tree, [2]) == 1

    def test_replays_training_rows(self):
        """Rows on a pure training path get that path's class"""
        table = make_table([[0, 1], [1, 0], [1, 1]], labels=[0, 1, 2])
        tree = dtree.fit(table)
        for row, label in zip(table.cells, table.labels):
            assert dtree.predict(tree, row) == label

    def test_width_check(self):
        """Rows of the wrong width are rejected when the width is given"""
        tree = dtree.fit(make_table([[0], [1]], labels=[0, 1]))
        with pytest.raises(ArgumentError):
            dtree.predict(tree, [0, 1], n_features=1)


# ══════════════════════════════════════════════════════════════════════════════
# PRUNING TESTS
# ══════════════════════════════════════════════════════════════════════════════

class TestPrune:
    """Test reduced-error pruning"""

    def test_single_leaf_unchanged(self):
        """A leaf has nothing to prune"""
        tree = leaf(0, [3, 1])
        pruned = dtree.prune(tree, make_table([[0]], labels=[1]))
        assert pruned.is_leaf
        assert pruned.majority_class == 0

    def test_tie_prunes(self):
        """Equal subtree and leaf scores collapse the node"""
        tree = TreeNode(
            majority_class=0,
            sample_count=6,
            class_counts=np.array([2, 2, 2]),
            feature=0,
            children={0: leaf(1, [0, 2, 0]), 1: leaf(2, [0, 0, 2])},
        )
        validation = make_table([[0], [1]], labels=[1, 0], label_names=('a', 'b', 'c'))
        pruned = dtree.prune(tree, validation)
        assert pruned.is_leaf
        assert pruned.majority_class == 0

    def test_useful_split_kept(self):
        """A split that helps on validation rows survives"""
        tree = TreeNode(
            majority_class=0,
            sample_count=4,
            class_counts=np.array([2, 2]),
            feature=0,
            children={0: leaf(0, [2, 0]), 1: leaf(1, [0, 2])},
        )
        validation = make_table([[0], [1], [1]], labels=[0, 1, 1])
        assert not dtree.prune(tree, validation).is_leaf

    def test_input_tree_unchanged(self, strong_table):
        """prune returns a new tree"""
        split = train_test_split(strong_table, 0.3, seed=0)
        tree = dtree.fit(split.train)
        before = dtree.node_count(tree)
        dtree.prune(tree, split.test)
        assert dtree.node_count(tree) == before

    def test_never_lowers_validation_accuracy(self):
        """Pruning keeps or raises validation accuracy over 50 seeded trials"""
        spec = GeneratorSpec(rows=200, features=15, informative_features=6, signal=0.6)
        for seed in range(50):
            table = generate(spec, seed=seed)
            split = train_test_split(table, 0.3, seed=seed)
            tree = dtree.fit(split.train)
            pruned = dtree.prune(tree, split.test)
            assert accuracy(pruned, split.test) >= accuracy(tree, split.test)
            assert dtree.node_count(pruned) <= dtree.node_count(tree)

    def test_empty_validation(self):
        """An empty validation set is a prune error"""
        table = make_table([[0], [1]], labels=[0, 1])
        tree = dtree.fit(table)
        empty = table.take_rows([])
        with pytest.raises(PruneError):
            dtree.prune(tree, empty)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
