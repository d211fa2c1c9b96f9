from __future__ import annotations

import numpy as np
import pytest

from gradecast.cart import HyperParams, candidate_thresholds, fit, predict
from helpers import random_fitted_tree, random_int_dataset


def walk_structure(tree):
    """Yield (node, parent) pairs in a root-down walk."""
    stack = [(tree.node(tree.root), None)]
    while stack:
        node, parent = stack.pop()
        yield node, parent
        if not node.is_leaf:
            stack.append((tree.node(node.left), node))
            stack.append((tree.node(node.right), node))


def assert_structural_invariants(tree, X, y, max_depth=None):
    root = tree.node(tree.root)
    fails = sum(1 for v in y if v == 0)
    assert tuple(root.counts) == (fails, len(y) - fails)
    seen = set()
    for node, parent in walk_structure(tree):
        assert node.id not in seen
        seen.add(node.id)
        if parent is not None:
            assert node.depth == parent.depth + 1
        if not node.is_leaf:
            left, right = tree.node(node.left), tree.node(node.right)
            assert left.counts + right.counts == node.counts
    assert seen == {n.id for n in tree.nodes}
    if max_depth is not None:
        assert tree.max_depth() <= max_depth
    # every record routes to a leaf; aggregated leaf tallies match the labels
    leaf_hits = {n.id: [0, 0] for n in tree.leaves()}
    for row, label in zip(X, y):
        pred = predict(tree, row)
        leaf_hits[pred.leaf][label] += 1
    for leaf in tree.leaves():
        assert tuple(leaf.counts) == tuple(leaf_hits[leaf.id])


class TestFitExamples:
    def test_all_pass_is_single_leaf(self):
        tree = fit([(1, 2), (3, 4), (5, 6)], [1, 1, 1])
        assert len(tree.nodes) == 1
        assert tuple(tree.node(0).counts) == (0, 3)
        pred = predict(tree, (9, 9))
        assert pred.label == 1 and pred.pass_probability == 1.0 and pred.path == ()

    def test_forced_depth_one(self):
        tree = fit([(1,), (2,), (3,), (4,)], [0, 0, 1, 1])
        assert tree.max_depth() == 1
        root = tree.node(0)
        assert (root.feature, root.threshold) == (0, 2.5)
        assert tree.node(root.left).impurity == 0.0
        assert tree.node(root.right).impurity == 0.0

    def test_xor_layout_needs_two_levels(self):
        X = [(0, 0), (0, 0), (1, 1), (1, 1), (0, 1), (0, 1), (1, 0), (1, 0)]
        y = [0, 0, 0, 0, 1, 1, 1, 1]
        # brute-force: no single split with majority-vote leaves gets all 8 right
        for j in (0, 1):
            column = [row[j] for row in X]
            for t in candidate_thresholds(column):
                left = [y[i] for i in range(8) if column[i] <= t]
                right = [y[i] for i in range(8) if column[i] > t]
                best_acc = (
                    max(left.count(0), left.count(1))
                    + max(right.count(0), right.count(1))
                ) / 8
                assert best_acc < 1.0
        tree = fit(X, y)
        assert tree.max_depth() == 2
        assert all(predict(tree, row).label == label for row, label in zip(X, y))

    def test_empty_dataset_is_error(self):
        with pytest.raises(ValueError):
            fit([], [])

    def test_label_validation(self):
        with pytest.raises(ValueError):
            fit([(1,), (2,)], [0, 2])

    def test_non_finite_feature_rejected(self):
        with pytest.raises(ValueError):
            fit([(float("nan"),), (1.0,)], [0, 1])


class TestFitProperties:
    def test_preorder_ids(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            tree = random_fitted_tree(rng, max_rows=16)
            assert [n.id for n in tree.nodes] == list(range(len(tree.nodes)))
            for node in tree.nodes:
                if not node.is_leaf:
                    assert node.left == node.id + 1  # pre-order: left child is next
                    assert node.left < node.right

    def test_structural_invariants_random(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            X, y = random_int_dataset(rng, max_rows=14)
            tree = fit(X, y)
            assert_structural_invariants(tree, X, y)

    def test_max_depth_honored(self):
        rng = np.random.default_rng(13)
        for depth in (1, 2, 3):
            for _ in range(10):
                X, y = random_int_dataset(rng, max_rows=14)
                tree = fit(X, y, params=HyperParams(max_depth=depth))
                assert_structural_invariants(tree, X, y, max_depth=depth)

    def test_min_samples_split_makes_small_nodes_leaves(self):
        rng = np.random.default_rng(17)
        for _ in range(15):
            X, y = random_int_dataset(rng, max_rows=14)
            tree = fit(X, y, params=HyperParams(min_samples_split=4))
            for node in tree.nodes:
                if node.counts.total < 4:
                    assert node.is_leaf

    def test_min_samples_leaf_respected(self):
        rng = np.random.default_rng(19)
        for _ in range(15):
            X, y = random_int_dataset(rng, max_rows=14)
            tree = fit(X, y, params=HyperParams(min_samples_leaf=2))
            for leaf in tree.leaves():
                assert leaf.counts.total >= 2

    def test_full_training_accuracy_when_consistent(self):
        rng = np.random.default_rng(23)
        done = 0
        while done < 30:
            X, y = random_int_dataset(rng, max_rows=12)
            by_row = {}
            consistent = True
            for row, label in zip(X, y):
                if by_row.setdefault(row, label) != label:
                    consistent = False
                    break
            if not consistent:
                continue
            done += 1
            tree = fit(X, y)
            assert all(predict(tree, row).label == label for row, label in zip(X, y))

    def test_deterministic(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            X, y = random_int_dataset(rng, max_rows=14)
            assert fit(X, y) == fit(X, y)

    def test_feature_names_default_and_custom(self):
        tree = fit([(1, 2), (3, 4)], [0, 1])
        assert tree.feature_names == ("x0", "x1")
        tree = fit([(1, 2), (3, 4)], [0, 1], feature_names=("a", "b"))
        assert tree.feature_names == ("a", "b")
        with pytest.raises(ValueError):
            fit([(1, 2), (3, 4)], [0, 1], feature_names=("only",))


class TestPredict:
    def test_leaf_fraction_examples(self):
        # leaf tallies (1, 30) and (13, 2): frozen quotient checks
        assert 30 / 31 == pytest.approx(0.967742, abs=1e-6)
        assert 2 / 15 == pytest.approx(0.133333, abs=1e-6)
        X = [(float(i),) for i in range(31)]
        y = [0] + [1] * 30
        tree = fit(X, y, params=HyperParams(min_samples_split=32))
        assert len(tree.nodes) == 1
        pred = predict(tree, (5.0,))
        assert pred.pass_probability == pytest.approx(30 / 31, abs=1e-12)
        assert pred.label == 1

    def test_fail_majority_leaf(self):
        X = [(float(i),) for i in range(15)]
        y = [0] * 13 + [1] * 2
        tree = fit(X, y, params=HyperParams(min_samples_split=16))
        pred = predict(tree, (0.0,))
        assert pred.pass_probability == pytest.approx(2 / 15, abs=1e-12)
        assert pred.label == 0

    def test_exact_tie_predicts_fail(self):
        tree = fit([(1.0,), (2.0,)], [0, 1], params=HyperParams(min_samples_split=3))
        pred = predict(tree, (1.5,))
        assert pred.pass_probability == 0.5
        assert pred.label == 0

    def test_path_records_routing(self):
        tree = fit([(1,), (2,), (3,), (4,)], [0, 0, 1, 1])
        pred = predict(tree, (1.0,))
        assert len(pred.path) == 1
        step = pred.path[0]
        assert (step.node, step.feature, step.threshold, step.went_left) == (0, 0, 2.5, True)
        pred = predict(tree, (9.0,))
        assert pred.path[0].went_left is False

    def test_arity_and_finiteness_checked(self):
        tree = fit([(1, 2), (3, 4)], [0, 1])
        with pytest.raises(ValueError):
            predict(tree, (1.0,))
        with pytest.raises(ValueError):
            predict(tree, (1.0, float("inf")))
