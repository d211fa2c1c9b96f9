from __future__ import annotations

import numpy as np
import pytest

from gradecast.cart import HyperParams, fit, predict
from gradecast.errors import ConfigError
from gradecast.ingest import FEATURE_NAMES
from gradecast.whatif import WhatIfConfig, rank_criteria, render_rows, suggest
from helpers import random_fitted_tree
from oracles import grid_suggest


@pytest.fixture(scope="module")
def exam_tree():
    """Depth-1 tree: exam_midterm <= 59.5 -> all-fail leaf, else pure pass."""
    X = [(70, 70, 70, 70, 70, 55)] * 6 + [(70, 70, 70, 70, 70, 64)] * 6
    y = [0] * 6 + [1] * 6
    tree = fit(X, y, feature_names=FEATURE_NAMES)
    root = tree.node(0)
    assert (root.feature, root.threshold) == (5, 59.5)
    return tree


@pytest.fixture(scope="module")
def and_tree():
    """Pass needs BOTH features high: no single-feature flip from (3, 3)."""
    X = [(2, 2), (2, 8), (8, 2), (8, 8), (3, 3), (3, 9), (9, 3), (9, 9)]
    y = [0, 0, 0, 1, 0, 0, 0, 1]
    tree = fit(X, y)
    assert all(predict(tree, v).label == lab for v, lab in zip(X, y))
    return tree


class TestSuggestExamples:
    def test_already_pass_single_zero_delta(self, exam_tree):
        x = (70, 70, 70, 70, 70, 80)
        result = suggest(exam_tree, x)
        assert result.already_pass and result.reachable
        assert len(result.suggestions) == 1
        cf = result.suggestions[0]
        assert cf.deltas == (0.0,) * 6
        assert cf.total == 0.0
        assert cf.prediction.label == 1

    def test_exam_gap_of_ten(self, exam_tree):
        x = (70, 70, 70, 70, 70, 50)
        result = suggest(exam_tree, x)
        assert not result.already_pass and result.reachable
        assert len(result.suggestions) == 1
        cf = result.suggestions[0]
        assert cf.changed_features() == (5,)
        assert cf.deltas[5] == 10.0  # first whole-point step beyond 59.5
        assert cf.prediction.pass_probability == 1.0

    def test_unreachable_feature_omitted(self, exam_tree):
        # cap exam at 55: no grid point crosses 59.5
        caps = (100.0,) * 5 + (55.0,)
        result = suggest(exam_tree, (70, 70, 70, 70, 70, 50), WhatIfConfig(caps=caps))
        assert result.suggestions == ()
        assert not result.reachable and not result.already_pass

    def test_pair_needed(self, and_tree):
        result = suggest(and_tree, (3, 3), WhatIfConfig(caps=(20.0, 20.0), depth=2))
        assert result.reachable
        assert all(len(cf.changed_features()) == 2 for cf in result.suggestions)
        best = result.suggestions[0]
        assert best.changed_features() == (0, 1)
        applied = [3 + best.deltas[0], 3 + best.deltas[1]]
        assert predict(and_tree, applied).label == 1

    def test_sorted_by_total_then_features(self):
        rng = np.random.default_rng(53)
        for _ in range(20):
            tree = random_fitted_tree(rng)
            x = tuple(float(v) for v in rng.integers(0, 6, size=tree.n_features))
            result = suggest(
                tree, x, WhatIfConfig(caps=(8.0,) * tree.n_features, depth=2)
            )
            keys = [
                (cf.total, cf.changed_features()) for cf in result.suggestions
            ]
            assert keys == sorted(keys)


class TestSuggestProperties:
    def test_soundness_and_grid_minimality(self):
        rng = np.random.default_rng(59)
        checked = 0
        for _ in range(120):
            tree = random_fitted_tree(rng)
            x = tuple(float(v) for v in rng.integers(0, 6, size=tree.n_features))
            config = WhatIfConfig(caps=(9.0,) * tree.n_features, step=1.0)
            result = suggest(tree, x, config)
            if result.already_pass:
                continue
            for cf in result.suggestions:
                checked += 1
                applied = [v + d for v, d in zip(x, cf.deltas)]
                assert predict(tree, applied).label == 1  # sound
                (i,) = cf.changed_features()
                if cf.deltas[i] > config.step:
                    smaller = list(x)
                    smaller[i] += cf.deltas[i] - config.step
                    assert predict(tree, smaller).label == 0  # minimal on the grid
        assert checked > 10

    @pytest.mark.parametrize("depth", [1, 2])
    def test_matches_grid_oracle(self, depth):
        rng = np.random.default_rng(61 + depth)
        for _ in range(40):
            tree = random_fitted_tree(rng)
            x = tuple(float(v) for v in rng.integers(0, 6, size=tree.n_features))
            caps = (8.0,) * tree.n_features
            mutable = tuple(range(tree.n_features))
            result = suggest(tree, x, WhatIfConfig(caps=caps, depth=depth))
            already, expected = grid_suggest(tree, x, caps, 1.0, mutable, depth)
            assert result.already_pass == already
            if already:
                continue
            got = [
                (cf.changed_features(), {i: cf.deltas[i] for i in cf.changed_features()}, cf.total)
                for cf in result.suggestions
            ]
            assert got == expected

    def test_monotone_under_larger_caps_and_finer_step(self):
        rng = np.random.default_rng(67)
        for _ in range(25):
            tree = random_fitted_tree(rng)
            x = tuple(float(v) for v in rng.integers(0, 6, size=tree.n_features))
            base_cfg = WhatIfConfig(caps=(7.0,) * tree.n_features, step=1.0)
            base = suggest(tree, x, base_cfg)
            if base.already_pass:
                continue
            reachable = {cf.changed_features() for cf in base.suggestions}
            wider = suggest(tree, x, WhatIfConfig(caps=(11.0,) * tree.n_features, step=1.0))
            finer = suggest(tree, x, WhatIfConfig(caps=(7.0,) * tree.n_features, step=0.5))
            assert reachable <= {cf.changed_features() for cf in wider.suggestions}
            assert reachable <= {cf.changed_features() for cf in finer.suggestions}

    def test_caps_and_mutability_respected(self):
        rng = np.random.default_rng(71)
        for _ in range(25):
            tree = random_fitted_tree(rng)
            if tree.n_features < 2:
                continue
            x = tuple(float(v) for v in rng.integers(0, 6, size=tree.n_features))
            caps = tuple(float(v) for v in rng.integers(6, 10, size=tree.n_features))
            mutable = (0,)
            result = suggest(tree, x, WhatIfConfig(caps=caps, mutable=mutable, depth=2))
            for cf in result.suggestions:
                for i, delta in enumerate(cf.deltas):
                    if delta:
                        assert i in mutable
                        assert x[i] + delta <= caps[i]


class TestRankCriteria:
    def test_already_pass_all_zero(self, exam_tree):
        ranking = rank_criteria(exam_tree, (70, 70, 70, 70, 70, 80))
        assert ranking == [(i, 0.0) for i in range(6)]

    def test_exam_first_rest_unreachable(self, exam_tree):
        ranking = rank_criteria(exam_tree, (70, 70, 70, 70, 70, 50))
        assert ranking[0] == (5, 10.0)
        assert ranking[1:] == [(i, None) for i in range(5)]

    def test_consistent_with_oracle_minima(self):
        rng = np.random.default_rng(73)
        for _ in range(30):
            tree = random_fitted_tree(rng)
            x = tuple(float(v) for v in rng.integers(0, 6, size=tree.n_features))
            caps = (8.0,) * tree.n_features
            mutable = tuple(range(tree.n_features))
            ranking = rank_criteria(tree, x, WhatIfConfig(caps=caps))
            already, expected = grid_suggest(tree, x, caps, 1.0, mutable, depth=1)
            if already:
                assert all(delta == 0.0 for _, delta in ranking)
                continue
            expected_minima = {ids[0]: total for ids, _, total in expected}
            got_reachable = {i: d for i, d in ranking if d is not None}
            assert got_reachable == expected_minima
            deltas = [d for _, d in ranking if d is not None]
            assert deltas == sorted(deltas)
            unreachable = [i for i, d in ranking if d is None]
            assert unreachable == sorted(set(range(tree.n_features)) - set(expected_minima))


class TestConfigValidation:
    def test_bad_step(self, exam_tree):
        with pytest.raises(ConfigError):
            suggest(exam_tree, (70,) * 6, WhatIfConfig(step=0.0))

    def test_bad_depth(self, exam_tree):
        with pytest.raises(ConfigError):
            suggest(exam_tree, (70,) * 6, WhatIfConfig(depth=3))

    def test_cap_below_current(self, exam_tree):
        with pytest.raises(ConfigError):
            suggest(exam_tree, (70,) * 6, WhatIfConfig(caps=(60.0,) * 6))

    def test_bad_mutable_index(self, exam_tree):
        with pytest.raises(ConfigError):
            suggest(exam_tree, (70,) * 6, WhatIfConfig(mutable=(9,)))

    def test_wrong_cap_arity(self, exam_tree):
        with pytest.raises(ConfigError):
            suggest(exam_tree, (70,) * 6, WhatIfConfig(caps=(100.0,) * 3))


class TestRenderRows:
    def test_zero_delta_single_row(self, exam_tree):
        x = (70, 70, 70, 70, 70, 80)
        rows = render_rows(suggest(exam_tree, x), x, FEATURE_NAMES)
        assert len(rows) == 1
        assert rows[0]["feature"] is None
        assert rows[0]["delta"] == 0.0

    def test_single_feature_row(self, exam_tree):
        x = (70, 70, 70, 70, 70, 50)
        rows = render_rows(suggest(exam_tree, x), x, FEATURE_NAMES)
        assert len(rows) == 1
        row = rows[0]
        assert row["feature"] == "exam_midterm"
        assert row["current"] == 50.0
        assert row["required"] == 60.0
        assert row["delta"] == 10.0

    def test_pair_emits_two_rows_same_rank(self, and_tree):
        x = (3.0, 3.0)
        result = suggest(and_tree, x, WhatIfConfig(caps=(20.0, 20.0), depth=2))
        rows = render_rows(result, x, ("first", "second"))
        first = [r for r in rows if r["rank"] == 1]
        assert len(first) == 2
        assert {r["feature"] for r in first} == {"first", "second"}
