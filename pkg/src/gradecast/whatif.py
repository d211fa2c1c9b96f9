"""Criteria-improvement advice: minimal score increases that flip a predicted
fail into a pass.

The search is a grid walk rather than threshold analysis, so it works against
any predictor exposing `predict`; the step doubles as the advice granularity.
Improvements are increase-only (every criterion is better when higher) and bow
to per-feature caps. Depth 1 searches single criteria; depth 2 additionally
searches pairs, minimizing the summed increase. No monotonicity is assumed:
candidate grids are enumerated exhaustively with early exits that never skip a
cheaper combination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .cart import Prediction, Tree, predict
from .errors import ConfigError


@dataclass(frozen=True)
class WhatIfConfig:
    step: float = 1.0
    caps: tuple[float, ...] | None = None  # None = 100 per feature
    mutable: tuple[int, ...] | None = None  # None = every feature
    depth: int = 1

    def resolve(self, n_features: int, x: Sequence[float]) -> tuple[tuple[float, ...], tuple[int, ...]]:
        """Validate against a concrete query; returns (caps, mutable indices)."""
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ConfigError(f"grid step must be a positive finite number, got {self.step}")
        if self.depth not in (1, 2):
            raise ConfigError(f"combination depth must be 1 or 2, got {self.depth}")
        caps = self.caps if self.caps is not None else tuple(100.0 for _ in range(n_features))
        if len(caps) != n_features:
            raise ConfigError(f"expected {n_features} caps, got {len(caps)}")
        mutable = self.mutable if self.mutable is not None else tuple(range(n_features))
        if len(set(mutable)) != len(mutable):
            raise ConfigError("mutable feature indices must be distinct")
        for i in mutable:
            if not 0 <= i < n_features:
                raise ConfigError(f"mutable feature index {i} out of range")
            if not math.isfinite(caps[i]):
                raise ConfigError(f"cap for feature {i} must be finite")
            if caps[i] < x[i]:
                raise ConfigError(
                    f"cap {caps[i]} for feature {i} is below the current value {x[i]}"
                )
        return tuple(float(c) for c in caps), tuple(sorted(mutable))


@dataclass(frozen=True)
class Counterfactual:
    """One suggested improvement: per-feature deltas and the flipped prediction."""

    deltas: tuple[float, ...]
    prediction: Prediction
    total: float

    def changed_features(self) -> tuple[int, ...]:
        return tuple(i for i, d in enumerate(self.deltas) if d > 0)


@dataclass(frozen=True)
class WhatIfResult:
    suggestions: tuple[Counterfactual, ...]
    reachable: bool
    already_pass: bool
    base: Prediction


def _apply(x: Sequence[float], deltas: dict[int, float]) -> list[float]:
    out = list(x)
    for i, d in deltas.items():
        out[i] = out[i] + d
    return out


def _grid_deltas(current: float, cap: float, step: float):
    """Yield step, 2*step, ... while current + delta stays within the cap."""
    m = 1
    while True:
        delta = m * step
        if current + delta > cap:
            return
        yield delta
        m += 1


def _min_single(tree: Tree, x: Sequence[float], i: int, cap: float, step: float) -> tuple[float, Prediction] | None:
    for delta in _grid_deltas(x[i], cap, step):
        pred = predict(tree, _apply(x, {i: delta}))
        if pred.label == 1:
            return delta, pred
    return None


def _min_pair(
    tree: Tree,
    x: Sequence[float],
    i: int,
    j: int,
    caps: tuple[float, ...],
    step: float,
) -> tuple[float, float, Prediction] | None:
    """Minimal-total (delta_i, delta_j), both strictly positive.

    Among equal totals the smallest delta on the lower-indexed feature wins
    (scan order: delta_i ascending, then delta_j ascending).
    """
    best: tuple[float, float, Prediction] | None = None
    best_total = math.inf
    for di in _grid_deltas(x[i], caps[i], step):
        if di + step >= best_total:
            break
        for dj in _grid_deltas(x[j], caps[j], step):
            if di + dj >= best_total:
                break
            pred = predict(tree, _apply(x, {i: di, j: dj}))
            if pred.label == 1:
                best = (di, dj, pred)
                best_total = di + dj
                break
    return best


def suggest(tree: Tree, x: Sequence[float], config: WhatIfConfig = WhatIfConfig()) -> WhatIfResult:
    """Counterfactual suggestions for a feature vector, cheapest first.

    Already-passing inputs return the single zero-delta suggestion. Otherwise
    each mutable feature contributes its minimal flipping grid delta (if one
    exists under the cap); at depth 2 every mutable pair contributes its
    minimal-total combination with both deltas positive. Sorted ascending by
    total, ties by involved feature indices.
    """
    values = [float(v) for v in x]
    caps, mutable = config.resolve(tree.n_features, values)
    base = predict(tree, values)
    zeros = tuple(0.0 for _ in range(tree.n_features))
    if base.label == 1:
        cf = Counterfactual(deltas=zeros, prediction=base, total=0.0)
        return WhatIfResult((cf,), reachable=True, already_pass=True, base=base)

    found: list[tuple[tuple[int, ...], Counterfactual]] = []
    for i in mutable:
        hit = _min_single(tree, values, i, caps[i], config.step)
        if hit is not None:
            delta, pred = hit
            deltas = tuple(delta if k == i else 0.0 for k in range(tree.n_features))
            found.append(((i,), Counterfactual(deltas, pred, delta)))
    if config.depth == 2:
        for a in range(len(mutable)):
            for b in range(a + 1, len(mutable)):
                i, j = mutable[a], mutable[b]
                hit = _min_pair(tree, values, i, j, caps, config.step)
                if hit is not None:
                    di, dj, pred = hit
                    deltas = tuple(
                        di if k == i else dj if k == j else 0.0
                        for k in range(tree.n_features)
                    )
                    found.append(((i, j), Counterfactual(deltas, pred, di + dj)))
    found.sort(key=lambda item: (item[1].total, item[0]))
    suggestions = tuple(cf for _, cf in found)
    return WhatIfResult(
        suggestions, reachable=bool(suggestions), already_pass=False, base=base
    )


def rank_criteria(
    tree: Tree, x: Sequence[float], config: WhatIfConfig = WhatIfConfig()
) -> list[tuple[int, float | None]]:
    """Per-feature minimal flipping delta, cheapest first.

    The depth-1 projection of `suggest`: one (feature index, delta) entry per
    mutable feature. Features that cannot flip the outcome under their cap come
    last, marked with delta None. Already-passing inputs list every mutable
    feature with delta 0.
    """
    values = [float(v) for v in x]
    caps, mutable = config.resolve(tree.n_features, values)
    base = predict(tree, values)
    if base.label == 1:
        return [(i, 0.0) for i in mutable]
    reachable: list[tuple[int, float]] = []
    unreachable: list[tuple[int, None]] = []
    for i in mutable:
        hit = _min_single(tree, values, i, caps[i], config.step)
        if hit is None:
            unreachable.append((i, None))
        else:
            reachable.append((i, hit[0]))
    reachable.sort(key=lambda item: (item[1], item[0]))
    return reachable + unreachable  # type: ignore[return-value]


def render_rows(
    result: WhatIfResult, x: Sequence[float], feature_names: Sequence[str]
) -> list[dict]:
    """Flatten a WhatIfResult into table rows shared by the CLI and service.

    Columns: rank (1-based suggestion number), feature, current, required,
    delta, total, pass_probability. The zero-delta suggestion renders as a
    single row with feature None.
    """
    rows: list[dict] = []
    for rank, cf in enumerate(result.suggestions, start=1):
        changed = cf.changed_features()
        if not changed:
            rows.append(
                {
                    "rank": rank,
                    "feature": None,
                    "current": None,
                    "required": None,
                    "delta": 0.0,
                    "total": 0.0,
                    "pass_probability": cf.prediction.pass_probability,
                }
            )
            continue
        for i in changed:
            rows.append(
                {
                    "rank": rank,
                    "feature": feature_names[i],
                    "current": float(x[i]),
                    "required": float(x[i]) + cf.deltas[i],
                    "delta": cf.deltas[i],
                    "total": cf.total,
                    "pass_probability": cf.prediction.pass_probability,
                }
            )
    return rows
