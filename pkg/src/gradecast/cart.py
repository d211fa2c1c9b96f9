"""Binary CART classifier, written from scratch.

Greedy recursive binary splitting over axis-aligned thresholds: at each node
every (feature, candidate threshold) pair is scored by the size-weighted mean
child impurity under the active criterion, and the cheapest split wins. The
partition rule is `value <= threshold` goes left. Candidate thresholds are the
midpoints between consecutive distinct sorted values.

Determinism: candidates are scanned feature index ascending, threshold
ascending, and only a strictly cheaper candidate replaces the incumbent, so
ties resolve to the lowest feature index, then the lowest threshold. Gini
costs are computed as a single division of exact integer tallies, which makes
tie comparison exact at any realistic node size.

Nodes are stored in a flat array indexed by id; ids are assigned in pre-order
with the root at 0. A fitted Tree is immutable and safe to share across
threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import ConfigError, ModelFormatError

FORMAT_VERSION = 1

CRITERIA = ("gini", "entropy")


class ClassCounts(NamedTuple):
    """Per-node label tally, ordered (fail, pass)."""

    fail: int
    passed: int

    @property
    def total(self) -> int:
        return self.fail + self.passed

    @property
    def is_pure(self) -> bool:
        return self.fail == 0 or self.passed == 0

    def __add__(self, other):  # type: ignore[override]
        return ClassCounts(self.fail + other[0], self.passed + other[1])


def gini(counts: ClassCounts | tuple[int, int]) -> float:
    """Gini impurity 1 - p_fail^2 - p_pass^2.

    Computed as (t^2 - f^2 - p^2) / t^2 in exact integer arithmetic with a
    single final division, so the result is the correctly rounded value of the
    underlying rational. Range [0, 0.5] for two classes; 0 iff pure.
    """
    f, p = int(counts[0]), int(counts[1])
    t = f + p
    if t <= 0:
        raise ValueError("class counts must total at least 1")
    return (t * t - f * f - p * p) / (t * t)


def entropy(counts: ClassCounts | tuple[int, int]) -> float:
    """Shannon entropy in bits, -sum p_k log2 p_k with 0 log 0 = 0.

    Probabilities are formed first so that the balanced case hits p = 0.5
    exactly and returns exactly 1.0; pure counts return exactly 0.0.
    """
    f, p = int(counts[0]), int(counts[1])
    t = f + p
    if t <= 0:
        raise ValueError("class counts must total at least 1")
    acc = 0.0
    for c in (f, p):
        if c:
            pc = c / t
            acc += pc * math.log2(pc)
    return -acc


def _impurity(criterion: str, counts: tuple[int, int]) -> float:
    return gini(counts) if criterion == "gini" else entropy(counts)


@dataclass(frozen=True)
class HyperParams:
    criterion: str = "gini"
    max_depth: int | None = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1

    def validate(self) -> None:
        if self.criterion not in CRITERIA:
            raise ConfigError(f"criterion must be one of {CRITERIA}, got {self.criterion!r}")
        if self.max_depth is not None and self.max_depth < 1:
            raise ConfigError("max_depth must be a positive integer or None")
        if self.min_samples_split < 2:
            raise ConfigError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ConfigError("min_samples_leaf must be >= 1")


class SplitCandidate(NamedTuple):
    feature: int
    threshold: float
    weighted_impurity: float
    gain: float


@dataclass(frozen=True)
class TreeNode:
    id: int
    depth: int
    counts: ClassCounts
    impurity: float
    feature: int | None = None
    threshold: float | None = None
    left: int | None = None
    right: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def pass_probability(self) -> float:
        return self.counts.passed / self.counts.total


@dataclass(frozen=True)
class Tree:
    nodes: tuple[TreeNode, ...]
    params: HyperParams
    feature_names: tuple[str, ...]
    root: int = 0

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def node(self, node_id: int) -> TreeNode:
        return self.nodes[node_id]

    def leaves(self) -> list[TreeNode]:
        return [n for n in self.nodes if n.is_leaf]

    def max_depth(self) -> int:
        return max(n.depth for n in self.nodes)


class PathStep(NamedTuple):
    node: int
    feature: int
    threshold: float
    went_left: bool


@dataclass(frozen=True)
class Prediction:
    label: int
    pass_probability: float
    leaf: int
    path: tuple[PathStep, ...]


def candidate_thresholds(values: Sequence[float]) -> list[float]:
    """Midpoints between consecutive distinct sorted values, ascending.

    Empty when all values are equal. A midpoint that rounds up to its right
    neighbor (adjacent doubles) cannot separate the pair under the <= rule and
    is skipped; midpoints that collapse onto the left neighbor still separate
    and are kept.
    """
    if len(values) == 0:
        raise ValueError("values must be non-empty")
    distinct = sorted(set(float(v) for v in values))
    out = []
    for a, b in zip(distinct, distinct[1:]):
        t = (a + b) / 2.0
        if t < b:
            out.append(t)
    return out


def _gini_cost(nl: int, fl: int, pl: int, nr: int, fr: int, pr: int) -> float:
    # Weighted mean child gini as one exact-integer ratio: correctly rounded,
    # so equal-cost candidates compare exactly equal in float.
    num = (nl * nl - fl * fl - pl * pl) * nr + (nr * nr - fr * fr - pr * pr) * nl
    den = (nl + nr) * nl * nr
    return num / den


def _entropy_cost(nl: int, fl: int, pl: int, nr: int, fr: int, pr: int) -> float:
    n = nl + nr
    return (nl * entropy((fl, pl)) + nr * entropy((fr, pr))) / n


def best_split(
    X: Sequence[Sequence[float]],
    y: Sequence[int],
    params: HyperParams = HyperParams(),
) -> SplitCandidate | None:
    """Exhaustively score every (feature, threshold) candidate; return the
    cheapest one, or None when the node is pure or no candidate is usable.

    Candidates whose left or right side would fall below min_samples_leaf are
    skipped. Ties on cost resolve to the lowest feature index, then the lowest
    threshold (scan order + strict improvement). An impure node always takes
    its minimal-cost candidate even at zero gain: this is what lets stacked
    splits untangle layouts (exclusive-or style) where no single split helps,
    so label-consistent data always trains to purity. Concavity of both
    criteria guarantees the reported gain is never negative; it is clamped at
    0 against float noise.
    """
    params.validate()
    n = len(y)
    if n < params.min_samples_split:
        raise ValueError(
            f"need at least min_samples_split={params.min_samples_split} records, got {n}"
        )
    labels = [int(v) for v in y]
    total_fail = labels.count(0)
    total_pass = n - total_fail
    if total_fail == 0 or total_pass == 0:
        return None
    parent = _impurity(params.criterion, (total_fail, total_pass))
    cost_fn = _gini_cost if params.criterion == "gini" else _entropy_cost

    n_features = len(X[0])
    best: SplitCandidate | None = None
    for j in range(n_features):
        column = [float(row[j]) for row in X]
        order = sorted(range(n), key=lambda i: column[i])
        sorted_values = [column[i] for i in order]
        # prefix_fail[m] = fails among the m smallest values
        prefix_fail = [0] * (n + 1)
        for m, i in enumerate(order):
            prefix_fail[m + 1] = prefix_fail[m] + (1 - labels[i])
        for m in range(n - 1):
            a, b = sorted_values[m], sorted_values[m + 1]
            if a == b:
                continue
            t = (a + b) / 2.0
            if not t < b:  # midpoint rounded onto b: cannot separate
                continue
            nl = m + 1
            nr = n - nl
            if nl < params.min_samples_leaf or nr < params.min_samples_leaf:
                continue
            fl = prefix_fail[nl]
            pl = nl - fl
            fr = total_fail - fl
            pr = total_pass - pl
            cost = cost_fn(nl, fl, pl, nr, fr, pr)
            if best is None or cost < best.weighted_impurity:
                best = SplitCandidate(j, t, cost, max(parent - cost, 0.0))
    return best


def _check_training_data(X: Sequence[Sequence[float]], y: Sequence[int]) -> None:
    if len(X) == 0 or len(y) == 0:
        raise ValueError("cannot fit on an empty dataset")
    if len(X) != len(y):
        raise ValueError(f"feature rows ({len(X)}) and labels ({len(y)}) differ in length")
    width = len(X[0])
    for i, row in enumerate(X):
        if len(row) != width:
            raise ValueError(f"row {i} has {len(row)} features, expected {width}")
        for v in row:
            if not math.isfinite(float(v)):
                raise ValueError(f"non-finite feature value in row {i}")
    for i, label in enumerate(y):
        if int(label) not in (0, 1):
            raise ValueError(f"label at row {i} must be 0 or 1, got {label!r}")


def fit(
    X: Sequence[Sequence[float]],
    y: Sequence[int],
    params: HyperParams = HyperParams(),
    feature_names: Iterable[str] | None = None,
) -> Tree:
    """Grow a tree top-down by recursive binary splitting.

    A node becomes a leaf when it is pure, holds fewer than min_samples_split
    records, sits at max_depth, or no candidate split has positive gain.
    Node ids are assigned in pre-order (root = 0, left subtree before right).
    The result is fully determined by (row order, params).
    """
    params.validate()
    _check_training_data(X, y)
    rows = [tuple(float(v) for v in row) for row in X]
    labels = [int(v) for v in y]
    names = (
        tuple(feature_names)
        if feature_names is not None
        else tuple(f"x{j}" for j in range(len(rows[0])))
    )
    if len(names) != len(rows[0]):
        raise ValueError(f"{len(names)} feature names for {len(rows[0])}-feature rows")

    nodes: list[TreeNode | None] = []

    def grow(indices: list[int], depth: int) -> int:
        node_id = len(nodes)
        nodes.append(None)
        fail = sum(1 - labels[i] for i in indices)
        counts = ClassCounts(fail, len(indices) - fail)
        impurity = _impurity(params.criterion, counts)

        candidate = None
        depth_ok = params.max_depth is None or depth < params.max_depth
        if not counts.is_pure and depth_ok and len(indices) >= params.min_samples_split:
            candidate = best_split([rows[i] for i in indices], [labels[i] for i in indices], params)

        if candidate is None:
            nodes[node_id] = TreeNode(node_id, depth, counts, impurity)
            return node_id

        left_idx = [i for i in indices if rows[i][candidate.feature] <= candidate.threshold]
        right_idx = [i for i in indices if rows[i][candidate.feature] > candidate.threshold]
        left_id = grow(left_idx, depth + 1)
        right_id = grow(right_idx, depth + 1)
        nodes[node_id] = TreeNode(
            node_id,
            depth,
            counts,
            impurity,
            feature=candidate.feature,
            threshold=candidate.threshold,
            left=left_id,
            right=right_id,
        )
        return node_id

    grow(list(range(len(rows))), 0)
    return Tree(nodes=tuple(nodes), params=params, feature_names=names)  # type: ignore[arg-type]


def predict(tree: Tree, x: Sequence[float]) -> Prediction:
    """Route a feature vector to its leaf and report label, pass probability,
    leaf id, and the traversed decision path.

    Label is 1 iff the leaf's pass fraction exceeds 0.5; an exactly split leaf
    predicts fail, the conservative call for an early-warning tool.
    """
    values = [float(v) for v in x]
    if len(values) != tree.n_features:
        raise ValueError(f"expected {tree.n_features} features, got {len(values)}")
    for v in values:
        if not math.isfinite(v):
            raise ValueError("features must be finite")
    node = tree.node(tree.root)
    path: list[PathStep] = []
    while not node.is_leaf:
        went_left = values[node.feature] <= node.threshold
        path.append(PathStep(node.id, node.feature, node.threshold, went_left))
        node = tree.node(node.left if went_left else node.right)
    probability = node.pass_probability
    return Prediction(
        label=1 if probability > 0.5 else 0,
        pass_probability=probability,
        leaf=node.id,
        path=tuple(path),
    )


# --- model document ---------------------------------------------------------


def serialize(tree: Tree) -> str:
    """Render a Tree as the versioned JSON model document.

    Output is canonical: same tree, same text.
    """
    doc = {
        "format_version": FORMAT_VERSION,
        "criterion": tree.params.criterion,
        "hyperparameters": {
            "max_depth": tree.params.max_depth,
            "min_samples_split": tree.params.min_samples_split,
            "min_samples_leaf": tree.params.min_samples_leaf,
        },
        "feature_names": list(tree.feature_names),
        "root": tree.root,
        "nodes": [
            {
                "id": n.id,
                "depth": n.depth,
                "counts": [n.counts.fail, n.counts.passed],
                "split": (
                    None
                    if n.is_leaf
                    else {"feature": n.feature, "threshold": n.threshold}
                ),
                "left": n.left,
                "right": n.right,
            }
            for n in tree.nodes
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def _require(doc: dict, key: str, kind, where: str = "document"):
    if key not in doc:
        raise ModelFormatError(f"missing field: {key} in {where}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ModelFormatError(f"field {key} in {where} has wrong type")
    return value


def deserialize(text: str) -> Tree:
    """Parse and validate a model document; the first violation found is named
    in the raised ModelFormatError."""
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"malformed model text: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be an object")
    version = _require(doc, "format_version", int)
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unknown format version: {version}")
    criterion = _require(doc, "criterion", str)
    hp = _require(doc, "hyperparameters", dict)
    max_depth = hp.get("max_depth")
    if max_depth is not None and not isinstance(max_depth, int):
        raise ModelFormatError("hyperparameters.max_depth must be an integer or null")
    try:
        params = HyperParams(
            criterion=criterion,
            max_depth=max_depth,
            min_samples_split=int(_require(hp, "min_samples_split", int, "hyperparameters")),
            min_samples_leaf=int(_require(hp, "min_samples_leaf", int, "hyperparameters")),
        )
        params.validate()
    except ConfigError as exc:
        raise ModelFormatError(f"invalid hyperparameters: {exc.message}") from exc
    feature_names = _require(doc, "feature_names", list)
    if not feature_names or not all(isinstance(n, str) for n in feature_names):
        raise ModelFormatError("feature_names must be a non-empty list of strings")
    root = _require(doc, "root", int)
    raw_nodes = _require(doc, "nodes", list)
    if not raw_nodes:
        raise ModelFormatError("nodes must be non-empty")

    parsed: dict[int, TreeNode] = {}
    for entry in raw_nodes:
        if not isinstance(entry, dict):
            raise ModelFormatError("every node must be an object")
        node_id = _require(entry, "id", int, "node")
        if node_id in parsed:
            raise ModelFormatError(f"duplicate node id: {node_id}")
        depth = _require(entry, "depth", int, f"node {node_id}")
        counts_raw = _require(entry, "counts", list, f"node {node_id}")
        if (
            len(counts_raw) != 2
            or not all(isinstance(c, int) and c >= 0 for c in counts_raw)
            or sum(counts_raw) < 1
        ):
            raise ModelFormatError(
                f"node {node_id}: counts must be two non-negative integers totalling >= 1"
            )
        counts = ClassCounts(counts_raw[0], counts_raw[1])
        split = entry.get("split")
        left = entry.get("left")
        right = entry.get("right")
        if split is None:
            if left is not None or right is not None:
                raise ModelFormatError(f"node {node_id}: children without a split")
            node = TreeNode(node_id, depth, counts, _impurity(params.criterion, counts))
        else:
            if not isinstance(split, dict):
                raise ModelFormatError(f"node {node_id}: split must be an object or null")
            feature = _require(split, "feature", int, f"node {node_id} split")
            threshold = _require(split, "threshold", (int, float), f"node {node_id} split")
            if not 0 <= feature < len(feature_names):
                raise ModelFormatError(f"node {node_id}: split feature {feature} out of range")
            if not math.isfinite(float(threshold)):
                raise ModelFormatError(f"node {node_id}: split threshold must be finite")
            if not isinstance(left, int) or not isinstance(right, int):
                raise ModelFormatError(f"node {node_id}: split without both children")
            node = TreeNode(
                node_id,
                depth,
                counts,
                _impurity(params.criterion, counts),
                feature=feature,
                threshold=float(threshold),
                left=left,
                right=right,
            )
        parsed[node_id] = node

    if sorted(parsed) != list(range(len(parsed))):
        raise ModelFormatError("node ids must be exactly 0..N-1")
    if root not in parsed:
        raise ModelFormatError(f"root id {root} does not name a node")

    # structural walk: single tree, no cycles, no shared children
    seen: set[int] = set()
    stack = [root]
    while stack:
        node_id = stack.pop()
        if node_id in seen:
            raise ModelFormatError(f"node {node_id} has multiple parents or lies on a cycle")
        seen.add(node_id)
        node = parsed[node_id]
        if not node.is_leaf:
            for child in (node.left, node.right):
                if child not in parsed:
                    raise ModelFormatError(f"node {node_id} references missing child {child}")
                stack.append(child)
    if len(seen) != len(parsed):
        orphan = min(set(parsed) - seen)
        raise ModelFormatError(f"node {orphan} is unreachable from the root")

    for node in parsed.values():
        if node.is_leaf:
            continue
        merged = parsed[node.left].counts + parsed[node.right].counts
        if merged != node.counts:
            raise ModelFormatError(
                f"count conservation violated at node {node.id}: "
                f"{list(parsed[node.left].counts)} + {list(parsed[node.right].counts)} "
                f"!= {list(node.counts)}"
            )
        for child in (node.left, node.right):
            if parsed[child].depth != node.depth + 1:
                raise ModelFormatError(
                    f"depth of node {child} must be {node.depth + 1}, got {parsed[child].depth}"
                )
    if parsed[root].depth != 0:
        raise ModelFormatError("root depth must be 0")

    nodes = tuple(parsed[i] for i in range(len(parsed)))
    return Tree(nodes=nodes, params=params, feature_names=tuple(feature_names), root=root)


# --- DOT export --------------------------------------------------------------


def _fmt(value: float) -> str:
    return f"{value:g}"


def to_dot(tree: Tree) -> str:
    """Graphviz DOT text for the tree, one node statement per node.

    Internal nodes show the split rule in `X_k <= t` form plus criterion value,
    sample count, and the [fail, pass] tally; leaves show the same minus the
    rule. Edges are emitted left (condition true) before right.
    """
    crit = tree.params.criterion
    lines = ["digraph Tree {", 'node [shape=box] ;']
    for n in tree.nodes:
        parts = []
        if not n.is_leaf:
            parts.append(f"X_{n.feature} <= {_fmt(n.threshold)}")
        parts.append(f"{crit} = {n.impurity:.4g}")
        parts.append(f"samples = {n.counts.total}")
        parts.append(f"value = [{n.counts.fail}, {n.counts.passed}]")
        label = "\\n".join(parts)
        lines.append(f'{n.id} [label="{label}"] ;')
    for n in tree.nodes:
        if not n.is_leaf:
            lines.append(f'{n.id} -> {n.left} [label="true"] ;')
            lines.append(f'{n.id} -> {n.right} [label="false"] ;')
    lines.append("}")
    return "\n".join(lines) + "\n"
