"""Shared test data builders."""

from __future__ import annotations

import numpy as np

from gradecast.cart import HyperParams, Tree, fit
from gradecast.ingest import CANONICAL_HEADER, FEATURE_NAMES

HEADER_COLS = CANONICAL_HEADER.split(",")


def make_csv(rows: list[dict], header: list[str] | None = None) -> str:
    """CSV text from row dicts; missing keys become empty cells."""
    cols = header or HEADER_COLS
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(str(row.get(c, "")) for c in cols))
    return "\n".join(lines) + "\n"


def student_row(i: int, scores, remark: str) -> dict:
    row = {"student_id": f"S{i:03d}", "class_record_id": f"CR-{i:04d}", "remark": remark}
    row.update({name: score for name, score in zip(FEATURE_NAMES, scores)})
    return row


def exam_threshold_csv(n_each: int = 20) -> str:
    """Rows whose remark depends only on exam_midterm (55 fail / 64 pass).

    Every other column is constant, so any fitted tree is a single split at
    59.5 with pure leaves, regardless of which rows land in the train fold.
    """
    rows = []
    for i in range(n_each):
        rows.append(student_row(2 * i + 1, [70, 70, 70, 70, 70, 55], "FAILED"))
        rows.append(student_row(2 * i + 2, [70, 70, 70, 70, 70, 64], "PASSED"))
    return make_csv(rows)


def all_pass_csv(n: int = 12) -> str:
    rows = [
        student_row(i + 1, [60 + i, 61 + i, 62 + i, 63 + i, 64 + i, 65 + i], "PASSED")
        for i in range(n)
    ]
    return make_csv(rows)


def random_int_dataset(rng: np.random.Generator, max_rows: int = 10, max_features: int = 3,
                       hi: int = 5) -> tuple[list[tuple[float, ...]], list[int]]:
    n = int(rng.integers(2, max_rows + 1))
    k = int(rng.integers(1, max_features + 1))
    X = [tuple(float(v) for v in rng.integers(0, hi + 1, size=k)) for _ in range(n)]
    y = [int(v) for v in rng.integers(0, 2, size=n)]
    return X, y


def random_fitted_tree(rng: np.random.Generator, max_rows: int = 10, max_features: int = 3,
                       hi: int = 5, criterion: str = "gini",
                       max_depth: int | None = None) -> Tree:
    X, y = random_int_dataset(rng, max_rows, max_features, hi)
    return fit(X, y, params=HyperParams(criterion=criterion, max_depth=max_depth))
