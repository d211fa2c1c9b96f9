"""Synthetic score generator for demos and tests.

Real exports from a grading system cannot ship with the repo, so this builds a
stand-in with the same shape: 82 students, identifier columns, six criteria
scores on a 0-100 scale, and a PASSED/FAILED remark. Each student gets a
latent ability; scores are noisy readings of it and the remark follows a
weighted, midterm-heavy composite, so a tree learner has real structure to
find. Everything is deterministic in the seed.
"""

from __future__ import annotations

import argparse
import csv
import io

import numpy as np

from .ingest import CANONICAL_HEADER, FEATURE_NAMES

# composite weights per criterion: exams dominate, midterm counts double
_WEIGHTS = np.array([0.10, 0.15, 0.15, 0.10, 0.20, 0.30])
_PASS_BAR = 71.0


def generate_rows(n: int = 82, seed: int = 14) -> list[dict]:
    """Rows as dicts keyed by the canonical header columns."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        ability = rng.normal(74.0, 9.0)
        att = np.clip(rng.normal(ability + 8.0, 7.0, size=2), 40, 100)
        cp = np.clip(rng.normal(ability, 6.0, size=2), 30, 100)
        exam = np.clip(rng.normal(ability - 4.0, 8.0, size=2), 20, 100)
        scores = np.round(
            [att[0], cp[0], exam[0], att[1], cp[1], exam[1]], 1
        )
        composite = float(_WEIGHTS @ scores) + rng.normal(0.0, 2.0)
        row = {"student_id": f"S{i + 1:03d}", "class_record_id": f"CR-{1000 + i}"}
        row.update({name: f"{score:g}" for name, score in zip(FEATURE_NAMES, scores)})
        row["remark"] = "PASSED" if composite >= _PASS_BAR else "FAILED"
        rows.append(row)
    return rows


def generate_csv(n: int = 82, seed: int = 14) -> str:
    header = CANONICAL_HEADER.split(",")
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    writer.writerows(generate_rows(n, seed))
    return out.getvalue()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="write a synthetic score CSV")
    parser.add_argument("--out", required=True)
    parser.add_argument("--rows", type=int, default=82)
    parser.add_argument("--seed", type=int, default=14)
    args = parser.parse_args(argv)
    text = generate_csv(args.rows, args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    failed = sum(1 for line in text.splitlines()[1:] if line.endswith("FAILED"))
    print(f"wrote {args.out}: {args.rows} rows, {failed} failed / {args.rows - failed} passed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
