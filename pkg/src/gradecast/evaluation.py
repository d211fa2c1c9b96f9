"""Holdout splitting and the confusion-matrix metric stack.

The shuffle generator is NumPy's PCG64 (`numpy.random.default_rng(seed)`),
drawing one `permutation(n)`; identical (data, config) always reproduce the
identical partition. The train side takes floor((1 - test_fraction) * n) rows,
the test side the remainder, so n = 82 at the default fraction gives 61/21.

Metrics treat pass (1) as the positive class. A zero denominator yields 0.0
and an explicit degenerate flag instead of an error, so batch evaluation never
aborts while reports stay honest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .ingest import Dataset

PRECISION_UNDEFINED = "precision-undefined"
RECALL_UNDEFINED = "recall-undefined"
F1_UNDEFINED = "f1-undefined"


@dataclass(frozen=True)
class SplitConfig:
    test_fraction: float = 0.25
    seed: int = 0
    shuffle: bool = True

    def validate(self) -> None:
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(
                f"test_fraction must be strictly between 0 and 1, got {self.test_fraction}"
            )
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must fit an unsigned 64-bit integer")


@dataclass(frozen=True)
class ConfusionMatrix:
    tn: int
    fp: int
    fn: int
    tp: int

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp

    def as_array(self) -> np.ndarray:
        return np.array([[self.tn, self.fp], [self.fn, self.tp]], dtype=int)


@dataclass(frozen=True)
class EvaluationReport:
    matrix: ConfusionMatrix
    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate: frozenset[str]
    train_size: int
    test_size: int

    def as_dict(self) -> dict:
        return {
            "matrix": {
                "tn": self.matrix.tn,
                "fp": self.matrix.fp,
                "fn": self.matrix.fn,
                "tp": self.matrix.tp,
            },
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "degenerate": sorted(self.degenerate),
            "train_size": self.train_size,
            "test_size": self.test_size,
        }


def train_test_split(data: Dataset, config: SplitConfig = SplitConfig()) -> tuple[Dataset, Dataset]:
    """Partition a Dataset into (train, test) by a seeded shuffle.

    Every record lands in exactly one side; order within each side follows the
    shuffled order. Raises ConfigError for a bad fraction or a fraction so
    extreme the train side would be empty, ValueError for fewer than 2 rows.
    """
    config.validate()
    n = len(data)
    if n < 2:
        raise ValueError(f"need at least 2 records to split, got {n}")
    train_size = math.floor((1.0 - config.test_fraction) * n)
    if train_size < 1:
        raise ConfigError(
            f"test_fraction {config.test_fraction} leaves an empty train side for n={n}"
        )
    if config.shuffle:
        order = np.random.default_rng(int(config.seed)).permutation(n).tolist()
    else:
        order = list(range(n))
    return data.subset(order[:train_size]), data.subset(order[train_size:])


def confusion_matrix(y_true: list[int], y_pred: list[int]) -> ConfusionMatrix:
    """Count (true, predicted) pairs into tn/fp/fn/tp with pass=1 positive."""
    if len(y_true) != len(y_pred):
        raise ValueError(f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted")
    if len(y_true) == 0:
        raise ValueError("need at least one labelled pair")
    cells = {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 0}
    for t, p in zip(y_true, y_pred):
        key = (int(t), int(p))
        if key not in cells:
            raise ValueError(f"labels must be 0 or 1, got true={t!r} pred={p!r}")
        cells[key] += 1
    return ConfusionMatrix(
        tn=cells[(0, 0)], fp=cells[(0, 1)], fn=cells[(1, 0)], tp=cells[(1, 1)]
    )


def metrics(cm: ConfusionMatrix, train_size: int = 0, test_size: int | None = None) -> EvaluationReport:
    """Derive accuracy, precision, recall, and F1 from a confusion matrix.

    precision = tp/(tp+fp), recall = tp/(tp+fn), f1 = 2tp/(2tp+fp+fn).
    A zero denominator produces 0.0 plus the matching degenerate flag; F1 is
    also flagged when either constituent is degenerate.
    """
    if cm.total < 1:
        raise ValueError("confusion matrix must count at least one pair")
    flags = set()
    accuracy = (cm.tp + cm.tn) / cm.total
    if cm.tp + cm.fp == 0:
        precision = 0.0
        flags.add(PRECISION_UNDEFINED)
    else:
        precision = cm.tp / (cm.tp + cm.fp)
    if cm.tp + cm.fn == 0:
        recall = 0.0
        flags.add(RECALL_UNDEFINED)
    else:
        recall = cm.tp / (cm.tp + cm.fn)
    f1_den = 2 * cm.tp + cm.fp + cm.fn
    if f1_den == 0 or flags:
        f1 = 0.0 if f1_den == 0 else 2 * cm.tp / f1_den
        flags.add(F1_UNDEFINED)
    else:
        f1 = 2 * cm.tp / f1_den
    return EvaluationReport(
        matrix=cm,
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        degenerate=frozenset(flags),
        train_size=train_size,
        test_size=cm.total if test_size is None else test_size,
    )


def format_report(report: EvaluationReport) -> str:
    """The four metric lines, six decimal places each."""
    return (
        f"Accuracy: {report.accuracy:f}\n"
        f"Precision: {report.precision:f}\n"
        f"Recall: {report.recall:f}\n"
        f"F1 score: {report.f1:f}\n"
    )


def format_matrix(cm: ConfusionMatrix) -> str:
    """Bracketed 2x2 layout, rows [tn fp] / [fn tp]."""
    return f"Confusion Matrix : \n {cm.as_array()}"
