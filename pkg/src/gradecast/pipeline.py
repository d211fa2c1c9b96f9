"""End-to-end orchestration shared by the CLI and the HTTP service."""

from __future__ import annotations

from .cart import HyperParams, Tree, fit, predict
from .evaluation import EvaluationReport, SplitConfig, confusion_matrix, metrics, train_test_split
from .ingest import Dataset


def train_and_evaluate(
    data: Dataset,
    params: HyperParams = HyperParams(),
    split: SplitConfig = SplitConfig(),
) -> tuple[Tree, EvaluationReport]:
    """Split, fit on the train side, score the test side."""
    train, test = train_test_split(data, split)
    tree = fit(
        train.features_matrix(),
        train.labels(),
        params=params,
        feature_names=train.feature_names,
    )
    y_pred = [predict(tree, rec.features()).label for rec in test.records]
    cm = confusion_matrix(test.labels(), y_pred)
    report = metrics(cm, train_size=len(train), test_size=len(test))
    return tree, report


def evaluate_on(tree: Tree, data: Dataset, train_size: int = 0) -> EvaluationReport:
    """Score a fitted tree against every record of a labelled dataset."""
    y_pred = [predict(tree, rec.features()).label for rec in data.records]
    cm = confusion_matrix(data.labels(), y_pred)
    return metrics(cm, train_size=train_size, test_size=len(data))
