"""File-backed persistence for datasets and trained models.

One JSON document per artifact, written with write-then-rename so a crash
never leaves a half-written file behind. The id -> path index is rebuilt by
scanning the directory at startup; files are immutable once written, so reads
need no locking and only index insertion is serialized.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .cart import HyperParams, Tree, deserialize, serialize
from .errors import ModelFormatError
from .evaluation import ConfusionMatrix, EvaluationReport, SplitConfig, metrics
from .ingest import CleaningReport, Dataset, RAW_SCHEMA, clean, dataset_to_csv, parse_csv

STORE_VERSION = 1


@dataclass(frozen=True)
class StoredModel:
    model_id: str
    dataset_id: str
    created_at: str
    split: SplitConfig
    evaluation: EvaluationReport
    tree_text: str
    tree: Tree


@dataclass(frozen=True)
class StoredDataset:
    dataset_id: str
    created_at: str
    source: str
    report: CleaningReport
    dataset: Dataset


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _new_id() -> str:
    return secrets.token_hex(8)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.{secrets.token_hex(4)}.tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _report_from_dict(d: dict) -> EvaluationReport:
    cm = ConfusionMatrix(**d["matrix"])
    return metrics(cm, train_size=d["train_size"], test_size=d["test_size"])


class ModelStore:
    """Directory-backed store with an in-memory id index."""

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.datasets_dir = self.root / "datasets"
        self.models_dir = self.root / "models"
        self.datasets_dir.mkdir(parents=True, exist_ok=True)
        self.models_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._dataset_index: dict[str, Path] = {}
        self._model_index: dict[str, Path] = {}
        self._rebuild_index()

    def _rebuild_index(self) -> None:
        with self._lock:
            self._dataset_index = {
                p.stem: p for p in sorted(self.datasets_dir.glob("*.json"))
            }
            self._model_index = {p.stem: p for p in sorted(self.models_dir.glob("*.json"))}

    # -- datasets -------------------------------------------------------

    def save_dataset(self, dataset: Dataset, report: CleaningReport, source: str) -> str:
        dataset_id = _new_id()
        doc = {
            "store_version": STORE_VERSION,
            "dataset_id": dataset_id,
            "created_at": _now(),
            "source": source,
            "report": report.as_dict(),
            "csv": dataset_to_csv(dataset),
        }
        path = self.datasets_dir / f"{dataset_id}.json"
        _atomic_write(path, json.dumps(doc, indent=2))
        with self._lock:
            self._dataset_index[dataset_id] = path
        return dataset_id

    def load_dataset(self, dataset_id: str) -> StoredDataset:
        path = self._dataset_index.get(dataset_id)
        if path is None or not path.exists():
            raise KeyError(dataset_id)
        doc = json.loads(path.read_text(encoding="utf-8"))
        dataset, _ = clean(parse_csv(doc["csv"], RAW_SCHEMA, source=doc["source"]))
        report = CleaningReport(
            dropped_columns=tuple(doc["report"]["dropped_columns"]),
            rows_dropped_missing=doc["report"]["rows_dropped_missing"],
            rows_dropped_duplicate=doc["report"]["rows_dropped_duplicate"],
            label_mapping=doc["report"]["label_mapping"],
            input_rows=doc["report"]["input_rows"],
            output_rows=doc["report"]["output_rows"],
        )
        return StoredDataset(
            dataset_id=dataset_id,
            created_at=doc["created_at"],
            source=doc["source"],
            report=report,
            dataset=dataset,
        )

    def list_datasets(self) -> list[str]:
        with self._lock:
            return sorted(self._dataset_index)

    # -- models ---------------------------------------------------------

    def save_model(
        self,
        tree: Tree,
        evaluation: EvaluationReport,
        dataset_id: str,
        split: SplitConfig,
    ) -> str:
        tree_text = serialize(tree)
        deserialize(tree_text)  # refuse to persist anything that will not load
        model_id = _new_id()
        doc = {
            "store_version": STORE_VERSION,
            "model_id": model_id,
            "dataset_id": dataset_id,
            "created_at": _now(),
            "split": {
                "test_fraction": split.test_fraction,
                "seed": split.seed,
                "shuffle": split.shuffle,
            },
            "evaluation": evaluation.as_dict(),
            "tree": tree_text,
        }
        path = self.models_dir / f"{model_id}.json"
        _atomic_write(path, json.dumps(doc, indent=2))
        with self._lock:
            self._model_index[model_id] = path
        return model_id

    def load_model(self, model_id: str) -> StoredModel:
        path = self._model_index.get(model_id)
        if path is None or not path.exists():
            raise KeyError(model_id)
        doc = json.loads(path.read_text(encoding="utf-8"))
        tree_text = doc["tree"]
        tree = deserialize(tree_text)
        return StoredModel(
            model_id=model_id,
            dataset_id=doc["dataset_id"],
            created_at=doc["created_at"],
            split=SplitConfig(**doc["split"]),
            evaluation=_report_from_dict(doc["evaluation"]),
            tree_text=tree_text,
            tree=tree,
        )

    def list_models(self) -> list[dict]:
        with self._lock:
            ids = sorted(self._model_index)
        out = []
        for model_id in ids:
            try:
                stored = self.load_model(model_id)
            except (ModelFormatError, KeyError, json.JSONDecodeError, OSError):
                continue  # skip anything unreadable rather than fail the listing
            out.append(
                {
                    "model_id": stored.model_id,
                    "dataset_id": stored.dataset_id,
                    "created_at": stored.created_at,
                    "accuracy": stored.evaluation.accuracy,
                }
            )
        return out
