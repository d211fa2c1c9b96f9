from __future__ import annotations

from pathlib import Path

import pytest

from gradecast.ingest import clean, parse_csv

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
BUNDLED_CSV = DATA_DIR / "students_synthetic.csv"


@pytest.fixture(scope="session")
def bundled_csv_path() -> Path:
    return BUNDLED_CSV


@pytest.fixture(scope="session")
def bundled_csv_text() -> str:
    return BUNDLED_CSV.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def bundled_dataset(bundled_csv_text):
    dataset, _ = clean(parse_csv(bundled_csv_text, source=str(BUNDLED_CSV)))
    return dataset
