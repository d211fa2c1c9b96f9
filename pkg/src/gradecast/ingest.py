"""CSV ingestion and cleaning for academic score exports.

Raw exports carry one row per student: identifier columns, six criteria
scores (prelim/midterm attendance, class performance, exam), and a remark
column naming the outcome. Cleaning drops the identifier columns, drops rows
with missing or unparseable scores, drops exact duplicate rows, and binarizes
the remark into 0 (failed) / 1 (passed).

All functions here are pure; nothing touches shared state.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field, replace

from .errors import (
    CsvParseError,
    EmptyDatasetError,
    EmptyInputError,
    LabelMappingError,
    SchemaError,
)

ROLE_IDENTIFIER = "identifier"
ROLE_FEATURE = "feature"
ROLE_LABEL = "label"

#: Canonical criteria columns, in model feature order (indices 0..5).
FEATURE_NAMES: tuple[str, ...] = (
    "att_prelim",
    "cp_prelim",
    "exam_prelim",
    "att_midterm",
    "cp_midterm",
    "exam_midterm",
)

LABEL_TO_INT = {"PASSED": 1, "PASS": 1, "1": 1, "FAILED": 0, "FAIL": 0, "0": 0}
LABEL_MAPPING_TEXT = "PASSED/PASS/1 -> 1; FAILED/FAIL/0 -> 0 (case-insensitive)"

# Strict decimal syntax: period separator, optional exponent. Rejects
# thousands separators, underscores, inf/nan spellings.
_NUMBER_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class ColumnSchema:
    """One expected column: its name, role, and position in the canonical order."""

    name: str
    role: str
    index: int


def _make_schema(identifiers: tuple[str, ...], label: str) -> tuple[ColumnSchema, ...]:
    cols = [ColumnSchema(n, ROLE_IDENTIFIER, i) for i, n in enumerate(identifiers)]
    cols += [
        ColumnSchema(n, ROLE_FEATURE, len(identifiers) + i)
        for i, n in enumerate(FEATURE_NAMES)
    ]
    cols.append(ColumnSchema(label, ROLE_LABEL, len(cols)))
    return tuple(cols)


#: Schema of the raw academic export (9 columns).
RAW_SCHEMA = _make_schema(("student_id", "class_record_id"), "remark")
#: Schema of a cleaned dataset re-serialized without identifier columns.
CLEAN_SCHEMA = _make_schema((), "remark")

CANONICAL_HEADER = ",".join(c.name for c in RAW_SCHEMA)


def validate_schema(schema: tuple[ColumnSchema, ...]) -> None:
    """Check the schema invariants: six canonical features, exactly one label."""
    features = [c for c in schema if c.role == ROLE_FEATURE]
    labels = [c for c in schema if c.role == ROLE_LABEL]
    names = tuple(c.name for c in sorted(features, key=lambda c: c.index))
    if names != FEATURE_NAMES:
        raise SchemaError(f"schema must declare the six criteria columns {FEATURE_NAMES}, got {names}")
    if len(labels) != 1:
        raise SchemaError(f"schema must declare exactly one label column, got {len(labels)}")
    seen = set()
    for c in schema:
        if c.name in seen:
            raise SchemaError(f"duplicate column in schema: {c.name}")
        seen.add(c.name)


@dataclass(frozen=True)
class RawTable:
    """Parsed but uncleaned CSV content. Cell text is kept verbatim."""

    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    source: str = "<memory>"

    def column(self, name: str) -> int:
        return self.header.index(name)


@dataclass(frozen=True)
class StudentRecord:
    """Six criteria scores plus the binarized pass label (1 = passed)."""

    att_prelim: float
    cp_prelim: float
    exam_prelim: float
    att_midterm: float
    cp_midterm: float
    exam_midterm: float
    label: int

    def features(self) -> tuple[float, ...]:
        return (
            self.att_prelim,
            self.cp_prelim,
            self.exam_prelim,
            self.att_midterm,
            self.cp_midterm,
            self.exam_midterm,
        )


@dataclass(frozen=True)
class CleaningReport:
    """Accounting of everything `clean` removed or rewrote."""

    dropped_columns: tuple[str, ...]
    rows_dropped_missing: int
    rows_dropped_duplicate: int
    label_mapping: str
    input_rows: int
    output_rows: int

    def as_dict(self) -> dict:
        return {
            "dropped_columns": list(self.dropped_columns),
            "rows_dropped_missing": self.rows_dropped_missing,
            "rows_dropped_duplicate": self.rows_dropped_duplicate,
            "label_mapping": self.label_mapping,
            "input_rows": self.input_rows,
            "output_rows": self.output_rows,
        }


@dataclass(frozen=True)
class Dataset:
    """Cleaned records ready for modeling."""

    records: tuple[StudentRecord, ...]
    feature_names: tuple[str, ...] = FEATURE_NAMES
    source: str = "<memory>"
    report: CleaningReport | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.records)

    def features_matrix(self) -> list[tuple[float, ...]]:
        return [r.features() for r in self.records]

    def labels(self) -> list[int]:
        return [r.label for r in self.records]

    def label_counts(self) -> tuple[int, int]:
        """(fail, pass) totals."""
        passed = sum(r.label for r in self.records)
        return len(self.records) - passed, passed

    def subset(self, indices: list[int]) -> "Dataset":
        return replace(self, records=tuple(self.records[i] for i in indices), report=None)


def binarize_label(token: str) -> int:
    """Map a remark token to 0/1. Anything outside the mapping is an error."""
    text = token.strip()
    if not text:
        raise LabelMappingError("empty label token")
    value = LABEL_TO_INT.get(text.upper())
    if value is None:
        raise LabelMappingError(f"unknown label token: {text!r}")
    return value


def parse_number(cell: str) -> float | None:
    """Parse a score cell; None when empty or not a plain finite decimal."""
    text = cell.strip()
    if not text or not _NUMBER_RE.match(text):
        return None
    value = float(text)
    return value if math.isfinite(value) else None


def parse_csv(text: str, schema: tuple[ColumnSchema, ...] = RAW_SCHEMA, source: str = "<memory>") -> RawTable:
    """Parse CSV text into a RawTable whose header matches `schema`.

    The header may order columns freely but must contain exactly the schema's
    names. Rows 2..n must all have the header's arity. Raises EmptyInputError
    for an empty or header-only file, SchemaError for a header mismatch, and
    CsvParseError (with the 1-based line number) for a ragged row.
    """
    validate_schema(schema)
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        table = [tuple(row) for row in reader if row]
    except csv.Error as exc:
        raise CsvParseError(f"CSV syntax error: {exc}") from exc
    if not table:
        raise EmptyInputError("no CSV content")
    header = tuple(cell.strip() for cell in table[0])
    expected = {c.name for c in schema}
    for name in expected:
        if name not in header:
            raise SchemaError(f"missing required column: {name}", field=name)
    for name in header:
        if name not in expected:
            raise SchemaError(f"unexpected column: {name}", field=name)
    if len(set(header)) != len(header):
        raise SchemaError("duplicate column in header")
    rows = table[1:]
    if not rows:
        raise EmptyInputError("no data rows (header only)")
    for i, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise CsvParseError(
                f"row {i} has {len(row)} cells, expected {len(header)}", row=i
            )
    return RawTable(header=header, rows=tuple(rows), source=source)


def clean(
    raw: RawTable,
    schema: tuple[ColumnSchema, ...] = RAW_SCHEMA,
    validate_range: bool = False,
) -> tuple[Dataset, CleaningReport]:
    """Turn a RawTable into a modeling-ready Dataset plus a CleaningReport.

    Identifier columns are dropped. Exact duplicate rows (every original cell
    equal, identifiers included) are dropped, keeping the first occurrence.
    Rows with an empty or unparseable score cell are dropped, as are rows with
    an empty remark; with `validate_range` on, scores outside [0, 100] count
    as unparseable. A non-empty remark outside the pass/fail mapping raises
    LabelMappingError naming the offending line.
    """
    validate_schema(schema)
    feature_cols = [raw.column(n) for n in FEATURE_NAMES]
    label_name = next(c.name for c in schema if c.role == ROLE_LABEL)
    label_col = raw.column(label_name)
    dropped_columns = tuple(c.name for c in schema if c.role == ROLE_IDENTIFIER)

    seen: set[tuple[str, ...]] = set()
    dup_dropped = 0
    missing_dropped = 0
    records: list[StudentRecord] = []
    for line_no, row in enumerate(raw.rows, start=2):
        if row in seen:
            dup_dropped += 1
            continue
        seen.add(row)
        values = [parse_number(row[c]) for c in feature_cols]
        if any(v is None for v in values):
            missing_dropped += 1
            continue
        if validate_range and any(not (0.0 <= v <= 100.0) for v in values):
            missing_dropped += 1
            continue
        label_cell = row[label_col].strip()
        if not label_cell:
            missing_dropped += 1
            continue
        try:
            label = binarize_label(label_cell)
        except LabelMappingError as exc:
            raise LabelMappingError(f"row {line_no}: {exc.message}", row=line_no) from exc
        records.append(StudentRecord(*values, label=label))
    report = CleaningReport(
        dropped_columns=dropped_columns,
        rows_dropped_missing=missing_dropped,
        rows_dropped_duplicate=dup_dropped,
        label_mapping=LABEL_MAPPING_TEXT,
        input_rows=len(raw.rows),
        output_rows=len(records),
    )
    if not records:
        raise EmptyDatasetError("no rows survived cleaning")
    dataset = Dataset(records=tuple(records), source=raw.source, report=report)
    return dataset, report


def _format_score(value: float) -> str:
    # repr round-trips every finite double; trim the int case for readability
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def dataset_to_csv(dataset: Dataset, include_identifiers: bool = True) -> str:
    """Serialize a cleaned Dataset back to CSV.

    With `include_identifiers` (default), ordinal student_id values are
    synthesized so that records with coincident scores stay distinct under a
    further clean() pass. Score text is chosen to re-parse to the exact same
    float; labels use the canonical tokens 1/0.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if include_identifiers:
        writer.writerow([c.name for c in RAW_SCHEMA])
        for i, rec in enumerate(dataset.records, start=1):
            writer.writerow(
                [str(i), ""] + [_format_score(v) for v in rec.features()] + [str(rec.label)]
            )
    else:
        writer.writerow([c.name for c in CLEAN_SCHEMA])
        for rec in dataset.records:
            writer.writerow([_format_score(v) for v in rec.features()] + [str(rec.label)])
    return out.getvalue()
