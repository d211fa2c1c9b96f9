"""Exception hierarchy shared across the package.

Every data-quality or format fault raises a :class:`GradecastError` subclass;
plain ``ValueError`` is reserved for programming errors (bad call arguments).
The CLI maps GradecastError to exit code 2, the HTTP service to a 4xx body.
"""

from __future__ import annotations


class GradecastError(Exception):
    """Base class for all faults this package reports to callers."""

    code = "error"

    def __init__(self, message: str, *, row: int | None = None, field: str | None = None):
        super().__init__(message)
        self.message = message
        self.row = row
        self.field = field

    def detail(self) -> dict:
        out: dict = {}
        if self.row is not None:
            out["row"] = self.row
        if self.field is not None:
            out["field"] = self.field
        return out


class SchemaError(GradecastError):
    """Header does not match the expected column schema."""

    code = "schema_error"


class CsvParseError(GradecastError):
    """Structurally invalid CSV (ragged row, undecodable content)."""

    code = "parse_error"


class EmptyInputError(GradecastError):
    """No data rows at all (empty file or header-only file)."""

    code = "empty_input"


class LabelMappingError(GradecastError):
    """A remark token outside the declared pass/fail mapping."""

    code = "label_mapping_error"


class EmptyDatasetError(GradecastError):
    """Cleaning dropped every row."""

    code = "empty_dataset"


class ModelFormatError(GradecastError):
    """Model document is malformed or violates a structural invariant."""

    code = "model_format_error"


class ConfigError(GradecastError):
    """Invalid hyperparameters, split settings, or what-if settings."""

    code = "config_error"
