"""gradecast: pass/fail prediction for semestral courses.

Library layers: `ingest` (CSV cleaning), `cart` (decision-tree learner),
`evaluation` (split + metrics), `whatif` (improvement advice), plus a CLI
(`gradecast`) and an HTTP service (`gradecast.service`).
"""

from .cart import (
    ClassCounts,
    HyperParams,
    Prediction,
    SplitCandidate,
    Tree,
    TreeNode,
    best_split,
    candidate_thresholds,
    deserialize,
    entropy,
    fit,
    gini,
    predict,
    serialize,
    to_dot,
)
from .errors import (
    ConfigError,
    CsvParseError,
    EmptyDatasetError,
    EmptyInputError,
    GradecastError,
    LabelMappingError,
    ModelFormatError,
    SchemaError,
)
from .evaluation import (
    ConfusionMatrix,
    EvaluationReport,
    SplitConfig,
    confusion_matrix,
    format_matrix,
    format_report,
    metrics,
    train_test_split,
)
from .ingest import (
    CANONICAL_HEADER,
    CLEAN_SCHEMA,
    FEATURE_NAMES,
    RAW_SCHEMA,
    CleaningReport,
    ColumnSchema,
    Dataset,
    RawTable,
    StudentRecord,
    binarize_label,
    clean,
    dataset_to_csv,
    parse_csv,
)
from .pipeline import evaluate_on, train_and_evaluate
from .whatif import Counterfactual, WhatIfConfig, WhatIfResult, rank_criteria, render_rows, suggest

__version__ = "0.1.0"

__all__ = [
    "ClassCounts",
    "HyperParams",
    "Prediction",
    "SplitCandidate",
    "Tree",
    "TreeNode",
    "best_split",
    "candidate_thresholds",
    "deserialize",
    "entropy",
    "fit",
    "gini",
    "predict",
    "serialize",
    "to_dot",
    "ConfigError",
    "CsvParseError",
    "EmptyDatasetError",
    "EmptyInputError",
    "GradecastError",
    "LabelMappingError",
    "ModelFormatError",
    "SchemaError",
    "ConfusionMatrix",
    "EvaluationReport",
    "SplitConfig",
    "confusion_matrix",
    "format_matrix",
    "format_report",
    "metrics",
    "train_test_split",
    "CANONICAL_HEADER",
    "CLEAN_SCHEMA",
    "FEATURE_NAMES",
    "RAW_SCHEMA",
    "CleaningReport",
    "ColumnSchema",
    "Dataset",
    "RawTable",
    "StudentRecord",
    "binarize_label",
    "clean",
    "dataset_to_csv",
    "parse_csv",
    "evaluate_on",
    "train_and_evaluate",
    "Counterfactual",
    "WhatIfConfig",
    "WhatIfResult",
    "rank_criteria",
    "render_rows",
    "suggest",
    "__version__",
]
