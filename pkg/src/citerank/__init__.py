"""Age-corrected, field-adjusted citation statistics and department ranking."""

from .corpus import Corpus, FacultyRecord, RowRejection, corpus_csv, parse_corpus, rejections_csv
from .errors import ParseError, ValidationError
from .fields import MAJOR_FIELDS, FieldMap, default_field_map, load_field_map, map_field
from .normalize import (
    AlphaDiagnostic,
    CalibrationResult,
    NormalizationConfig,
    ScoredRecord,
    calibrate_exponent,
    compute_age,
    normalized_citations,
    score_corpus,
)
from .rank import DepartmentScore, emit_ranking_report, rank_departments
from .stats import (
    FieldStats,
    PermutationResult,
    QQSeries,
    RegressionFit,
    all_pairwise_tests,
    factored_ols,
    field_summary,
    permutation_test,
    qq_exponential,
    simple_ols,
    zscore_by_field,
)
from .synth import SynthField, SynthSpec, generate

__version__ = "0.1.0"

__all__ = [
    "AlphaDiagnostic",
    "CalibrationResult",
    "Corpus",
    "DepartmentScore",
    "FacultyRecord",
    "FieldMap",
    "FieldStats",
    "MAJOR_FIELDS",
    "NormalizationConfig",
    "ParseError",
    "PermutationResult",
    "QQSeries",
    "RegressionFit",
    "RowRejection",
    "ScoredRecord",
    "SynthField",
    "SynthSpec",
    "ValidationError",
    "all_pairwise_tests",
    "calibrate_exponent",
    "compute_age",
    "corpus_csv",
    "default_field_map",
    "emit_ranking_report",
    "factored_ols",
    "field_summary",
    "generate",
    "load_field_map",
    "map_field",
    "normalized_citations",
    "parse_corpus",
    "permutation_test",
    "qq_exponential",
    "rank_departments",
    "rejections_csv",
    "score_corpus",
    "simple_ols",
    "zscore_by_field",
]
