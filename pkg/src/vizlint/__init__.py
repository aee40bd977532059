"""vizlint: detect and repair common visualization errors in charts."""

from __future__ import annotations

from .core import (
    AxisScale,
    AxisSpec,
    CategorySemantics,
    ChartIR,
    ChartType,
    Diagnostic,
    ErrorType,
    FixPatch,
    GridlineSpec,
    LabelRecord,
    PieSlice,
    PredictionRecord,
    SeriesAxis,
    SeriesSpec,
    Severity,
    StyleSpec,
    VizlintError,
    validate_ir,
)
from .detectors import (
    Diagnosis,
    diagnosis_to_dict,
    diagnosis_to_json,
    diagnosis_to_prediction,
    run_detectors,
    suggest_fixes,
)
from .evalharness import EvalReport, TypeScore, emit_scores_csv, score
from .rulebook import Rule, Rulebook, default_rulebook, load_rulebook, parse_rulebook
from .specfmt import (
    InvalidIRError,
    SpecSchemaError,
    SpecSyntaxError,
    SpecVersionError,
    emit_spec,
    ir_to_dict,
    parse_spec,
)
from .workflows import analyze_spec_text, fix_until_clean

__version__ = "0.1.0"

__all__ = [
    "AxisScale",
    "AxisSpec",
    "CategorySemantics",
    "ChartIR",
    "ChartType",
    "Diagnosis",
    "Diagnostic",
    "ErrorType",
    "EvalReport",
    "FixPatch",
    "GridlineSpec",
    "InvalidIRError",
    "LabelRecord",
    "PieSlice",
    "PredictionRecord",
    "Rule",
    "Rulebook",
    "SeriesAxis",
    "SeriesSpec",
    "Severity",
    "SpecSchemaError",
    "SpecSyntaxError",
    "SpecVersionError",
    "StyleSpec",
    "TypeScore",
    "VizlintError",
    "analyze_spec_text",
    "default_rulebook",
    "diagnosis_to_dict",
    "diagnosis_to_json",
    "diagnosis_to_prediction",
    "emit_scores_csv",
    "emit_spec",
    "fix_until_clean",
    "ir_to_dict",
    "load_rulebook",
    "parse_rulebook",
    "parse_spec",
    "run_detectors",
    "score",
    "suggest_fixes",
    "validate_ir",
    "__version__",
]
