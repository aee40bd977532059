"""Shared analyze/fix orchestration used by both the CLI and the HTTP
service, so the two interfaces cannot drift apart."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import ChartIR, ChartType, VizlintError
from .detectors import (
    Diagnosis,
    diagnostic_to_dict,
    run_detectors,
    suggest_fixes,
)
from .llm import (
    Backend,
    PipelineResult,
    TranscriptEntry,
    correct_code,
    run_pipeline,
    transcript_to_dicts,
)
from .rulebook import Rulebook, default_rulebook
from .specfmt import emit_spec, parse_spec

MAX_FIX_ITERATIONS = 3


class FixDidNotConvergeError(VizlintError):
    pass


@dataclass(frozen=True)
class AnalysisOutcome:
    mode: str
    chart_type: ChartType
    diagnosis: Diagnosis
    warnings: tuple[str, ...] = ()
    transcript: tuple[TranscriptEntry, ...] = ()
    corrected: Optional[str] = None  # fixed spec JSON, or corrected source


def fix_until_clean(
    ir: ChartIR,
    rulebook: Optional[Rulebook] = None,
    max_iterations: int = MAX_FIX_ITERATIONS,
) -> tuple[ChartIR, int]:
    """Apply fixes and re-lint until no diagnostics remain.

    Returns the fixed chart and the number of fix passes used.  Raises
    FixDidNotConvergeError if diagnostics survive max_iterations passes.
    """
    book = rulebook if rulebook is not None else default_rulebook()
    current = ir
    for iteration in range(1, max_iterations + 1):
        diagnosis = run_detectors(current, book)
        if not diagnosis.diagnostics:
            return current, iteration - 1
        current = suggest_fixes(current, diagnosis)
    diagnosis = run_detectors(current, book)
    if not diagnosis.diagnostics:
        return current, max_iterations
    raise FixDidNotConvergeError(
        f"{len(diagnosis.diagnostics)} diagnostics remain after "
        f"{max_iterations} fix passes"
    )


def analyze_spec_text(
    text: str, rulebook: Optional[Rulebook] = None
) -> AnalysisOutcome:
    """Deterministic path: parse a spec document, lint it, and attach a
    fully fixed spec when anything was found."""
    book = rulebook if rulebook is not None else default_rulebook()
    ir = parse_spec(text)
    diagnosis = run_detectors(ir, book)
    corrected = None
    if diagnosis.diagnostics:
        fixed, _ = fix_until_clean(ir, book)
        corrected = emit_spec(fixed)
    return AnalysisOutcome(
        mode="spec",
        chart_type=ir.chart_type,
        diagnosis=diagnosis,
        corrected=corrected,
    )


def analyze_with_backend(
    payload: bytes | str,
    mode: str,
    backend: Backend,
    rulebook: Optional[Rulebook] = None,
    item_id: Optional[str] = None,
    with_correction: bool = True,
) -> AnalysisOutcome:
    """Model-backed path for image bytes or plot source text."""
    book = rulebook if rulebook is not None else default_rulebook()
    result: PipelineResult = run_pipeline(
        payload, mode, backend, book, item_id=item_id
    )
    transcript = result.transcript
    corrected = None
    if (
        mode == "code"
        and with_correction
        and (result.diagnosis.diagnostics or result.diagnosis.predicted_count)
    ):
        corrected, entry = correct_code(result, backend)
        if entry is not None:
            transcript = transcript + (entry,)
    return AnalysisOutcome(
        mode=mode,
        chart_type=result.chart_type,
        diagnosis=result.diagnosis,
        warnings=result.warnings,
        transcript=transcript,
        corrected=corrected,
    )


def outcome_to_dict(
    outcome: AnalysisOutcome, include_transcript: bool = False
) -> dict:
    """Wire shape shared by the CLI JSON output and the HTTP API."""
    doc = {
        "mode": outcome.mode,
        "chart_type": outcome.chart_type.value,
        "predicted_count": outcome.diagnosis.predicted_count,
        "issues": [diagnostic_to_dict(d) for d in outcome.diagnosis.diagnostics],
        "warnings": list(outcome.warnings),
    }
    if outcome.corrected is not None:
        doc["corrected_spec"] = outcome.corrected
    if include_transcript:
        doc["transcript"] = transcript_to_dicts(outcome.transcript)
    return doc
