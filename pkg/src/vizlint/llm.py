"""Staged model pipeline for image and source-code chart inputs.

The pipeline runs five named stages.  Three of them call the backend
(chart_type_detection, threshold_evaluation, issue_detection); the
rule_application stage is local bookkeeping that records which rules were
put in front of the model, and code_correction runs only on request for
source inputs.

Stage prompts deliberately contain no numbers.  Every threshold the model
is asked to apply arrives through the rendered rulebook text, so editing
the rulebook JSON changes model behaviour without touching code.

Backends implement one method:

    complete(stage, prompt, image, fingerprint) -> str

The fingerprint identifies the input (caller-supplied item id, or a hash
of the payload) and lets the mock backend key canned responses.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence

from .core import ChartType, Diagnostic, ErrorType, Severity, VizlintError
from .detectors import Diagnosis
from .rulebook import Rule, Rulebook, rules_for

MOCK_VERSION = "mock/1"

STAGE_CHART_TYPE = "chart_type_detection"
STAGE_THRESHOLDS = "threshold_evaluation"
STAGE_RULES = "rule_application"
STAGE_ISSUES = "issue_detection"
STAGE_CORRECTION = "code_correction"

CHART_TYPE_PROMPT = (
    "Detect the type of chart represented in the provided input. "
    "Respond with only the chart type name (e.g., Bar Plot, Line Plot, etc.)."
)

THRESHOLD_PROMPT = (
    "Measure the chart features that linting rules depend on: axis ranges "
    "and the span of the plotted data, gridline density, bar width "
    "variation, palette hues, pie slice count, presence of titles, axis "
    "labels and legends, tick spacing, and point crowding. Report each "
    "measurement plainly, one per line."
)

ISSUE_PROMPT = (
    "Audit the chart against every rule listed below. Use the reported "
    "measurements. Respond with only JSON of the form "
    '{"issues": [{"type": "<error type id>", "message": "<explanation>"}], '
    '"count": <total number of issues>}. Use each rule\'s error type id '
    "verbatim. If the chart is clean, return an empty issues list and a "
    "count of zero."
)

CORRECTION_PROMPT = (
    "Rewrite the following plot source so that every listed issue is "
    "fixed, changing nothing else. Respond with only the corrected source."
)


class BackendUnavailable(VizlintError):
    pass


class MockFixtureError(BackendUnavailable):
    """A mock table is broken or lacks a response for the requested key.
    Subclasses BackendUnavailable so callers treat it as a backend outage."""


class UnknownChartTypeError(VizlintError):
    pass


class MalformedIssueListError(VizlintError):
    pass


class EmptyCorrectionError(VizlintError):
    pass


class CorrectionPreconditionError(VizlintError):
    pass


class Backend(Protocol):
    def complete(
        self,
        stage: str,
        prompt: str,
        image: Optional[bytes],
        fingerprint: str,
    ) -> str: ...


@dataclass(frozen=True)
class TranscriptEntry:
    stage: str
    prompt: str
    response: str
    latency_s: float
    fingerprint: str


@dataclass(frozen=True)
class PipelineResult:
    input_kind: str  # "image" or "code"
    chart_type: ChartType
    diagnosis: Diagnosis
    transcript: tuple[TranscriptEntry, ...]
    warnings: tuple[str, ...]
    source: Optional[str] = None


class MockBackend:
    """Deterministic table-driven backend.

    Responses are keyed by "<stage>:<fingerprint>"; a default response
    covers everything unkeyed.  Latency is always reported as zero so
    repeated runs produce byte-identical transcripts.
    """

    def __init__(self, responses: dict[str, str], default: Optional[str] = None):
        self._responses = dict(responses)
        self._default = default

    @classmethod
    def from_file(cls, path: Path) -> "MockBackend":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise MockFixtureError(f"cannot load mock fixture {path}: {exc}") from exc
        if not isinstance(doc, dict) or doc.get("version") != MOCK_VERSION:
            raise MockFixtureError(
                f"{path}: expected a fixture with version {MOCK_VERSION!r}"
            )
        responses = doc.get("responses", {})
        if not isinstance(responses, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in responses.items()
        ):
            raise MockFixtureError(f"{path}: responses must map strings to strings")
        default = doc.get("default")
        if default is not None and not isinstance(default, str):
            raise MockFixtureError(f"{path}: default must be a string")
        return cls(responses=responses, default=default)

    def complete(
        self,
        stage: str,
        prompt: str,
        image: Optional[bytes],
        fingerprint: str,
    ) -> str:
        key = f"{stage}:{fingerprint}"
        if key in self._responses:
            return self._responses[key]
        if self._default is not None:
            return self._default
        raise MockFixtureError(f"no mock response for {key} and no default")


class RemoteBackend:
    """Chat-completions HTTP backend.

    The API key is read from VIZLINT_API_KEY at call time.  Requests are
    bounded: at most max_retries + 1 attempts per call, and at most
    max_parallel calls in flight at once.
    """

    def __init__(
        self,
        base_url: str,
        model: str = "default",
        timeout: float = 60.0,
        max_retries: int = 2,
        max_parallel: int = 4,
        retry_wait: float = 0.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.timeout = timeout
        self.max_retries = max_retries
        self.retry_wait = retry_wait
        self._gate = threading.Semaphore(max_parallel)

    def _build_messages(self, prompt: str, image: Optional[bytes]) -> list:
        content: list = [{"type": "text", "text": prompt}]
        if image is not None:
            encoded = base64.b64encode(image).decode("ascii")
            content.append(
                {
                    "type": "image_url",
                    "image_url": {"url": f"data:image/svg+xml;base64,{encoded}"},
                }
            )
        return [{"role": "user", "content": content}]

    def complete(
        self,
        stage: str,
        prompt: str,
        image: Optional[bytes],
        fingerprint: str,
    ) -> str:
        import httpx

        headers = {}
        api_key = os.environ.get("VIZLINT_API_KEY")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": self.model,
            "messages": self._build_messages(prompt, image),
        }
        last_error: Optional[str] = None
        with self._gate:
            for attempt in range(self.max_retries + 1):
                if attempt and self.retry_wait:
                    time.sleep(self.retry_wait)
                try:
                    resp = httpx.post(
                        f"{self.base_url}/chat/completions",
                        json=payload,
                        headers=headers,
                        timeout=self.timeout,
                    )
                except httpx.HTTPError as exc:
                    last_error = str(exc)
                    continue
                if resp.status_code >= 500:
                    last_error = f"server returned {resp.status_code}"
                    continue
                if resp.status_code != 200:
                    raise BackendUnavailable(
                        f"{stage}: backend rejected request "
                        f"({resp.status_code}): {resp.text[:200]}"
                    )
                try:
                    return resp.json()["choices"][0]["message"]["content"]
                except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
                    raise BackendUnavailable(
                        f"{stage}: malformed backend response: {exc}"
                    ) from exc
        raise BackendUnavailable(f"{stage}: backend unreachable: {last_error}")


def payload_fingerprint(payload: bytes | str, item_id: Optional[str] = None) -> str:
    if item_id:
        return item_id
    data = payload if isinstance(payload, bytes) else payload.encode("utf-8")
    return hashlib.sha256(data).hexdigest()[:16]


_TYPE_SUFFIXES = ("plot", "chart", "graph", "diagram")

_CHART_NAMES = {
    "bar": ChartType.BAR,
    "line": ChartType.LINE,
    "pie": ChartType.PIE,
    "scatter": ChartType.SCATTER,
    "area": ChartType.AREA,
    "stacked area": ChartType.AREA,
    "grouped bar": ChartType.BAR,
    "stacked bar": ChartType.BAR,
    "time series": ChartType.LINE,
    "timeseries": ChartType.LINE,
    "bubble": ChartType.SCATTER,
    "donut": ChartType.PIE,
    "doughnut": ChartType.PIE,
}


def normalize_chart_type(text: str) -> ChartType:
    """Map a free-text chart type name onto the supported enum."""
    cleaned = re.sub(r"[^a-z ]+", " ", text.strip().lower())
    words = cleaned.split()
    while words and words[-1] in _TYPE_SUFFIXES:
        words.pop()
    name = " ".join(words)
    # Fused forms like "scatterplot" or "barchart".
    for suffix in _TYPE_SUFFIXES:
        if name.endswith(suffix) and name not in _CHART_NAMES:
            name = name[: -len(suffix)].strip()
    if name in _CHART_NAMES:
        return _CHART_NAMES[name]
    # A compound like "horizontal bar" still names a bar chart.
    for key in sorted(_CHART_NAMES, key=len, reverse=True):
        if re.search(rf"\b{re.escape(key)}\b", name):
            return _CHART_NAMES[key]
    raise UnknownChartTypeError(f"unrecognized chart type: {text.strip()!r}")


def render_rules_text(rules: Sequence[Rule]) -> str:
    """Render rules as prompt text.  This is the only place thresholds
    enter a prompt."""
    lines = []
    for rule in rules:
        params = "; ".join(f"{k}={v}" for k, v in sorted(rule.params.items()))
        applies = ", ".join(sorted(ct.value for ct in rule.applies_to))
        line = (
            f"- error type id: {rule.error_type.value} | rule: {rule.rule_id} | "
            f"applies to: {applies} | severity: {rule.severity.value}"
        )
        if params:
            line += f" | thresholds: {params}"
        lines.append(line)
    return "\n".join(lines)


def _load_synonyms() -> dict[str, str]:
    from importlib.resources import files

    doc = json.loads(
        files("vizlint").joinpath("rules/synonyms.json").read_text(encoding="utf-8")
    )
    return dict(doc["synonyms"])


_SYNONYMS: Optional[dict[str, str]] = None


def _synonyms() -> dict[str, str]:
    global _SYNONYMS
    if _SYNONYMS is None:
        _SYNONYMS = _load_synonyms()
    return _SYNONYMS


def resolve_issue_type(raw: str) -> Optional[ErrorType]:
    """Resolve a model-reported issue type to the taxonomy, or None."""
    text = raw.strip()
    try:
        return ErrorType.from_id(text)
    except VizlintError:
        pass
    normalized = re.sub(r"[^a-z0-9]+", " ", text.lower()).strip()
    table = _synonyms()
    if normalized in table:
        return ErrorType.from_id(table[normalized])
    hyphenated = normalized.replace(" ", "-")
    try:
        return ErrorType.from_id(hyphenated)
    except VizlintError:
        return None


def _strip_fences(text: str) -> str:
    stripped = text.strip()
    if stripped.startswith("```"):
        lines = stripped.splitlines()
        if lines and lines[0].startswith("```"):
            lines = lines[1:]
        if lines and lines[-1].strip() == "```":
            lines = lines[:-1]
        stripped = "\n".join(lines).strip()
    return stripped


def parse_issue_response(text: str) -> tuple[list[dict], int]:
    """Parse the issue_detection JSON. Returns (issues, predicted count)."""
    try:
        doc = json.loads(_strip_fences(text))
    except json.JSONDecodeError as exc:
        raise MalformedIssueListError(f"issue list is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedIssueListError("issue list must be a JSON object")
    issues = doc.get("issues")
    count = doc.get("count")
    if not isinstance(issues, list):
        raise MalformedIssueListError('missing or non-array "issues"')
    if not isinstance(count, int) or isinstance(count, bool) or count < 0:
        raise MalformedIssueListError('"count" must be a non-negative integer')
    for i, issue in enumerate(issues):
        if not isinstance(issue, dict) or not isinstance(issue.get("type"), str):
            raise MalformedIssueListError(f'issue {i} lacks a string "type"')
    return issues, count


def _rule_for(
    rules: Sequence[Rule], error_type: ErrorType
) -> tuple[str, Severity]:
    for rule in rules:
        if rule.error_type is error_type:
            return rule.rule_id, rule.severity
    return "llm-report", Severity.WARNING


def run_pipeline(
    payload: bytes | str,
    input_kind: str,
    backend: Backend,
    rulebook: Rulebook,
    item_id: Optional[str] = None,
) -> PipelineResult:
    """Run the staged analysis over an image (bytes) or plot source (str)."""
    if input_kind not in ("image", "code"):
        raise VizlintError(f"unsupported input kind: {input_kind!r}")
    if input_kind == "image" and not isinstance(payload, bytes):
        raise VizlintError("image input requires bytes")
    if input_kind == "code" and not isinstance(payload, str):
        raise VizlintError("code input requires text")

    fingerprint = payload_fingerprint(payload, item_id)
    image = payload if input_kind == "image" else None
    source = payload if input_kind == "code" else None
    transcript: list[TranscriptEntry] = []

    def call(stage: str, prompt: str) -> str:
        started = time.perf_counter()
        response = backend.complete(stage, prompt, image, fingerprint)
        latency = time.perf_counter() - started
        if isinstance(backend, MockBackend):
            latency = 0.0
        transcript.append(
            TranscriptEntry(
                stage=stage,
                prompt=prompt,
                response=response,
                latency_s=round(latency, 6),
                fingerprint=fingerprint,
            )
        )
        return response

    type_prompt = CHART_TYPE_PROMPT
    if source is not None:
        type_prompt = f"{CHART_TYPE_PROMPT}\n\nSource:\n{source}"
    chart_type = normalize_chart_type(call(STAGE_CHART_TYPE, type_prompt))

    measure_prompt = THRESHOLD_PROMPT
    if source is not None:
        measure_prompt = f"{THRESHOLD_PROMPT}\n\nSource:\n{source}"
    measurements = call(STAGE_THRESHOLDS, measure_prompt)

    rules = rules_for(rulebook, chart_type)
    rules_text = render_rules_text(rules)
    transcript.append(
        TranscriptEntry(
            stage=STAGE_RULES,
            prompt=rules_text,
            response="",
            latency_s=0.0,
            fingerprint=fingerprint,
        )
    )

    issue_prompt = (
        f"{ISSUE_PROMPT}\n\nChart type: {chart_type.value}\n\n"
        f"Rules:\n{rules_text}\n\nMeasurements:\n{measurements}"
    )
    if source is not None:
        issue_prompt += f"\n\nSource:\n{source}"
    raw_issues = call(STAGE_ISSUES, issue_prompt)

    issues, predicted_count = parse_issue_response(raw_issues)
    diagnostics = []
    warnings: list[str] = []
    for issue in issues:
        error_type = resolve_issue_type(issue["type"])
        if error_type is None:
            warnings.append(f"unrecognized issue type: {issue['type']!r}")
            continue
        rule_id, severity = _rule_for(rules, error_type)
        message = issue.get("message")
        if not isinstance(message, str) or not message.strip():
            message = f"model flagged {error_type.display}"
        diagnostics.append(
            Diagnostic(
                error_type=error_type,
                rule_id=rule_id,
                severity=severity,
                message=message.strip(),
                evidence={},
                fix=None,
            )
        )
    diagnostics.sort(key=lambda d: (d.error_type.value, d.rule_id))

    diagnosis = Diagnosis(
        chart_type=chart_type,
        diagnostics=tuple(diagnostics),
        predicted_count=predicted_count,
        item_id=item_id,
    )
    return PipelineResult(
        input_kind=input_kind,
        chart_type=chart_type,
        diagnosis=diagnosis,
        transcript=tuple(transcript),
        warnings=tuple(warnings),
        source=source,
    )


def correct_code(
    result: PipelineResult, backend: Backend
) -> tuple[str, Optional[TranscriptEntry]]:
    """Ask the backend to rewrite plot source fixing the found issues.

    Requires a code-input pipeline result.  When the diagnosis is clean
    the source is returned unchanged without a backend call.
    """
    if result.input_kind != "image" and result.source is None:
        raise CorrectionPreconditionError("pipeline result carries no source")
    if result.input_kind == "image":
        raise CorrectionPreconditionError(
            "code correction requires source input, not an image"
        )
    if not result.diagnosis.diagnostics and result.diagnosis.predicted_count == 0:
        return result.source or "", None

    listing = "\n".join(
        f"- {d.error_type.value}: {d.message}" for d in result.diagnosis.diagnostics
    )
    prompt = f"{CORRECTION_PROMPT}\n\nIssues:\n{listing}\n\nSource:\n{result.source}"
    fingerprint = result.transcript[0].fingerprint if result.transcript else (
        payload_fingerprint(result.source or "")
    )
    started = time.perf_counter()
    response = backend.complete(STAGE_CORRECTION, prompt, None, fingerprint)
    latency = time.perf_counter() - started
    if isinstance(backend, MockBackend):
        latency = 0.0
    if not response.strip():
        raise EmptyCorrectionError("backend returned an empty correction")
    corrected = _strip_fences(response)
    if not corrected.endswith("\n"):
        corrected += "\n"
    entry = TranscriptEntry(
        stage=STAGE_CORRECTION,
        prompt=prompt,
        response=response,
        latency_s=round(latency, 6),
        fingerprint=fingerprint,
    )
    return corrected, entry


def transcript_to_dicts(transcript: Sequence[TranscriptEntry]) -> list[dict]:
    return [
        {
            "stage": e.stage,
            "prompt": e.prompt,
            "response": e.response,
            "latency_s": e.latency_s,
            "fingerprint": e.fingerprint,
        }
        for e in transcript
    ]
