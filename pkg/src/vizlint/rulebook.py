"""Rule engine: load and query chart-quality rulebooks.

A rulebook is a `rules/1` JSON file binding each rule to an error type,
the chart types it applies to, its threshold params, a severity, a message
template, and an optional fix strategy.  All thresholds live here, not in
code; swapping the file swaps the thresholds.  The packaged default book
lives at rules/default.rules.json.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Union

from .core import ChartType, ErrorType, Severity, UnknownErrorTypeError, VizlintError

RULEBOOK_VERSION = "rules/1"


class RuleSchemaError(VizlintError):
    def __init__(self, rule_id: str, reason: str):
        self.rule_id = rule_id
        self.reason = reason
        super().__init__(f"rule {rule_id!r}: {reason}")


@dataclass(frozen=True)
class Rule:
    rule_id: str
    error_type: ErrorType
    applies_to: frozenset[ChartType]
    params: Mapping[str, Union[float, int, bool, str]] = field(default_factory=dict)
    severity: Severity = Severity.WARNING
    message_template: str = ""
    fix_strategy: Optional[str] = None


@dataclass(frozen=True)
class Rulebook:
    version: str
    rules: tuple[Rule, ...]


def _template_placeholders(template: str) -> set[str]:
    names = set()
    for _, name, _, _ in string.Formatter().parse(template):
        if name:
            names.add(name)
    return names


def _parse_rule(raw: dict, index: int) -> Rule:
    # Late import: detectors depends on this module for the Rule type.
    from .detectors import EVIDENCE_KEYS, PARAM_NAMES, STRATEGIES

    rule_id = raw.get("rule_id")
    if not isinstance(rule_id, str) or not rule_id:
        raise RuleSchemaError(f"#{index}", "rule_id must be a non-empty string")

    allowed_keys = {
        "rule_id",
        "error_type",
        "applies_to",
        "params",
        "severity",
        "message_template",
        "fix_strategy",
    }
    for key in raw:
        if key not in allowed_keys:
            raise RuleSchemaError(rule_id, f"unknown key {key!r}")

    try:
        error_type = ErrorType.from_id(str(raw.get("error_type")))
    except UnknownErrorTypeError as exc:
        raise RuleSchemaError(rule_id, str(exc)) from None

    applies_raw = raw.get("applies_to")
    if not isinstance(applies_raw, list) or not applies_raw:
        raise RuleSchemaError(rule_id, "applies_to must be a non-empty array")
    applies = []
    for ct in applies_raw:
        try:
            applies.append(ChartType(ct))
        except ValueError:
            raise RuleSchemaError(rule_id, f"unknown chart type {ct!r}") from None

    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise RuleSchemaError(rule_id, "params must be an object")
    allowed_params = PARAM_NAMES[error_type]
    for name, value in params.items():
        if name not in allowed_params:
            raise RuleSchemaError(
                rule_id, f"unknown param {name!r} for {error_type.value}"
            )
        if isinstance(value, bool):
            continue
        if not isinstance(value, (int, float, str)):
            raise RuleSchemaError(rule_id, f"param {name!r} must be a scalar")

    severity = Severity.WARNING
    if "severity" in raw:
        try:
            severity = Severity(raw["severity"])
        except ValueError:
            raise RuleSchemaError(
                rule_id, f"unknown severity {raw['severity']!r}"
            ) from None

    template = raw.get("message_template")
    if not isinstance(template, str) or not template:
        raise RuleSchemaError(rule_id, "message_template must be a non-empty string")
    extra = _template_placeholders(template) - set(EVIDENCE_KEYS[error_type])
    if extra:
        raise RuleSchemaError(
            rule_id,
            f"message_template references unknown evidence keys: {sorted(extra)}",
        )

    strategy = raw.get("fix_strategy")
    if strategy is not None:
        if strategy not in STRATEGIES:
            raise RuleSchemaError(rule_id, f"unknown fix_strategy {strategy!r}")

    return Rule(
        rule_id=rule_id,
        error_type=error_type,
        applies_to=frozenset(applies),
        params=dict(params),
        severity=severity,
        message_template=template,
        fix_strategy=strategy,
    )


def parse_rulebook(text: str) -> Rulebook:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RuleSchemaError("", f"rulebook is not valid JSON: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise RuleSchemaError("", "rulebook top level must be an object")
    version = raw.get("version")
    if version != RULEBOOK_VERSION:
        raise RuleSchemaError("", f"unsupported rulebook version {version!r}")
    rules_raw = raw.get("rules")
    if not isinstance(rules_raw, list):
        raise RuleSchemaError("", "rules must be an array")

    rules = []
    seen_ids = set()
    for i, entry in enumerate(rules_raw):
        if not isinstance(entry, dict):
            raise RuleSchemaError(f"#{i}", "rule must be an object")
        rule = _parse_rule(entry, i)
        if rule.rule_id in seen_ids:
            raise RuleSchemaError(rule.rule_id, "duplicate rule_id")
        seen_ids.add(rule.rule_id)
        rules.append(rule)
    return Rulebook(version=version, rules=tuple(rules))


def load_rulebook(path: Union[str, Path]) -> Rulebook:
    """Load a rulebook file.  Raises OSError when unreadable and
    RuleSchemaError for every format violation."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_rulebook(text)


def default_rulebook() -> Rulebook:
    text = (
        resources.files("vizlint").joinpath("rules/default.rules.json").read_text("utf-8")
    )
    return parse_rulebook(text)


def rules_for(rulebook: Rulebook, chart_type: ChartType) -> list[Rule]:
    """Rules applicable to a chart type, in rulebook order."""
    return [r for r in rulebook.rules if chart_type in r.applies_to]


def rulebook_to_dict(rulebook: Rulebook) -> dict:
    return {
        "version": rulebook.version,
        "rules": [
            {
                "rule_id": r.rule_id,
                "error_type": r.error_type.value,
                "applies_to": sorted(ct.value for ct in r.applies_to),
                "params": dict(r.params),
                "severity": r.severity.value,
                "message_template": r.message_template,
                "fix_strategy": r.fix_strategy,
            }
            for r in rulebook.rules
        ],
    }
