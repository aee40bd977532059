"""Multi-label scoring for chart-error predictions.

Two families of metrics:

* Per error type: precision, recall and F1 over item-level set membership.
  A type nobody predicted has undefined precision; a type absent from the
  truth has undefined recall.  Undefined values are carried as 0.0 with a
  defined-flag so report rendering can distinguish "0.00" from "--".
  F1 is 0.0 whenever precision + recall is 0.

* Error counts: mean absolute error and mean signed error of the predicted
  count against the true count, overall and split into single-error
  (true count == 1) and multi-error (true count >= 2) subsets.  Items with
  a true count of 0 contribute to the overall numbers but to neither
  subset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .core import ErrorType, LabelRecord, PredictionRecord, VizlintError


class EmptyInputError(VizlintError):
    pass


class ItemMismatchError(VizlintError):
    pass


@dataclass(frozen=True)
class TypeScore:
    error_type: ErrorType
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    precision_defined: bool
    recall_defined: bool


@dataclass(frozen=True)
class EvalReport:
    per_type: tuple[TypeScore, ...]
    n_items: int
    n_single: int
    n_multi: int
    count_mae: float
    count_mae_single: float
    count_mae_multi: float
    count_bias: float


def _index_by_id(records: Sequence, kind: str) -> dict:
    out = {}
    for r in records:
        if r.item_id in out:
            raise ItemMismatchError(f"duplicate {kind} item_id: {r.item_id}")
        out[r.item_id] = r
    return out


def score(
    truth: Sequence[LabelRecord], predictions: Sequence[PredictionRecord]
) -> EvalReport:
    """Score predictions against ground truth, matched by item_id."""
    if not truth:
        raise EmptyInputError("no ground-truth records")
    t_by_id = _index_by_id(truth, "truth")
    p_by_id = _index_by_id(predictions, "prediction")
    missing = sorted(set(t_by_id) - set(p_by_id))
    surplus = sorted(set(p_by_id) - set(t_by_id))
    if missing or surplus:
        parts = []
        if missing:
            parts.append(f"missing predictions for {missing[:3]}")
        if surplus:
            parts.append(f"predictions for unknown items {surplus[:3]}")
        raise ItemMismatchError("; ".join(parts))

    per_type = []
    for et in ErrorType:
        tp = fp = fn = 0
        for item_id, t in t_by_id.items():
            p = p_by_id[item_id]
            in_t = et in t.error_types
            in_p = et in p.error_types
            if in_t and in_p:
                tp += 1
            elif in_p:
                fp += 1
            elif in_t:
                fn += 1
        p_defined = (tp + fp) > 0
        r_defined = (tp + fn) > 0
        precision = tp / (tp + fp) if p_defined else 0.0
        recall = tp / (tp + fn) if r_defined else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if (precision + recall) > 0
            else 0.0
        )
        per_type.append(
            TypeScore(
                error_type=et,
                tp=tp,
                fp=fp,
                fn=fn,
                precision=precision,
                recall=recall,
                f1=f1,
                precision_defined=p_defined,
                recall_defined=r_defined,
            )
        )

    abs_total = 0
    signed_total = 0
    abs_single = 0
    abs_multi = 0
    n_single = 0
    n_multi = 0
    for item_id, t in t_by_id.items():
        p = p_by_id[item_id]
        diff = p.count - t.count
        abs_total += abs(diff)
        signed_total += diff
        if t.count == 1:
            n_single += 1
            abs_single += abs(diff)
        elif t.count >= 2:
            n_multi += 1
            abs_multi += abs(diff)

    n = len(t_by_id)
    return EvalReport(
        per_type=tuple(per_type),
        n_items=n,
        n_single=n_single,
        n_multi=n_multi,
        count_mae=abs_total / n,
        count_mae_single=(abs_single / n_single) if n_single else 0.0,
        count_mae_multi=(abs_multi / n_multi) if n_multi else 0.0,
        count_bias=signed_total / n,
    )


def _cell(value: float, defined: bool) -> str:
    return f"{value:.2f}" if defined else "--"


def emit_scores_csv(report: EvalReport) -> str:
    """Render a report as CSV: a per-type block, a blank line, and a
    summary block."""
    lines = ["Error Type,Precision,Recall,F1"]
    for ts in report.per_type:
        f1_defined = ts.precision_defined or ts.recall_defined
        lines.append(
            ",".join(
                (
                    ts.error_type.display,
                    _cell(ts.precision, ts.precision_defined),
                    _cell(ts.recall, ts.recall_defined),
                    _cell(ts.f1, f1_defined),
                )
            )
        )
    lines.append("")
    lines.append("Metric,Value")
    lines.append(f"Items,{report.n_items}")
    lines.append(f"Single-Error Items,{report.n_single}")
    lines.append(f"Multi-Error Items,{report.n_multi}")
    lines.append(f"Count MAE,{report.count_mae:.2f}")
    lines.append(f"Count MAE (Single),{report.count_mae_single:.2f}")
    lines.append(f"Count MAE (Multi),{report.count_mae_multi:.2f}")
    lines.append(f"Count Bias,{report.count_bias:.2f}")
    return "\n".join(lines) + "\n"


def _record_from_obj(obj: dict, path: Path, line_no: int):
    if not isinstance(obj, dict):
        raise ItemMismatchError(f"{path}:{line_no}: record is not an object")
    try:
        item_id = obj["item_id"]
        raw_types = obj["error_types"]
    except KeyError as exc:
        raise ItemMismatchError(f"{path}:{line_no}: missing field {exc}") from exc
    error_types = frozenset(ErrorType.from_id(t) for t in raw_types)
    count = obj.get("count", len(error_types))
    if not isinstance(count, int) or isinstance(count, bool) or count < 0:
        raise ItemMismatchError(f"{path}:{line_no}: count must be a non-negative int")
    return item_id, error_types, count


def load_labels_jsonl(path: Path) -> list[LabelRecord]:
    """Read ground-truth labels, one JSON object per line."""
    records = []
    for i, line in enumerate(_lines(path), start=1):
        item_id, error_types, count = _record_from_obj(json.loads(line), path, i)
        if count != len(error_types):
            raise ItemMismatchError(
                f"{path}:{i}: ground-truth count {count} disagrees with "
                f"{len(error_types)} listed types"
            )
        records.append(
            LabelRecord(item_id=item_id, error_types=error_types, count=count)
        )
    return records


def load_predictions_jsonl(path: Path) -> list[PredictionRecord]:
    """Read predictions, one JSON object per line.  count defaults to the
    number of listed types when absent."""
    records = []
    for i, line in enumerate(_lines(path), start=1):
        item_id, error_types, count = _record_from_obj(json.loads(line), path, i)
        records.append(
            PredictionRecord(item_id=item_id, error_types=error_types, count=count)
        )
    return records


def _lines(path: Path) -> Iterable[str]:
    text = Path(path).read_text(encoding="utf-8")
    for line in text.splitlines():
        if line.strip():
            yield line
