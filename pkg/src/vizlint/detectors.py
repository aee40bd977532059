"""Deterministic error detectors and fix strategies.

Each of the twelve error types has one predicate.  A predicate inspects a
ChartIR under the params of a rulebook rule and returns an evidence map
when the error is present, or None.  Evidence values are scalars; the
thresholds that drove the decision are echoed into the evidence so that a
fix strategy can re-check the condition later without the rulebook.

Predicates never mutate the IR and are pure functions of (ir, params), so
running the detector set twice yields byte-identical serialized output.
"""

from __future__ import annotations

import colorsys
import json
import math
from dataclasses import dataclass, replace
from typing import Callable, Mapping, Optional

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
    PieSlice,
    PredictionRecord,
    SeriesAxis,
    Severity,
    StyleSpec,
    VizlintError,
    is_number,
    temporal_offsets,
    validate_ir,
)
from .rulebook import Rule, Rulebook, rules_for
from .specfmt import InvalidIRError

Evidence = dict[str, object]
Predicate = Callable[[ChartIR, Mapping[str, object]], Optional[Evidence]]


class UnknownDetectorError(VizlintError):
    def __init__(self, name: str):
        super().__init__(f"no detector registered for {name!r}")


class NoFixAvailableError(VizlintError):
    def __init__(self, error_type: ErrorType):
        self.error_type = error_type
        super().__init__(f"no fix strategy for {error_type.value}")


@dataclass(frozen=True)
class Diagnosis:
    """All diagnostics for one chart, sorted by (error type id, rule id).

    predicted_count equals len(diagnostics) on the deterministic path; the
    model-backed path may set it from the model's own reported total.
    """

    chart_type: ChartType
    diagnostics: tuple[Diagnostic, ...]
    predicted_count: int
    item_id: Optional[str] = None


# ---------------------------------------------------------------------------
# Shared measurement helpers


def _primary_values(ir: ChartIR) -> list[float]:
    return [y for s in ir.series if s.axis is SeriesAxis.PRIMARY for y in s.y]


def _effective_bounds(axis: AxisSpec, values: list[float]) -> Optional[tuple[float, float]]:
    """Declared bounds where present, data bounds otherwise."""
    lo = axis.min if axis.min is not None else (min(values) if values else None)
    hi = axis.max if axis.max is not None else (max(values) if values else None)
    if lo is None or hi is None:
        return None
    return lo, hi


def _value_axis_ratio(ir: ChartIR) -> Optional[tuple[float, float, float]]:
    """(data_span, axis_span, ratio) for the primary value axis, or None
    when it cannot be measured (no data, degenerate axis, constant data)."""
    values = _primary_values(ir)
    if not values:
        return None
    bounds = _effective_bounds(ir.y_axis, values)
    if bounds is None:
        return None
    axis_span = bounds[1] - bounds[0]
    data_span = max(values) - min(values)
    if axis_span <= 0 or data_span <= 0:
        return None
    return data_span, axis_span, data_span / axis_span


def hue_degrees(color: str) -> float:
    """HSL hue of a #RRGGBB colour, in degrees [0, 360)."""
    r = int(color[1:3], 16) / 255.0
    g = int(color[3:5], 16) / 255.0
    b = int(color[5:7], 16) / 255.0
    h, _, _ = colorsys.rgb_to_hls(r, g, b)
    return (h * 360.0) % 360.0


def _hue_distance(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def _colors_needed(ir: ChartIR) -> int:
    if ir.chart_type is ChartType.PIE:
        return len(ir.slices or ())
    return len(ir.series) if len(ir.series) >= 2 else 1


def spaced_palette(k: int) -> tuple[str, ...]:
    """k colours with evenly spaced hues (360/k degrees apart)."""
    out = []
    for i in range(max(k, 1)):
        h = (15.0 + i * 360.0 / max(k, 1)) / 360.0
        r, g, b = colorsys.hls_to_rgb(h, 0.45, 0.65)
        out.append("#%02x%02x%02x" % (round(r * 255), round(g * 255), round(b * 255)))
    return tuple(out)


def _pair_distances(ir: ChartIR) -> Optional[list[float]]:
    """Pairwise point distances in normalized plot coordinates, pooling all
    series.  None when any x value is non-numeric or spans degenerate."""
    pts: list[tuple[float, float]] = []
    for s in ir.series:
        for x, y in zip(s.x, s.y):
            if not is_number(x):
                return None
            pts.append((float(x), float(y)))
    if len(pts) < 2:
        return None
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    bx = _effective_bounds(ir.x_axis, xs)
    by = _effective_bounds(ir.y_axis, ys)
    if bx is None or by is None:
        return None
    sx = bx[1] - bx[0]
    sy = by[1] - by[0]
    if sx <= 0 or sy <= 0:
        return None
    norm = [((x - bx[0]) / sx, (y - by[0]) / sy) for x, y in pts]
    dists = []
    for i in range(len(norm)):
        for j in range(i + 1, len(norm)):
            dists.append(math.dist(norm[i], norm[j]))
    return dists


def _category_totals(ir: ChartIR) -> Optional[tuple[list[str], list[float]]]:
    """Category tokens in listed order plus the per-category value totals.

    Only primary-axis series are summed: secondary-axis values live on a
    different scale, so mixing them in would make "sorted by value"
    meaningless.  None when the first series' x is not all tokens.
    """
    if not ir.series:
        return None
    order = []
    for x in ir.series[0].x:
        if not isinstance(x, str):
            return None
        if x not in order:
            order.append(x)
    totals = {tok: 0.0 for tok in order}
    for s in ir.series:
        if s.axis is not SeriesAxis.PRIMARY:
            continue
        for x, y in zip(s.x, s.y):
            if isinstance(x, str) and x in totals:
                totals[x] += y
    return order, [totals[tok] for tok in order]


# ---------------------------------------------------------------------------
# Predicates


def _det_improper_scale(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    if ir.chart_type is ChartType.PIE:
        return None
    min_ratio = float(params.get("min_span_ratio", 0.1))
    values = _primary_values(ir)
    if not values:
        return None

    out_of_range = 0
    if ir.y_axis.min is not None:
        out_of_range += sum(1 for v in values if v < ir.y_axis.min)
    if ir.y_axis.max is not None:
        out_of_range += sum(1 for v in values if v > ir.y_axis.max)

    measured = _value_axis_ratio(ir)
    ratio_bad = measured is not None and measured[2] < min_ratio
    if not ratio_bad and out_of_range == 0:
        return None
    data_span, axis_span, ratio = measured if measured else (0.0, 0.0, 1.0)
    return {
        "axis": "y",
        "span_ratio": round(ratio, 6),
        "data_span": round(data_span, 6),
        "axis_span": round(axis_span, 6),
        "out_of_range_count": out_of_range,
        "min_span_ratio": min_ratio,
    }


def _det_non_zero_baseline(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    if ir.chart_type not in (ChartType.BAR, ChartType.AREA, ChartType.LINE):
        return None
    values = _primary_values(ir)
    if not values:
        return None
    bounds = _effective_bounds(ir.y_axis, values)
    if bounds is None:
        return None
    effective_min = bounds[0]
    if effective_min == 0:
        return None

    min_ratio = float(params.get("min_span_ratio", 0.1))
    measured = _value_axis_ratio(ir)
    ratio = measured[2] if measured else 1.0
    if ir.chart_type is ChartType.LINE and ratio >= min_ratio:
        # A line chart may start above zero; it is only misleading when the
        # range also exaggerates the variation.
        return None
    return {
        "axis": "y",
        "effective_min": round(effective_min, 6),
        "data_min": round(min(values), 6),
        "span_ratio": round(ratio, 6),
        "min_span_ratio": min_ratio,
    }


def _det_gridlines(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    if ir.chart_type is ChartType.PIE:
        return None
    limit = int(params.get("max_gridlines", 15))
    axes = [ir.x_axis, ir.y_axis] + ([ir.y2_axis] if ir.y2_axis else [])
    counts = [a.gridlines.count or 0 for a in axes]
    worst = max(counts)
    minor_on_both = (
        ir.x_axis.gridlines.major
        and ir.x_axis.gridlines.minor
        and ir.y_axis.gridlines.major
        and ir.y_axis.gridlines.minor
    )
    if worst <= limit and not minor_on_both:
        return None
    return {
        "gridline_count": worst,
        "max_gridlines": limit,
        "minor_on_both": minor_on_both,
    }


def _det_dual_axis(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    if ir.y2_axis is None:
        return None
    n = sum(1 for s in ir.series if s.axis is SeriesAxis.SECONDARY)
    if n == 0:
        return None
    return {"secondary_series_count": n}


def _det_bar_widths(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    widths = ir.style.bar_rel_widths
    if ir.chart_type is not ChartType.BAR or not widths:
        return None
    tol = float(params.get("rel_tolerance", 0.05))
    mean = sum(widths) / len(widths)
    if mean <= 0:
        return None
    deviation = max(abs(w - mean) for w in widths) / mean
    if deviation <= tol:
        return None
    return {"max_rel_deviation": round(deviation, 6), "rel_tolerance": tol}


def _det_3d(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    if not ir.style.is_3d:
        return None
    return {"is_3d": True}


def _det_colours(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    required = float(params.get("min_hue_separation", 25.0))
    needed = _colors_needed(ir)
    palette = ir.style.palette
    shortage = len(palette) < needed

    used = palette[: needed if needed >= 2 else len(palette)]
    min_sep = 360.0
    if needed >= 2 and len(used) >= 2:
        hues = [hue_degrees(c) for c in used]
        min_sep = min(
            _hue_distance(hues[i], hues[j])
            for i in range(len(hues))
            for j in range(i + 1, len(hues))
        )
    too_close = needed >= 2 and len(used) >= 2 and min_sep < required
    if not shortage and not too_close:
        return None
    return {
        "palette_size": len(palette),
        "colors_needed": needed,
        "min_hue_separation_found": round(min_sep, 6),
        "min_hue_separation": required,
    }


def _det_pie_slices(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    if ir.chart_type is not ChartType.PIE:
        return None
    limit = int(params.get("max_slices", 7))
    n = len(ir.slices or ())
    if n <= limit:
        return None
    return {"slice_count": n, "max_slices": limit}


def _det_labels(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    if ir.chart_type is ChartType.PIE:
        return None
    require_title = bool(params.get("require_title", False))
    missing = []
    if not ir.x_axis.label:
        missing.append("x_label")
    if not ir.y_axis.label:
        missing.append("y_label")
    if len(ir.series) >= 2 and not ir.style.show_legend:
        missing.append("legend")
    if require_title and not ir.title:
        missing.append("title")
    if not missing:
        return None
    return {"missing": ",".join(missing), "require_title": require_title}


def _det_overlap(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    if ir.chart_type is not ChartType.SCATTER:
        return None
    radius = ir.style.point_radius
    if radius is None or radius <= 0:
        return None
    max_frac = float(params.get("max_near_fraction", 0.2))
    multiplier = float(params.get("radius_multiplier", 2.0))
    dists = _pair_distances(ir)
    if not dists:
        return None
    near = sum(1 for d in dists if d < multiplier * radius)
    frac = near / len(dists)
    if frac <= max_frac:
        return None
    return {
        "near_fraction": round(frac, 6),
        "max_near_fraction": max_frac,
        "radius_multiplier": multiplier,
        "point_radius": radius,
        "pair_count": len(dists),
    }


def _gap_spread(positions: list[float]) -> Optional[float]:
    if len(positions) < 3:
        return None
    gaps = [b - a for a, b in zip(positions, positions[1:])]
    mean = sum(gaps) / len(gaps)
    if mean <= 0:
        return None
    return (max(gaps) - min(gaps)) / mean


def _det_ticks(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    if ir.chart_type is ChartType.PIE:
        return None
    tol = float(params.get("rel_tolerance", 0.02))
    for name, axis in (("x", ir.x_axis), ("y", ir.y_axis)):
        if axis.ticks is None or axis.scale is not AxisScale.LINEAR:
            continue
        spread = _gap_spread(list(axis.ticks))
        if spread is not None and spread > tol:
            return {"axis": name, "rel_spread": round(spread, 6), "rel_tolerance": tol}
    # Time-interval flavour: with no explicit ticks, temporal x values act
    # as the tick positions (mapped to day offsets).
    if (
        ir.category_semantics is CategorySemantics.TEMPORAL
        and ir.x_axis.ticks is None
        and ir.series
    ):
        days = temporal_offsets(ir.series[0].x)
        if days is not None:
            spread = _gap_spread(days)
            if spread is not None and spread > tol:
                return {
                    "axis": "x-data",
                    "rel_spread": round(spread, 6),
                    "rel_tolerance": tol,
                }
    return None


def _is_sorted(values: list, reverse: bool = False) -> bool:
    ordered = sorted(values, reverse=reverse)
    return values == ordered


def _det_ordering(ir: ChartIR, params: Mapping) -> Optional[Evidence]:
    if ir.chart_type is not ChartType.BAR:
        return None
    if ir.category_semantics is not CategorySemantics.NOMINAL:
        return None
    if ir.declared_order is not None:
        return None
    measured = _category_totals(ir)
    if measured is None:
        return None
    order, totals = measured
    if len(order) < 3:
        return None
    if _is_sorted(totals) or _is_sorted(totals, reverse=True):
        return None
    if _is_sorted([tok.lower() for tok in order]):
        return None
    return {"observed_order": ",".join(order)}


DETECTORS: dict[ErrorType, Predicate] = {
    ErrorType.IMPROPER_SCALE_OR_AXIS_RANGE: _det_improper_scale,
    ErrorType.NON_ZERO_BASELINE: _det_non_zero_baseline,
    ErrorType.OVERUSE_OF_GRIDLINES: _det_gridlines,
    ErrorType.DUAL_AXIS_ISSUE: _det_dual_axis,
    ErrorType.INCONSISTENT_BAR_WIDTHS: _det_bar_widths,
    ErrorType.OVERUSE_OF_3D_EFFECTS: _det_3d,
    ErrorType.INAPPROPRIATE_COLOUR_CHOICES: _det_colours,
    ErrorType.TOO_MANY_PIE_SLICES: _det_pie_slices,
    ErrorType.MISSING_LABELS_OR_LEGENDS: _det_labels,
    ErrorType.OVERLAPPING_DATA_ELEMENTS: _det_overlap,
    ErrorType.UNEVEN_TICK_INTERVALS: _det_ticks,
    ErrorType.POOR_CATEGORY_ORDERING: _det_ordering,
}

# Param names each detector accepts; the rulebook loader rejects anything else.
PARAM_NAMES: dict[ErrorType, frozenset[str]] = {
    ErrorType.IMPROPER_SCALE_OR_AXIS_RANGE: frozenset({"min_span_ratio"}),
    ErrorType.NON_ZERO_BASELINE: frozenset({"min_span_ratio"}),
    ErrorType.OVERUSE_OF_GRIDLINES: frozenset({"max_gridlines"}),
    ErrorType.DUAL_AXIS_ISSUE: frozenset(),
    ErrorType.INCONSISTENT_BAR_WIDTHS: frozenset({"rel_tolerance"}),
    ErrorType.OVERUSE_OF_3D_EFFECTS: frozenset(),
    ErrorType.INAPPROPRIATE_COLOUR_CHOICES: frozenset({"min_hue_separation"}),
    ErrorType.TOO_MANY_PIE_SLICES: frozenset({"max_slices"}),
    ErrorType.MISSING_LABELS_OR_LEGENDS: frozenset({"require_title"}),
    ErrorType.OVERLAPPING_DATA_ELEMENTS: frozenset(
        {"max_near_fraction", "radius_multiplier"}
    ),
    ErrorType.UNEVEN_TICK_INTERVALS: frozenset({"rel_tolerance"}),
    ErrorType.POOR_CATEGORY_ORDERING: frozenset(),
}

# Evidence keys each detector may emit; message templates may only
# reference these.
EVIDENCE_KEYS: dict[ErrorType, frozenset[str]] = {
    ErrorType.IMPROPER_SCALE_OR_AXIS_RANGE: frozenset(
        {"axis", "span_ratio", "data_span", "axis_span", "out_of_range_count", "min_span_ratio"}
    ),
    ErrorType.NON_ZERO_BASELINE: frozenset(
        {"axis", "effective_min", "data_min", "span_ratio", "min_span_ratio"}
    ),
    ErrorType.OVERUSE_OF_GRIDLINES: frozenset(
        {"gridline_count", "max_gridlines", "minor_on_both"}
    ),
    ErrorType.DUAL_AXIS_ISSUE: frozenset({"secondary_series_count"}),
    ErrorType.INCONSISTENT_BAR_WIDTHS: frozenset(
        {"max_rel_deviation", "rel_tolerance"}
    ),
    ErrorType.OVERUSE_OF_3D_EFFECTS: frozenset({"is_3d"}),
    ErrorType.INAPPROPRIATE_COLOUR_CHOICES: frozenset(
        {"palette_size", "colors_needed", "min_hue_separation_found", "min_hue_separation"}
    ),
    ErrorType.TOO_MANY_PIE_SLICES: frozenset({"slice_count", "max_slices"}),
    ErrorType.MISSING_LABELS_OR_LEGENDS: frozenset({"missing", "require_title"}),
    ErrorType.OVERLAPPING_DATA_ELEMENTS: frozenset(
        {"near_fraction", "max_near_fraction", "radius_multiplier", "point_radius", "pair_count"}
    ),
    ErrorType.UNEVEN_TICK_INTERVALS: frozenset({"axis", "rel_spread", "rel_tolerance"}),
    ErrorType.POOR_CATEGORY_ORDERING: frozenset({"observed_order"}),
}


# ---------------------------------------------------------------------------
# Fix strategies.  Each takes the current IR and the diagnostic whose rule
# requested the fix, and returns (new IR, description).  Strategies read
# thresholds from the diagnostic's evidence echoes.


def _padded_range(values: list[float]) -> tuple[float, float, float]:
    lo, hi = min(values), max(values)
    span = hi - lo
    pad = 0.05 * (span if span > 0 else max(abs(hi), 1.0))
    return lo, hi, pad


def _fix_reset_axis_range(ir: ChartIR, diag: Diagnostic):
    values = _primary_values(ir)
    if not values:
        return ir, "no data to rescale against"
    lo, hi, pad = _padded_range(values)
    if ir.chart_type in (ChartType.BAR, ChartType.AREA) and lo >= 0:
        new_min, new_max = 0.0, hi + pad
    else:
        new_min, new_max = lo - pad, hi + pad
    axis = replace(ir.y_axis, min=new_min, max=new_max)
    return replace(ir, y_axis=axis), (
        f"reset y axis range to the data span with 5% padding "
        f"({new_min:g} to {new_max:g})"
    )


def _fix_zero_baseline(ir: ChartIR, diag: Diagnostic):
    axis = replace(ir.y_axis, min=0.0)
    return replace(ir, y_axis=axis), "set the y axis baseline to zero"


def _fix_drop_secondary_axis(ir: ChartIR, diag: Diagnostic):
    primary = [y for s in ir.series if s.axis is SeriesAxis.PRIMARY for y in s.y]
    new_series = []
    note = "moved secondary series to the primary axis"
    for s in ir.series:
        if s.axis is not SeriesAxis.SECONDARY:
            new_series.append(s)
            continue
        ys = list(s.y)
        if primary and len(ys) >= 1:
            p_lo, p_hi = min(primary), max(primary)
            s_lo, s_hi = min(ys), max(ys)
            if s_hi > s_lo and p_hi > p_lo:
                ys = [p_lo + (y - s_lo) * (p_hi - p_lo) / (s_hi - s_lo) for y in ys]
                note = (
                    "dropped the secondary axis and linearly rescaled its series "
                    f"into the primary range ({p_lo:g} to {p_hi:g})"
                )
        new_series.append(replace(s, y=tuple(ys), axis=SeriesAxis.PRIMARY))
    return replace(ir, series=tuple(new_series), y2_axis=None), note


def _fix_cap_gridlines(ir: ChartIR, diag: Diagnostic):
    limit = int(diag.evidence.get("max_gridlines", 15))

    def cap(axis: AxisSpec) -> AxisSpec:
        gl = axis.gridlines
        count = gl.count
        if count is not None and count > limit:
            count = limit
        return replace(axis, gridlines=GridlineSpec(major=gl.major, minor=False, count=count))

    new = replace(
        ir,
        x_axis=cap(ir.x_axis),
        y_axis=cap(ir.y_axis),
        y2_axis=cap(ir.y2_axis) if ir.y2_axis else None,
    )
    return new, f"capped gridlines at {limit} per axis and removed minor gridlines"


def _fix_equalize_bar_widths(ir: ChartIR, diag: Diagnostic):
    widths = ir.style.bar_rel_widths
    if widths is None:
        return ir, "bar widths already uniform"
    style = replace(ir.style, bar_rel_widths=tuple(1.0 for _ in widths))
    return replace(ir, style=style), "set all bars to equal width"


def _fix_disable_3d(ir: ChartIR, diag: Diagnostic):
    return replace(ir, style=replace(ir.style, is_3d=False)), "removed 3D effects"


def _fix_categorical_palette(ir: ChartIR, diag: Diagnostic):
    k = _colors_needed(ir)
    palette = spaced_palette(k)
    return replace(ir, style=replace(ir.style, palette=palette)), (
        f"replaced the palette with {k} evenly spaced hues"
    )


def _fix_merge_small_slices(ir: ChartIR, diag: Diagnostic):
    limit = int(diag.evidence.get("max_slices", 7))
    slices = list(ir.slices or ())
    if len(slices) <= limit:
        return ir, "slice count already within the limit"
    n_merge = len(slices) - (limit - 1)
    by_value = sorted(range(len(slices)), key=lambda i: (slices[i].value, i))
    merged_idx = set(by_value[:n_merge])
    kept = [s for i, s in enumerate(slices) if i not in merged_idx]
    other = PieSlice(label="Other", value=sum(slices[i].value for i in merged_idx))
    return replace(ir, slices=tuple(kept + [other])), (
        f"merged the {n_merge} smallest slices into an 'Other' slice"
    )


def _fix_add_labels(ir: ChartIR, diag: Diagnostic):
    missing = str(diag.evidence.get("missing", "")).split(",")
    new = ir
    added = []
    if "x_label" in missing:
        new = replace(new, x_axis=replace(new.x_axis, label="Category"))
        added.append("x axis label")
    if "y_label" in missing:
        new = replace(new, y_axis=replace(new.y_axis, label="Value"))
        added.append("y axis label")
    if "legend" in missing:
        new = replace(new, style=replace(new.style, show_legend=True))
        added.append("legend")
    if "title" in missing:
        new = replace(new, title="Untitled Chart")
        added.append("title")
    return new, "added placeholder " + ", ".join(added or ["labels"])


def _fix_shrink_points(ir: ChartIR, diag: Diagnostic):
    max_frac = float(diag.evidence.get("max_near_fraction", 0.2))
    multiplier = float(diag.evidence.get("radius_multiplier", 2.0))
    dists = _pair_distances(ir)
    if not dists:
        return ir, "no measurable point pairs"
    dists.sort()
    allowed = math.floor(max_frac * len(dists))
    if allowed >= len(dists):
        return ir, "overlap already within tolerance"
    target = dists[allowed] / multiplier
    if target <= 0:
        target = 1e-6  # coincident points cannot be separated by radius alone
    style = replace(ir.style, point_radius=target)
    return replace(ir, style=style), (
        f"reduced point radius to {target:.4g} of plot width so at most "
        f"{max_frac:.0%} of point pairs overlap"
    )


def _fix_respace_ticks(ir: ChartIR, diag: Diagnostic):
    which = str(diag.evidence.get("axis", "x"))
    if which == "x-data":
        # Temporal flavour: rewrite the date points themselves onto a
        # uniform day grid anchored at the first date.
        from datetime import date, timedelta

        days = temporal_offsets(ir.series[0].x) or []
        gaps = [b - a for a, b in zip(days, days[1:])]
        step = max(1, round(sum(gaps) / len(gaps))) if gaps else 1
        first = date.fromisoformat(str(ir.series[0].x[0]))
        new_x = tuple(
            (first + timedelta(days=i * step)).isoformat() for i in range(len(days))
        )
        new_series = tuple(
            replace(s, x=new_x) if len(s.x) == len(new_x) else s for s in ir.series
        )
        return replace(ir, series=new_series), (
            f"re-spaced the time axis onto a uniform {step}-day grid"
        )
    axis = ir.x_axis if which == "x" else ir.y_axis
    ticks = list(axis.ticks or ())
    if len(ticks) < 3:
        return ir, "too few ticks to re-space"
    first, last = ticks[0], ticks[-1]
    n = len(ticks)
    new_ticks = tuple(first + i * (last - first) / (n - 1) for i in range(n))
    new_axis = replace(axis, ticks=new_ticks)
    if which == "x":
        new = replace(ir, x_axis=new_axis)
    else:
        new = replace(ir, y_axis=new_axis)
    return new, f"re-spaced the {which} axis ticks uniformly"


def _fix_sort_categories(ir: ChartIR, diag: Diagnostic):
    measured = _category_totals(ir)
    if measured is None:
        return ir, "categories not sortable"
    order, totals = measured
    rank = {
        tok: r
        for r, tok in enumerate(
            sorted(order, key=lambda t: (-totals[order.index(t)], order.index(t)))
        )
    }
    new_series = []
    for s in ir.series:
        pairs = sorted(
            zip(s.x, s.y), key=lambda p: rank.get(p[0], len(rank)) if isinstance(p[0], str) else len(rank)
        )
        new_series.append(
            replace(s, x=tuple(p[0] for p in pairs), y=tuple(p[1] for p in pairs))
        )
    style = ir.style
    if style.bar_rel_widths is not None and len(style.bar_rel_widths) == len(ir.series[0].x):
        permuted = sorted(
            zip(ir.series[0].x, style.bar_rel_widths),
            key=lambda p: rank.get(p[0], len(rank)) if isinstance(p[0], str) else len(rank),
        )
        style = replace(style, bar_rel_widths=tuple(w for _, w in permuted))
    return replace(ir, series=tuple(new_series), style=style), (
        "sorted categories by total value, descending"
    )


STRATEGIES: dict[str, Callable] = {
    "reset-axis-range": _fix_reset_axis_range,
    "zero-baseline": _fix_zero_baseline,
    "drop-secondary-axis": _fix_drop_secondary_axis,
    "cap-gridlines": _fix_cap_gridlines,
    "equalize-bar-widths": _fix_equalize_bar_widths,
    "disable-3d": _fix_disable_3d,
    "categorical-palette": _fix_categorical_palette,
    "merge-small-slices": _fix_merge_small_slices,
    "add-labels": _fix_add_labels,
    "shrink-points": _fix_shrink_points,
    "respace-ticks": _fix_respace_ticks,
    "sort-categories": _fix_sort_categories,
}


# ---------------------------------------------------------------------------
# Driving


def run_detectors(ir: ChartIR, rules: Rulebook | list[Rule]) -> Diagnosis:
    """Evaluate every applicable rule against a valid IR.

    At most one Diagnostic per rule; diagnostics are sorted by
    (error type id, rule id) and predicted_count equals their number.
    """
    violations = validate_ir(ir)
    if violations:
        raise InvalidIRError(violations)

    rule_list = rules.rules if isinstance(rules, Rulebook) else list(rules)
    diagnostics = []
    for rule in rule_list:
        if ir.chart_type not in rule.applies_to:
            continue
        predicate = DETECTORS.get(rule.error_type)
        if predicate is None:
            raise UnknownDetectorError(rule.error_type.value)
        evidence = predicate(ir, rule.params)
        if evidence is None:
            continue
        message = rule.message_template.format(**evidence)
        fix = None
        if rule.fix_strategy is not None:
            base = Diagnostic(
                error_type=rule.error_type,
                rule_id=rule.rule_id,
                severity=rule.severity,
                message=message,
                evidence=evidence,
                fix_strategy=rule.fix_strategy,
            )
            mutated, description = STRATEGIES[rule.fix_strategy](ir, base)
            fix = FixPatch(description=description, mutated_ir=mutated)
        diagnostics.append(
            Diagnostic(
                error_type=rule.error_type,
                rule_id=rule.rule_id,
                severity=rule.severity,
                message=message,
                evidence=evidence,
                fix=fix,
                fix_strategy=rule.fix_strategy,
            )
        )

    diagnostics.sort(key=lambda d: (d.error_type.value, d.rule_id))
    return Diagnosis(
        chart_type=ir.chart_type,
        diagnostics=tuple(diagnostics),
        predicted_count=len(diagnostics),
    )


def suggest_fixes(ir: ChartIR, diagnosis: Diagnosis) -> ChartIR:
    """Apply each diagnostic's fix strategy in diagnosis order.

    A strategy is skipped when earlier fixes already cleared its condition.
    Raises NoFixAvailableError when a diagnostic's rule has no strategy.
    The result always passes validate_ir.
    """
    current = ir
    for diag in diagnosis.diagnostics:
        if diag.fix_strategy is None:
            raise NoFixAvailableError(diag.error_type)
        predicate = DETECTORS[diag.error_type]
        if predicate(current, diag.evidence) is None:
            continue
        current, _ = STRATEGIES[diag.fix_strategy](current, diag)
    violations = validate_ir(current)
    if violations:
        raise InvalidIRError(violations)
    return current


# ---------------------------------------------------------------------------
# Serialization (diag/1)


def diagnostic_to_dict(diag: Diagnostic) -> dict:
    out = {
        "error_type": diag.error_type.value,
        "rule_id": diag.rule_id,
        "severity": diag.severity.value,
        "message": diag.message,
        "evidence": dict(diag.evidence),
        "fix_description": diag.fix.description if diag.fix else None,
    }
    return out


def diagnosis_to_dict(diagnosis: Diagnosis) -> dict:
    return {
        "schema_version": "diag/1",
        "item_id": diagnosis.item_id,
        "chart_type": diagnosis.chart_type.value,
        "predicted_count": diagnosis.predicted_count,
        "diagnostics": [diagnostic_to_dict(d) for d in diagnosis.diagnostics],
    }


def diagnosis_to_json(diagnosis: Diagnosis) -> str:
    return json.dumps(diagnosis_to_dict(diagnosis), indent=2, ensure_ascii=False) + "\n"


def diagnosis_to_prediction(diagnosis: Diagnosis, item_id: Optional[str] = None) -> PredictionRecord:
    return PredictionRecord(
        item_id=item_id or diagnosis.item_id or "",
        error_types=frozenset(d.error_type for d in diagnosis.diagnostics),
        count=diagnosis.predicted_count,
    )
