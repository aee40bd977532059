"""Synthetic chart corpus generation.

Every corpus item is built as a clean chart first, then one designed
"primary" error is injected, plus one or two extra compatible errors for
the multi-error quota.  Injection is closed against the detectors: the
generator asserts that running the default rulebook over each emitted spec
reproduces the item's label set exactly.

Determinism contract: the label structure (item ids, chart types, primary
and extra error assignments) depends only on the config counts, never on
the seed; the seed drives data values alone.  The same config therefore
always produces byte-identical files, and two configs differing only in
seed produce the same labels over different data.
"""

from __future__ import annotations

import colorsys
import itertools
import json
import math
import random
from dataclasses import dataclass, replace
from datetime import date, timedelta
from pathlib import Path
from typing import Callable, Optional, Sequence

from .core import (
    AxisSpec,
    CategorySemantics,
    ChartIR,
    ChartType,
    ErrorType,
    GridlineSpec,
    LabelRecord,
    PieSlice,
    SeriesAxis,
    SeriesSpec,
    StyleSpec,
    VizlintError,
)
from .detectors import DETECTORS, run_detectors, spaced_palette
from .rulebook import Rulebook, default_rulebook
from .specfmt import emit_spec
from .svg import render_svg

MANIFEST_VERSION = "corpus/1"
LABELS_VERSION = "labels/1"


class InfeasibleConfigError(VizlintError):
    pass


@dataclass(frozen=True)
class CorpusConfig:
    seed: int
    output_dir: Path
    per_type: int = 6
    multi_error_items: int = 30
    clean: bool = False


@dataclass(frozen=True)
class CorpusItem:
    item_id: str
    chart_type: ChartType
    primary_error: ErrorType
    spec_path: Path
    svg_path: Path
    label: LabelRecord
    ir: ChartIR


E = ErrorType
C = ChartType

# Chart types each error type's items cycle through (index mod length).
CHART_CYCLES: dict[ErrorType, tuple[ChartType, ...]] = {
    E.IMPROPER_SCALE_OR_AXIS_RANGE: (C.BAR, C.LINE, C.SCATTER, C.AREA),
    E.NON_ZERO_BASELINE: (C.BAR, C.AREA),
    E.OVERUSE_OF_GRIDLINES: (C.BAR, C.LINE, C.SCATTER, C.AREA),
    E.DUAL_AXIS_ISSUE: (C.LINE, C.BAR),
    E.INCONSISTENT_BAR_WIDTHS: (C.BAR,),
    E.OVERUSE_OF_3D_EFFECTS: (C.BAR, C.PIE),
    E.INAPPROPRIATE_COLOUR_CHOICES: (C.PIE, C.LINE, C.BAR, C.AREA),
    E.TOO_MANY_PIE_SLICES: (C.PIE,),
    E.MISSING_LABELS_OR_LEGENDS: (C.BAR, C.LINE, C.SCATTER, C.AREA),
    E.OVERLAPPING_DATA_ELEMENTS: (C.SCATTER,),
    E.UNEVEN_TICK_INTERVALS: (C.LINE, C.BAR, C.LINE, C.SCATTER, C.LINE, C.AREA),
    E.POOR_CATEGORY_ORDERING: (C.BAR,),
}

# Errors that may be added to an item of a given chart type.  Non-zero
# baselines are never injected into line charts because there the defect
# only manifests together with an exaggerated range, which would force a
# second label.
EXTRA_POOL: dict[ChartType, tuple[ErrorType, ...]] = {
    C.BAR: (
        E.IMPROPER_SCALE_OR_AXIS_RANGE,
        E.NON_ZERO_BASELINE,
        E.OVERUSE_OF_GRIDLINES,
        E.DUAL_AXIS_ISSUE,
        E.INCONSISTENT_BAR_WIDTHS,
        E.OVERUSE_OF_3D_EFFECTS,
        E.INAPPROPRIATE_COLOUR_CHOICES,
        E.MISSING_LABELS_OR_LEGENDS,
        E.UNEVEN_TICK_INTERVALS,
        E.POOR_CATEGORY_ORDERING,
    ),
    C.LINE: (
        E.IMPROPER_SCALE_OR_AXIS_RANGE,
        E.OVERUSE_OF_GRIDLINES,
        E.DUAL_AXIS_ISSUE,
        E.OVERUSE_OF_3D_EFFECTS,
        E.INAPPROPRIATE_COLOUR_CHOICES,
        E.MISSING_LABELS_OR_LEGENDS,
        E.UNEVEN_TICK_INTERVALS,
    ),
    C.PIE: (
        E.OVERUSE_OF_3D_EFFECTS,
        E.INAPPROPRIATE_COLOUR_CHOICES,
        E.TOO_MANY_PIE_SLICES,
    ),
    C.SCATTER: (
        E.IMPROPER_SCALE_OR_AXIS_RANGE,
        E.OVERUSE_OF_GRIDLINES,
        E.OVERUSE_OF_3D_EFFECTS,
        E.INAPPROPRIATE_COLOUR_CHOICES,
        E.MISSING_LABELS_OR_LEGENDS,
        E.UNEVEN_TICK_INTERVALS,
        E.OVERLAPPING_DATA_ELEMENTS,
    ),
    C.AREA: (
        E.IMPROPER_SCALE_OR_AXIS_RANGE,
        E.NON_ZERO_BASELINE,
        E.OVERUSE_OF_GRIDLINES,
        E.OVERUSE_OF_3D_EFFECTS,
        E.INAPPROPRIATE_COLOUR_CHOICES,
        E.MISSING_LABELS_OR_LEGENDS,
        E.UNEVEN_TICK_INTERVALS,
    ),
}

# Error pairs that never share an item: summing mixed-scale series makes
# "sorted by value" ill-defined when a secondary axis is present.
EXCLUDED_PAIRS = frozenset(
    {frozenset({E.POOR_CATEGORY_ORDERING, E.DUAL_AXIS_ISSUE})}
)

_CATEGORY_NAMES = ("North", "South", "East", "West", "Central", "Coastal")


def _rescale(values: Sequence[float], lo: float, hi: float, digits: int = 2) -> list[float]:
    vmin, vmax = min(values), max(values)
    if vmax <= vmin:
        step = (hi - lo) / max(len(values) - 1, 1)
        return [round(lo + i * step, digits) for i in range(len(values))]
    return [round(lo + (v - vmin) * (hi - lo) / (vmax - vmin), digits) for v in values]


def _axis_max(values: Sequence[float]) -> float:
    return round(max(values) * 1.05, 3)


# ---------------------------------------------------------------------------
# Clean base charts.  Every base passes the full default rulebook with zero
# diagnostics; the palette is finalized after injection (series/slice
# counts may change).


def _base_bar(rng: random.Random, idx: int, title: str) -> ChartIR:
    n = 4 + idx % 2
    names = _CATEGORY_NAMES[:n]
    a = _rescale([rng.random() for _ in range(n)], 25, 95)
    b = _rescale([rng.random() for _ in range(n)], 20, 80)
    order = sorted(range(n), key=lambda i: -(a[i] + b[i]))
    cats = tuple(names[i] for i in order)
    return ChartIR(
        chart_type=C.BAR,
        title=title,
        x_axis=AxisSpec(label="Category"),
        y_axis=AxisSpec(
            label="Value",
            min=0.0,
            max=_axis_max(a + b),
            gridlines=GridlineSpec(major=True, count=5),
        ),
        series=(
            SeriesSpec(name="Current", x=cats, y=tuple(a[i] for i in order)),
            SeriesSpec(name="Previous", x=cats, y=tuple(b[i] for i in order)),
        ),
        category_semantics=CategorySemantics.NOMINAL,
    )


def _base_line(rng: random.Random, idx: int, title: str) -> ChartIR:
    n = 10
    start = date(2024, 1, 5)
    dates = tuple((start + timedelta(days=7 * i)).isoformat() for i in range(n))
    a = _rescale(
        [math.sin(i / 2.1) + rng.uniform(-0.4, 0.4) for i in range(n)], 30, 90
    )
    b = _rescale(
        [math.cos(i / 2.7) + rng.uniform(-0.4, 0.4) for i in range(n)], 25, 75
    )
    return ChartIR(
        chart_type=C.LINE,
        title=title,
        x_axis=AxisSpec(label="Week"),
        y_axis=AxisSpec(
            label="Value",
            min=0.0,
            max=_axis_max(a + b),
            gridlines=GridlineSpec(major=True, count=5),
        ),
        series=(
            SeriesSpec(name="Output", x=dates, y=tuple(a)),
            SeriesSpec(name="Demand", x=dates, y=tuple(b)),
        ),
        category_semantics=CategorySemantics.TEMPORAL,
    )


def _base_area(rng: random.Random, idx: int, title: str) -> ChartIR:
    n = 9
    xs = tuple(float(i + 1) for i in range(n))
    a = _rescale([1 + i * 0.3 + rng.uniform(-0.5, 0.5) for i in range(n)], 25, 95)
    b = _rescale([1 + i * 0.2 + rng.uniform(-0.5, 0.5) for i in range(n)], 20, 70)
    return ChartIR(
        chart_type=C.AREA,
        title=title,
        x_axis=AxisSpec(label="Period"),
        y_axis=AxisSpec(
            label="Total",
            min=0.0,
            max=_axis_max(a + b),
            gridlines=GridlineSpec(major=True, count=5),
        ),
        series=(
            SeriesSpec(name="Stock", x=xs, y=tuple(a)),
            SeriesSpec(name="Flow", x=xs, y=tuple(b)),
        ),
        category_semantics=CategorySemantics.NOMINAL,
    )


def _base_scatter(rng: random.Random, idx: int, title: str) -> ChartIR:
    # 14 points on a jittered 4x4 grid: far enough apart that no pair comes
    # near the overlap threshold.
    cells = list(itertools.product(range(4), range(4)))[:14]
    pts = []
    for gx, gy in cells:
        x = 10 + gx * 80 / 3 + rng.uniform(-3.0, 3.0)
        y = 10 + gy * 80 / 3 + rng.uniform(-3.0, 3.0)
        pts.append((round(x, 3), round(y, 3)))
    half = len(pts) // 2
    ys_all = [p[1] for p in pts]
    return ChartIR(
        chart_type=C.SCATTER,
        title=title,
        x_axis=AxisSpec(label="Input", min=0.0, max=100.0),
        y_axis=AxisSpec(
            label="Response",
            min=0.0,
            max=_axis_max(ys_all),
            gridlines=GridlineSpec(major=True, count=5),
        ),
        series=(
            SeriesSpec(
                name="Trial A",
                x=tuple(p[0] for p in pts[:half]),
                y=tuple(p[1] for p in pts[:half]),
            ),
            SeriesSpec(
                name="Trial B",
                x=tuple(p[0] for p in pts[half:]),
                y=tuple(p[1] for p in pts[half:]),
            ),
        ),
        category_semantics=CategorySemantics.NOMINAL,
        style=StyleSpec(point_radius=0.02),
    )


def _base_pie(rng: random.Random, idx: int, title: str) -> ChartIR:
    n = 5
    values = _rescale([rng.random() for _ in range(n)], 12, 40)
    values.sort(reverse=True)
    labels = ("Alpha", "Bravo", "Charlie", "Delta", "Echo")[:n]
    return ChartIR(
        chart_type=C.PIE,
        title=title,
        slices=tuple(PieSlice(label=l, value=v) for l, v in zip(labels, values)),
        category_semantics=CategorySemantics.NOMINAL,
    )


_BASES: dict[ChartType, Callable] = {
    C.BAR: _base_bar,
    C.LINE: _base_line,
    C.AREA: _base_area,
    C.SCATTER: _base_scatter,
    C.PIE: _base_pie,
}

_TITLES: dict[ChartType, str] = {
    C.BAR: "Regional totals",
    C.LINE: "Weekly trend",
    C.AREA: "Cumulative volume",
    C.SCATTER: "Response by input",
    C.PIE: "Share of total",
}


# ---------------------------------------------------------------------------
# Error injectors.  Each takes (ir, rng, idx) and returns a new IR with
# that one error present.  idx varies the flavour across a type's items.


def _primary_values(ir: ChartIR) -> list[float]:
    return [y for s in ir.series if s.axis is SeriesAxis.PRIMARY for y in s.y]


def _inject_improper_scale(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    values = _primary_values(ir)
    lo, hi = min(values), max(values)
    span = hi - lo
    if ir.chart_type is C.SCATTER or idx % 2 == 1:
        # Clip the declared range so the top of the data falls outside it.
        new_max = round(lo + 0.75 * span, 3)
        return replace(ir, y_axis=replace(ir.y_axis, max=new_max))
    # Inflate the range until the data occupies a sliver of it.
    new_max = round(hi + 12 * span, 3)
    return replace(ir, y_axis=replace(ir.y_axis, max=new_max))


def _inject_non_zero_baseline(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    values = _primary_values(ir)
    new_min = round(0.6 * min(values), 3)
    return replace(ir, y_axis=replace(ir.y_axis, min=new_min))


def _inject_gridlines(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    if idx % 2 == 0:
        y = replace(ir.y_axis, gridlines=GridlineSpec(major=True, count=25))
        return replace(ir, y_axis=y)
    x = replace(ir.x_axis, gridlines=GridlineSpec(major=True, minor=True, count=6))
    y = replace(ir.y_axis, gridlines=GridlineSpec(major=True, minor=True, count=6))
    return replace(ir, x_axis=x, y_axis=y)


def _inject_dual_axis(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    first = ir.series[0]
    values = _rescale([rng.random() for _ in first.x], 520, 930)
    secondary = SeriesSpec(
        name="Index", x=first.x, y=tuple(values), axis=SeriesAxis.SECONDARY
    )
    y2 = AxisSpec(label="Index", min=0.0, max=_axis_max(values))
    return replace(ir, series=ir.series + (secondary,), y2_axis=y2)


def _inject_bar_widths(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    n = len(ir.series[0].x)
    widths = [1.0] * n
    widths[n // 2] = 1.3
    return replace(ir, style=replace(ir.style, bar_rel_widths=tuple(widths)))


def _inject_3d(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    return replace(ir, style=replace(ir.style, is_3d=True))


def _inject_colours(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    if ir.chart_type is C.PIE:
        k = len(ir.slices or ())
    else:
        k = len(ir.series)
    if idx % 2 == 0:
        # Hues bunched within a few degrees of each other.
        palette = []
        for i in range(k):
            r, g, b = colorsys.hls_to_rgb((8.0 + i * 8.0) / 360.0, 0.45, 0.65)
            palette.append(
                "#%02x%02x%02x" % (round(r * 255), round(g * 255), round(b * 255))
            )
        return replace(ir, style=replace(ir.style, palette=tuple(palette)))
    # Fewer colours than series/slices.
    return replace(ir, style=replace(ir.style, palette=spaced_palette(max(k - 1, 1))))


def _inject_pie_slices(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    extra_n = 3 + idx % 3  # 8, 9 or 10 slices total
    names = ("Foxtrot", "Golf", "Hotel", "India", "Juliett")
    values = _rescale([rng.random() for _ in range(extra_n)], 3, 9)
    extras = tuple(
        PieSlice(label=names[i], value=values[i]) for i in range(extra_n)
    )
    return replace(ir, slices=(ir.slices or ()) + extras)


def _inject_labels(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    flavour = ("x_label", "y_label", "legend", "both_labels")[idx % 4]
    if flavour == "x_label":
        return replace(ir, x_axis=replace(ir.x_axis, label=None))
    if flavour == "y_label":
        return replace(ir, y_axis=replace(ir.y_axis, label=None))
    if flavour == "legend":
        return replace(ir, style=replace(ir.style, show_legend=False))
    return replace(
        ir,
        x_axis=replace(ir.x_axis, label=None),
        y_axis=replace(ir.y_axis, label=None),
    )


def _inject_overlap(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    # Collapse eight points into a disc tight enough that every pair inside
    # it sits well under the overlap distance.
    radius = ir.style.point_radius or 0.02
    xs = [x for s in ir.series for x in s.x]
    ys = [y for s in ir.series for y in s.y]
    x_lo = ir.x_axis.min if ir.x_axis.min is not None else min(xs)
    x_hi = ir.x_axis.max if ir.x_axis.max is not None else max(xs)
    y_lo = ir.y_axis.min if ir.y_axis.min is not None else min(ys)
    y_hi = ir.y_axis.max if ir.y_axis.max is not None else max(ys)
    cx = x_lo + 0.52 * (x_hi - x_lo)
    cy = y_lo + 0.44 * (y_hi - y_lo)

    def cluster_point() -> tuple[float, float]:
        u = rng.uniform(0, 0.4 * radius)
        theta = rng.uniform(0, 2 * math.pi)
        return (
            round(cx + u * math.cos(theta) * (x_hi - x_lo), 3),
            round(cy + u * math.sin(theta) * (y_hi - y_lo), 3),
        )

    new_series = []
    to_replace = 8
    for s in reversed(ir.series):
        n = len(s.x)
        take = min(to_replace, n)
        pts = [cluster_point() for _ in range(take)]
        xs_new = list(s.x[: n - take]) + [p[0] for p in pts]
        ys_new = list(s.y[: n - take]) + [p[1] for p in pts]
        to_replace -= take
        new_series.append(replace(s, x=tuple(xs_new), y=tuple(ys_new)))
    return replace(ir, series=tuple(reversed(new_series)))


def _inject_ticks(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    if ir.category_semantics is CategorySemantics.TEMPORAL:
        # Skip one step so the date grid has a double-width gap.
        days = [0]
        for i in range(1, len(ir.series[0].x)):
            days.append(days[-1] + (14 if i == 3 else 7))
        first = date.fromisoformat(str(ir.series[0].x[0]))
        new_x = tuple((first + timedelta(days=d)).isoformat() for d in days)
        new_series = tuple(replace(s, x=new_x) for s in ir.series)
        return replace(ir, series=new_series)
    values = _primary_values(ir)
    m = ir.y_axis.max if ir.y_axis.max is not None else max(values)
    ticks = tuple(round(m * f, 3) for f in (0.0, 0.2, 0.4, 0.7, 0.9))
    return replace(ir, y_axis=replace(ir.y_axis, ticks=ticks))


def _inject_ordering(ir: ChartIR, rng: random.Random, idx: int) -> ChartIR:
    order = [str(x) for x in ir.series[0].x]
    predicate = DETECTORS[E.POOR_CATEGORY_ORDERING]
    for perm in itertools.permutations(range(len(order))):
        if perm == tuple(range(len(order))):
            continue
        new_series = []
        for s in ir.series:
            new_series.append(
                replace(
                    s,
                    x=tuple(s.x[i] for i in perm),
                    y=tuple(s.y[i] for i in perm),
                )
            )
        candidate = replace(ir, series=tuple(new_series))
        if predicate(candidate, {}) is not None:
            return candidate
    raise InfeasibleConfigError("no category permutation breaks the ordering rule")


_INJECTORS: dict[ErrorType, Callable] = {
    E.IMPROPER_SCALE_OR_AXIS_RANGE: _inject_improper_scale,
    E.NON_ZERO_BASELINE: _inject_non_zero_baseline,
    E.OVERUSE_OF_GRIDLINES: _inject_gridlines,
    E.DUAL_AXIS_ISSUE: _inject_dual_axis,
    E.INCONSISTENT_BAR_WIDTHS: _inject_bar_widths,
    E.OVERUSE_OF_3D_EFFECTS: _inject_3d,
    E.INAPPROPRIATE_COLOUR_CHOICES: _inject_colours,
    E.TOO_MANY_PIE_SLICES: _inject_pie_slices,
    E.MISSING_LABELS_OR_LEGENDS: _inject_labels,
    E.OVERLAPPING_DATA_ELEMENTS: _inject_overlap,
    E.UNEVEN_TICK_INTERVALS: _inject_ticks,
    E.POOR_CATEGORY_ORDERING: _inject_ordering,
}


def _finalize_palette(ir: ChartIR) -> ChartIR:
    if ir.chart_type is C.PIE:
        k = len(ir.slices or ())
    else:
        k = max(len(ir.series), 1)
    return replace(ir, style=replace(ir.style, palette=spaced_palette(k)))


# ---------------------------------------------------------------------------
# Planning


@dataclass(frozen=True)
class _ItemPlan:
    item_id: str
    primary: ErrorType
    chart_type: ChartType
    type_index: int
    item_index: int
    extras: tuple[ErrorType, ...]


def _plan_items(config: CorpusConfig) -> list[_ItemPlan]:
    errors = list(ErrorType)
    total = config.per_type * len(errors)
    if config.per_type < 1:
        raise InfeasibleConfigError("per_type must be at least 1")
    if config.multi_error_items < 0:
        raise InfeasibleConfigError("multi_error_items must be non-negative")
    if config.multi_error_items > total:
        raise InfeasibleConfigError(
            f"multi_error_items ({config.multi_error_items}) exceeds the "
            f"corpus size ({total})"
        )

    base, rem = divmod(config.multi_error_items, len(errors))
    multi_per_type = [base + (1 if t < rem else 0) for t in range(len(errors))]
    if max(multi_per_type) > config.per_type:
        raise InfeasibleConfigError(
            "multi_error_items cannot be spread across the error types "
            f"({max(multi_per_type)} > per_type {config.per_type})"
        )

    plans = []
    for t, primary in enumerate(errors):
        cycle = CHART_CYCLES[primary]
        for i in range(config.per_type):
            chart_type = cycle[i % len(cycle)]
            extras: tuple[ErrorType, ...] = ()
            if i < multi_per_type[t]:
                want = 1 if i % 2 == 0 else 2
                pool = [
                    e
                    for e in EXTRA_POOL[chart_type]
                    if e is not primary
                    and frozenset({e, primary}) not in EXCLUDED_PAIRS
                ]
                if not pool:
                    raise InfeasibleConfigError(
                        f"no compatible extra errors for {primary.value} on "
                        f"{chart_type.value}"
                    )
                offset = (t * 5 + i * 3) % len(pool)
                rotated = pool[offset:] + pool[:offset]
                chosen: list[ErrorType] = []
                for e in rotated:
                    if len(chosen) == want:
                        break
                    if any(
                        frozenset({e, c}) in EXCLUDED_PAIRS for c in chosen
                    ):
                        continue
                    chosen.append(e)
                extras = tuple(chosen)
            plans.append(
                _ItemPlan(
                    item_id=f"{primary.value}-{i + 1:02d}",
                    primary=primary,
                    chart_type=chart_type,
                    type_index=t,
                    item_index=i,
                    extras=extras,
                )
            )
    return plans


def _build_item_ir(plan: _ItemPlan, config: CorpusConfig) -> ChartIR:
    rng = random.Random(f"{config.seed}:{plan.item_id}")
    title = f"{_TITLES[plan.chart_type]} {plan.item_index + 1}"
    ir = _BASES[plan.chart_type](rng, plan.item_index, title)

    if not config.clean:
        labels = [plan.primary] + [
            e for e in sorted(plan.extras, key=lambda e: e.value)
        ]
        colour_in = E.INAPPROPRIATE_COLOUR_CHOICES in labels
        for error in labels:
            if error is E.INAPPROPRIATE_COLOUR_CHOICES:
                continue
            ir = _INJECTORS[error](ir, rng, plan.item_index)
        ir = _finalize_palette(ir)
        if colour_in:
            ir = _INJECTORS[E.INAPPROPRIATE_COLOUR_CHOICES](ir, rng, plan.item_index)
    else:
        ir = _finalize_palette(ir)
    return ir


def _expected_labels(plan: _ItemPlan, config: CorpusConfig) -> frozenset[ErrorType]:
    if config.clean:
        return frozenset()
    return frozenset({plan.primary, *plan.extras})


def generate_corpus(
    config: CorpusConfig, rulebook: Optional[Rulebook] = None
) -> list[CorpusItem]:
    """Generate the corpus under output_dir and return its items.

    Writes specs/<id>.chart.json, svg/<id>.svg, labels.jsonl, and
    manifest.json.  The generated labels are verified against the supplied
    rulebook (default: the shipped one) before anything is written.
    """
    book = rulebook if rulebook is not None else default_rulebook()
    plans = _plan_items(config)

    items = []
    for plan in plans:
        ir = _build_item_ir(plan, config)
        expected = _expected_labels(plan, config)
        diagnosis = run_detectors(ir, book)
        got = frozenset(d.error_type for d in diagnosis.diagnostics)
        if got != expected:
            raise InfeasibleConfigError(
                f"item {plan.item_id}: detector closure broken "
                f"(expected {sorted(e.value for e in expected)}, "
                f"got {sorted(e.value for e in got)})"
            )
        label = LabelRecord(
            item_id=plan.item_id, error_types=expected, count=len(expected)
        )
        items.append(
            CorpusItem(
                item_id=plan.item_id,
                chart_type=plan.chart_type,
                primary_error=plan.primary,
                spec_path=config.output_dir / "specs" / f"{plan.item_id}.chart.json",
                svg_path=config.output_dir / "svg" / f"{plan.item_id}.svg",
                label=label,
                ir=ir,
            )
        )

    out = Path(config.output_dir)
    (out / "specs").mkdir(parents=True, exist_ok=True)
    (out / "svg").mkdir(parents=True, exist_ok=True)
    for item in items:
        item.spec_path.write_text(emit_spec(item.ir), encoding="utf-8")
        item.svg_path.write_text(render_svg(item.ir), encoding="utf-8")

    with (out / "labels.jsonl").open("w", encoding="utf-8") as fh:
        for item in items:
            fh.write(label_record_to_json(item.label) + "\n")

    manifest = {
        "schema_version": MANIFEST_VERSION,
        "seed": config.seed,
        "per_type": config.per_type,
        "multi_error_items": config.multi_error_items,
        "clean": config.clean,
        "items": [
            {
                "item_id": item.item_id,
                "chart_type": item.chart_type.value,
                "primary_error": item.primary_error.value,
                "spec_path": f"specs/{item.item_id}.chart.json",
                "svg_path": f"svg/{item.item_id}.svg",
                "error_types": sorted(e.value for e in item.label.error_types),
                "count": item.label.count,
            }
            for item in items
        ],
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    return items


def label_record_to_json(label: LabelRecord) -> str:
    return json.dumps(
        {
            "item_id": label.item_id,
            "error_types": sorted(e.value for e in label.error_types),
            "count": label.count,
        }
    )
