"""Core chart model: error taxonomy, chart IR, diagnostics, and label records.

Everything downstream (the spec parser, the rule engine, the corpus
generator, the evaluation harness) reads and writes these types.  All of
them are immutable value objects; mutation happens by building a new
value, usually via :func:`dataclasses.replace`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Mapping, Optional, Union

SPEC_SCHEMA_VERSION = "vizlint/1"

_HEX_COLOR = re.compile(r"^#[0-9a-fA-F]{6}$")


class VizlintError(Exception):
    """Base class for every error this package raises deliberately."""


class ErrorType(str, Enum):
    """The twelve visualization error categories.

    The enum value is the stable identifier used in rule files, diagnosis
    files, label files, and the HTTP API.  Declaration order is the
    canonical taxonomy order used whenever output is sorted by type.
    """

    IMPROPER_SCALE_OR_AXIS_RANGE = "improper-scale-or-axis-range"
    NON_ZERO_BASELINE = "non-zero-baseline"
    OVERUSE_OF_GRIDLINES = "overuse-of-gridlines"
    DUAL_AXIS_ISSUE = "dual-axis-issue"
    INCONSISTENT_BAR_WIDTHS = "inconsistent-bar-widths"
    OVERUSE_OF_3D_EFFECTS = "overuse-of-3d-effects"
    INAPPROPRIATE_COLOUR_CHOICES = "inappropriate-colour-choices"
    TOO_MANY_PIE_SLICES = "too-many-pie-slices"
    MISSING_LABELS_OR_LEGENDS = "missing-labels-or-legends"
    OVERLAPPING_DATA_ELEMENTS = "overlapping-data-elements"
    UNEVEN_TICK_INTERVALS = "uneven-tick-intervals"
    POOR_CATEGORY_ORDERING = "poor-category-ordering"

    @property
    def display(self) -> str:
        return _DISPLAY_NAMES[self]

    @classmethod
    def from_id(cls, ident: str) -> "ErrorType":
        try:
            return cls(ident)
        except ValueError:
            raise UnknownErrorTypeError(ident) from None


_DISPLAY_NAMES: dict[ErrorType, str] = {
    ErrorType.IMPROPER_SCALE_OR_AXIS_RANGE: "Improper Scale or Axis Range",
    ErrorType.NON_ZERO_BASELINE: "Non-Zero Baseline",
    ErrorType.OVERUSE_OF_GRIDLINES: "Overuse of Gridlines",
    ErrorType.DUAL_AXIS_ISSUE: "Dual Axis Issue",
    ErrorType.INCONSISTENT_BAR_WIDTHS: "Inconsistent Bar Widths",
    ErrorType.OVERUSE_OF_3D_EFFECTS: "Overuse of 3D Effects",
    ErrorType.INAPPROPRIATE_COLOUR_CHOICES: "Inappropriate Colour Choices",
    ErrorType.TOO_MANY_PIE_SLICES: "Too Many Pie Slices",
    ErrorType.MISSING_LABELS_OR_LEGENDS: "Missing Labels or Legends",
    ErrorType.OVERLAPPING_DATA_ELEMENTS: "Overlapping Data Elements",
    ErrorType.UNEVEN_TICK_INTERVALS: "Uneven Tick Intervals",
    ErrorType.POOR_CATEGORY_ORDERING: "Poor Category Ordering",
}


class UnknownErrorTypeError(VizlintError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown error type: {name!r}")


class ChartType(str, Enum):
    BAR = "bar"
    LINE = "line"
    PIE = "pie"
    SCATTER = "scatter"
    AREA = "area"


class AxisScale(str, Enum):
    LINEAR = "linear"
    LOG = "log"


class SeriesAxis(str, Enum):
    PRIMARY = "primary"
    SECONDARY = "secondary"


class CategorySemantics(str, Enum):
    NOMINAL = "nominal"
    ORDINAL = "ordinal"
    TEMPORAL = "temporal"


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class GridlineSpec:
    major: bool = False
    minor: bool = False
    count: Optional[int] = None


@dataclass(frozen=True)
class AxisSpec:
    """One axis of a chart.  min/max are the declared bounds; either may be
    omitted, in which case the data bounds stand in (the "effective" range)."""

    label: Optional[str] = None
    min: Optional[float] = None
    max: Optional[float] = None
    scale: AxisScale = AxisScale.LINEAR
    ticks: Optional[tuple[float, ...]] = None
    gridlines: GridlineSpec = GridlineSpec()


@dataclass(frozen=True)
class SeriesSpec:
    """A named data series.  x entries are numbers or category tokens."""

    name: str
    x: tuple[Union[float, str], ...]
    y: tuple[float, ...]
    axis: SeriesAxis = SeriesAxis.PRIMARY


@dataclass(frozen=True)
class PieSlice:
    label: str
    value: float


@dataclass(frozen=True)
class StyleSpec:
    is_3d: bool = False
    palette: tuple[str, ...] = ()
    bar_rel_widths: Optional[tuple[float, ...]] = None
    show_legend: bool = True
    point_radius: Optional[float] = None  # fraction of plot width


@dataclass(frozen=True)
class ChartIR:
    """Canonical chart representation.

    Pie charts carry slices and no series; every other chart type carries
    series and no slices.  See validate_ir for the full invariant list.
    """

    chart_type: ChartType
    x_axis: AxisSpec = AxisSpec()
    y_axis: AxisSpec = AxisSpec()
    y2_axis: Optional[AxisSpec] = None
    series: tuple[SeriesSpec, ...] = ()
    slices: Optional[tuple[PieSlice, ...]] = None
    title: Optional[str] = None
    category_semantics: CategorySemantics = CategorySemantics.NOMINAL
    declared_order: Optional[tuple[str, ...]] = None
    style: StyleSpec = StyleSpec()
    schema_version: str = SPEC_SCHEMA_VERSION


@dataclass(frozen=True)
class FixPatch:
    """A concrete correction: a human-readable description plus the chart
    IR with just this one fix applied."""

    description: str
    mutated_ir: ChartIR


@dataclass(frozen=True)
class Diagnostic:
    """One detected issue.  evidence holds the named measurements the rule's
    message template may reference; threshold params are echoed into it so a
    fix strategy can re-check its own firing condition without the rulebook.

    fix_strategy is the rule's strategy identifier (None when the rule
    offers no fix); it is internal plumbing and is not serialized.
    """

    error_type: ErrorType
    rule_id: str
    severity: Severity
    message: str
    evidence: Mapping[str, Union[float, int, str, bool]] = field(default_factory=dict)
    fix: Optional[FixPatch] = None
    fix_strategy: Optional[str] = None


@dataclass(frozen=True)
class LabelRecord:
    """Ground-truth labels for one corpus item.  count always equals the
    cardinality of error_types for ground truth."""

    item_id: str
    error_types: frozenset[ErrorType]
    count: int

    @classmethod
    def of(cls, item_id: str, error_types) -> "LabelRecord":
        ets = frozenset(error_types)
        return cls(item_id=item_id, error_types=ets, count=len(ets))


@dataclass(frozen=True)
class PredictionRecord:
    """Predicted labels for one item.  count is the predictor's own total
    and may disagree with the cardinality of error_types (models report
    counts and lists independently)."""

    item_id: str
    error_types: frozenset[ErrorType]
    count: int


def is_number(value: object) -> bool:
    """True for int/float but not bool (bool is an int subclass)."""
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def temporal_offsets(tokens) -> Optional[list[float]]:
    """Map ISO-8601 date strings to day offsets from the first date.

    Returns None unless every token parses as a date.
    """
    days: list[float] = []
    first: Optional[date] = None
    for tok in tokens:
        if not isinstance(tok, str):
            return None
        try:
            d = date.fromisoformat(tok)
        except ValueError:
            return None
        if first is None:
            first = d
        days.append(float((d - first).days))
    return days if days else None


def category_tokens(ir: ChartIR) -> list[str]:
    """Distinct category tokens in data order: slice labels for pie charts,
    string x values across series otherwise."""
    seen: list[str] = []
    if ir.chart_type is ChartType.PIE:
        for s in ir.slices or ():
            if s.label not in seen:
                seen.append(s.label)
        return seen
    for series in ir.series:
        for x in series.x:
            if isinstance(x, str) and x not in seen:
                seen.append(x)
    return seen


def _check_axis(name: str, axis: AxisSpec, out: list[str]) -> None:
    if axis.min is not None and axis.max is not None and not axis.min < axis.max:
        out.append(f"{name}: min < max violated")
    if axis.scale is AxisScale.LOG and axis.min is not None and axis.min <= 0:
        out.append(f"{name}: log scale requires min > 0")
    if axis.ticks is not None:
        if any(b <= a for a, b in zip(axis.ticks, axis.ticks[1:])):
            out.append(f"{name}.ticks: must be strictly increasing")
    gl = axis.gridlines
    if gl.count is not None and gl.count < 0:
        out.append(f"{name}.gridlines.count: must be non-negative")


def validate_ir(ir: ChartIR) -> list[str]:
    """Return every invariant violation in the IR, in a stable order.

    Empty list means the IR is valid.  Each violation names the offending
    field path.  This function is total: it never raises on any ChartIR.
    """
    out: list[str] = []

    _check_axis("x_axis", ir.x_axis, out)
    _check_axis("y_axis", ir.y_axis, out)
    if ir.y2_axis is not None:
        _check_axis("y2_axis", ir.y2_axis, out)

    for i, s in enumerate(ir.series):
        if len(s.x) != len(s.y):
            out.append(f"series[{i}]: x and y lengths differ")
        if len(s.x) == 0:
            out.append(f"series[{i}]: must contain at least one point")
        if not s.name:
            out.append(f"series[{i}].name: must be non-empty")
        if s.axis is SeriesAxis.SECONDARY and ir.y2_axis is None:
            out.append(f"series[{i}].axis: secondary series without y2_axis")

    if ir.y2_axis is not None and not any(
        s.axis is SeriesAxis.SECONDARY for s in ir.series
    ):
        out.append("y2_axis: no secondary series")

    if ir.chart_type is ChartType.PIE:
        if not ir.slices:
            out.append("slices: pie chart requires at least one slice")
        if ir.series:
            out.append("series must be empty for pie")
    else:
        if not ir.series:
            out.append("series: must contain at least one series")
        if ir.slices is not None:
            out.append("slices: only valid for pie charts")

    for i, sl in enumerate(ir.slices or ()):
        if not sl.label:
            out.append(f"slices[{i}].label: must be non-empty")
        if sl.value < 0:
            out.append(f"slices[{i}].value: must be non-negative")

    if ir.declared_order is not None:
        tokens = category_tokens(ir)
        if sorted(ir.declared_order) != sorted(tokens):
            out.append(
                "declared_order: must be a permutation of the distinct category tokens"
            )

    style = ir.style
    for i, color in enumerate(style.palette):
        if not _HEX_COLOR.match(color):
            out.append(f"style.palette[{i}]: not a #RRGGBB colour")
    if style.bar_rel_widths is not None:
        if ir.chart_type is not ChartType.BAR:
            out.append("style.bar_rel_widths: only valid for bar charts")
        else:
            n_bars = len(ir.series[0].x) if ir.series else 0
            if len(style.bar_rel_widths) != n_bars:
                out.append(
                    "style.bar_rel_widths: length must equal the number of bars"
                )
        if any(w <= 0 for w in style.bar_rel_widths):
            out.append("style.bar_rel_widths: widths must be positive")
    if style.point_radius is not None and style.point_radius <= 0:
        out.append("style.point_radius: must be positive")

    return out
