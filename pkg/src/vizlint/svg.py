"""Deterministic SVG rendering for chart IRs.

The renderer is intentionally minimal: its job is to reflect every
error-relevant attribute of the IR (axis ranges, tick positions, gridline
counts, bar widths, slice counts, palette, legend, dual axes, 3D skew)
in the markup, not to be pretty.  The same IR always produces the same
bytes.  Log-scale axes are not supported.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .core import (
    AxisScale,
    AxisSpec,
    ChartIR,
    ChartType,
    SeriesAxis,
    VizlintError,
    is_number,
    temporal_offsets,
    validate_ir,
)
from .specfmt import InvalidIRError

WIDTH = 640
HEIGHT = 480
MARGIN_LEFT = 70
MARGIN_RIGHT = 70
MARGIN_TOP = 50
MARGIN_BOTTOM = 60
PLOT_W = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
PLOT_H = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

FALLBACK_PALETTE = ("#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377")


class UnsupportedFeatureError(VizlintError):
    pass


def _fmt(value: float) -> str:
    text = f"{value:.2f}"
    return text.rstrip("0").rstrip(".") if "." in text else text


def _color(ir: ChartIR, index: int) -> str:
    palette = ir.style.palette or FALLBACK_PALETTE
    return palette[index % len(palette)]


def _effective(axis: AxisSpec, values: list[float]) -> tuple[float, float]:
    lo = axis.min if axis.min is not None else (min(values) if values else 0.0)
    hi = axis.max if axis.max is not None else (max(values) if values else 1.0)
    if hi <= lo:
        hi = lo + 1.0
    return lo, hi


def _numeric_x(ir: ChartIR) -> dict[int, list[float]]:
    """Per-series numeric x positions; temporal strings become day offsets,
    category tokens become slot indices shared across series."""
    out: dict[int, list[float]] = {}
    slots: dict[str, int] = {}
    for i, s in enumerate(ir.series):
        if all(is_number(x) for x in s.x):
            out[i] = [float(x) for x in s.x]
            continue
        days = temporal_offsets(s.x)
        if days is not None:
            out[i] = days
            continue
        xs = []
        for x in s.x:
            tok = str(x)
            if tok not in slots:
                slots[tok] = len(slots)
            xs.append(float(slots[tok]))
        out[i] = xs
    return out


class _Doc:
    def __init__(self):
        self.parts: list[str] = []

    def add(self, tag: str, **attrs) -> None:
        rendered = " ".join(
            f'{k.replace("_", "-")}="{escape(str(v))}"' for k, v in attrs.items()
        )
        self.parts.append(f"<{tag} {rendered}/>")

    def open(self, tag: str, **attrs) -> None:
        rendered = " ".join(
            f'{k.replace("_", "-")}="{escape(str(v))}"' for k, v in attrs.items()
        )
        self.parts.append(f"<{tag} {rendered}>" if rendered else f"<{tag}>")

    def close(self, tag: str) -> None:
        self.parts.append(f"</{tag}>")

    def text(self, content: str, x: float, y: float, **attrs) -> None:
        rendered = " ".join(
            f'{k.replace("_", "-")}="{escape(str(v))}"' for k, v in attrs.items()
        )
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" {rendered}>{escape(content)}</text>'
        )


def _gridline_positions(axis: AxisSpec) -> list[float]:
    """Fractions of the plot span where gridlines sit."""
    if not axis.gridlines.major and not axis.gridlines.minor:
        return []
    count = axis.gridlines.count if axis.gridlines.count is not None else 5
    major = [(i + 1) / (count + 1) for i in range(count)]
    if axis.gridlines.minor:
        minors = []
        edges = [0.0] + major + [1.0]
        for a, b in zip(edges, edges[1:]):
            minors.append((a + b) / 2)
        return sorted(major + minors)
    return major


def _draw_grid(doc: _Doc, ir: ChartIR) -> None:
    doc.open("g", **{"class": "grid"})
    for frac in _gridline_positions(ir.x_axis):
        x = MARGIN_LEFT + frac * PLOT_W
        doc.add(
            "line",
            **{"class": "grid-x"},
            x1=_fmt(x),
            y1=_fmt(MARGIN_TOP),
            x2=_fmt(x),
            y2=_fmt(MARGIN_TOP + PLOT_H),
            stroke="#dddddd",
        )
    for frac in _gridline_positions(ir.y_axis):
        y = MARGIN_TOP + PLOT_H - frac * PLOT_H
        doc.add(
            "line",
            **{"class": "grid-y"},
            x1=_fmt(MARGIN_LEFT),
            y1=_fmt(y),
            x2=_fmt(MARGIN_LEFT + PLOT_W),
            y2=_fmt(y),
            stroke="#dddddd",
        )
    doc.close("g")


def _tick_fractions(axis: AxisSpec, lo: float, hi: float) -> list[tuple[float, str]]:
    span = hi - lo
    if axis.ticks is not None:
        out = []
        for t in axis.ticks:
            if span > 0:
                out.append(((t - lo) / span, _fmt(t)))
        return out
    return [(i / 4, _fmt(lo + span * i / 4)) for i in range(5)]


def _draw_y_axis(doc: _Doc, axis: AxisSpec, lo: float, hi: float, side: str) -> None:
    cls = "y-axis" if side == "left" else "y2-axis"
    x = MARGIN_LEFT if side == "left" else MARGIN_LEFT + PLOT_W
    doc.open("g", **{"class": cls})
    doc.add(
        "line",
        x1=_fmt(x),
        y1=_fmt(MARGIN_TOP),
        x2=_fmt(x),
        y2=_fmt(MARGIN_TOP + PLOT_H),
        stroke="#333333",
    )
    dx = -8 if side == "left" else 8
    anchor = "end" if side == "left" else "start"
    for frac, label in _tick_fractions(axis, lo, hi):
        if not 0 <= frac <= 1:
            continue
        y = MARGIN_TOP + PLOT_H - frac * PLOT_H
        doc.add(
            "line",
            **{"class": "tick"},
            x1=_fmt(x),
            y1=_fmt(y),
            x2=_fmt(x + dx / 2),
            y2=_fmt(y),
            stroke="#333333",
        )
        doc.text(label, x + dx, y + 4, **{"class": "tick-label", "text-anchor": anchor, "font-size": 11})
    if axis.label:
        doc.text(
            axis.label,
            x + (dx * 5),
            MARGIN_TOP - 12,
            **{"class": "axis-label", "text-anchor": "middle", "font-size": 12},
        )
    doc.close("g")


def _draw_x_axis(doc: _Doc, ir: ChartIR, labels: list[tuple[float, str]]) -> None:
    doc.open("g", **{"class": "x-axis"})
    y = MARGIN_TOP + PLOT_H
    doc.add(
        "line",
        x1=_fmt(MARGIN_LEFT),
        y1=_fmt(y),
        x2=_fmt(MARGIN_LEFT + PLOT_W),
        y2=_fmt(y),
        stroke="#333333",
    )
    for frac, label in labels:
        if not 0 <= frac <= 1:
            continue
        x = MARGIN_LEFT + frac * PLOT_W
        doc.add(
            "line",
            **{"class": "tick"},
            x1=_fmt(x),
            y1=_fmt(y),
            x2=_fmt(x),
            y2=_fmt(y + 4),
            stroke="#333333",
        )
        doc.text(label, x, y + 18, **{"class": "tick-label", "text-anchor": "middle", "font-size": 11})
    if ir.x_axis.label:
        doc.text(
            ir.x_axis.label,
            MARGIN_LEFT + PLOT_W / 2,
            HEIGHT - 14,
            **{"class": "axis-label", "text-anchor": "middle", "font-size": 12},
        )
    doc.close("g")


def _draw_legend(doc: _Doc, ir: ChartIR) -> None:
    names = [s.name for s in ir.series]
    if ir.chart_type is ChartType.PIE:
        names = [s.label for s in ir.slices or ()]
    if not ir.style.show_legend or not names:
        return
    doc.open("g", **{"class": "legend"})
    for i, name in enumerate(names):
        y = MARGIN_TOP + 6 + i * 16
        doc.add(
            "rect",
            **{"class": "legend-swatch"},
            x=_fmt(WIDTH - MARGIN_RIGHT + 14),
            y=_fmt(y),
            width="10",
            height="10",
            fill=_color(ir, i),
        )
        doc.text(
            name,
            WIDTH - MARGIN_RIGHT + 28,
            y + 9,
            **{"class": "legend-label", "font-size": 11},
        )
    doc.close("g")


def _bar_marks(doc: _Doc, ir: ChartIR, y_lo: float, y_hi: float) -> None:
    categories = list(dict.fromkeys(str(x) for x in ir.series[0].x))
    n = len(categories)
    group_w = PLOT_W / max(n, 1)
    n_series = len(ir.series)
    base_w = group_w * 0.8 / n_series
    widths = ir.style.bar_rel_widths
    span = y_hi - y_lo
    for ci, cat in enumerate(categories):
        rel = widths[ci] if widths and ci < len(widths) else 1.0
        w = min(base_w * rel, group_w / n_series)
        for si, s in enumerate(ir.series):
            try:
                idx = [str(x) for x in s.x].index(cat)
            except ValueError:
                continue
            v = s.y[idx]
            frac = (v - y_lo) / span if span > 0 else 0.0
            frac = max(0.0, min(1.0, frac))
            h = frac * PLOT_H
            cx = MARGIN_LEFT + group_w * ci + group_w / 2
            x = cx - (n_series * w) / 2 + si * w
            doc.add(
                "rect",
                **{"class": f"bar series-{si}"},
                x=_fmt(x),
                y=_fmt(MARGIN_TOP + PLOT_H - h),
                width=_fmt(w),
                height=_fmt(h),
                fill=_color(ir, si),
            )


def _line_area_marks(doc: _Doc, ir: ChartIR, kind: str, bounds: dict) -> None:
    xs_by_series = _numeric_x(ir)
    for si, s in enumerate(ir.series):
        xs = xs_by_series[si]
        y_lo, y_hi = bounds["y2"] if s.axis is SeriesAxis.SECONDARY else bounds["y"]
        x_lo, x_hi = bounds["x"]
        x_span = x_hi - x_lo or 1.0
        y_span = y_hi - y_lo or 1.0
        pts = []
        for x, y in zip(xs, s.y):
            px = MARGIN_LEFT + (x - x_lo) / x_span * PLOT_W
            py = MARGIN_TOP + PLOT_H - (y - y_lo) / y_span * PLOT_H
            pts.append(f"{_fmt(px)},{_fmt(py)}")
        axis_cls = " axis-secondary" if s.axis is SeriesAxis.SECONDARY else ""
        if kind == "area" and pts:
            first_x = pts[0].split(",")[0]
            last_x = pts[-1].split(",")[0]
            floor = _fmt(MARGIN_TOP + PLOT_H)
            d = f"M{first_x},{floor} L" + " L".join(pts) + f" L{last_x},{floor} Z"
            doc.add(
                "path",
                **{"class": f"area series-{si}{axis_cls}"},
                d=d,
                fill=_color(ir, si),
                fill_opacity="0.6",
            )
        else:
            doc.add(
                "polyline",
                **{"class": f"line series-{si}{axis_cls}"},
                points=" ".join(pts),
                fill="none",
                stroke=_color(ir, si),
                stroke_width="2",
            )


def _scatter_marks(doc: _Doc, ir: ChartIR, bounds: dict) -> None:
    xs_by_series = _numeric_x(ir)
    radius = (ir.style.point_radius or 0.01) * PLOT_W
    x_lo, x_hi = bounds["x"]
    y_lo, y_hi = bounds["y"]
    x_span = x_hi - x_lo or 1.0
    y_span = y_hi - y_lo or 1.0
    for si, s in enumerate(ir.series):
        for x, y in zip(xs_by_series[si], s.y):
            px = MARGIN_LEFT + (x - x_lo) / x_span * PLOT_W
            py = MARGIN_TOP + PLOT_H - (y - y_lo) / y_span * PLOT_H
            doc.add(
                "circle",
                **{"class": f"dot series-{si}"},
                cx=_fmt(px),
                cy=_fmt(py),
                r=_fmt(radius),
                fill=_color(ir, si),
                fill_opacity="0.8",
            )


def _pie_marks(doc: _Doc, ir: ChartIR) -> None:
    cx = WIDTH / 2
    cy = MARGIN_TOP + PLOT_H / 2
    r = min(PLOT_W, PLOT_H) / 2 - 10
    total = sum(s.value for s in ir.slices or ()) or 1.0
    angle = -math.pi / 2
    for i, sl in enumerate(ir.slices or ()):
        sweep = 2 * math.pi * (sl.value / total)
        # Guard against a full-circle arc collapsing to a point.
        sweep = min(sweep, 2 * math.pi - 1e-6)
        x1 = cx + r * math.cos(angle)
        y1 = cy + r * math.sin(angle)
        x2 = cx + r * math.cos(angle + sweep)
        y2 = cy + r * math.sin(angle + sweep)
        large = 1 if sweep > math.pi else 0
        d = (
            f"M{_fmt(cx)},{_fmt(cy)} L{_fmt(x1)},{_fmt(y1)} "
            f"A{_fmt(r)},{_fmt(r)} 0 {large} 1 {_fmt(x2)},{_fmt(y2)} Z"
        )
        doc.add(
            "path",
            **{"class": f"slice slice-{i}"},
            d=d,
            fill=_color(ir, i),
            stroke="#ffffff",
        )
        angle += sweep


def render_svg(ir: ChartIR) -> str:
    """Render a valid ChartIR to a standalone SVG document."""
    violations = validate_ir(ir)
    if violations:
        raise InvalidIRError(violations)
    for name, axis in (("x_axis", ir.x_axis), ("y_axis", ir.y_axis), ("y2_axis", ir.y2_axis)):
        if axis is not None and axis.scale is AxisScale.LOG:
            raise UnsupportedFeatureError(f"{name}: log scale rendering not supported")

    doc = _Doc()
    doc.parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">'
    )
    doc.add("rect", x="0", y="0", width=str(WIDTH), height=str(HEIGHT), fill="#ffffff")
    if ir.title:
        doc.text(
            ir.title,
            WIDTH / 2,
            26,
            **{"class": "title", "text-anchor": "middle", "font-size": 16},
        )

    if ir.chart_type is ChartType.PIE:
        if ir.style.is_3d:
            doc.open("g", **{"class": "plot plot-3d", "transform": "skewX(-12)"})
        else:
            doc.open("g", **{"class": "plot"})
        _pie_marks(doc, ir)
        doc.close("g")
        _draw_legend(doc, ir)
        doc.parts.append("</svg>")
        return "\n".join(doc.parts) + "\n"

    primary_y = [y for s in ir.series if s.axis is SeriesAxis.PRIMARY for y in s.y]
    secondary_y = [y for s in ir.series if s.axis is SeriesAxis.SECONDARY for y in s.y]
    xs_by_series = _numeric_x(ir)
    all_x = [x for xs in xs_by_series.values() for x in xs]

    y_bounds = _effective(ir.y_axis, primary_y)
    x_bounds = _effective(ir.x_axis, all_x)
    bounds = {"x": x_bounds, "y": y_bounds, "y2": y_bounds}
    if ir.y2_axis is not None:
        bounds["y2"] = _effective(ir.y2_axis, secondary_y)

    _draw_grid(doc, ir)

    if ir.style.is_3d:
        doc.open("g", **{"class": "plot plot-3d", "transform": "skewX(-12)"})
    else:
        doc.open("g", **{"class": "plot"})
    if ir.chart_type is ChartType.BAR:
        _bar_marks(doc, ir, *y_bounds)
    elif ir.chart_type in (ChartType.LINE, ChartType.AREA):
        _line_area_marks(doc, ir, ir.chart_type.value, bounds)
    elif ir.chart_type is ChartType.SCATTER:
        _scatter_marks(doc, ir, bounds)
    doc.close("g")

    if ir.chart_type is ChartType.BAR:
        categories = list(dict.fromkeys(str(x) for x in ir.series[0].x))
        n = max(len(categories), 1)
        labels = [((i + 0.5) / n, c) for i, c in enumerate(categories)]
    else:
        x_lo, x_hi = x_bounds
        span = x_hi - x_lo or 1.0
        if ir.x_axis.ticks is not None:
            labels = [((t - x_lo) / span, _fmt(t)) for t in ir.x_axis.ticks]
        elif ir.category_semantics.value == "temporal" and ir.series:
            days = temporal_offsets(ir.series[0].x)
            if days:
                labels = [
                    ((d - x_lo) / span, str(tok)[5:])
                    for d, tok in zip(days, ir.series[0].x)
                ]
            else:
                labels = [(i / 4, _fmt(x_lo + span * i / 4)) for i in range(5)]
        else:
            labels = [(i / 4, _fmt(x_lo + span * i / 4)) for i in range(5)]
    _draw_x_axis(doc, ir, labels)
    _draw_y_axis(doc, ir.y_axis, *y_bounds, side="left")
    if ir.y2_axis is not None:
        _draw_y_axis(doc, ir.y2_axis, *bounds["y2"], side="right")
    _draw_legend(doc, ir)

    doc.parts.append("</svg>")
    return "\n".join(doc.parts) + "\n"
