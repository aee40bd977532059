"""Chart spec text format: parse and emit `vizlint/1` documents.

A chart spec is a UTF-8 JSON document (conventionally `*.chart.json`) whose
top-level keys are fixed and documented in docs/spec-format.md.  Parsing is
strict: the document must declare `schema_version`, unknown keys are
rejected at every level, duplicate keys are an error, and all numbers are
read as 64-bit floats.  `parse_spec(emit_spec(ir)) == ir` holds for every
valid IR.
"""

from __future__ import annotations

import json
from typing import Any, Optional, Union

from .core import (
    SPEC_SCHEMA_VERSION,
    AxisScale,
    AxisSpec,
    CategorySemantics,
    ChartIR,
    ChartType,
    GridlineSpec,
    PieSlice,
    SeriesAxis,
    SeriesSpec,
    StyleSpec,
    VizlintError,
    validate_ir,
)

SUPPORTED_VERSIONS = (SPEC_SCHEMA_VERSION,)


class SpecSyntaxError(VizlintError):
    """The document is not well-formed.  line/column always lie within the
    input text bounds."""

    def __init__(self, line: int, column: int, expected: str):
        self.line = line
        self.column = column
        self.expected = expected
        super().__init__(f"syntax error at line {line}, column {column}: {expected}")


class SpecSchemaError(VizlintError):
    """The document is well-formed but violates the schema at `field`."""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}" if field else reason)


class SpecVersionError(VizlintError):
    def __init__(self, found: Optional[str], supported=SUPPORTED_VERSIONS):
        self.found = found
        self.supported = tuple(supported)
        shown = "missing" if found is None else repr(found)
        super().__init__(
            f"unsupported schema_version ({shown}); supported: {', '.join(self.supported)}"
        )


class InvalidIRError(VizlintError):
    """Raised when an operation requires a valid ChartIR but got violations."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid chart IR: " + "; ".join(self.violations))


class _DuplicateKey(Exception):
    def __init__(self, key: str):
        self.key = key


def _pairs_hook(pairs):
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise _DuplicateKey(key)
        seen.add(key)
    return dict(pairs)


def _reject_constant(name: str):
    raise _NonFinite(name)


class _NonFinite(Exception):
    def __init__(self, name: str):
        self.name = name


def _clamp_location(text: str, line: int, column: int) -> tuple[int, int]:
    lines = text.splitlines() or [""]
    line = max(1, min(line, len(lines)))
    column = max(1, min(column, len(lines[line - 1]) + 1))
    return line, column


# ---------------------------------------------------------------------------
# Field readers.  Each takes the raw value and a dotted path for errors.


def _want_obj(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise SpecSchemaError(path, "expected an object")
    return value


def _want_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise SpecSchemaError(path, "expected a string")
    return value


def _want_bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise SpecSchemaError(path, "expected a boolean")
    return value


def _want_num(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecSchemaError(path, "expected a number")
    return float(value)


def _want_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecSchemaError(path, "expected an integer")
    return value


def _want_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SpecSchemaError(path, "expected an array")
    return value


def _check_keys(obj: dict, allowed: tuple[str, ...], path: str) -> None:
    for key in obj:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise SpecSchemaError(where, "unknown key")


def _parse_gridlines(value, path: str) -> GridlineSpec:
    obj = _want_obj(value, path)
    _check_keys(obj, ("major", "minor", "count"), path)
    count = None
    if "count" in obj:
        count = _want_int(obj["count"], f"{path}.count")
    return GridlineSpec(
        major=_want_bool(obj["major"], f"{path}.major") if "major" in obj else False,
        minor=_want_bool(obj["minor"], f"{path}.minor") if "minor" in obj else False,
        count=count,
    )


def _parse_axis(value, path: str) -> AxisSpec:
    obj = _want_obj(value, path)
    _check_keys(obj, ("label", "min", "max", "scale", "ticks", "gridlines"), path)
    scale = AxisScale.LINEAR
    if "scale" in obj:
        raw = _want_str(obj["scale"], f"{path}.scale")
        try:
            scale = AxisScale(raw)
        except ValueError:
            raise SpecSchemaError(f"{path}.scale", f"unknown scale {raw!r}") from None
    ticks = None
    if "ticks" in obj:
        ticks = tuple(
            _want_num(t, f"{path}.ticks[{i}]")
            for i, t in enumerate(_want_list(obj["ticks"], f"{path}.ticks"))
        )
    return AxisSpec(
        label=_want_str(obj["label"], f"{path}.label") if "label" in obj else None,
        min=_want_num(obj["min"], f"{path}.min") if "min" in obj else None,
        max=_want_num(obj["max"], f"{path}.max") if "max" in obj else None,
        scale=scale,
        ticks=ticks,
        gridlines=_parse_gridlines(obj["gridlines"], f"{path}.gridlines")
        if "gridlines" in obj
        else GridlineSpec(),
    )


def _parse_series(value, path: str) -> SeriesSpec:
    obj = _want_obj(value, path)
    _check_keys(obj, ("name", "x", "y", "axis"), path)
    for req in ("name", "x", "y"):
        if req not in obj:
            raise SpecSchemaError(f"{path}.{req}", "required key missing")
    xs: list[Union[float, str]] = []
    for i, v in enumerate(_want_list(obj["x"], f"{path}.x")):
        if isinstance(v, str):
            xs.append(v)
        else:
            xs.append(_want_num(v, f"{path}.x[{i}]"))
    ys = tuple(
        _want_num(v, f"{path}.y[{i}]")
        for i, v in enumerate(_want_list(obj["y"], f"{path}.y"))
    )
    axis = SeriesAxis.PRIMARY
    if "axis" in obj:
        raw = _want_str(obj["axis"], f"{path}.axis")
        try:
            axis = SeriesAxis(raw)
        except ValueError:
            raise SpecSchemaError(f"{path}.axis", f"unknown axis {raw!r}") from None
    return SeriesSpec(
        name=_want_str(obj["name"], f"{path}.name"), x=tuple(xs), y=ys, axis=axis
    )


def _parse_slice(value, path: str) -> PieSlice:
    obj = _want_obj(value, path)
    _check_keys(obj, ("label", "value"), path)
    for req in ("label", "value"):
        if req not in obj:
            raise SpecSchemaError(f"{path}.{req}", "required key missing")
    return PieSlice(
        label=_want_str(obj["label"], f"{path}.label"),
        value=_want_num(obj["value"], f"{path}.value"),
    )


def _parse_style(value, path: str) -> StyleSpec:
    obj = _want_obj(value, path)
    _check_keys(
        obj,
        ("is_3d", "palette", "bar_rel_widths", "show_legend", "point_radius"),
        path,
    )
    palette = ()
    if "palette" in obj:
        palette = tuple(
            _want_str(c, f"{path}.palette[{i}]")
            for i, c in enumerate(_want_list(obj["palette"], f"{path}.palette"))
        )
    widths = None
    if "bar_rel_widths" in obj:
        widths = tuple(
            _want_num(w, f"{path}.bar_rel_widths[{i}]")
            for i, w in enumerate(
                _want_list(obj["bar_rel_widths"], f"{path}.bar_rel_widths")
            )
        )
    radius = None
    if "point_radius" in obj:
        radius = _want_num(obj["point_radius"], f"{path}.point_radius")
    return StyleSpec(
        is_3d=_want_bool(obj["is_3d"], f"{path}.is_3d") if "is_3d" in obj else False,
        palette=palette,
        bar_rel_widths=widths,
        show_legend=_want_bool(obj["show_legend"], f"{path}.show_legend")
        if "show_legend" in obj
        else True,
        point_radius=radius,
    )


_TOP_LEVEL_KEYS = (
    "schema_version",
    "chart_type",
    "title",
    "x_axis",
    "y_axis",
    "y2_axis",
    "series",
    "slices",
    "category_semantics",
    "declared_order",
    "style",
)


def parse_spec(text: str) -> ChartIR:
    """Parse a chart spec document into a validated ChartIR.

    Raises SpecSyntaxError for malformed JSON, SpecVersionError for a
    missing or unsupported schema_version, and SpecSchemaError for every
    other schema violation (unknown keys, type mismatches, IR invariant
    breaches).
    """
    try:
        raw = json.loads(
            text, object_pairs_hook=_pairs_hook, parse_constant=_reject_constant
        )
    except _DuplicateKey as dup:
        raise SpecSchemaError(dup.key, "duplicate key") from None
    except _NonFinite as nf:
        raise SpecSchemaError("", f"non-finite number {nf.name} not allowed") from None
    except json.JSONDecodeError as exc:
        line, column = _clamp_location(text, exc.lineno, exc.colno)
        raise SpecSyntaxError(line, column, exc.msg) from None

    if not isinstance(raw, dict):
        raise SpecSchemaError("", "top level must be an object")

    version = raw.get("schema_version")
    if not isinstance(version, str):
        raise SpecVersionError(None)
    if version not in SUPPORTED_VERSIONS:
        raise SpecVersionError(version)

    _check_keys(raw, _TOP_LEVEL_KEYS, "")

    if "chart_type" not in raw:
        raise SpecSchemaError("chart_type", "required key missing")
    raw_type = _want_str(raw["chart_type"], "chart_type")
    try:
        chart_type = ChartType(raw_type)
    except ValueError:
        raise SpecSchemaError(
            "chart_type", f"unknown chart type {raw_type!r}"
        ) from None

    semantics = CategorySemantics.NOMINAL
    if "category_semantics" in raw:
        raw_sem = _want_str(raw["category_semantics"], "category_semantics")
        try:
            semantics = CategorySemantics(raw_sem)
        except ValueError:
            raise SpecSchemaError(
                "category_semantics", f"unknown semantics {raw_sem!r}"
            ) from None

    series = ()
    if "series" in raw:
        series = tuple(
            _parse_series(s, f"series[{i}]")
            for i, s in enumerate(_want_list(raw["series"], "series"))
        )
    slices = None
    if "slices" in raw:
        slices = tuple(
            _parse_slice(s, f"slices[{i}]")
            for i, s in enumerate(_want_list(raw["slices"], "slices"))
        )
    declared_order = None
    if "declared_order" in raw:
        declared_order = tuple(
            _want_str(t, f"declared_order[{i}]")
            for i, t in enumerate(_want_list(raw["declared_order"], "declared_order"))
        )

    ir = ChartIR(
        chart_type=chart_type,
        x_axis=_parse_axis(raw["x_axis"], "x_axis") if "x_axis" in raw else AxisSpec(),
        y_axis=_parse_axis(raw["y_axis"], "y_axis") if "y_axis" in raw else AxisSpec(),
        y2_axis=_parse_axis(raw["y2_axis"], "y2_axis") if "y2_axis" in raw else None,
        series=series,
        slices=slices,
        title=_want_str(raw["title"], "title") if "title" in raw else None,
        category_semantics=semantics,
        declared_order=declared_order,
        style=_parse_style(raw["style"], "style") if "style" in raw else StyleSpec(),
        schema_version=version,
    )

    violations = validate_ir(ir)
    if violations:
        field, reason = _split_violation(violations[0])
        raise SpecSchemaError(field, reason)
    return ir


def _split_violation(violation: str) -> tuple[str, str]:
    if ": " in violation:
        field, reason = violation.split(": ", 1)
        return field, reason
    return violation.split(" ", 1)[0], violation.split(" ", 1)[1]


# ---------------------------------------------------------------------------
# Emission.  Optional fields at their defaults are omitted so the canonical
# form stays small; parse fills the same defaults back in.


def _gridlines_to_dict(gl: GridlineSpec) -> Optional[dict]:
    if gl == GridlineSpec():
        return None
    out: dict[str, Any] = {"major": gl.major, "minor": gl.minor}
    if gl.count is not None:
        out["count"] = gl.count
    return out


def _axis_to_dict(axis: AxisSpec) -> dict:
    out: dict[str, Any] = {}
    if axis.label is not None:
        out["label"] = axis.label
    if axis.min is not None:
        out["min"] = axis.min
    if axis.max is not None:
        out["max"] = axis.max
    if axis.scale is not AxisScale.LINEAR:
        out["scale"] = axis.scale.value
    if axis.ticks is not None:
        out["ticks"] = list(axis.ticks)
    gl = _gridlines_to_dict(axis.gridlines)
    if gl is not None:
        out["gridlines"] = gl
    return out


def _series_to_dict(s: SeriesSpec) -> dict:
    out: dict[str, Any] = {"name": s.name, "x": list(s.x), "y": list(s.y)}
    if s.axis is not SeriesAxis.PRIMARY:
        out["axis"] = s.axis.value
    return out


def _style_to_dict(style: StyleSpec) -> dict:
    out: dict[str, Any] = {}
    if style.is_3d:
        out["is_3d"] = True
    if style.palette:
        out["palette"] = list(style.palette)
    if not style.show_legend:
        out["show_legend"] = False
    if style.bar_rel_widths is not None:
        out["bar_rel_widths"] = list(style.bar_rel_widths)
    if style.point_radius is not None:
        out["point_radius"] = style.point_radius
    return out


def ir_to_dict(ir: ChartIR) -> dict:
    """Plain-dict form of the IR in canonical key order (the emitted JSON
    shape).  Requires a valid IR."""
    violations = validate_ir(ir)
    if violations:
        raise InvalidIRError(violations)
    out: dict[str, Any] = {
        "schema_version": ir.schema_version,
        "chart_type": ir.chart_type.value,
    }
    if ir.title is not None:
        out["title"] = ir.title
    x_axis = _axis_to_dict(ir.x_axis)
    if x_axis:
        out["x_axis"] = x_axis
    y_axis = _axis_to_dict(ir.y_axis)
    if y_axis:
        out["y_axis"] = y_axis
    if ir.y2_axis is not None:
        out["y2_axis"] = _axis_to_dict(ir.y2_axis)
    if ir.series:
        out["series"] = [_series_to_dict(s) for s in ir.series]
    if ir.slices is not None:
        out["slices"] = [{"label": s.label, "value": s.value} for s in ir.slices]
    if ir.category_semantics is not CategorySemantics.NOMINAL:
        out["category_semantics"] = ir.category_semantics.value
    if ir.declared_order is not None:
        out["declared_order"] = list(ir.declared_order)
    style = _style_to_dict(ir.style)
    if style:
        out["style"] = style
    return out


def emit_spec(ir: ChartIR) -> str:
    """Serialize a valid ChartIR to its canonical spec document."""
    return json.dumps(ir_to_dict(ir), indent=2, ensure_ascii=False, allow_nan=False) + "\n"
