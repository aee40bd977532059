from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ir_factory import MUTATORS, mutate_doc, random_ir
from vizlint.core import (
    AxisSpec,
    ChartIR,
    ChartType,
    PieSlice,
    SeriesSpec,
)
from vizlint.specfmt import (
    InvalidIRError,
    SpecSchemaError,
    SpecSyntaxError,
    SpecVersionError,
    emit_spec,
    ir_to_dict,
    parse_spec,
)

MINIMAL = """{
  "schema_version": "vizlint/1",
  "chart_type": "bar",
  "series": [
    {"name": "S", "x": ["A", "B"], "y": [1, 2]}
  ]
}
"""


def test_parse_minimal():
    ir = parse_spec(MINIMAL)
    assert ir.chart_type is ChartType.BAR
    assert ir.series[0].y == (1.0, 2.0)


def test_parse_coerces_numbers_to_float():
    """Integer literals land as floats so round-trips are stable."""
    ir = parse_spec(MINIMAL)
    assert all(isinstance(v, float) for v in ir.series[0].y)


def test_duplicate_top_level_key_rejected():
    """A repeated key is a schema error naming the key, not last-one-wins."""
    text = MINIMAL.rstrip()[:-1] + ', "title": "a", "title": "b"}'
    with pytest.raises(SpecSchemaError) as exc_info:
        parse_spec(text)
    assert exc_info.value.field == "title"


def test_duplicate_nested_key_rejected():
    text = """{
      "schema_version": "vizlint/1",
      "chart_type": "bar",
      "series": [{"name": "S", "name": "T", "x": ["A"], "y": [1]}]
    }"""
    with pytest.raises(SpecSchemaError) as exc_info:
        parse_spec(text)
    assert exc_info.value.field == "name"


def test_nan_rejected():
    text = MINIMAL.replace("[1, 2]", "[NaN, 2]")
    with pytest.raises(SpecSchemaError):
        parse_spec(text)


def test_infinity_rejected():
    text = MINIMAL.replace("[1, 2]", "[Infinity, 2]")
    with pytest.raises(SpecSchemaError):
        parse_spec(text)


def test_syntax_error_carries_location():
    err = None
    try:
        parse_spec('{"schema_version": "vizlint/1",\n  broken')
    except SpecSyntaxError as exc:
        err = exc
    assert err is not None
    assert err.line >= 1 and err.column >= 1


def test_unknown_top_level_key():
    doc = json.loads(MINIMAL)
    doc["sparkle"] = True
    with pytest.raises(SpecSchemaError) as exc_info:
        parse_spec(json.dumps(doc))
    assert "sparkle" in str(exc_info.value)


def test_unknown_nested_key():
    doc = json.loads(MINIMAL)
    doc["y_axis"] = {"label": "Y", "rainbows": 3}
    with pytest.raises(SpecSchemaError) as exc_info:
        parse_spec(json.dumps(doc))
    assert "rainbows" in str(exc_info.value)


def test_missing_version():
    doc = json.loads(MINIMAL)
    del doc["schema_version"]
    with pytest.raises(SpecVersionError):
        parse_spec(json.dumps(doc))


def test_unsupported_version():
    doc = json.loads(MINIMAL)
    doc["schema_version"] = "vizlint/2"
    err = None
    try:
        parse_spec(json.dumps(doc))
    except SpecVersionError as exc:
        err = exc
    assert err is not None
    assert err.found == "vizlint/2"
    assert "vizlint/1" in err.supported


def test_missing_chart_type():
    doc = json.loads(MINIMAL)
    del doc["chart_type"]
    with pytest.raises(SpecSchemaError) as exc_info:
        parse_spec(json.dumps(doc))
    assert exc_info.value.field == "chart_type"


def test_bad_chart_type_value():
    doc = json.loads(MINIMAL)
    doc["chart_type"] = "donut"
    with pytest.raises(SpecSchemaError):
        parse_spec(json.dumps(doc))


def test_wrong_field_type_has_path():
    doc = json.loads(MINIMAL)
    doc["series"][0]["x"] = "AB"
    with pytest.raises(SpecSchemaError) as exc_info:
        parse_spec(json.dumps(doc))
    assert "series[0]" in exc_info.value.field


def test_semantic_violation_maps_to_schema_error():
    doc = json.loads(MINIMAL)
    doc["x_axis"] = {"min": 9.0, "max": 1.0}
    with pytest.raises(SpecSchemaError) as exc_info:
        parse_spec(json.dumps(doc))
    assert exc_info.value.field == "x_axis"


def test_emit_omits_defaults():
    ir = parse_spec(MINIMAL)
    doc = json.loads(emit_spec(ir))
    assert "scale" not in doc.get("y_axis", {})
    assert "axis" not in doc["series"][0]
    assert "style" not in doc or "is_3d" not in doc.get("style", {})


def test_emit_rejects_invalid_ir():
    ir = ChartIR(chart_type=ChartType.LINE)  # no series
    with pytest.raises(InvalidIRError) as exc_info:
        ir_to_dict(ir)
    assert any("series" in v for v in exc_info.value.violations)


def test_emit_ends_with_newline():
    assert emit_spec(parse_spec(MINIMAL)).endswith("\n")


def test_round_trip_handmade_pie():
    ir = ChartIR(
        chart_type=ChartType.PIE,
        title="Split",
        slices=(PieSlice(label="A", value=3.0), PieSlice(label="B", value=1.5)),
    )
    assert parse_spec(emit_spec(ir)) == ir


def test_round_trip_preserves_axis_details():
    ir = ChartIR(
        chart_type=ChartType.LINE,
        x_axis=AxisSpec(label="T", min=0.0, max=9.0, ticks=(0.0, 3.0, 6.0)),
        y_axis=AxisSpec(label="V", min=0.0, max=100.0),
        series=(SeriesSpec(name="S", x=(0.0, 1.0), y=(5.0, 6.0)),),
    )
    assert parse_spec(emit_spec(ir)) == ir


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_round_trip_random_irs(seed):
    """Property: emit then parse reproduces any valid IR exactly."""
    ir = random_ir(random.Random(seed))
    assert parse_spec(emit_spec(ir)) == ir


@settings(max_examples=100, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**31),
    st.integers(min_value=0, max_value=len(MUTATORS) - 1),
)
def test_mutated_docs_rejected_with_location(seed, mutator_idx):
    """Property: corrupted documents raise a typed error that names the
    offending location."""
    rng = random.Random(seed)
    text = emit_spec(random_ir(rng))
    mutated = mutate_doc(text, MUTATORS[mutator_idx], rng)
    with pytest.raises(
        (SpecSyntaxError, SpecSchemaError, SpecVersionError)
    ) as exc_info:
        parse_spec(mutated)
    err = exc_info.value
    if isinstance(err, SpecSchemaError):
        assert err.field
    elif isinstance(err, SpecSyntaxError):
        assert err.line >= 1
    else:
        assert err.supported  # version errors always list what is accepted


def test_emission_is_deterministic():
    ir = parse_spec(MINIMAL)
    assert emit_spec(ir) == emit_spec(ir)
