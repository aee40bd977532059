from __future__ import annotations

import pytest

from vizlint.core import (
    AxisScale,
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
    UnknownErrorTypeError,
    is_number,
    temporal_offsets,
    validate_ir,
)

EXPECTED_IDS = [
    "improper-scale-or-axis-range",
    "non-zero-baseline",
    "overuse-of-gridlines",
    "dual-axis-issue",
    "inconsistent-bar-widths",
    "overuse-of-3d-effects",
    "inappropriate-colour-choices",
    "too-many-pie-slices",
    "missing-labels-or-legends",
    "overlapping-data-elements",
    "uneven-tick-intervals",
    "poor-category-ordering",
]


def bar(**kw) -> ChartIR:
    defaults = dict(
        chart_type=ChartType.BAR,
        x_axis=AxisSpec(label="Cat"),
        y_axis=AxisSpec(label="Val", min=0.0, max=10.0),
        series=(SeriesSpec(name="S", x=("A", "B"), y=(1.0, 2.0)),),
    )
    defaults.update(kw)
    return ChartIR(**defaults)


def test_error_type_ids_and_order():
    """The taxonomy has exactly twelve members in declaration order."""
    assert [e.value for e in ErrorType] == EXPECTED_IDS


def test_error_type_display_names():
    """Display names use natural capitalization."""
    assert ErrorType.NON_ZERO_BASELINE.display == "Non-Zero Baseline"
    assert ErrorType.DUAL_AXIS_ISSUE.display == "Dual Axis Issue"
    assert ErrorType.OVERUSE_OF_3D_EFFECTS.display == "Overuse of 3D Effects"
    assert (
        ErrorType.INAPPROPRIATE_COLOUR_CHOICES.display
        == "Inappropriate Colour Choices"
    )
    assert ErrorType.IMPROPER_SCALE_OR_AXIS_RANGE.display == (
        "Improper Scale or Axis Range"
    )


def test_from_id_roundtrip():
    """Every id resolves back to its enum member."""
    for e in ErrorType:
        assert ErrorType.from_id(e.value) is e


def test_from_id_unknown():
    """Unknown ids raise a typed error."""
    with pytest.raises(UnknownErrorTypeError):
        ErrorType.from_id("not-an-error")


def test_validate_minimal_bar_ok():
    assert validate_ir(bar()) == []


def test_validate_axis_range_inverted():
    ir = bar(x_axis=AxisSpec(min=5.0, max=1.0))
    assert "x_axis: min < max violated" in validate_ir(ir)


def test_validate_log_scale_needs_positive_min():
    ir = bar(y_axis=AxisSpec(min=0.0, max=10.0, scale=AxisScale.LOG))
    assert "y_axis: log scale requires min > 0" in validate_ir(ir)


def test_validate_ticks_must_increase():
    ir = bar(y_axis=AxisSpec(min=0.0, max=10.0, ticks=(1.0, 1.0, 2.0)))
    assert "y_axis.ticks: must be strictly increasing" in validate_ir(ir)


def test_validate_series_length_mismatch():
    ir = bar(series=(SeriesSpec(name="S", x=("A",), y=(1.0, 2.0)),))
    assert "series[0]: x and y lengths differ" in validate_ir(ir)


def test_validate_series_empty_points():
    ir = bar(series=(SeriesSpec(name="S", x=(), y=()),))
    assert "series[0]: must contain at least one point" in validate_ir(ir)


def test_validate_series_name_required():
    ir = bar(series=(SeriesSpec(name="", x=("A",), y=(1.0,)),))
    assert "series[0].name: must be non-empty" in validate_ir(ir)


def test_validate_secondary_series_needs_y2():
    ir = bar(
        series=(
            SeriesSpec(name="S", x=("A",), y=(1.0,), axis=SeriesAxis.SECONDARY),
        )
    )
    assert "series[0].axis: secondary series without y2_axis" in validate_ir(ir)


def test_validate_y2_needs_secondary_series():
    ir = bar(y2_axis=AxisSpec(min=0.0, max=1.0))
    assert "y2_axis: no secondary series" in validate_ir(ir)


def test_validate_pie_requires_slices():
    ir = ChartIR(chart_type=ChartType.PIE)
    assert "slices: pie chart requires at least one slice" in validate_ir(ir)


def test_validate_pie_forbids_series():
    ir = ChartIR(
        chart_type=ChartType.PIE,
        slices=(PieSlice(label="A", value=1.0),),
        series=(SeriesSpec(name="S", x=("A",), y=(1.0,)),),
    )
    assert "series must be empty for pie" in validate_ir(ir)


def test_validate_non_pie_needs_series():
    ir = ChartIR(chart_type=ChartType.LINE)
    assert "series: must contain at least one series" in validate_ir(ir)


def test_validate_slices_only_for_pie():
    ir = bar(slices=(PieSlice(label="A", value=1.0),))
    assert "slices: only valid for pie charts" in validate_ir(ir)


def test_validate_slice_fields():
    ir = ChartIR(
        chart_type=ChartType.PIE,
        slices=(PieSlice(label="", value=-1.0),),
    )
    violations = validate_ir(ir)
    assert "slices[0].label: must be non-empty" in violations
    assert "slices[0].value: must be non-negative" in violations


def test_validate_declared_order_permutation():
    ir = bar(declared_order=("A", "C"))
    assert (
        "declared_order: must be a permutation of the distinct category tokens"
        in validate_ir(ir)
    )


def test_validate_declared_order_ok():
    ir = bar(declared_order=("B", "A"))
    assert validate_ir(ir) == []


def test_validate_palette_hex():
    ir = bar(style=StyleSpec(palette=("#12abCD", "red")))
    violations = validate_ir(ir)
    assert "style.palette[1]: not a #RRGGBB colour" in violations
    assert not any("palette[0]" in v for v in violations)


def test_validate_bar_widths_only_on_bars():
    ir = ChartIR(
        chart_type=ChartType.LINE,
        series=(SeriesSpec(name="S", x=(1.0, 2.0), y=(1.0, 2.0)),),
        style=StyleSpec(bar_rel_widths=(1.0, 1.0)),
    )
    assert "style.bar_rel_widths: only valid for bar charts" in validate_ir(ir)


def test_validate_bar_widths_length():
    ir = bar(style=StyleSpec(bar_rel_widths=(1.0,)))
    assert (
        "style.bar_rel_widths: length must equal the number of bars"
        in validate_ir(ir)
    )


def test_validate_bar_widths_positive():
    ir = bar(style=StyleSpec(bar_rel_widths=(1.0, 0.0)))
    assert "style.bar_rel_widths: widths must be positive" in validate_ir(ir)


def test_validate_point_radius_positive():
    ir = bar(style=StyleSpec(point_radius=0.0))
    assert "style.point_radius: must be positive" in validate_ir(ir)


def test_validate_collects_multiple_violations():
    """The validator is total and reports every problem at once."""
    ir = ChartIR(
        chart_type=ChartType.BAR,
        x_axis=AxisSpec(min=5.0, max=1.0),
        series=(SeriesSpec(name="", x=(), y=(1.0,)),),
        style=StyleSpec(point_radius=-1.0),
    )
    violations = validate_ir(ir)
    assert len(violations) >= 4


def test_is_number_excludes_bool():
    assert is_number(1) and is_number(1.5)
    assert not is_number(True)
    assert not is_number("1")


def test_temporal_offsets_weekly():
    """ISO dates map to day offsets from the first date."""
    assert temporal_offsets(("2024-01-01", "2024-01-08", "2024-01-15")) == [
        0.0,
        7.0,
        14.0,
    ]


def test_temporal_offsets_rejects_mixed():
    assert temporal_offsets(("2024-01-01", "not a date")) is None
    assert temporal_offsets((1.0, 2.0)) is None
    assert temporal_offsets(()) is None


def test_label_record_of_sets_count():
    rec = LabelRecord.of("x", [ErrorType.NON_ZERO_BASELINE, ErrorType.DUAL_AXIS_ISSUE])
    assert rec.count == 2
    assert rec.error_types == frozenset(
        {ErrorType.NON_ZERO_BASELINE, ErrorType.DUAL_AXIS_ISSUE}
    )


def test_chart_ir_is_immutable():
    ir = bar()
    with pytest.raises(AttributeError):
        ir.title = "nope"


def test_gridline_negative_count_rejected():
    ir = bar(y_axis=AxisSpec(gridlines=GridlineSpec(major=True, count=-1)))
    assert "y_axis.gridlines.count: must be non-negative" in validate_ir(ir)


def test_category_semantics_values():
    assert {s.value for s in CategorySemantics} == {"nominal", "ordinal", "temporal"}
