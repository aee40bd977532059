"""Seeded generators for valid chart IRs and for targeted document
corruption, shared by round-trip, fuzz, and acceptance tests."""

from __future__ import annotations

import json
import random
from typing import Callable

from vizlint.core import (
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
    validate_ir,
)

_WORDS = (
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf",
    "hotel", "india", "juliett", "kilo", "lima",
)


def _axis(rng: random.Random, allow_ticks: bool = True) -> AxisSpec:
    label = rng.choice((None, rng.choice(_WORDS).title()))
    lo = round(rng.uniform(-50, 10), 2)
    hi = round(lo + rng.uniform(1, 200), 2)
    scale = AxisScale.LINEAR
    if rng.random() < 0.15 and lo > 0:
        scale = AxisScale.LOG
    has_range = rng.random() < 0.7
    ticks = None
    if allow_ticks and rng.random() < 0.3:
        start = round(rng.uniform(-10, 10), 2)
        step = round(rng.uniform(0.5, 20), 2)
        ticks = tuple(round(start + i * step, 2) for i in range(rng.randint(3, 7)))
    gridlines = GridlineSpec()
    if rng.random() < 0.4:
        gridlines = GridlineSpec(
            major=True,
            minor=rng.random() < 0.3,
            count=rng.randint(2, 30),
        )
    return AxisSpec(
        label=label,
        min=lo if has_range else None,
        max=hi if has_range else None,
        scale=scale,
        ticks=ticks,
        gridlines=gridlines,
    )


def _series_values(rng: random.Random, n: int) -> tuple[float, ...]:
    return tuple(round(rng.uniform(0.5, 120.0), 3) for _ in range(n))


def random_ir(rng: random.Random) -> ChartIR:
    """One random chart that passes validate_ir."""
    chart_type = rng.choice(list(ChartType))
    title = rng.choice((None, " ".join(rng.sample(_WORDS, 2)).title()))

    if chart_type is ChartType.PIE:
        n = rng.randint(1, 10)
        labels = rng.sample(_WORDS, n)
        slices = tuple(
            PieSlice(label=l.title(), value=round(rng.uniform(1, 50), 2))
            for l in labels
        )
        palette = ()
        if rng.random() < 0.6:
            palette = tuple(
                "#%06x" % rng.randint(0, 0xFFFFFF) for _ in range(rng.randint(1, n))
            )
        ir = ChartIR(
            chart_type=chart_type,
            title=title,
            slices=slices,
            style=StyleSpec(is_3d=rng.random() < 0.3, palette=palette),
            category_semantics=CategorySemantics.NOMINAL,
        )
        assert validate_ir(ir) == []
        return ir

    n_series = rng.randint(1, 3)
    n_points = rng.randint(1, 8)
    categorical = chart_type is ChartType.BAR or rng.random() < 0.3
    if categorical:
        xs: tuple = tuple(w.title() for w in rng.sample(_WORDS, n_points))
        semantics = rng.choice(
            (CategorySemantics.NOMINAL, CategorySemantics.ORDINAL)
        )
    else:
        start = rng.uniform(-10, 10)
        xs = tuple(round(start + i * rng.uniform(0.5, 3), 2) for i in range(n_points))
        semantics = CategorySemantics.NOMINAL

    use_y2 = rng.random() < 0.25 and n_series >= 2
    series = []
    for i in range(n_series):
        axis = SeriesAxis.PRIMARY
        if use_y2 and i == n_series - 1:
            axis = SeriesAxis.SECONDARY
        series.append(
            SeriesSpec(
                name=f"S{i + 1} {rng.choice(_WORDS)}",
                x=xs,
                y=_series_values(rng, n_points),
                axis=axis,
            )
        )

    declared = None
    if categorical and rng.random() < 0.3:
        shuffled = list(xs)
        rng.shuffle(shuffled)
        declared = tuple(shuffled)

    style = StyleSpec(
        is_3d=rng.random() < 0.2,
        palette=tuple(
            "#%06x" % rng.randint(0, 0xFFFFFF) for _ in range(rng.randint(0, 4))
        ),
        bar_rel_widths=(
            tuple(round(rng.uniform(0.5, 1.5), 2) for _ in range(n_points))
            if chart_type is ChartType.BAR and rng.random() < 0.4
            else None
        ),
        show_legend=rng.random() < 0.7,
        point_radius=(
            round(rng.uniform(0.005, 0.08), 4)
            if chart_type is ChartType.SCATTER and rng.random() < 0.6
            else None
        ),
    )

    ir = ChartIR(
        chart_type=chart_type,
        title=title,
        x_axis=_axis(rng),
        y_axis=_axis(rng),
        y2_axis=_axis(rng, allow_ticks=False) if use_y2 else None,
        series=tuple(series),
        category_semantics=semantics,
        declared_order=declared,
        style=style,
    )
    violations = validate_ir(ir)
    assert violations == [], violations
    return ir


# --- document corruption -----------------------------------------------

def _m_bad_version(doc: dict, rng: random.Random) -> dict:
    doc["schema_version"] = "vizlint/99"
    return doc


def _m_drop_version(doc: dict, rng: random.Random) -> dict:
    doc.pop("schema_version", None)
    return doc


def _m_bad_chart_type(doc: dict, rng: random.Random) -> dict:
    doc["chart_type"] = "donut"
    return doc


def _m_unknown_key(doc: dict, rng: random.Random) -> dict:
    doc["surprise"] = 1
    return doc


def _m_wrong_series_type(doc: dict, rng: random.Random) -> dict:
    doc["series"] = {"oops": True}
    return doc


def _m_title_number(doc: dict, rng: random.Random) -> dict:
    doc["title"] = 42
    return doc


def _m_inverted_axis(doc: dict, rng: random.Random) -> dict:
    doc["x_axis"] = {"min": 10.0, "max": -10.0}
    return doc


def _m_negative_radius(doc: dict, rng: random.Random) -> dict:
    doc.setdefault("style", {})["point_radius"] = -0.5
    return doc


def _m_bad_palette(doc: dict, rng: random.Random) -> dict:
    doc.setdefault("style", {})["palette"] = ["red"]
    return doc


def _m_pie_conflict(doc: dict, rng: random.Random) -> dict:
    if doc.get("chart_type") == "pie":
        doc["slices"] = []
    else:
        doc["slices"] = [{"label": "A", "value": 1.0}]
    return doc


MUTATORS: tuple[Callable, ...] = (
    _m_bad_version,
    _m_drop_version,
    _m_bad_chart_type,
    _m_unknown_key,
    _m_wrong_series_type,
    _m_title_number,
    _m_inverted_axis,
    _m_negative_radius,
    _m_bad_palette,
    _m_pie_conflict,
)


def mutate_doc(text: str, mutator: Callable, rng: random.Random) -> str:
    doc = json.loads(text)
    return json.dumps(mutator(doc, rng), indent=2) + "\n"
