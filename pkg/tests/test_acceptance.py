"""End-to-end acceptance suite.

Every test prints one `[acceptance] <criterion>: PASS|FAIL` line to the
real stdout (bypassing capture) so a full run can be audited from the
console.  Two count-calibration targets are recorded as strict expected
failures because no integer error count can produce them; the reasons
give the arithmetic.
"""

from __future__ import annotations

import concurrent.futures
import contextlib
import json
import random
import sys
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from ir_factory import MUTATORS, mutate_doc, random_ir
from vizlint.cli import main
from vizlint.core import ErrorType, LabelRecord, PredictionRecord, validate_ir
from vizlint.corpus import CorpusConfig, generate_corpus
from vizlint.detectors import run_detectors
from vizlint.evalharness import (
    emit_scores_csv,
    load_labels_jsonl,
    load_predictions_jsonl,
    score,
)
from vizlint.llm import CHART_TYPE_PROMPT, _synonyms
from vizlint.rulebook import default_rulebook
from vizlint.service import create_app
from vizlint.specfmt import (
    SpecSchemaError,
    SpecSyntaxError,
    SpecVersionError,
    emit_spec,
    parse_spec,
)
from vizlint.workflows import fix_until_clean

DATA_DIR = Path(__file__).parent / "data"
ALL_TYPES = list(ErrorType)

# One line per criterion; echoed by the conftest terminal-summary hook.
RESULTS: list[str] = []


@contextlib.contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        RESULTS.append(f"[acceptance] {name}: FAIL")
        raise
    RESULTS.append(f"[acceptance] {name}: PASS")


# -- 1. detector closure over the generated corpus ---------------------------

def test_c1_detector_closure_perfect_scores(tmp_path):
    with criterion("detector closure: P=R=F1=1.00, count MAE 0, under 10s"):
        started = time.perf_counter()
        items = generate_corpus(
            CorpusConfig(seed=42, output_dir=tmp_path / "closure")
        )
        book = default_rulebook()
        preds = []
        for item in items:
            diag = run_detectors(item.ir, book)
            preds.append(
                PredictionRecord(
                    item_id=item.item_id,
                    error_types=frozenset(
                        d.error_type for d in diag.diagnostics
                    ),
                    count=diag.predicted_count,
                )
            )
        report = score([i.label for i in items], preds)
        elapsed = time.perf_counter() - started

        for ts in report.per_type:
            assert ts.precision == 1.0, ts
            assert ts.recall == 1.0, ts
            assert ts.f1 == 1.0, ts
        assert report.count_mae == 0.0
        assert report.count_bias == 0.0
        assert elapsed < 10.0, f"closure run took {elapsed:.2f}s"


# -- 2. corpus composition ----------------------------------------------------

def test_c2_corpus_composition(corpus42):
    with criterion("corpus: 72 items, 6 per type, 42 single + 30 multi"):
        items, _ = corpus42
        assert len(items) == 72
        for et in ALL_TYPES:
            assert sum(1 for i in items if i.primary_error is et) == 6
        assert sum(1 for i in items if i.label.count == 1) == 42
        assert sum(1 for i in items if i.label.count >= 2) == 30


# -- 3. scoring equals an independent brute-force oracle ---------------------

def _oracle(truth, preds):
    """Straight-line reimplementation of the scoring rules."""
    p_by_id = {p.item_id: p for p in preds}
    per_type = {}
    for et in ALL_TYPES:
        tp = sum(
            1 for t in truth
            if et in t.error_types and et in p_by_id[t.item_id].error_types
        )
        fp = sum(
            1 for t in truth
            if et not in t.error_types and et in p_by_id[t.item_id].error_types
        )
        fn = sum(
            1 for t in truth
            if et in t.error_types and et not in p_by_id[t.item_id].error_types
        )
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        per_type[et] = (tp, fp, fn, prec, rec, f1)
    diffs = [p_by_id[t.item_id].count - t.count for t in truth]
    singles = [
        abs(d) for t, d in zip(truth, diffs) if t.count == 1
    ]
    multis = [abs(d) for t, d in zip(truth, diffs) if t.count >= 2]
    return {
        "per_type": per_type,
        "mae": sum(abs(d) for d in diffs) / len(truth),
        "bias": sum(diffs) / len(truth),
        "mae_single": sum(singles) / len(singles) if singles else 0.0,
        "mae_multi": sum(multis) / len(multis) if multis else 0.0,
        "n_single": len(singles),
        "n_multi": len(multis),
    }


def test_c3_scoring_matches_brute_force_oracle():
    with criterion("scoring: 50 randomized runs match a brute-force oracle"):
        rng = random.Random(20240817)
        for trial in range(50):
            n = rng.randint(1, 10)
            truth = []
            preds = []
            for i in range(n):
                item_id = f"t{trial}-{i}"
                t_types = rng.sample(ALL_TYPES, rng.randint(0, 4))
                p_types = rng.sample(ALL_TYPES, rng.randint(0, 4))
                truth.append(LabelRecord.of(item_id, t_types))
                preds.append(
                    PredictionRecord(
                        item_id=item_id,
                        error_types=frozenset(p_types),
                        count=max(0, len(p_types) + rng.randint(-2, 2)),
                    )
                )
            report = score(truth, preds)
            want = _oracle(truth, preds)
            for ts in report.per_type:
                tp, fp, fn, prec, rec, f1 = want["per_type"][ts.error_type]
                assert (ts.tp, ts.fp, ts.fn) == (tp, fp, fn)
                assert abs(ts.precision - prec) < 1e-9
                assert abs(ts.recall - rec) < 1e-9
                assert abs(ts.f1 - f1) < 1e-9
            assert abs(report.count_mae - want["mae"]) < 1e-9
            assert abs(report.count_bias - want["bias"]) < 1e-9
            assert abs(report.count_mae_single - want["mae_single"]) < 1e-9
            assert abs(report.count_mae_multi - want["mae_multi"]) < 1e-9
            assert report.n_single == want["n_single"]
            assert report.n_multi == want["n_multi"]


def test_c3b_mae_decomposes_over_subsets():
    with criterion("scoring: MAE decomposes exactly over single/multi splits"):
        rng = random.Random(99)
        for trial in range(50):
            n = rng.randint(1, 10)
            truth = []
            preds = []
            for i in range(n):
                item_id = f"d{trial}-{i}"
                t_types = rng.sample(ALL_TYPES, rng.randint(1, 4))
                truth.append(LabelRecord.of(item_id, t_types))
                preds.append(
                    PredictionRecord(
                        item_id=item_id,
                        error_types=frozenset(t_types),
                        count=max(0, len(t_types) + rng.randint(-2, 2)),
                    )
                )
            r = score(truth, preds)
            # Every item has count >= 1, so the subsets partition the corpus.
            assert r.n_single + r.n_multi == r.n_items
            recomposed = (
                r.count_mae_single * r.n_single + r.count_mae_multi * r.n_multi
            ) / r.n_items
            assert abs(r.count_mae - recomposed) < 1e-9


# -- 4. reference evaluation fixture ------------------------------------------

def _reference_report():
    truth = load_labels_jsonl(DATA_DIR / "reference_labels.jsonl")
    preds = load_predictions_jsonl(DATA_DIR / "reference_predictions.jsonl")
    return score(truth, preds)


def test_c4_reference_run_headline_metrics():
    with criterion("reference run: count MAE 0.44, bias -0.11, perfect types"):
        report = _reference_report()
        assert report.n_items == 72
        assert report.n_single == 42
        assert report.n_multi == 30
        csv = emit_scores_csv(report)
        assert "Count MAE,0.44" in csv
        assert "Count Bias,-0.11" in csv
        assert "Count MAE (Single),0.38" in csv
        assert "Count MAE (Multi),0.53" in csv
        # The synthetic run recovers every labeled type exactly.
        for ts in report.per_type:
            assert ts.precision == 1.0 and ts.recall == 1.0
        # Exact rationals behind the rounded display values.
        assert abs(report.count_mae - 32 / 72) < 1e-12
        assert abs(report.count_bias - (-8 / 72)) < 1e-12


@pytest.mark.xfail(
    strict=True,
    reason=(
        "unreachable: the single-item count MAE is k/42 for an integer k, "
        "and 0.37 needs k in [15.33, 15.75), which contains no integer; "
        "the nearest attainable display values are 16/42 = 0.38 and "
        "15/42 = 0.36"
    ),
)
def test_c4b_reference_single_mae_hits_037():
    RESULTS.append(
        "[acceptance] reference run: single-item count MAE displays 0.37: "
        "FAIL (expected; k/42 cannot round to 0.37 for integer k)"
    )
    report = _reference_report()
    assert f"{report.count_mae_single:.2f}" == "0.37"


@pytest.mark.xfail(
    strict=True,
    reason=(
        "unreachable: the multi-item count MAE is k/30 for an integer k, "
        "and 0.51 needs k in [15.15, 15.45), which contains no integer; "
        "the nearest attainable display values are 15/30 = 0.50 and "
        "16/30 = 0.53"
    ),
)
def test_c4c_reference_multi_mae_hits_051():
    RESULTS.append(
        "[acceptance] reference run: multi-item count MAE displays 0.51: "
        "FAIL (expected; k/30 cannot round to 0.51 for integer k)"
    )
    report = _reference_report()
    assert f"{report.count_mae_multi:.2f}" == "0.51"


# -- 5. every corpus item is fixable ------------------------------------------

def test_c5_fixes_converge_on_every_item(corpus42):
    with criterion("fixes: every corpus item relints clean within 3 passes"):
        items, _ = corpus42
        book = default_rulebook()
        for item in items:
            fixed, passes = fix_until_clean(item.ir, book)
            assert passes <= 3, item.item_id
            assert validate_ir(fixed) == [], item.item_id
            assert run_detectors(fixed, book).diagnostics == (), item.item_id


# -- 6. spec round-trips and rejection ----------------------------------------

def test_c6_spec_round_trip_and_rejection(corpus42):
    with criterion(
        "spec format: byte-stable round-trips, corrupted docs rejected"
    ):
        items, _ = corpus42
        for item in items:
            text = item.spec_path.read_text()
            assert emit_spec(parse_spec(text)) == text, item.item_id

        for seed in range(1000):
            rng = random.Random(seed)
            ir = random_ir(rng)
            assert parse_spec(emit_spec(ir)) == ir, seed

        for seed in range(100):
            rng = random.Random(seed)
            text = emit_spec(random_ir(rng))
            mutated = mutate_doc(text, MUTATORS[seed % len(MUTATORS)], rng)
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
                assert err.supported


# -- 7. mock-backed image analysis end to end ----------------------------------

_CHART_NAME = {
    "bar": "Bar Plot",
    "line": "Line Chart",
    "pie": "Pie Chart",
    "scatter": "Scatter Plot",
    "area": "Area Chart",
}


def _pick_synonym(error_type: ErrorType) -> str:
    """The longest synonym for a type, title-cased to exercise folding."""
    candidates = [
        syn for syn, target in _synonyms().items()
        if target == error_type.value
    ]
    assert candidates, error_type
    return max(candidates, key=len).title()


def _image_fixture_run(corpus42, tmp_path):
    items, _ = corpus42
    first_per_type = {}
    for item in items:
        first_per_type.setdefault(item.primary_error, item)
    fixtures = [first_per_type[t] for t in ALL_TYPES]
    assert len(fixtures) == 12

    responses = {}
    for item in fixtures:
        stem = item.svg_path.stem  # the item id doubles as the payload id
        issues = [
            {
                "type": _pick_synonym(et),
                "message": f"model saw {et.display.lower()}",
            }
            for et in sorted(item.label.error_types, key=ALL_TYPES.index)
        ]
        responses[f"chart_type_detection:{stem}"] = _CHART_NAME[
            item.chart_type.value
        ]
        responses[f"threshold_evaluation:{stem}"] = "measurements reported"
        responses[f"issue_detection:{stem}"] = json.dumps(
            {"issues": issues, "count": len(issues)}
        )
    table = tmp_path / "mock_table.json"
    table.write_text(json.dumps({"version": "mock/1", "responses": responses}))
    return fixtures, table


def test_c7_mock_image_analysis_end_to_end(corpus42, tmp_path, capsys):
    with criterion(
        "mock pipeline: image analysis is correct and byte-deterministic"
    ):
        fixtures, table = _image_fixture_run(corpus42, tmp_path)
        for item in fixtures:
            argv = [
                "analyze",
                "--image", str(item.svg_path),
                "--backend", "mock",
                "--mock-fixtures", str(table),
                "--item-id", item.svg_path.stem,
                "--format", "json",
                "--include-transcript",
            ]
            assert main(argv) == 0
            first = capsys.readouterr().out
            assert main(argv) == 0
            second = capsys.readouterr().out
            assert first == second, item.item_id  # byte-identical reruns

            doc = json.loads(first)
            assert doc["mode"] == "image"
            assert doc["chart_type"] == item.chart_type.value
            got = {i["error_type"] for i in doc["issues"]}
            want = {et.value for et in item.label.error_types}
            assert got == want, item.item_id  # synonyms fold into the taxonomy
            assert doc["predicted_count"] == item.label.count
            assert doc["warnings"] == []

            stages = [e["stage"] for e in doc["transcript"]]
            assert stages == [
                "chart_type_detection",
                "threshold_evaluation",
                "rule_application",
                "issue_detection",
            ]
            assert CHART_TYPE_PROMPT.split(".")[0] in (
                doc["transcript"][0]["prompt"]
            )


# -- 8. the HTTP API and the CLI agree ------------------------------------------

def test_c8_api_cli_parity_and_concurrency(corpus42, tmp_path, capsys):
    with criterion("service: API output equals CLI, stable under 8 threads"):
        items, _ = corpus42
        flawed = items[0].spec_path.read_text()
        clean_ir, _ = fix_until_clean(parse_spec(flawed))
        clean = emit_spec(clean_ir)

        spec_file = tmp_path / "item.chart.json"
        spec_file.write_text(flawed)
        assert main(
            ["analyze", "--spec", str(spec_file), "--format", "json"]
        ) == 0
        cli_doc = json.loads(capsys.readouterr().out)

        client = TestClient(create_app())
        api_doc = client.post(
            "/api/analyze", json={"mode": "spec", "payload": flawed}
        ).json()
        assert api_doc == cli_doc

        payloads = [flawed, clean] * 4

        def analyze(payload: str) -> dict:
            resp = client.post(
                "/api/analyze", json={"mode": "spec", "payload": payload}
            )
            assert resp.status_code == 200
            return resp.json()

        serial = [analyze(p) for p in payloads]
        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
            parallel = list(pool.map(analyze, payloads))
        assert parallel == serial
