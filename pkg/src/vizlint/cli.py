"""Command-line interface.

Exit codes: 0 success, 1 issues found under --strict, 2 usage or input
errors (also argparse's own convention).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .core import VizlintError
from .corpus import CorpusConfig, generate_corpus
from .evalharness import (
    EvalReport,
    emit_scores_csv,
    load_labels_jsonl,
    load_predictions_jsonl,
    score,
)
from .llm import Backend, MockBackend, RemoteBackend
from .rulebook import Rulebook, default_rulebook, load_rulebook
from .specfmt import emit_spec, parse_spec
from .workflows import (
    AnalysisOutcome,
    analyze_spec_text,
    analyze_with_backend,
    fix_until_clean,
    outcome_to_dict,
)


class _UsageError(Exception):
    pass


def _load_rules(path: Optional[str]) -> Rulebook:
    if path is None:
        return default_rulebook()
    return load_rulebook(Path(path))


def _make_backend(args: argparse.Namespace) -> Backend:
    if args.backend == "mock":
        if not args.mock_fixtures:
            raise _UsageError("--backend mock requires --mock-fixtures")
        return MockBackend.from_file(Path(args.mock_fixtures))
    if args.backend == "remote":
        url = args.backend_url or os.environ.get("VIZLINT_BACKEND_URL")
        if not url:
            raise _UsageError(
                "--backend remote requires --backend-url or VIZLINT_BACKEND_URL"
            )
        return RemoteBackend(base_url=url, model=args.model)
    raise _UsageError(f"backend {args.backend!r} cannot analyze this input")


def _read_payload(path: str, binary: bool) -> bytes | str:
    p = Path(path)
    if not p.exists():
        raise _UsageError(f"no such file: {path}")
    return p.read_bytes() if binary else p.read_text(encoding="utf-8")


def _print_outcome_text(outcome: AnalysisOutcome, out) -> None:
    print(f"chart type: {outcome.chart_type.value}", file=out)
    n = len(outcome.diagnosis.diagnostics)
    print(f"issues found: {outcome.diagnosis.predicted_count}", file=out)
    for d in outcome.diagnosis.diagnostics:
        print(f"  [{d.severity.value}] {d.error_type.value} ({d.rule_id})", file=out)
        print(f"      {d.message}", file=out)
        if d.fix is not None:
            print(f"      fix: {d.fix.description}", file=out)
    if n == 0:
        print("  none", file=out)
    for w in outcome.warnings:
        print(f"warning: {w}", file=out)


def _cmd_analyze(args: argparse.Namespace) -> int:
    inputs = [x for x in (args.spec, args.code, args.image) if x]
    if len(inputs) != 1:
        raise _UsageError("exactly one of --spec, --code, --image is required")
    rulebook = _load_rules(args.rules)

    if args.spec:
        if args.backend not in (None, "deterministic"):
            raise _UsageError("spec input is analyzed deterministically")
        text = _read_payload(args.spec, binary=False)
        outcome = analyze_spec_text(text, rulebook)
    else:
        if args.backend in (None, "deterministic"):
            raise _UsageError(
                "code and image inputs require --backend mock or remote"
            )
        backend = _make_backend(args)
        if args.code:
            payload: bytes | str = _read_payload(args.code, binary=False)
            mode = "code"
        else:
            payload = _read_payload(args.image, binary=True)
            mode = "image"
        outcome = analyze_with_backend(
            payload,
            mode,
            backend,
            rulebook,
            item_id=args.item_id,
            with_correction=not args.no_correct,
        )

    if args.format == "json":
        doc = outcome_to_dict(outcome, include_transcript=args.include_transcript)
        print(json.dumps(doc, indent=2), file=sys.stdout)
    else:
        _print_outcome_text(outcome, sys.stdout)

    if args.strict and outcome.diagnosis.diagnostics:
        return 1
    return 0


def _cmd_fix(args: argparse.Namespace) -> int:
    rulebook = _load_rules(args.rules)
    text = _read_payload(args.spec, binary=False)
    ir = parse_spec(text)
    fixed, passes = fix_until_clean(ir, rulebook, max_iterations=args.max_iterations)
    output = emit_spec(fixed)
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
        print(f"fixed spec written to {args.out} ({passes} pass(es))")
    else:
        sys.stdout.write(output)
    return 0


def _cmd_gen_corpus(args: argparse.Namespace) -> int:
    config = CorpusConfig(
        seed=args.seed,
        output_dir=Path(args.out),
        per_type=args.per_type,
        multi_error_items=args.multi,
        clean=args.clean,
    )
    items = generate_corpus(config)
    multi = sum(1 for it in items if it.label.count >= 2)
    print(
        f"wrote {len(items)} items to {args.out} "
        f"({multi} multi-error, seed {args.seed})"
    )
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    truth = load_labels_jsonl(Path(args.labels))
    predictions = load_predictions_jsonl(Path(args.predictions))
    report = score(truth, predictions)
    if args.format == "json":
        output = json.dumps(_report_to_dict(report), indent=2) + "\n"
    else:
        output = emit_scores_csv(report)
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
        print(f"report written to {args.out}")
    else:
        sys.stdout.write(output)
    return 0


def _report_to_dict(report: EvalReport) -> dict:
    return {
        "per_type": [
            {
                "error_type": ts.error_type.value,
                "precision": round(ts.precision, 4) if ts.precision_defined else None,
                "recall": round(ts.recall, 4) if ts.recall_defined else None,
                "f1": round(ts.f1, 4)
                if (ts.precision_defined or ts.recall_defined)
                else None,
                "tp": ts.tp,
                "fp": ts.fp,
                "fn": ts.fn,
            }
            for ts in report.per_type
        ],
        "n_items": report.n_items,
        "n_single": report.n_single,
        "n_multi": report.n_multi,
        "count_mae": round(report.count_mae, 4),
        "count_mae_single": round(report.count_mae_single, 4),
        "count_mae_multi": round(report.count_mae_multi, 4),
        "count_bias": round(report.count_bias, 4),
    }


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ServiceSettings, create_app

    settings = ServiceSettings(
        backend_name=args.backend or "deterministic",
        mock_fixtures_path=Path(args.mock_fixtures) if args.mock_fixtures else None,
        rulebook_path=Path(args.rules) if args.rules else None,
        backend_url=args.backend_url or os.environ.get("VIZLINT_BACKEND_URL"),
    )
    app = create_app(settings)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vizlint",
        description="Chart linting: detect and repair visualization errors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="lint a chart spec, plot source, or image")
    p.add_argument("--spec", help="chart spec JSON file")
    p.add_argument("--code", help="plot source file")
    p.add_argument("--image", help="rendered chart image (SVG)")
    p.add_argument(
        "--backend",
        choices=["deterministic", "mock", "remote"],
        help="analysis backend (code/image inputs need mock or remote)",
    )
    p.add_argument("--mock-fixtures", help="mock backend response table")
    p.add_argument("--backend-url", help="remote backend base URL")
    p.add_argument("--model", default="default", help="remote model name")
    p.add_argument("--rules", help="rulebook JSON (default: shipped rules)")
    p.add_argument("--item-id", help="stable input id for transcripts")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--include-transcript", action="store_true")
    p.add_argument(
        "--no-correct",
        action="store_true",
        help="skip the source-correction stage for code inputs",
    )
    p.add_argument(
        "--strict", action="store_true", help="exit 1 when issues are found"
    )
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("fix", help="rewrite a spec with all issues fixed")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", help="write the fixed spec here instead of stdout")
    p.add_argument("--rules")
    p.add_argument("--max-iterations", type=int, default=3)
    p.set_defaults(func=_cmd_fix)

    p = sub.add_parser("gen-corpus", help="generate the synthetic chart corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--per-type", type=int, default=6)
    p.add_argument("--multi", type=int, default=30)
    p.add_argument(
        "--clean", action="store_true", help="emit error-free variants instead"
    )
    p.set_defaults(func=_cmd_gen_corpus)

    p = sub.add_parser("eval", help="score predictions against labels")
    p.add_argument("--labels", required=True, help="ground-truth JSONL")
    p.add_argument("--predictions", required=True, help="predictions JSONL")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP analysis service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument(
        "--backend", choices=["deterministic", "mock", "remote"], default=None
    )
    p.add_argument("--mock-fixtures")
    p.add_argument("--backend-url")
    p.add_argument("--rules")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VizlintError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
