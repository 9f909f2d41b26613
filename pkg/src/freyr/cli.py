"""Command-line entry points: benchmark runs, result comparison, schema
inspection and the interactive session server.

``freyr bench``  replays a suite in one mode and writes results JSON.
``freyr stats``  compares two results files and renders the report table.
``freyr schema`` prints the native tool-calling JSON schema (optionally
                 with token counts).
``freyr serve``  starts the HTTP session service.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from freyr.backend import count_tokens
from freyr.bench.report import build_report, compare_results, render_table, save_report
from freyr.bench.runner import MODES, CaseResult, run_case
from freyr.bench.suite import SuiteParseError, bundled_suite_path, load_suite
from freyr.config import ConfigError, default_config, load_config
from freyr.pipeline import PipelineAbort
from freyr.tools import (
    REFERENCE_SCHEMA_GPT2_TOKENS,
    registry,
    render_intent_catalog,
    render_json_schema,
)

logger = logging.getLogger(__name__)

BUNDLED_SUITES = ("t1", "t2", "t3", "t4", "t5")


def _resolve_suite(value: str) -> Path:
    if value.lower() in BUNDLED_SUITES:
        return bundled_suite_path(value.lower())
    return Path(value)


def _load_cfg(path: str | None):
    return load_config(path) if path else default_config()


def cmd_bench(args: argparse.Namespace) -> int:
    suite = load_suite(_resolve_suite(args.suite))
    cfg = _load_cfg(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_case(suite, args.mode, cfg.pipeline, args.runs,
                      backend_factory=cfg.backend_factory,
                      label=cfg.label, out_dir=out_dir)
    result_path = out_dir / f"result_{suite.name.lower()}_{args.mode}.json"
    result.save(result_path)
    print(render_table(build_report([result])), end="")
    print(f"\nresults written to {result_path}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    a = CaseResult.load(args.a)
    b = CaseResult.load(args.b)
    comparison = compare_results(a, b)
    report = build_report([a, b], [comparison])
    print(render_table(report), end="")
    if args.out:
        json_path = Path(args.out)
        save_report(report, json_path, json_path.with_suffix(".txt"))
        print(f"\nreport written to {json_path}")
    return 0


def cmd_schema(args: argparse.Namespace) -> int:
    reg = registry()
    schema = render_json_schema(reg)
    print(schema)
    if args.tokens:
        catalog = render_intent_catalog(reg)
        print(f"\nschema tokens (approximate): {count_tokens(schema)}")
        print(f"schema tokens (GPT-2 tokenizer, reference): "
              f"{REFERENCE_SCHEMA_GPT2_TOKENS}")
        print(f"intent catalog tokens (approximate): {count_tokens(catalog)}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from freyr.service import create_app

    cfg = _load_cfg(args.config)
    app = create_app(default=cfg)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freyr",
        description="Tool-using LLM pipeline for dungeon editing: benchmarks, "
                    "stats and an interactive session server.")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="enable INFO logging")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="replay a suite and write results")
    bench.add_argument("--suite", required=True,
                       help="suite JSON path, or a bundled name (t1..t5)")
    bench.add_argument("--mode", required=True, choices=MODES,
                       help="pipeline mode: modular roles or native tool calls")
    bench.add_argument("--config", default=None,
                       help="config JSON path (defaults to built-in config)")
    bench.add_argument("--runs", type=int, default=10,
                       help="number of repeated runs (default 10)")
    bench.add_argument("--out", required=True,
                       help="output directory for results and raw records")
    bench.set_defaults(fn=cmd_bench)

    stats = sub.add_parser("stats", help="compare two results files")
    stats.add_argument("--a", required=True, help="first results JSON")
    stats.add_argument("--b", required=True, help="second results JSON")
    stats.add_argument("--out", default=None,
                       help="optional path to write the report JSON "
                            "(a .txt table is written alongside)")
    stats.set_defaults(fn=cmd_stats)

    schema = sub.add_parser("schema",
                            help="print the native tool-calling JSON schema")
    schema.add_argument("--tokens", action="store_true",
                        help="also print schema and catalog token counts")
    schema.set_defaults(fn=cmd_schema)

    serve = sub.add_parser("serve", help="start the HTTP session service")
    serve.add_argument("--config", default=None,
                       help="default config JSON for new sessions")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8765)
    serve.set_defaults(fn=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except (ConfigError, SuiteParseError, FileNotFoundError, ValueError,
            PipelineAbort) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
