"""Benchmark harness: suites of editing requests, replay, and paired stats."""

from freyr.bench.suite import (
    CheckExpr,
    StepSpec,
    StepVerdict,
    SuiteParseError,
    TestSuite,
    bundled_suite_path,
    bundled_script_path,
    check_step,
    load_suite,
)
from freyr.bench.stats import bonferroni, mean_interval, wilcoxon_signed_rank
from freyr.bench.runner import CaseResult, StepRecord, run_case
from freyr.bench.report import build_report, compare_results, render_table

__all__ = [
    "CheckExpr", "StepSpec", "StepVerdict", "SuiteParseError", "TestSuite",
    "bundled_suite_path", "bundled_script_path", "check_step", "load_suite",
    "bonferroni", "mean_interval", "wilcoxon_signed_rank",
    "CaseResult", "StepRecord", "run_case",
    "build_report", "compare_results", "render_table",
]
