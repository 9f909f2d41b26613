"""Run a bundled benchmark suite in both modes and compare the results.

Each bundled suite is a sequence of edit requests with predefined start
levels and closed-world design checks. A run replays every step, scores it
(domain validity and did-exactly-what-was-asked), and records tokens and
wall time. Repeated runs feed a paired Wilcoxon signed-rank test with
Bonferroni correction across the four metrics; the winner per metric gets
a dagger in the table. Scripted replays are deterministic, so here the
dagger math shows up on the token columns.

Run: python3 demos/05_bench_stats.py
"""

import json

from freyr.backend import GenerationOptions, RoleConfig, ScriptedBackend
from freyr.bench.report import build_report, compare_results, render_table
from freyr.bench.runner import run_case
from freyr.bench.suite import bundled_script_path, bundled_suite_path, load_suite
from freyr.config import load_script
from freyr.pipeline import PipelineConfig

RUNS = 8  # enough paired runs for the corrected test to reach significance


def scripted_config() -> PipelineConfig:
    roles = {role: RoleConfig(role=role,
                              options=GenerationOptions(model="scripted"))
             for role in ("intent", "parameters", "summary", "chat")}
    return PipelineConfig(roles=roles, max_retries=3, max_intents=10)


def factory(name: str, mode: str):
    entries = load_script(json.loads(bundled_script_path(name, mode).read_text()))
    return lambda: ScriptedBackend(list(entries))


def main() -> None:
    cfg = scripted_config()
    suite = load_suite(bundled_suite_path("t3"))
    print(f"suite '{suite.name}': {len(suite.steps)} steps")
    for i, step in enumerate(suite.steps[:3], 1):
        print(f"  {i}. {step.request}")
    print("  ...")

    results = []
    for mode in ("freyr", "tools"):
        result = run_case(suite, mode, cfg, runs=RUNS,
                          backend_factory=factory("t3", mode),
                          label="scripted replay")
        results.append(result)
        pct = result.per_run("steps_pct")
        print(f"\n{mode}: {RUNS} runs, success {pct[0]:.0f}% each, "
              f"mean {result.aggregates()['tokens_in']['mean']:.0f} "
              "prompt tokens per step")

    comparison = compare_results(results[0], results[1])
    report = build_report(results, [comparison])
    print()
    print(render_table(report), end="")


if __name__ == "__main__":
    main()
