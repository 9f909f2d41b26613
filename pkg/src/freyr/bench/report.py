"""Result reporting: machine-readable JSON plus an aligned text table.

The table is a pure function of the report JSON, so saving the JSON and
re-rendering it later reproduces the exact same bytes. Significance daggers
come from paired Wilcoxon tests between two result sets (Bonferroni
corrected across the four metrics) and are attached to the better side.
"""

from __future__ import annotations

import json
from pathlib import Path

from freyr.bench.runner import METRICS, CaseResult
from freyr.bench.stats import bonferroni, wilcoxon_signed_rank

# Direction of "better", per metric.
_HIGHER_IS_BETTER = {"steps_pct": True, "tokens_in": False,
                     "tokens_out": False, "seconds": False}

_HEADERS = {"steps_pct": "Steps (%)", "tokens_in": "Tokens in",
            "tokens_out": "Tokens out", "seconds": "Time (s)"}

_DECIMALS = {"steps_pct": 1, "tokens_in": 1, "tokens_out": 1, "seconds": 3}


def compare_results(a: CaseResult, b: CaseResult) -> dict:
    """Paired per-run comparison of two result sets over the same suite."""
    if a.runs != b.runs:
        raise ValueError(f"results have different run counts: {a.runs} vs {b.runs}")
    if a.suite != b.suite:
        raise ValueError(f"results cover different suites: {a.suite} vs {b.suite}")
    raw = [wilcoxon_signed_rank(a.per_run(m), b.per_run(m)) for m in METRICS]
    adjusted = bonferroni(raw)
    metrics = {}
    for metric, p, p_adj in zip(METRICS, raw, adjusted):
        metrics[metric] = {"p": p, "p_adjusted": p_adj,
                           "significant": p_adj < 0.05}
    return {"case": a.suite,
            "a": {"mode": a.mode, "label": a.label},
            "b": {"mode": b.mode, "label": b.label},
            "metrics": metrics}


def build_report(results: list[CaseResult],
                 comparisons: list[dict] | None = None) -> dict:
    """Aggregate results (and optional comparisons) into the report JSON."""
    comparisons = comparisons or []
    rows = []
    for res in results:
        agg = res.aggregates()
        metrics = {}
        for metric in METRICS:
            metrics[metric] = {"mean": agg[metric]["mean"],
                               "half_width_95": agg[metric]["half_width_95"],
                               "marked": False}
        rows.append({"case": res.suite, "model": res.label, "mode": res.mode,
                     "metrics": metrics})

    def row_for(case: str, mode: str, label: str):
        for row in rows:
            if (row["case"], row["mode"], row["model"]) == (case, mode, label):
                return row
        return None

    for comp in comparisons:
        row_a = row_for(comp["case"], comp["a"]["mode"], comp["a"]["label"])
        row_b = row_for(comp["case"], comp["b"]["mode"], comp["b"]["label"])
        for metric, verdict in comp["metrics"].items():
            if not verdict["significant"] or row_a is None or row_b is None:
                continue
            mean_a = row_a["metrics"][metric]["mean"]
            mean_b = row_b["metrics"][metric]["mean"]
            a_better = (mean_a > mean_b) == _HIGHER_IS_BETTER[metric]
            better = row_a if a_better else row_b
            better["metrics"][metric]["marked"] = True

    return {"rows": rows, "comparisons": comparisons}


def _cell(entry: dict, metric: str) -> str:
    digits = _DECIMALS[metric]
    mean = f"{entry['mean']:.{digits}f}"
    half = entry["half_width_95"]
    spread = "n/a" if half is None else f"{half:.{digits}f}"
    mark = "†" if entry.get("marked") else ""
    return f"{mean} ± {spread}{mark}"


def render_table(report: dict) -> str:
    """Aligned text table; depends only on the report JSON."""
    headers = ["Case", "Model", "Mode"] + [_HEADERS[m] for m in METRICS]
    body = []
    for row in report["rows"]:
        body.append([row["case"], row["model"], row["mode"]]
                    + [_cell(row["metrics"][m], m) for m in METRICS])
    widths = [max(len(headers[i]), *(len(r[i]) for r in body)) if body
              else len(headers[i]) for i in range(len(headers))]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip(),
             "  ".join("-" * widths[i] for i in range(len(headers))).rstrip()]
    for r in body:
        lines.append("  ".join(r[i].ljust(widths[i])
                               for i in range(len(headers))).rstrip())
    if report.get("comparisons"):
        lines.append("")
        lines.append("† better at adjusted p < 0.05 "
                     "(Wilcoxon signed-rank, Bonferroni over 4 metrics)")
        for comp in report["comparisons"]:
            bits = ", ".join(f"{m}: p_adj={v['p_adjusted']:.4f}"
                             for m, v in comp["metrics"].items())
            lines.append(f"{comp['case']}: {comp['a']['mode']}/{comp['a']['label']} "
                         f"vs {comp['b']['mode']}/{comp['b']['label']} — {bits}")
    return "\n".join(lines) + "\n"


def save_report(report: dict, json_path: str | Path, table_path: str | Path | None = None) -> None:
    Path(json_path).write_text(json.dumps(report, indent=2))
    if table_path is not None:
        Path(table_path).write_text(render_table(report))


def load_report(json_path: str | Path) -> dict:
    return json.loads(Path(json_path).read_text())
