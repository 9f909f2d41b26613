import json
from pathlib import Path

import pytest

from freyr.bench.report import (
    build_report,
    compare_results,
    load_report,
    render_table,
    save_report,
)
from freyr.bench.runner import METRICS, CaseResult, StepRecord
from freyr.bench.stats import bonferroni, wilcoxon_signed_rank

GOLDEN = Path(__file__).parent / "data" / "report_table.golden.txt"


def make_result(mode, label, rows, suite="T9"):
    """One synthetic record per run; ``rows`` maps run -> metric values."""
    records = [
        StepRecord(run=r, step=0, request="edit the level",
                   success=success, domain_valid=success, design_valid=success,
                   tokens_in=tin, tokens_out=tout, seconds=secs, retries=0)
        for r, (success, tin, tout, secs) in enumerate(rows)
    ]
    return CaseResult(suite=suite, mode=mode, label=label, runs=len(rows),
                      steps_per_run=1, records=records)


def paired_results():
    a = make_result("freyr", "qwen2.5:7b", [
        (True, 100 + r, 60 + r, 1.0 + 0.01 * r) for r in range(8)])
    b = make_result("tools", "qwen2.5:7b", [
        (True, 400 + r, 50 + r, 2.0 + 0.01 * r) for r in range(8)])
    return a, b


def synthetic_report():
    a, b = paired_results()
    return build_report([a, b], [compare_results(a, b)])


def test_compare_requires_matching_shape():
    a, b = paired_results()
    short = make_result("tools", "qwen2.5:7b",
                        [(True, 400, 50, 2.0) for _ in range(5)])
    with pytest.raises(ValueError, match="different run counts"):
        compare_results(a, short)
    other = make_result("tools", "qwen2.5:7b",
                        [(True, 400 + r, 50, 2.0) for r in range(8)],
                        suite="T1")
    with pytest.raises(ValueError, match="different suites"):
        compare_results(a, other)


def test_compare_reports_adjusted_p_values():
    a, b = paired_results()
    comp = compare_results(a, b)
    assert comp["case"] == "T9"
    assert comp["a"] == {"mode": "freyr", "label": "qwen2.5:7b"}
    assert set(comp["metrics"]) == set(METRICS)
    raw = [wilcoxon_signed_rank(a.per_run(m), b.per_run(m)) for m in METRICS]
    adjusted = bonferroni(raw)
    for metric, p, p_adj in zip(METRICS, raw, adjusted):
        assert comp["metrics"][metric]["p"] == p
        assert comp["metrics"][metric]["p_adjusted"] == p_adj
        assert comp["metrics"][metric]["significant"] == (p_adj < 0.05)
    # ties on success leave steps_pct insignificant; the rest separate fully
    assert not comp["metrics"]["steps_pct"]["significant"]
    assert comp["metrics"]["tokens_in"]["significant"]
    assert comp["metrics"]["tokens_in"]["p"] == pytest.approx(2 / 256)


def test_marks_attach_to_the_better_side():
    report = synthetic_report()
    by_mode = {row["mode"]: row for row in report["rows"]}
    assert by_mode["freyr"]["metrics"]["tokens_in"]["marked"]
    assert not by_mode["tools"]["metrics"]["tokens_in"]["marked"]
    assert by_mode["tools"]["metrics"]["tokens_out"]["marked"]
    assert not by_mode["freyr"]["metrics"]["tokens_out"]["marked"]
    assert by_mode["freyr"]["metrics"]["seconds"]["marked"]
    assert not by_mode["freyr"]["metrics"]["steps_pct"]["marked"]
    assert not by_mode["tools"]["metrics"]["steps_pct"]["marked"]


def test_report_without_comparisons_is_unmarked():
    a, b = paired_results()
    report = build_report([a, b])
    assert report["comparisons"] == []
    for row in report["rows"]:
        assert not any(row["metrics"][m]["marked"] for m in METRICS)


def test_table_matches_golden_bytes():
    assert render_table(synthetic_report()) == GOLDEN.read_text()


def test_table_single_run_shows_no_spread():
    report = build_report([make_result("freyr", "solo", [(True, 10, 5, 0.5)])])
    table = render_table(report)
    assert "± n/a" in table
    assert "†" not in table


def test_table_footnote_lists_adjusted_p():
    table = render_table(synthetic_report())
    assert "† better at adjusted p < 0.05" in table
    assert "p_adj=" in table
    assert table.endswith("\n")


def test_save_load_rerender_is_byte_identical(tmp_path):
    report = synthetic_report()
    json_path = tmp_path / "report.json"
    table_path = tmp_path / "report.txt"
    save_report(report, json_path, table_path)
    loaded = load_report(json_path)
    assert loaded == json.loads(json.dumps(report))
    assert render_table(loaded) == table_path.read_text()
    assert render_table(loaded) == render_table(report)
