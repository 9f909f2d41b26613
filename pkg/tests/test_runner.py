import json

import pytest

from freyr.backend import ScriptedBackend
from freyr.bench.runner import METRICS, CaseResult, StepRecord, run_case
from freyr.bench.suite import (
    CheckExpr,
    StepSpec,
    TestSuite as Suite,
    bundled_script_path,
    bundled_suite_path,
    load_suite,
)
from freyr.config import load_script
from freyr.dungeon import Dungeon

ROOM_PARAMS = "- name: Hall\n- description: Bare."

ADDED_ROOM = {"all": [{"added": {"kind": "room"}}, {"no_other_changes": True}]}


def spec(request, level, check):
    return StepSpec(request=request, start_level=level,
                    design_check=CheckExpr.from_json(check))


def fresh_suite():
    """Two steps that both create the same room from the same empty level.

    Both can only succeed if every step starts from its own predefined
    level; any carry-over would make step two a duplicate-name failure.
    """
    empty = Dungeon(name="Fresh")
    return Suite(name="Fresh", steps=[
        spec("Make a hall.", empty, ADDED_ROOM),
        spec("Make a hall again.", empty, ADDED_ROOM),
    ])


def fresh_script():
    return ["add_room", ROOM_PARAMS, "Step one done.",
            "add_room", ROOM_PARAMS, "Step two done."]


def bundled_factory(name, mode="freyr"):
    entries = load_script(json.loads(bundled_script_path(name, mode).read_text()))
    return lambda: ScriptedBackend(list(entries))


def test_rejects_unknown_mode(cfg):
    with pytest.raises(ValueError, match="mode must be one of"):
        run_case(fresh_suite(), "hybrid", cfg, runs=1,
                 backend_factory=lambda: ScriptedBackend([]))


def test_steps_start_from_their_own_levels(cfg):
    result = run_case(fresh_suite(), "freyr", cfg, runs=1,
                      backend_factory=lambda: ScriptedBackend(fresh_script()))
    assert [r.success for r in result.records] == [True, True]
    assert result.steps_per_run == 2
    assert result.per_run("steps_pct") == [100.0]


def test_runs_are_independent_replays(cfg):
    result = run_case(fresh_suite(), "freyr", cfg, runs=3,
                      backend_factory=lambda: ScriptedBackend(fresh_script()))
    assert len(result.records) == 6
    assert result.per_run("steps_pct") == [100.0, 100.0, 100.0]
    assert [(r.run, r.step) for r in result.records] == [
        (0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]


def test_conversation_accumulates_within_a_run(cfg):
    backend = ScriptedBackend(fresh_script())
    run_case(fresh_suite(), "freyr", cfg, runs=1,
             backend_factory=lambda: backend)
    roles = [entry[0] for entry in backend.transcript]
    assert roles == ["intent", "parameters", "summary"] * 2
    step2_intent_messages = backend.transcript[3][1]
    texts = [m.content for m in step2_intent_messages]
    assert any("Make a hall." in t for t in texts)
    assert any("Step one done." in t for t in texts)


def test_failed_step_scores_and_run_continues(cfg, three_rooms):
    suite = Suite(name="Mixed", steps=[
        spec("Add a broken guard.", three_rooms,
             {"all": [{"added": {"kind": "enemy", "area": "room:Rome"}},
                      {"no_other_changes": True}]}),
        spec("Make a hall.", Dungeon(name="Fresh"), ADDED_ROOM),
    ])
    bad_params = ("- name: Guard\n- description: Dented.\n- species: golem\n"
                  "- health: 0\n- room: Rome")
    script = ["add_enemy", bad_params, bad_params, bad_params, "No luck.",
              "add_room", ROOM_PARAMS, "Done."]
    result = run_case(suite, "freyr", cfg, runs=1,
                      backend_factory=lambda: ScriptedBackend(script))
    first, second = result.records
    assert not first.success
    assert first.domain_valid and not first.design_valid
    assert first.retries == 3
    assert first.tokens_in > 0 and first.tokens_out > 0
    assert second.success
    assert result.per_run("steps_pct") == [50.0]


def test_bundled_suite_replays_perfectly_in_both_modes(cfg):
    suite = load_suite(bundled_suite_path("t1"))
    for mode in ("freyr", "tools"):
        result = run_case(suite, mode, cfg, runs=2,
                          backend_factory=bundled_factory("t1", mode))
        assert result.per_run("steps_pct") == [100.0, 100.0]
        assert all(r.retries == 0 for r in result.records)


def test_raw_records_stream_to_jsonl(cfg, tmp_path):
    result = run_case(fresh_suite(), "freyr", cfg, runs=2,
                      backend_factory=lambda: ScriptedBackend(fresh_script()),
                      out_dir=tmp_path)
    raw = tmp_path / "raw_fresh_freyr.jsonl"
    assert raw.exists()
    lines = raw.read_text().splitlines()
    assert len(lines) == len(result.records) == 4
    for line, record in zip(lines, result.records):
        assert json.loads(line) == record.to_dict()


def test_save_load_round_trip(cfg, tmp_path):
    result = run_case(fresh_suite(), "freyr", cfg, runs=2,
                      backend_factory=lambda: ScriptedBackend(fresh_script()),
                      label="scripted")
    path = tmp_path / "result.json"
    result.save(path)
    loaded = CaseResult.load(path)
    assert loaded.to_dict() == result.to_dict()
    assert json.dumps(loaded.to_dict()) == json.dumps(result.to_dict())
    assert loaded.label == "scripted"


def test_aggregates_shape_and_metrics(cfg):
    result = run_case(fresh_suite(), "freyr", cfg, runs=1,
                      backend_factory=lambda: ScriptedBackend(fresh_script()))
    agg = result.aggregates()
    assert set(agg) == set(METRICS)
    for metric in METRICS:
        assert agg[metric]["per_run"] == result.per_run(metric)
        assert agg[metric]["mean"] == pytest.approx(
            sum(result.per_run(metric)) / len(result.per_run(metric)))
    assert agg["steps_pct"]["half_width_95"] is None  # single run


def test_per_run_rejects_unknown_metric():
    result = CaseResult(suite="X", mode="freyr", label="x", runs=1,
                        steps_per_run=1,
                        records=[StepRecord(run=0, step=0, request="r",
                                            success=True, domain_valid=True,
                                            design_valid=True, tokens_in=1,
                                            tokens_out=1, seconds=0.0,
                                            retries=0)])
    with pytest.raises(KeyError):
        result.per_run("latency")
