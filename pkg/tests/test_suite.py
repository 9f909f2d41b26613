import json

import pytest

from freyr.bench.suite import (
    CheckExpr,
    CountBound,
    Predicate,
    SuiteParseError,
    bundled_script_path,
    bundled_suite_path,
    check_step,
    load_suite,
)
from freyr.dungeon import diff, to_dict
from freyr.tools import execute


def edited(level, tool, params):
    outcome = execute(tool, params, level)
    assert outcome.ok, outcome.message
    return outcome.new_level


# --- CountBound ---------------------------------------------------------

def test_count_bound_matching():
    assert CountBound(exact=2).matches(2)
    assert not CountBound(exact=2).matches(3)
    assert CountBound(at_least=2).matches(5)
    assert not CountBound(at_least=2).matches(1)
    assert CountBound(at_most=3).matches(0)
    assert not CountBound(at_most=3).matches(4)
    assert CountBound().matches(17)  # unconstrained


def test_count_bound_json_round_trip():
    for bound in (CountBound(exact=3), CountBound(at_least=1),
                  CountBound(at_most=4), CountBound(at_least=2, at_most=5)):
        assert CountBound.from_json(bound.to_json()) == bound


@pytest.mark.parametrize("raw", [True, None, "3", 1.5])
def test_count_bound_rejects_non_counts(raw):
    with pytest.raises(SuiteParseError):
        CountBound.from_json(raw)


# --- CheckExpr parsing --------------------------------------------------

def test_check_expr_json_round_trip():
    expr = CheckExpr((
        Predicate(op="added", kind="enemy", area="Rome",
                  count=CountBound(exact=2)),
        Predicate(op="removed", kind="treasure", area="room:Paris",
                  count=CountBound(at_least=1)),
        Predicate(op="modified", kind="room", name="Rome",
                  fields=frozenset({"description"})),
        Predicate(op="no_other_changes"),
    ))
    again = CheckExpr.from_json(expr.to_json())
    assert again == expr
    assert CheckExpr.from_json(again.to_json()) == again


def test_check_expr_default_count_is_one():
    expr = CheckExpr.from_json({"all": [{"added": {"kind": "room"}}]})
    assert expr.predicates[0].count == CountBound(exact=1)


@pytest.mark.parametrize("raw,fragment", [
    ({"any": []}, "design_check"),
    ({"all": ["added"]}, "bad predicate"),
    ({"all": [{"added": {"kind": "room"}, "removed": {"kind": "room"}}]},
     "bad predicate"),
    ({"all": [{"renamed": {"kind": "room"}}]}, "unknown predicate"),
])
def test_check_expr_parse_errors(raw, fragment):
    with pytest.raises(SuiteParseError, match=fragment):
        CheckExpr.from_json(raw)


# --- CheckExpr evaluation over real diffs -------------------------------

def test_added_predicate_counts_hits(three_rooms):
    after = edited(three_rooms, "add_enemy", {
        "name": "Shambling Zombie", "description": "Slow.",
        "species": "zombie", "health": 8, "room": "Paris"})
    d = diff(three_rooms, after)
    one = CheckExpr.from_json({"all": [
        {"added": {"kind": "enemy", "area": "room:Paris"}},
        {"no_other_changes": True}]})
    assert one.evaluate(d)
    two = CheckExpr.from_json({"all": [
        {"added": {"kind": "enemy", "area": "room:Paris", "count": 2}},
        {"no_other_changes": True}]})
    assert not two.evaluate(d)
    wrong_room = CheckExpr.from_json({"all": [
        {"added": {"kind": "enemy", "area": "room:Rome"}},
        {"no_other_changes": True}]})
    assert not wrong_room.evaluate(d)


def test_min_count_spans_multiple_entries(three_rooms):
    after = edited(three_rooms, "add_enemy", {
        "name": "Evil Mermaid", "description": "Wet.", "species": "mermaid",
        "health": 12, "room": "Barcelona"})
    after = edited(after, "add_enemy", {
        "name": "Siren Matriarch", "description": "Loud.", "species": "siren",
        "health": 14, "room": "Barcelona"})
    d = diff(three_rooms, after)
    check = CheckExpr.from_json({"all": [
        {"added": {"kind": "enemy", "area": "room:Barcelona", "count": {"min": 2}}},
        {"no_other_changes": True}]})
    assert check.evaluate(d)
    exact_one = CheckExpr.from_json({"all": [
        {"added": {"kind": "enemy", "area": "room:Barcelona", "count": 1}},
        {"no_other_changes": True}]})
    assert not exact_one.evaluate(d)


def test_modified_predicate_matches_name_and_fields(three_rooms):
    after = edited(three_rooms, "update_enemy", {
        "ref": "Goblin Archer", "health": 25})
    d = diff(three_rooms, after)
    tight = CheckExpr.from_json({"all": [
        {"modified": {"kind": "enemy", "area": "room:Rome",
                      "name": "Goblin Archer", "fields": ["health"]}},
        {"no_other_changes": True}]})
    assert tight.evaluate(d)
    loose = CheckExpr.from_json({"all": [
        {"modified": {"kind": "enemy", "area": "room:Rome"}},
        {"no_other_changes": True}]})
    assert loose.evaluate(d)
    wrong_fields = CheckExpr.from_json({"all": [
        {"modified": {"kind": "enemy", "area": "room:Rome",
                      "name": "Goblin Archer", "fields": ["description"]}},
        {"no_other_changes": True}]})
    assert not wrong_fields.evaluate(d)


def test_closed_world_flags_unrequested_edits(three_rooms):
    after = edited(three_rooms, "add_enemy", {
        "name": "Shambling Zombie", "description": "Slow.",
        "species": "zombie", "health": 8, "room": "Paris"})
    stray = edited(after, "add_treasure", {
        "name": "Sunken Chest", "description": "Barnacled.",
        "loot": "a map piece", "room": "Barcelona"})
    check = CheckExpr.from_json({"all": [
        {"added": {"kind": "enemy", "area": "room:Paris"}},
        {"no_other_changes": True}]})
    assert check.evaluate(diff(three_rooms, after))
    assert not check.evaluate(diff(three_rooms, stray))
    open_world = CheckExpr.from_json({"all": [
        {"added": {"kind": "enemy", "area": "room:Paris"}}]})
    assert open_world.evaluate(diff(three_rooms, stray))


def test_empty_check_accepts_anything(three_rooms):
    after = edited(three_rooms, "remove_treasure", {"ref": "Gilded Chest"})
    assert CheckExpr().evaluate(diff(three_rooms, after))
    assert CheckExpr().evaluate(diff(three_rooms, three_rooms))


def test_no_other_changes_alone_means_no_edit(three_rooms):
    check = CheckExpr.from_json({"all": [{"no_other_changes": True}]})
    assert check.evaluate(diff(three_rooms, three_rooms))
    after = edited(three_rooms, "update_room", {
        "ref": "Rome", "description": "Rebuilt columns."})
    assert not check.evaluate(diff(three_rooms, after))


# --- check_step ---------------------------------------------------------

def test_check_step_verdicts(three_rooms):
    after = edited(three_rooms, "add_enemy", {
        "name": "Cave Spider", "description": "Skittering.",
        "species": "spider", "health": 14, "room": "Barcelona"})
    check = CheckExpr.from_json({"all": [
        {"added": {"kind": "enemy", "area": "room:Barcelona"}},
        {"no_other_changes": True}]})
    verdict = check_step(three_rooms, after, check)
    assert verdict.domain_valid and verdict.design_valid and verdict.success

    untouched = check_step(three_rooms, three_rooms, check)
    assert untouched.domain_valid
    assert not untouched.design_valid
    assert not untouched.success


def test_check_step_catches_illegal_levels(three_rooms):
    broken = edited(three_rooms, "add_enemy", {
        "name": "Cave Spider", "description": "Skittering.",
        "species": "spider", "health": 14, "room": "Barcelona"})
    broken.rooms["Barcelona"].enemies[0].health = -5
    verdict = check_step(three_rooms, broken, CheckExpr())
    assert not verdict.domain_valid
    assert verdict.design_valid
    assert not verdict.success


# --- load_suite ---------------------------------------------------------

def write_suite(tmp_path, data):
    path = tmp_path / "suite.json"
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return path


def minimal_step(level, request="Add a room."):
    return {"request": request, "start_level": to_dict(level),
            "design_check": {"all": []}}


def test_load_suite_happy_path(tmp_path, three_rooms):
    path = write_suite(tmp_path, {
        "name": "Tiny", "steps": [minimal_step(three_rooms)]})
    suite = load_suite(path)
    assert suite.name == "Tiny"
    assert len(suite.steps) == 1
    assert suite.steps[0].request == "Add a room."
    assert suite.steps[0].start_level.rooms.keys() == three_rooms.rooms.keys()


def test_load_suite_rejects_bad_json(tmp_path):
    path = write_suite(tmp_path, "{not json")
    with pytest.raises(SuiteParseError, match="not valid JSON"):
        load_suite(path)


def test_load_suite_rejects_missing_file(tmp_path):
    with pytest.raises(SuiteParseError, match="cannot read suite"):
        load_suite(tmp_path / "absent.json")


def test_load_suite_requires_name_and_steps(tmp_path):
    path = write_suite(tmp_path, {"steps": []})
    with pytest.raises(SuiteParseError, match="'name' and 'steps'"):
        load_suite(path)


def test_load_suite_rejects_empty(tmp_path):
    path = write_suite(tmp_path, {"name": "Empty", "steps": []})
    with pytest.raises(SuiteParseError, match="no steps"):
        load_suite(path)


def test_load_suite_points_at_offending_step(tmp_path, three_rooms):
    path = write_suite(tmp_path, {"name": "Bad", "steps": [
        minimal_step(three_rooms),
        {"start_level": to_dict(three_rooms)},
    ]})
    with pytest.raises(SuiteParseError, match="step 2: missing 'request'"):
        load_suite(path)


def test_load_suite_rejects_bad_start_level(tmp_path):
    path = write_suite(tmp_path, {"name": "Bad", "steps": [
        {"request": "x", "start_level": {"rooms": 5}}]})
    with pytest.raises(SuiteParseError, match="step 1: bad start_level"):
        load_suite(path)


def test_load_suite_rejects_illegal_start_level(tmp_path, three_rooms):
    data = to_dict(three_rooms)
    data["rooms"][0]["enemies"] = [{
        "name": "Ghost", "description": "Pale.", "species": "ghost",
        "health": -1}]
    path = write_suite(tmp_path, {"name": "Bad", "steps": [
        {"request": "x", "start_level": data}]})
    with pytest.raises(SuiteParseError, match="step 1: .*not a legal level"):
        load_suite(path)


def test_load_suite_rejects_bad_design_check(tmp_path, three_rooms):
    step = minimal_step(three_rooms)
    step["design_check"] = {"all": [{"renamed": {"kind": "room"}}]}
    path = write_suite(tmp_path, {"name": "Bad", "steps": [
        minimal_step(three_rooms), step]})
    with pytest.raises(SuiteParseError, match="step 2: bad design_check"):
        load_suite(path)


# --- bundled data -------------------------------------------------------

BUNDLED_STEP_COUNTS = {"t1": 4, "t2": 6, "t3": 8, "t4": 10, "t5": 13}


@pytest.mark.parametrize("name,steps", sorted(BUNDLED_STEP_COUNTS.items()))
def test_bundled_suites_load(name, steps):
    suite = load_suite(bundled_suite_path(name))
    assert len(suite.steps) == steps
    for step in suite.steps:
        assert step.request.strip()
        assert any(p.op == "no_other_changes" for p in step.design_check.predicates)


@pytest.mark.parametrize("name", sorted(BUNDLED_STEP_COUNTS))
@pytest.mark.parametrize("mode", ["freyr", "tools"])
def test_bundled_scripts_align_with_suites(name, mode):
    script = json.loads(bundled_script_path(name, mode).read_text())
    assert script["mode"] == mode
    assert script["suite"].lower() == name
    assert len(script["steps"]) == BUNDLED_STEP_COUNTS[name]
    for step in script["steps"]:
        assert step["entries"], "every step needs at least one scripted reply"


def test_bundled_lookup_rejects_unknown_names():
    with pytest.raises(KeyError):
        bundled_suite_path("t9")
    with pytest.raises(KeyError):
        bundled_script_path("nope")
