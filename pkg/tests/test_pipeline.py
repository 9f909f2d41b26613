import pytest

from conftest import make_config
from freyr.backend import Message, ScriptedBackend
from freyr.dungeon import Dungeon, structurally_equal
from freyr.pipeline import (
    BadValue,
    MissingParams,
    PipelineAbort,
    PipelineConfig,
    TooManyIntents,
    UnknownIntent,
    build_role_prompts,
    parse_intents,
    parse_params,
    run_step,
)
from freyr.tools import registry

ADD_ENEMY_PARAMS = ("- name: Goblin Archer\n- description: A wiry goblin.\n"
                    "- species: goblin\n- health: 10\n- room: Rome")


def names():
    return [t.name for t in registry()]


def spec(name):
    return next(t for t in registry() if t.name == name)


# ---------------------------------------------------------------------------
# Intent parsing
# ---------------------------------------------------------------------------

def test_parse_intents_single():
    assert parse_intents("add_enemy", names()) == ["add_enemy"]


def test_parse_intents_commas_newlines_bullets_case():
    reply = "Add_Enemy, add_trap\n- `add_room`\n* ADD_ATTACK"
    assert parse_intents(reply, names()) == ["add_enemy", "add_trap",
                                             "add_room", "add_attack"]


def test_parse_intents_keeps_duplicates():
    assert parse_intents("add_enemy, add_enemy", names()) == ["add_enemy"] * 2


def test_parse_intents_conversation_sentinel():
    assert parse_intents("conversation", names()) == ["conversation"]
    # The sentinel only counts alone; mixed with tools it is unknown.
    with pytest.raises(UnknownIntent):
        parse_intents("conversation, add_room", names())


def test_parse_intents_unknown_token():
    with pytest.raises(UnknownIntent) as err:
        parse_intents("summon_dragon", names())
    assert err.value.token == "summon_dragon"
    with pytest.raises(UnknownIntent):
        parse_intents("   ", names())


def test_parse_intents_cap():
    reply = ", ".join(["add_room"] * 11)
    with pytest.raises(TooManyIntents):
        parse_intents(reply, names())
    assert len(parse_intents(", ".join(["add_room"] * 10), names())) == 10
    with pytest.raises(TooManyIntents):
        # The cap cuts in before unknown-name scanning.
        parse_intents(", ".join(["mystery_op"] * 11), names())


# ---------------------------------------------------------------------------
# Parameter parsing
# ---------------------------------------------------------------------------

def test_parse_params_bulleted_reply():
    params, warnings = parse_params(ADD_ENEMY_PARAMS, spec("add_enemy"))
    assert params == {"name": "Goblin Archer", "description": "A wiry goblin.",
                      "species": "goblin", "health": 10, "room": "Rome"}
    assert warnings == []


def test_parse_params_tolerates_decoration():
    reply = ('* Name: "Goblin Archer"\n'
             "- **description**: A wiry goblin.\n"
             "- species: `goblin`\n"
             "- health: 1,000\n"
             "- room: Rome")
    params, _ = parse_params(reply, spec("add_enemy"))
    assert params["name"] == "Goblin Archer"
    assert params["health"] == 1000


def test_parse_params_unknown_keys_warn():
    reply = ADD_ENEMY_PARAMS + "\n- mood: grumpy"
    params, warnings = parse_params(reply, spec("add_enemy"))
    assert "mood" not in params
    assert any("unknown parameter 'mood'" in w for w in warnings)


def test_parse_params_bad_integer():
    reply = ADD_ENEMY_PARAMS.replace("health: 10", "health: a lot")
    with pytest.raises(BadValue) as err:
        parse_params(reply, spec("add_enemy"))
    assert str(err.value) == "invalid value for 'health': 'a lot' is not an integer"


def test_parse_params_missing_required():
    with pytest.raises(MissingParams) as err:
        parse_params("- name: Goblin", spec("add_enemy"))
    assert "description" in str(err.value)
    assert "species" in str(err.value)


def test_parse_params_last_value_wins_and_empty_skipped():
    reply = ADD_ENEMY_PARAMS + "\n- health: 20\n- room:"
    params, _ = parse_params(reply, spec("add_enemy"))
    assert params["health"] == 20
    assert params["room"] == "Rome"


# ---------------------------------------------------------------------------
# Prompt assembly
# ---------------------------------------------------------------------------

def test_intent_prompt_contains_catalog_and_level(three_rooms):
    messages = build_role_prompts("intent", catalog="add_room: Add a room.",
                                  level=three_rooms, message="hi")
    assert messages[0].role == "system"
    assert "add_room: Add a room." in messages[0].content
    assert "conversation" in messages[0].content
    assert "Room 'Rome'" in messages[1].content


def test_parameters_prompt_feedback_block(three_rooms):
    with_fb = build_role_prompts("parameters", message="add it",
                                 tool_prompt="Operation: add_enemy",
                                 feedback="health must be positive, got 0")
    assert ("The previous attempt failed with this error:\n"
            "health must be positive, got 0") in with_fb[1].content
    without = build_role_prompts("parameters", message="add it",
                                 tool_prompt="Operation: add_enemy")
    assert "previous attempt" not in without[1].content


def test_history_window_is_ten_messages():
    conversation = [Message("user", f"turn {i}") for i in range(14)]
    messages = build_role_prompts("chat", conversation=conversation, message="now")
    assert "turn 4" in messages[1].content
    assert "turn 3" not in messages[1].content


def test_unknown_role_rejected():
    with pytest.raises(ValueError):
        build_role_prompts("oracle", message="hi")


# ---------------------------------------------------------------------------
# run_step call-count law
# ---------------------------------------------------------------------------

def test_conversation_step_makes_two_calls(cfg, reg, three_rooms):
    backend = ScriptedBackend(["conversation", "Happy to help!"])
    response, level, trace = run_step(cfg, reg, [], "what is a dungeon?",
                                      three_rooms, backends=backend)
    assert response == "Happy to help!"
    assert [c.role for c in trace.calls] == ["intent", "chat"]
    assert structurally_equal(level, three_rooms)
    assert trace.intents == ["conversation"]
    assert not trace.conversation_fallback


def test_single_intent_makes_three_calls(cfg, reg, three_rooms):
    backend = ScriptedBackend(["add_enemy", ADD_ENEMY_PARAMS.replace(
        "Goblin Archer", "Goblin Page"), "Added a goblin page."])
    response, level, trace = run_step(cfg, reg, [], "add a goblin page",
                                      three_rooms, backends=backend)
    assert [c.role for c in trace.calls] == ["intent", "parameters", "summary"]
    assert response == "Added a goblin page."
    assert len(level.rooms["Rome"].enemies) == 2
    assert trace.total_retries == 0
    assert backend.remaining() == 0


def test_k_intents_make_k_plus_two_calls(cfg, reg, three_rooms):
    k = 3
    script = ["add_enemy, add_enemy, add_trap"]
    script.append(ADD_ENEMY_PARAMS.replace("Goblin Archer", "Guard One"))
    script.append(ADD_ENEMY_PARAMS.replace("Goblin Archer", "Guard Two"))
    script.append("- name: Snare\n- description: Hidden.\n- effect: grabs\n"
                  "- damage: 3\n- corridor: Rome-Paris")
    script.append("Two guards and a snare added.")
    response, level, trace = run_step(cfg, reg, [], "add two guards and a trap",
                                      three_rooms, backends=ScriptedBackend(script))
    assert len(trace.calls) == k + 2
    assert [c.role for c in trace.calls] == (
        ["intent"] + ["parameters"] * k + ["summary"])
    assert trace.intents == ["add_enemy", "add_enemy", "add_trap"]
    assert len(level.rooms["Rome"].enemies) == 3
    assert level.corridors["Rome-Paris"].cells[0].name == "Snare"


def test_usage_accumulates_over_all_calls(cfg, reg, three_rooms):
    backend = ScriptedBackend(["add_enemy", ADD_ENEMY_PARAMS.replace(
        "Goblin Archer", "Goblin Page"), "Done."])
    _, _, trace = run_step(cfg, reg, [], "add", three_rooms, backends=backend)
    assert trace.total.tokens_in == sum(c.usage.tokens_in for c in trace.calls)
    assert trace.total.tokens_out == sum(c.usage.tokens_out for c in trace.calls)
    assert trace.total.wall_time == pytest.approx(
        sum(c.usage.wall_time for c in trace.calls))


# ---------------------------------------------------------------------------
# Retry contract
# ---------------------------------------------------------------------------

def bad_params(n):
    """n parameter replies that fail functionally (health 0)."""
    return [ADD_ENEMY_PARAMS.replace("health: 10", "health: 0")] * n


@pytest.mark.parametrize("failures", [0, 1, 2])
def test_retries_recorded_and_recovered(cfg, reg, three_rooms, failures):
    fixed = ADD_ENEMY_PARAMS.replace("Goblin Archer", "Fresh Guard")
    script = ["add_enemy"] + bad_params(failures) + [fixed, "Added."]
    response, level, trace = run_step(cfg, reg, [], "add a guard", three_rooms,
                                      backends=ScriptedBackend(script))
    assert trace.total_retries == failures
    assert trace.intent_records[0].retries == failures
    assert trace.intent_records[0].ok
    assert len(trace.calls) == 3 + failures
    assert any(e.name == "Fresh Guard" for e in level.rooms["Rome"].enemies)


def test_three_failures_exhaust_and_record(cfg, reg, three_rooms):
    script = ["add_enemy"] + bad_params(3) + ["Could not add the enemy."]
    response, level, trace = run_step(cfg, reg, [], "add a guard", three_rooms,
                                      backends=ScriptedBackend(script))
    record = trace.intent_records[0]
    assert record.retries == 3
    assert not record.ok
    assert record.message == "health must be positive, got 0"
    assert trace.outputs == ["health must be positive, got 0"]
    # 1 intent + 3 failed parameter attempts + 1 summary; no success call.
    assert [c.role for c in trace.calls] == (
        ["intent"] + ["parameters"] * 3 + ["summary"])
    assert structurally_equal(level, three_rooms)
    assert response == "Could not add the enemy."
    assert trace.total.tokens_in > 0 and trace.total.wall_time >= 0


def test_feedback_carried_verbatim_into_next_prompt(cfg, reg, three_rooms):
    backend = ScriptedBackend(
        ["add_enemy"] + bad_params(1)
        + [ADD_ENEMY_PARAMS.replace("Goblin Archer", "Fresh Guard"), "Done."])
    run_step(cfg, reg, [], "add a guard", three_rooms, backends=backend)
    first_attempt = backend.transcript[1][1]
    retry_attempt = backend.transcript[2][1]
    assert "previous attempt" not in first_attempt[-1].content
    assert ("The previous attempt failed with this error:\n"
            "health must be positive, got 0") in retry_attempt[-1].content


def test_feedback_tracks_latest_error(cfg, reg, three_rooms):
    first_bad = ADD_ENEMY_PARAMS.replace("health: 10", "health: 0")
    second_bad = ADD_ENEMY_PARAMS.replace("room: Rome", "room: Nowhere")
    script = ["add_enemy", first_bad, second_bad, "still wrong", "Gave up."]
    _, _, trace = run_step(cfg, reg, [], "add", three_rooms,
                           backends=ScriptedBackend(script))
    record = trace.intent_records[0]
    assert record.feedback[0] == "health must be positive, got 0"
    assert record.feedback[1].startswith("unknown room 'Nowhere'")
    assert record.feedback[2].startswith("missing required parameter(s)")


def test_parse_errors_count_as_retries(cfg, reg, three_rooms):
    bad = ADD_ENEMY_PARAMS.replace("health: 10", "health: a lot")
    script = ["add_enemy", bad,
              ADD_ENEMY_PARAMS.replace("Goblin Archer", "Fresh Guard"), "Done."]
    _, _, trace = run_step(cfg, reg, [], "add", three_rooms,
                           backends=ScriptedBackend(script))
    assert trace.intent_records[0].retries == 1
    assert trace.intent_records[0].feedback[0] == (
        "invalid value for 'health': 'a lot' is not an integer")


def test_partial_success_keeps_other_edits(cfg, reg, three_rooms):
    good = ADD_ENEMY_PARAMS.replace("Goblin Archer", "Fresh Guard")
    script = ["add_enemy, add_enemy", good] + bad_params(3) + ["Half done."]
    _, level, trace = run_step(cfg, reg, [], "add two", three_rooms,
                               backends=ScriptedBackend(script))
    assert trace.intent_records[0].ok
    assert not trace.intent_records[1].ok
    assert any(e.name == "Fresh Guard" for e in level.rooms["Rome"].enemies)
    assert len(trace.outputs) == 2


# ---------------------------------------------------------------------------
# Intent failures and fallback
# ---------------------------------------------------------------------------

def test_intent_retry_then_success(cfg, reg, three_rooms):
    script = ["hmm, not sure", "conversation", "Hello!"]
    response, _, trace = run_step(cfg, reg, [], "hi", three_rooms,
                                  backends=ScriptedBackend(script))
    assert response == "Hello!"
    assert [c.role for c in trace.calls] == ["intent", "intent", "chat"]
    assert len(trace.warnings) == 1
    assert "intent reply rejected" in trace.warnings[0]


def test_intent_exhaustion_falls_back_to_chat(cfg, reg, three_rooms):
    script = ["nonsense", "more nonsense", "worse nonsense",
              "Sorry, I could not follow that."]
    response, level, trace = run_step(cfg, reg, [], "do the thing", three_rooms,
                                      backends=ScriptedBackend(script))
    assert trace.conversation_fallback
    assert response == "Sorry, I could not follow that."
    assert [c.role for c in trace.calls] == ["intent"] * 3 + ["chat"]
    assert structurally_equal(level, three_rooms)
    assert trace.intents == []
    assert len(trace.warnings) == 3


def test_fallback_note_reaches_chat_prompt(cfg, reg, three_rooms):
    backend = ScriptedBackend(["junk", "junk", "junk", "Sorry."])
    run_step(cfg, reg, [], "do it", three_rooms, backends=backend)
    chat_system = backend.transcript[-1][1][0].content
    assert "apologize briefly" in chat_system


def test_too_many_intents_triggers_fallback():
    cfg = make_config(max_retries=1, max_intents=2)
    backend = ScriptedBackend(["add_room, add_room, add_room", "Sorry."])
    _, _, trace = run_step(cfg, registry(), [], "lots of rooms",
                           Dungeon(name="D"), backends=backend)
    assert trace.conversation_fallback
    assert "3 operations" in trace.warnings[0] or "3" in trace.warnings[0]


# ---------------------------------------------------------------------------
# Events and aborts
# ---------------------------------------------------------------------------

def test_event_stream_order_and_level_payload(cfg, reg, three_rooms):
    events = []
    script = (["add_enemy"] + bad_params(1)
              + [ADD_ENEMY_PARAMS.replace("Goblin Archer", "Fresh Guard"), "Done."])
    run_step(cfg, reg, [], "add", three_rooms,
             backends=ScriptedBackend(script), on_event=events.append)
    assert [e["type"] for e in events] == [
        "intent_detected", "tool_started", "retry", "tool_started",
        "tool_succeeded", "summary_ready"]
    succeeded = events[4]
    names = [e["name"] for room in succeeded["level"]["rooms"]
             for e in room["enemies"]]
    assert "Fresh Guard" in names


def test_script_exhaustion_aborts(cfg, reg, three_rooms):
    with pytest.raises(PipelineAbort):
        run_step(cfg, reg, [], "hello", three_rooms,
                 backends=ScriptedBackend(["add_enemy"]))


def test_per_role_backends(cfg, reg, three_rooms):
    backends = {"intent": ScriptedBackend(["conversation"]),
                "chat": ScriptedBackend(["Hi there."]),
                "parameters": ScriptedBackend([]),
                "summary": ScriptedBackend([])}
    response, _, trace = run_step(cfg, reg, [], "hello", three_rooms,
                                  backends=backends)
    assert response == "Hi there."
    assert backends["intent"].remaining() == 0
    assert backends["parameters"].remaining() == 0


def test_trace_round_trips_to_dict(cfg, reg, three_rooms):
    backend = ScriptedBackend(["add_enemy", ADD_ENEMY_PARAMS.replace(
        "Goblin Archer", "Fresh Guard"), "Done."])
    _, _, trace = run_step(cfg, reg, [], "add", three_rooms, backends=backend)
    data = trace.to_dict()
    assert data["mode"] == "freyr"
    assert data["intents"] == ["add_enemy"]
    assert data["retries"] == 0
    assert len(data["calls"]) == 3
    assert data["total"]["tokens_in"] == trace.total.tokens_in


def test_pipeline_config_requires_all_roles():
    from freyr.backend import GenerationOptions, RoleConfig
    roles = {r: RoleConfig(role=r, options=GenerationOptions(model="m"))
             for r in ("intent", "parameters", "summary")}
    with pytest.raises(ValueError, match="missing role config: chat"):
        PipelineConfig(roles=roles)
