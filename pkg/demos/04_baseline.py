"""Replay a native function-calling step and weigh it against the pipeline.

The baseline sends the full JSON schema of all sixteen tools with every
request and lets the model emit structured tool calls. Failed calls come
back as tool-role error messages and the model gets another round, up to
the shared retry budget. The scripted replay below fails once, recovers,
and then the same edit is replayed through the modular pipeline so the
prompt-token bill for the identical step can be compared directly.

Run: python3 demos/04_baseline.py
"""

from freyr.backend import GenerationOptions, RoleConfig, ScriptedBackend
from freyr.baseline import run_step_tools
from freyr.dungeon import Dungeon, Room
from freyr.pipeline import PipelineConfig, run_step
from freyr.tools import registry


def scripted_config() -> PipelineConfig:
    roles = {role: RoleConfig(role=role,
                              options=GenerationOptions(model="scripted"))
             for role in ("intent", "parameters", "summary", "chat")}
    return PipelineConfig(roles=roles, max_retries=3, max_intents=10)


START = Dungeon(name="Keep", rooms={
    "Gatehouse": Room("Gatehouse", "Iron-bound doors.")})

TOOLS_SCRIPT = [
    # round 1: a bad call (health 0) -- the error returns as a tool message
    [{"name": "add_enemy", "arguments": {
        "name": "Pale Watcher", "description": "It does not blink.",
        "species": "wraith", "health": 0, "room": "Gatehouse"}}],
    # round 2: corrected call
    [{"name": "add_enemy", "arguments": {
        "name": "Pale Watcher", "description": "It does not blink.",
        "species": "wraith", "health": 14, "room": "Gatehouse"}}],
    # round 3: a plain-text reply ends the step
    "A Pale Watcher now haunts the Gatehouse.",
]

PIPELINE_SCRIPT = [
    "add_enemy",
    ("- name: Pale Watcher\n- description: It does not blink.\n"
     "- species: wraith\n- health: 14\n- room: Gatehouse"),
    "A Pale Watcher now haunts the Gatehouse.",
]

REQUEST = "Post a wraith in the gatehouse."


def main() -> None:
    cfg = scripted_config()
    reg = registry()

    backend = ScriptedBackend(list(TOOLS_SCRIPT))
    response, level, tools_trace = run_step_tools(
        cfg, reg, [], REQUEST, START, backends=backend)

    print("=== native tool-calling step ===")
    for i, call in enumerate(tools_trace.calls, 1):
        print(f"  round {i}: in={call.usage.tokens_in:>5} "
              f"out={call.usage.tokens_out:>3}  {call.response[:52]!r}")
    print(f"reply: {response}")
    print(f"enemies in Gatehouse: "
          f"{[e.name for e in level.rooms['Gatehouse'].enemies]}")
    print(f"failed rounds retried: {tools_trace.total_retries}")

    backend = ScriptedBackend(list(PIPELINE_SCRIPT))
    _, _, pipe_trace = run_step(cfg, reg, [], REQUEST, START, backends=backend)

    print("\n=== the same edit through the modular pipeline ===")
    for call in pipe_trace.calls:
        print(f"  {call.role:<10} in={call.usage.tokens_in:>5} "
              f"out={call.usage.tokens_out:>3}")

    print("\n=== the bill ===")
    print(f"tool calling: {tools_trace.total.tokens_in:>5} prompt tokens "
          f"({len(tools_trace.calls)} calls, schema attached to each)")
    print(f"pipeline:     {pipe_trace.total.tokens_in:>5} prompt tokens "
          f"({len(pipe_trace.calls)} calls, catalog + one tool prompt)")
    ratio = tools_trace.total.tokens_in / pipe_trace.total.tokens_in
    print(f"the schema-on-every-call bill is {ratio:.1f}x the pipeline's, "
          "and the gap widens with retries")


if __name__ == "__main__":
    main()
