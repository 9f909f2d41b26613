"""Replay one modular-pipeline step and watch every role call.

The pipeline splits a step across four small roles: intent detection picks
operations from a one-line-per-tool catalog, parameter generation fills in
one tool at a time (with the functional error fed back verbatim on a
retry), and a summary role phrases the reply. A scripted backend stands in
for the model server, so the replay is deterministic and offline — the
second parameter reply below is deliberately wrong to show the retry.

Run: python3 demos/03_pipeline_replay.py
"""

from freyr.backend import GenerationOptions, RoleConfig, ScriptedBackend
from freyr.dungeon import Dungeon, level_outline
from freyr.pipeline import PipelineConfig, run_step
from freyr.tools import registry


def scripted_config() -> PipelineConfig:
    roles = {role: RoleConfig(role=role,
                              options=GenerationOptions(model="scripted"))
             for role in ("intent", "parameters", "summary", "chat")}
    return PipelineConfig(roles=roles, max_retries=3, max_intents=10)


SCRIPT = [
    # intent role: two operations for one request
    "add_room, add_enemy",
    # parameters for add_room
    "- name: Moonlit Court\n- description: Open to the night sky.",
    # parameters for add_enemy -- health 0 is rejected by the domain rules
    ("- name: Pale Watcher\n- description: It does not blink.\n"
     "- species: wraith\n- health: 0\n- room: Moonlit Court"),
    # the retry, after seeing the functional error verbatim
    ("- name: Pale Watcher\n- description: It does not blink.\n"
     "- species: wraith\n- health: 14\n- room: Moonlit Court"),
    # summary role
    "Built the Moonlit Court and posted a Pale Watcher inside.",
]


def main() -> None:
    backend = ScriptedBackend(list(SCRIPT))
    events = []
    response, level, trace = run_step(
        scripted_config(), registry(), [],
        "Make a moonlit courtyard with a wraith in it.", Dungeon(name="Keep"),
        backends=backend, on_event=events.append)

    print("=== events, in order ===")
    for event in events:
        extra = ""
        if event["type"] == "retry":
            extra = f" feedback={event['feedback']!r}"
        elif event["type"] in ("tool_started", "tool_succeeded", "tool_failed"):
            extra = f" intent={event.get('intent')}"
            if "attempt" in event:
                extra += f" attempt={event['attempt']}"
        print(f"  {event['type']}{extra}")

    print("\n=== the step's trace ===")
    print(f"intents: {trace.intents}")
    for call in trace.calls:
        print(f"  {call.role:<10} in={call.usage.tokens_in:>4} "
              f"out={call.usage.tokens_out:>3}  {call.response[:48]!r}")
    print(f"retries: {trace.total_retries}")
    print(f"total: {trace.total.tokens_in} tokens in, "
          f"{trace.total.tokens_out} out")

    print(f"\nreply: {response}")
    print("\n" + level_outline(level))


if __name__ == "__main__":
    main()
