"""Walk the tool registry: run edits, trigger failures, compare renderings.

All sixteen edit operations live in one registry. The same registry renders
three ways: the compact intent catalog (one line per operation) fed to the
intent role, the per-tool parameter prompt fed to the parameter role, and
the full JSON schema a native function-calling endpoint would receive.
The catalog is a fraction of the schema's size — that gap is the point.

Run: python3 demos/02_tools_and_schemas.py
"""

from freyr.backend import count_tokens
from freyr.dungeon import Dungeon
from freyr.tools import (
    execute,
    registry,
    render_intent_catalog,
    render_json_schema,
    render_parameter_prompt,
)


def main() -> None:
    reg = registry()
    print(f"{len(reg)} tools registered:")
    print("  " + ", ".join(t.name for t in reg))

    print("\n=== a chain of edits ===")
    level = Dungeon(name="Workshop")
    steps = [
        ("add_room", {"name": "Forge", "description": "Soot everywhere."}),
        ("add_room", {"name": "Store Room", "description": "Crates and dust.",
                      "connect_to": "Forge"}),
        ("add_enemy", {"name": "Fire Imp", "description": "Crackles.",
                       "species": "imp", "health": 6, "room": "Forge"}),
        ("add_trap", {"name": "Coal Chute", "description": "Slippery.",
                      "effect": "falling", "damage": 3,
                      "corridor": "Forge-Store Room", "cell": 1}),
    ]
    for name, params in steps:
        outcome = execute(name, params, level)
        print(f"  {name}: {outcome.message}")
        level = outcome.new_level

    print("\n=== failures are precise, not exceptions ===")
    for name, params in [
        ("add_enemy", {"name": "Lost Imp", "description": "?",
                       "species": "imp", "health": 6, "room": "Attic"}),
        ("add_enemy", {"name": "Odd Imp", "description": "?",
                       "species": "imp", "health": "a lot", "room": "Forge"}),
        ("remove_treasure", {"ref": "Crystal Goblet"}),
    ]:
        outcome = execute(name, params, level)
        print(f"  {name}: ok={outcome.ok} -> {outcome.message}")

    print("\n=== three renderings, one registry ===")
    catalog = render_intent_catalog(reg)
    schema = render_json_schema(reg)
    tool = next(t for t in reg if t.name == "add_enemy")
    prompt = render_parameter_prompt(tool, level)
    print(f"intent catalog: {len(catalog)} bytes, "
          f"~{count_tokens(catalog)} tokens")
    print(f"one-tool parameter prompt: {len(prompt)} bytes, "
          f"~{count_tokens(prompt)} tokens")
    print(f"full JSON schema: {len(schema)} bytes, "
          f"~{count_tokens(schema)} tokens")
    print(f"catalog / schema: {len(catalog) / len(schema):.1%} of the bytes")

    print("\nfirst catalog lines:")
    for line in catalog.splitlines()[:4]:
        print(f"  {line}")


if __name__ == "__main__":
    main()
