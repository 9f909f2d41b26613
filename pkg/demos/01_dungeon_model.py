"""Build a small dungeon by hand, break it, and read the diff.

Shows the data model basics: constructing rooms, corridors and entities,
domain validation with precise violation messages, structural diffs between
two versions of a level, and lossless JSON round-trips.

Run: python3 demos/01_dungeon_model.py
"""

from freyr.dungeon import (
    Corridor,
    Dungeon,
    Enemy,
    Room,
    Trap,
    Treasure,
    deserialize,
    diff,
    level_outline,
    serialize,
    validate_domain,
)


def main() -> None:
    level = Dungeon(name="Old Crypt", rooms={
        "Entrance Hall": Room("Entrance Hall", "A plain stone antechamber."),
        "Crypt": Room(
            "Crypt", "Rows of burial niches.",
            enemies=[Enemy("Skeleton Guard", "Rattles in the dark.",
                           "skeleton", 12)],
            treasures=[Treasure("Burial Chest", "Heavy and dusty.",
                                "tarnished silverware")]),
    }, corridors={
        "Entrance Hall-Crypt": Corridor(
            "Entrance Hall", "Crypt", length=3,
            cells=[Trap("Pressure Plate", "Click.", "spikes", 4), None, None]),
    })

    print("=== outline ===")
    print(level_outline(level))

    report = validate_domain(level)
    print(f"valid: {report.ok}")

    print("\n=== breaking it on purpose ===")
    broken = level.clone()
    broken.rooms["Crypt"].enemies[0].health = -3
    broken.corridors["Entrance Hall-Crypt"].cells.append(
        Trap("Ghost Pit", "A cold spot.", "falling", 2))
    report = validate_domain(broken)
    print(f"valid: {report.ok}")
    for violation in report.violations:
        print(f"  - {violation.code}: {violation.message}")

    print("\n=== what changed between the two versions ===")
    edit = diff(level, broken)
    for section, entry in edit.entries():
        fields = f" fields={sorted(entry.fields)}" if entry.fields else ""
        print(f"  {section}: {entry.kind} '{entry.name}' in "
              f"'{entry.area or 'level'}'{fields}")

    print("\n=== JSON round-trip ===")
    text = serialize(level)
    again = deserialize(text)
    print(f"serialized {len(text)} bytes; round-trip identical: "
          f"{serialize(again) == text}")


if __name__ == "__main__":
    main()
