"""Regenerate the bundled benchmark suites and their replay scripts.

Each suite is authored here as a list of steps; every step carries the
request text, a canonical plan of tool invocations that fulfils it, a
summary line, and the design check. Start levels are derived by executing
the plans in order (so they are legal by construction), and the replay
scripts are the canonical plans re-rendered as model replies — one set in
the modular pipeline's reply formats, one as native tool calls.

Usage: python scripts/build_suites.py
"""

from __future__ import annotations

import json
from pathlib import Path

from freyr.dungeon import Dungeon, diff, to_dict, validate_domain
from freyr.tools import execute

OUT = Path(__file__).resolve().parent.parent / "src" / "freyr" / "bench" / "suites"


def added(kind, area="", count=1):
    return {"added": {"kind": kind, "area": area, "count": count}}


def removed(kind, area="", count=1):
    return {"removed": {"kind": kind, "area": area, "count": count}}


def modified(kind, area="", name=None, fields=None):
    body = {"kind": kind, "area": area}
    if name is not None:
        body["name"] = name
    if fields is not None:
        body["fields"] = sorted(fields)
    return {"modified": body}


CLOSED = {"no_other_changes": True}


def step(request, plan, summary, *checks):
    return {"request": request, "plan": plan, "summary": summary,
            "check": {"all": [*checks, CLOSED]}}


T1 = ("T1", "Old Crypt", [
    step("Create a room called the Entrance Hall, a plain stone antechamber",
         [("add_room", {"name": "Entrance Hall",
                        "description": "A plain stone antechamber, its floor worn smooth by centuries of feet."})],
         "Created the Entrance Hall.",
         added("room")),
    step("Add a skeleton guard in the Entrance Hall",
         [("add_enemy", {"name": "Skeleton Guard",
                         "description": "A clattering skeleton in a rusted breastplate, still standing its post.",
                         "species": "skeleton", "health": 12, "room": "Entrance Hall"})],
         "Added a skeleton guard to the Entrance Hall.",
         added("enemy", "room:Entrance Hall")),
    step("Create a second room called the Crypt, connected to the Entrance Hall",
         [("add_room", {"name": "Crypt",
                        "description": "Rows of stone sarcophagi under a low vaulted ceiling.",
                        "connect_to": "Entrance Hall"})],
         "Created the Crypt and linked it to the Entrance Hall.",
         added("room"), added("corridor")),
    step("Place a treasure chest with old coins in the Crypt",
         [("add_treasure", {"name": "Burial Chest",
                            "description": "A squat wooden chest banded with tarnished bronze.",
                            "loot": "a pile of old coins", "room": "Crypt"})],
         "Placed a chest of old coins in the Crypt.",
         added("treasure", "room:Crypt")),
])

T2 = ("T2", "Alchemist's Wing", [
    step("Create two rooms, a Library and a Laboratory, connected to each other",
         [("add_room", {"name": "Library",
                        "description": "Shelves of mouldering grimoires climb to the ceiling."}),
          ("add_room", {"name": "Laboratory",
                        "description": "Benches crowded with alembics, burners and stained glassware.",
                        "connect_to": "Library"})],
         "Created the Library and the Laboratory, connected by a corridor.",
         added("room", count=2), added("corridor")),
    step("Add a mad alchemist in the Laboratory",
         [("add_enemy", {"name": "Mad Alchemist",
                         "description": "A wild-eyed researcher in a scorched coat, muttering formulae.",
                         "species": "human", "health": 18, "room": "Laboratory"})],
         "Added the Mad Alchemist to the Laboratory.",
         added("enemy", "room:Laboratory")),
    step("Give the alchemist an acid splash attack",
         [("add_attack", {"enemy": "Mad Alchemist", "name": "Acid Splash",
                          "description": "Hurls a beaker of hissing green acid.",
                          "damage": 7})],
         "Gave the Mad Alchemist an Acid Splash attack.",
         modified("enemy", "room:Laboratory", "Mad Alchemist", ["attacks"])),
    step("Put a poison gas trap in the corridor",
         [("add_trap", {"name": "Poison Gas Trap",
                        "description": "A hidden nozzle wired to a pressure plate.",
                        "effect": "floods the cell with choking green gas",
                        "damage": 5, "corridor": "Library-Laboratory"})],
         "Placed a poison gas trap in the corridor.",
         added("trap", "corridor:Library-Laboratory")),
    step("Set the alchemist's health to 25",
         [("update_enemy", {"ref": "Mad Alchemist", "health": 25})],
         "Set the Mad Alchemist's health to 25.",
         modified("enemy", "room:Laboratory", "Mad Alchemist", ["health"])),
    step("Remove the poison gas trap",
         [("remove_trap", {"ref": "Poison Gas Trap"})],
         "Removed the poison gas trap.",
         removed("trap", "corridor:Library-Laboratory")),
])

T3 = ("T3", "Border Fortress", [
    step("Create 3 rooms: a Gatehouse, a Courtyard, and a Keep, each connected to the next",
         [("add_room", {"name": "Gatehouse",
                        "description": "A squat gatehouse with murder holes above the portcullis."}),
          ("add_room", {"name": "Courtyard",
                        "description": "A muddy courtyard ringed by crumbling battlements.",
                        "connect_to": "Gatehouse"}),
          ("add_room", {"name": "Keep",
                        "description": "The fortress keep, its banners long rotted away.",
                        "connect_to": "Courtyard"})],
         "Created the Gatehouse, Courtyard and Keep in a chain.",
         added("room", count=3), added("corridor", count=2)),
    step("Add two goblin raiders in the Courtyard",
         [("add_enemy", {"name": "Goblin Raider Grik",
                         "description": "A scrawny goblin clutching a notched scimitar.",
                         "species": "goblin", "health": 9, "room": "Courtyard"}),
          ("add_enemy", {"name": "Goblin Raider Nark",
                         "description": "A pot-bellied goblin with a looted kettle for a helmet.",
                         "species": "goblin", "health": 9, "room": "Courtyard"})],
         "Added two goblin raiders to the Courtyard.",
         added("enemy", "room:Courtyard", 2)),
    step("Rename the Keep to the Throne Room",
         [("update_room", {"ref": "Keep", "name": "Throne Room"})],
         "Renamed the Keep to the Throne Room.",
         removed("room"), added("room"), removed("corridor"), added("corridor")),
    step("Put a treasure chest with a jeweled crown in the Throne Room",
         [("add_treasure", {"name": "Royal Chest",
                            "description": "An iron-bound chest sealed with the old king's crest.",
                            "loot": "a jeweled crown", "room": "Throne Room"})],
         "Placed the Royal Chest in the Throne Room.",
         added("treasure", "room:Throne Room")),
    step("Add an ogre warlord in the Throne Room with 80 health",
         [("add_enemy", {"name": "Ogre Warlord",
                         "description": "A towering ogre draped in scavenged plate armour.",
                         "species": "ogre", "health": 80, "room": "Throne Room"})],
         "Added the Ogre Warlord to the Throne Room.",
         added("enemy", "room:Throne Room")),
    step("Give the ogre warlord a club smash attack",
         [("add_attack", {"enemy": "Ogre Warlord", "name": "Club Smash",
                          "description": "Brings a tree-trunk club down in a bone-shaking arc.",
                          "damage": 15})],
         "Gave the Ogre Warlord a Club Smash attack.",
         modified("enemy", "room:Throne Room", "Ogre Warlord", ["attacks"])),
    step("Place two spike traps in the corridor between the Gatehouse and the Courtyard",
         [("add_trap", {"name": "Hidden Spike Trap",
                        "description": "Spring-loaded spikes behind a loose flagstone.",
                        "effect": "spikes stab upward from the floor",
                        "damage": 6, "corridor": "Gatehouse-Courtyard", "cell": 1}),
          ("add_trap", {"name": "Rusty Spike Trap",
                        "description": "Corroded spikes that rake the walls of the passage.",
                        "effect": "spikes scissor inward from both walls",
                        "damage": 6, "corridor": "Gatehouse-Courtyard", "cell": 3})],
         "Placed two spike traps in the Gatehouse-Courtyard corridor.",
         added("trap", "corridor:Gatehouse-Courtyard", 2)),
    step("Remove one of the goblin raiders",
         [("remove_enemy", {"ref": "Goblin Raider Nark"})],
         "Removed Goblin Raider Nark from the Courtyard.",
         removed("enemy", "room:Courtyard")),
])

T4 = ("T4", "Collapsed Mine", [
    step("Create a room called the Mine Entrance",
         [("add_room", {"name": "Mine Entrance",
                        "description": "Splintered support beams frame the mouth of the old mine."})],
         "Created the Mine Entrance.",
         added("room")),
    step("Dig out a Tunnel Junction connected to the Mine Entrance",
         [("add_room", {"name": "Tunnel Junction",
                        "description": "A cramped crossroads where three shafts once met.",
                        "connect_to": "Mine Entrance"})],
         "Dug out the Tunnel Junction off the Mine Entrance.",
         added("room"), added("corridor")),
    step("Add a Deep Shaft and a Crystal Cave, both connected to the Tunnel Junction",
         [("add_room", {"name": "Deep Shaft",
                        "description": "A sheer drop with a rickety lift cage rusted in place.",
                        "connect_to": "Tunnel Junction"}),
          ("add_room", {"name": "Crystal Cave",
                        "description": "A cavern studded with pale, faintly glowing crystals.",
                        "connect_to": "Tunnel Junction"})],
         "Added the Deep Shaft and the Crystal Cave off the Tunnel Junction.",
         added("room", count=2), added("corridor", count=2)),
    step("Add a cave spider in the Deep Shaft and a rock golem in the Crystal Cave",
         [("add_enemy", {"name": "Cave Spider",
                         "description": "A dog-sized spider strung across the shaft on thick webs.",
                         "species": "spider", "health": 14, "room": "Deep Shaft"}),
          ("add_enemy", {"name": "Rock Golem",
                         "description": "A hulking figure of fused boulders with crystal-shard eyes.",
                         "species": "golem", "health": 60, "room": "Crystal Cave"})],
         "Added a cave spider to the Deep Shaft and a rock golem to the Crystal Cave.",
         added("enemy", "room:Deep Shaft"), added("enemy", "room:Crystal Cave")),
    step("Place a cave-in trap in the corridor to the Deep Shaft",
         [("add_trap", {"name": "Cave-In Trap",
                        "description": "A weakened ceiling held up by one groaning beam.",
                        "effect": "drops rubble on whoever disturbs the beam",
                        "damage": 10, "corridor": "Tunnel Junction-Deep Shaft"})],
         "Placed a cave-in trap in the corridor to the Deep Shaft.",
         added("trap", "corridor:Tunnel Junction-Deep Shaft")),
    step("Set the rock golem's health to 120",
         [("update_enemy", {"ref": "Rock Golem", "health": 120})],
         "Set the Rock Golem's health to 120.",
         modified("enemy", "room:Crystal Cave", "Rock Golem", ["health"])),
    step("Give the cave spider a venomous bite attack",
         [("add_attack", {"enemy": "Cave Spider", "name": "Venomous Bite",
                          "description": "Fangs drip a paralytic venom.",
                          "damage": 8})],
         "Gave the Cave Spider a Venomous Bite attack.",
         modified("enemy", "room:Deep Shaft", "Cave Spider", ["attacks"])),
    step("Put a treasure chest with raw crystals in the Crystal Cave",
         [("add_treasure", {"name": "Miner's Strongbox",
                            "description": "A dented strongbox half-buried in crystal dust.",
                            "loot": "a heap of raw crystals", "room": "Crystal Cave"})],
         "Placed the Miner's Strongbox in the Crystal Cave.",
         added("treasure", "room:Crystal Cave")),
    step("Actually, remove the cave-in trap",
         [("remove_trap", {"ref": "Cave-In Trap"})],
         "Removed the cave-in trap.",
         removed("trap", "corridor:Tunnel Junction-Deep Shaft")),
    step("Describe the Crystal Cave as glittering with veins of amethyst",
         [("update_room", {"ref": "Crystal Cave",
                           "description": "A cavern glittering with veins of amethyst that throw violet light."})],
         "Updated the Crystal Cave's description.",
         modified("room", "", "Crystal Cave", ["description"])),
])

T5 = ("T5", "Grand Tour", [
    step("Create 3 rooms, each connected to the next one, all set in a different European city",
         [("add_room", {"name": "Rome",
                        "description": "A sun-baked chamber of crumbling Roman columns and faded mosaics."}),
          ("add_room", {"name": "Paris",
                        "description": "An elegant hall with wrought-iron lanterns and a cracked marble floor.",
                        "connect_to": "Rome"}),
          ("add_room", {"name": "Barcelona",
                        "description": "A gallery of twisting spires and bright broken tilework.",
                        "connect_to": "Paris"})],
         "Created Rome, Paris and Barcelona, each connected to the next.",
         added("room", count=3), added("corridor", count=2)),
    step("Add a goblin archer in the first room",
         [("add_enemy", {"name": "Goblin Archer",
                         "description": "A small, wiry goblin with a short bow and a quiver of crooked arrows.",
                         "species": "goblin", "health": 10, "room": "Rome"})],
         "Added a goblin archer to Rome.",
         added("enemy", "room:Rome")),
    step("Also add two zombies",
         [("add_enemy", {"name": "Shambling Zombie",
                         "description": "A slack-jawed corpse dragging one ruined leg.",
                         "species": "zombie", "health": 8, "room": "Rome"}),
          ("add_enemy", {"name": "Rotting Zombie",
                         "description": "A bloated corpse trailing grave wrappings.",
                         "species": "zombie", "health": 8, "room": "Rome"})],
         "Added two zombies to Rome.",
         added("enemy", "room:Rome", 2)),
    step("Now generate a room connected to the first one, set in underground Atlantis",
         [("add_room", {"name": "Atlantis",
                        "description": "A drowned vault of glowing coral and water-warped bronze statues.",
                        "connect_to": "Rome"})],
         "Created Atlantis and connected it to Rome.",
         added("room"), added("corridor")),
    step("Put a couple of evil mermaids in Atlantis",
         [("add_enemy", {"name": "Evil Mermaid",
                         "description": "A sharp-toothed mermaid with kelp-tangled hair and cold eyes.",
                         "species": "mermaid", "health": 12, "room": "Atlantis"}),
          ("add_enemy", {"name": "Siren Matriarch",
                         "description": "An ancient mermaid whose song curdles the flooded air.",
                         "species": "mermaid", "health": 14, "room": "Atlantis"})],
         "Added two evil mermaids to Atlantis.",
         added("enemy", "room:Atlantis", 2)),
    step("Place multiple ocean-themed traps in the corridor to Atlantis",
         [("add_trap", {"name": "Tidal Surge",
                        "description": "A pressure plate that releases a wall of seawater.",
                        "effect": "floods the cell with a crushing wave",
                        "damage": 6, "corridor": "Rome-Atlantis", "cell": 1}),
          ("add_trap", {"name": "Coral Snare",
                        "description": "Razor coral growths that close around an ankle.",
                        "effect": "grips and lacerates whoever steps through",
                        "damage": 4, "corridor": "Rome-Atlantis", "cell": 3})],
         "Placed two ocean-themed traps in the corridor to Atlantis.",
         added("trap", "corridor:Rome-Atlantis", {"min": 2})),
    step("Place a single treasure chest in all rooms, each containing a piece of a treasure map",
         [("add_treasure", {"name": "Weathered Chest",
                            "description": "A salt-stained chest with a broken hinge.",
                            "loot": "the first piece of a treasure map", "room": "Rome"}),
          ("add_treasure", {"name": "Gilded Chest",
                            "description": "A slim gilded case lined with faded velvet.",
                            "loot": "the second piece of a treasure map", "room": "Paris"}),
          ("add_treasure", {"name": "Tiled Chest",
                            "description": "A chest inlaid with bright shards of broken tile.",
                            "loot": "the third piece of a treasure map", "room": "Barcelona"}),
          ("add_treasure", {"name": "Sunken Chest",
                            "description": "A barnacled chest that still weeps seawater.",
                            "loot": "the fourth piece of a treasure map", "room": "Atlantis"})],
         "Placed a map-piece chest in every room.",
         added("treasure", "room:Rome"), added("treasure", "room:Paris"),
         added("treasure", "room:Barcelona"), added("treasure", "room:Atlantis")),
    step("Remove the chest containing the second piece of the treasure map",
         [("remove_treasure", {"ref": "Gilded Chest"})],
         "Removed the chest with the second map piece.",
         removed("treasure", "room:Paris")),
    step("Add another room connected to Atlantis, set in Hell",
         [("add_room", {"name": "Hell",
                        "description": "A scorched cathedral of basalt arches over a river of embers.",
                        "connect_to": "Atlantis"})],
         "Created Hell and connected it to Atlantis.",
         added("room"), added("corridor")),
    step("Place two fallen angels armed with flaming swords",
         [("add_enemy", {"name": "Fallen Angel",
                         "description": "A grey-winged angel whose flaming sword gutters like a torch.",
                         "species": "angel", "health": 20, "room": "Hell"}),
          ("add_enemy", {"name": "Burning Seraph",
                         "description": "A six-winged figure wreathed in fire, sword held high.",
                         "species": "angel", "health": 20, "room": "Hell"})],
         "Placed two fallen angels in Hell.",
         added("enemy", "room:Hell", 2)),
    step("Change one of the angels to a capybara monster",
         [("update_enemy", {"ref": "Fallen Angel", "name": "Capybara",
                            "species": "capybara monster",
                            "description": "An enormous capybara with matted fur and ember-red eyes."})],
         "Turned one fallen angel into a capybara monster.",
         removed("enemy", "room:Hell"), added("enemy", "room:Hell")),
    step("Set the health of the capybara to 1000",
         [("update_enemy", {"ref": "Capybara", "health": 1000})],
         "Set the capybara's health to 1000.",
         modified("enemy", "room:Hell", "Capybara", ["health"])),
    step("Make the capybara a punker, with pink spiky hair",
         [("update_enemy", {"ref": "Capybara",
                            "description": "A punker capybara with pink spiky hair and a studded collar."})],
         "Gave the capybara a punker look with pink spiky hair.",
         modified("enemy", "room:Hell", "Capybara", ["description"])),
])


def render_params(params: dict) -> str:
    return "\n".join(f"- {k}: {v}" for k, v in params.items())


def build(case):
    name, dungeon_name, steps = case
    from freyr.bench.suite import CheckExpr

    level = Dungeon(name=dungeon_name)
    suite_steps = []
    freyr_steps = []
    tools_steps = []
    for i, spec in enumerate(steps):
        start = level.clone()
        for tool, params in spec["plan"]:
            outcome = execute(tool, params, level)
            assert outcome.ok, f"{name} step {i + 1} plan failed: {outcome.message}"
            level = outcome.new_level
        report = validate_domain(level)
        assert report.ok, f"{name} step {i + 1} left an illegal level: {report}"
        check = CheckExpr.from_json(spec["check"])
        edit = diff(start, level)
        assert check.evaluate(edit), (
            f"{name} step {i + 1}: canonical plan does not satisfy its own check\n"
            f"{[e for e in edit.entries()]}")
        assert not check.evaluate(diff(start, start)), (
            f"{name} step {i + 1}: check passes with no edit at all")

        suite_steps.append({"request": spec["request"],
                            "start_level": to_dict(start),
                            "design_check": spec["check"]})
        entries = [", ".join(tool for tool, _ in spec["plan"])]
        entries += [render_params(params) for _, params in spec["plan"]]
        entries.append(spec["summary"])
        freyr_steps.append({"entries": entries})
        tools_steps.append({"entries": [
            [{"name": tool, "arguments": params} for tool, params in spec["plan"]],
            spec["summary"],
        ]})

    key = name.lower()
    (OUT / f"{key}.json").write_text(json.dumps(
        {"name": name, "steps": suite_steps}, indent=2) + "\n")
    (OUT / f"{key}_script.json").write_text(json.dumps(
        {"mode": "freyr", "suite": name, "steps": freyr_steps}, indent=2) + "\n")
    (OUT / f"{key}_script_tools.json").write_text(json.dumps(
        {"mode": "tools", "suite": name, "steps": tools_steps}, indent=2) + "\n")
    print(f"{name}: {len(steps)} steps -> {key}.json, {key}_script.json, "
          f"{key}_script_tools.json")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for case in (T1, T2, T3, T4, T5):
        build(case)
