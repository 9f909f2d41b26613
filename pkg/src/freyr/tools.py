"""Level-editing tool set: sixteen operations over dungeon levels.

Each tool is declared once (name, parameter specs, descriptions, handler)
and rendered three ways: a one-line-per-tool intent catalog, a per-tool
parameter prompt, and a full function-calling JSON schema. Execution is
pure: the input level is cloned, edited, validated, and either the new
level or a functional error message comes back.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

from freyr.dungeon import (
    DEFAULT_RULES,
    Attack,
    Corridor,
    DomainRules,
    Dungeon,
    Encounter,
    Enemy,
    Room,
    Trap,
    Treasure,
    corridor_id,
    kind_of,
    level_outline,
    validate_domain,
)

# GPT-2 token count of the full-schema rendering this registry mirrors;
# kept for reporting only (our descriptions and counter both differ).
REFERENCE_SCHEMA_GPT2_TOKENS = 3933

TEXT = "text"
INTEGER = "integer"
NUMBER = "number"
ROOM_REF = "room-ref"
CORRIDOR_REF = "corridor-ref"
ENTITY_REF = "entity-ref"

_KIND_LABEL = {
    TEXT: "text",
    INTEGER: "integer",
    NUMBER: "number",
    ROOM_REF: "room name",
    CORRIDOR_REF: "corridor name",
    ENTITY_REF: "entity name",
}

_JSON_TYPE = {
    TEXT: "string",
    INTEGER: "integer",
    NUMBER: "number",
    ROOM_REF: "string",
    CORRIDOR_REF: "string",
    ENTITY_REF: "string",
}


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str
    required: bool
    description: str


@dataclass(frozen=True)
class ToolSpec:
    name: str
    summary: str
    description: str
    params: tuple[ParamSpec, ...]


@dataclass
class ToolOutcome:
    ok: bool
    message: str
    new_level: Dungeon | None = None


class UnknownToolError(KeyError):
    """The tool name is not in the registry (a caller bug, not a model error)."""


class _Fail(Exception):
    """Internal: aborts a handler with a functional error message."""


# ---------------------------------------------------------------------------
# Reference resolution helpers
# ---------------------------------------------------------------------------


def _resolve_room(level: Dungeon, ref: str) -> Room:
    if ref in level.rooms:
        return level.rooms[ref]
    folded = [r for k, r in level.rooms.items() if k.lower() == ref.lower()]
    if len(folded) == 1:
        return folded[0]
    if not level.rooms:
        raise _Fail(f"unknown room '{ref}': the level has no rooms yet")
    raise _Fail(f"unknown room '{ref}'; existing rooms: {', '.join(level.rooms)}")


def _resolve_corridor(level: Dungeon, ref: str) -> Corridor:
    if ref in level.corridors:
        return level.corridors[ref]
    wanted = ref.lower()
    hits = [c for c in level.corridors.values()
            if wanted in (c.id.lower(), corridor_id(c.to_room, c.from_room).lower())]
    if len(hits) == 1:
        return hits[0]
    if not level.corridors:
        raise _Fail(f"unknown corridor '{ref}': the level has no corridors yet")
    raise _Fail(f"unknown corridor '{ref}'; existing corridors: {', '.join(level.corridors)}")


@dataclass
class _Located:
    entity: Encounter
    label: str
    remove: Callable[[], None]


_PLURAL = {"enemy": "enemies", "trap": "traps", "treasure": "treasures"}


def _area_candidates(level: Dungeon, room: str | None, corridor: str | None):
    if room is not None:
        r = _resolve_room(level, room)
        yield f"room '{r.name}'", r, None
    elif corridor is not None:
        c = _resolve_corridor(level, corridor)
        yield f"corridor '{c.id}'", None, c
    else:
        for r in level.rooms.values():
            yield f"room '{r.name}'", r, None
        for c in level.corridors.values():
            yield f"corridor '{c.id}'", None, c


def _collect(level: Dungeon, kind: str, room: str | None, corridor: str | None) -> list[_Located]:
    found: list[_Located] = []
    for label, r, c in _area_candidates(level, room, corridor):
        if r is not None:
            pools: list[list] = []
            if kind == "enemy":
                pools.append(r.enemies)
            if kind == "treasure":
                pools.append(r.treasures)
            for pool in pools:
                for e in list(pool):
                    found.append(_Located(e, label, lambda p=pool, x=e: p.remove(x)))
        else:
            for i, cell in enumerate(c.cells):
                if cell is not None and kind_of(cell) == kind:
                    def clear(corr=c, idx=i):
                        corr.cells[idx] = None
                    found.append(_Located(cell, f"cell {i + 1} of {label}", clear))
    return found


def _locate(level: Dungeon, kind: str, ref: str,
            room: str | None = None, corridor: str | None = None) -> _Located:
    pool = _collect(level, kind, room, corridor)
    hits = [f for f in pool if f.entity.name == ref]
    if not hits:
        hits = [f for f in pool if f.entity.name.lower() == ref.lower()]
    if not hits:
        scope = ""
        if room is not None:
            scope = f" in room '{room}'"
        elif corridor is not None:
            scope = f" in corridor '{corridor}'"
        raise _Fail(f"no {kind} named '{ref}'{scope}")
    if len(hits) > 1:
        places = ", ".join(f.label for f in hits)
        raise _Fail(f"multiple {_PLURAL[kind]} named '{ref}' ({places}); "
                    "add a room or corridor parameter to pick one")
    return hits[0]


def _area_names(container: Room | Corridor) -> set[str]:
    if isinstance(container, Room):
        return {e.name for e in container.enemies} | {t.name for t in container.treasures}
    return {c.name for c in container.cells if c is not None}


def _require_fresh_name(container: Room | Corridor, name: str, label: str) -> None:
    if name in _area_names(container):
        raise _Fail(f"an entity named '{name}' already exists in {label}")


def _place_in_corridor(corr: Corridor, entity: Encounter, cell: int | None) -> int:
    if cell is not None:
        if not 1 <= cell <= corr.length:
            raise _Fail(f"cell must be between 1 and {corr.length} "
                        f"for corridor '{corr.id}', got {cell}")
        if corr.cells[cell - 1] is not None:
            blocker = corr.cells[cell - 1]
            raise _Fail(f"cell {cell} of corridor '{corr.id}' is occupied "
                        f"by {kind_of(blocker)} '{blocker.name}'")
        idx = cell - 1
    else:
        free = [i for i, c in enumerate(corr.cells) if c is None]
        if not free:
            raise _Fail(f"corridor '{corr.id}' is full: all {corr.length} cells are occupied")
        idx = free[0]
    corr.cells[idx] = entity
    return idx + 1


def _connection_count(level: Dungeon, room_name: str) -> int:
    return sum(1 for c in level.corridors.values()
               if room_name in (c.from_room, c.to_room))


def _check_slot(level: Dungeon, room_name: str, rules: DomainRules) -> None:
    if _connection_count(level, room_name) >= rules.max_room_connections:
        raise _Fail(f"room '{room_name}' has no free connection slot: it already "
                    f"joins {rules.max_room_connections} corridors")


_DIRECTIONS = ("north", "south", "east", "west")


# ---------------------------------------------------------------------------
# Handlers (each mutates a cloned level and returns a success message)
# ---------------------------------------------------------------------------


def _add_room(args: dict, level: Dungeon, rules: DomainRules) -> str:
    name = args["name"]
    if name in level.rooms or name.lower() in {k.lower() for k in level.rooms}:
        raise _Fail(f"a room named '{name}' already exists")
    connect_to = args.get("connect_to")
    direction = args.get("direction")
    if direction is not None and direction.lower() not in _DIRECTIONS:
        raise _Fail(f"direction must be one of {', '.join(_DIRECTIONS)}, got '{direction}'")
    if level.rooms and connect_to is None:
        raise _Fail("connect_to is required: the level already has rooms and "
                    "every room must stay reachable")
    target: Room | None = None
    if connect_to is not None and level.rooms:
        target = _resolve_room(level, connect_to)
        _check_slot(level, target.name, rules)
    level.rooms[name] = Room(name=name, description=args["description"])
    if target is not None:
        corr = Corridor(from_room=target.name, to_room=name,
                        length=rules.default_corridor_length)
        level.corridors[corr.id] = corr
        return f"Added room '{name}' connected to '{target.name}'."
    return f"Added room '{name}'."


def _update_room(args: dict, level: Dungeon, rules: DomainRules) -> str:
    room = _resolve_room(level, args["ref"])
    new_name = args.get("name")
    new_desc = args.get("description")
    if new_name is None and new_desc is None:
        raise _Fail("nothing to update: provide a new name or description")
    old_name = room.name
    notes = []
    if new_name is not None and new_name != old_name:
        if new_name in level.rooms:
            raise _Fail(f"a room named '{new_name}' already exists")
        room.name = new_name
        level.rooms = {(new_name if k == old_name else k): r
                       for k, r in level.rooms.items()}
        rebuilt = {}
        for corr in level.corridors.values():
            if corr.from_room == old_name:
                corr.from_room = new_name
            if corr.to_room == old_name:
                corr.to_room = new_name
            rebuilt[corr.id] = corr
        level.corridors = rebuilt
        notes.append(f"renamed to '{new_name}'")
    if new_desc is not None:
        room.description = new_desc
        notes.append("description updated")
    return f"Updated room '{old_name}': {', '.join(notes)}."


def _remove_room(args: dict, level: Dungeon, rules: DomainRules) -> str:
    room = _resolve_room(level, args["ref"])
    touching = [k for k, c in level.corridors.items()
                if room.name in (c.from_room, c.to_room)]
    for k in touching:
        del level.corridors[k]
    del level.rooms[room.name]
    if touching:
        return (f"Removed room '{room.name}' and {len(touching)} "
                f"connected corridor(s).")
    return f"Removed room '{room.name}'."


def _add_corridor(args: dict, level: Dungeon, rules: DomainRules) -> str:
    a = _resolve_room(level, args["from"])
    b = _resolve_room(level, args["to"])
    if a.name == b.name:
        raise _Fail(f"a corridor cannot connect room '{a.name}' to itself")
    for corr in level.corridors.values():
        if {corr.from_room, corr.to_room} == {a.name, b.name}:
            raise _Fail(f"rooms '{a.name}' and '{b.name}' are already connected")
    length = args.get("length", rules.default_corridor_length)
    if length < 1:
        raise _Fail(f"length must be at least 1, got {length}")
    _check_slot(level, a.name, rules)
    _check_slot(level, b.name, rules)
    corr = Corridor(from_room=a.name, to_room=b.name, length=length)
    level.corridors[corr.id] = corr
    return f"Added corridor between '{a.name}' and '{b.name}' ({length} cells)."


def _update_corridor(args: dict, level: Dungeon, rules: DomainRules) -> str:
    corr = _resolve_corridor(level, args["ref"])
    length = args.get("length")
    if length is None:
        raise _Fail("nothing to update: provide a new length")
    if length < 1:
        raise _Fail(f"length must be at least 1, got {length}")
    if length < corr.length:
        for i in range(length, corr.length):
            cell = corr.cells[i]
            if cell is not None:
                raise _Fail(f"cannot shorten corridor '{corr.id}' to {length} cells: "
                            f"cell {i + 1} holds {kind_of(cell)} '{cell.name}'")
    old = corr.length
    corr.length = length
    corr.cells = (corr.cells + [None] * length)[:length]
    return f"Resized corridor '{corr.id}' from {old} to {length} cells."


def _remove_corridor(args: dict, level: Dungeon, rules: DomainRules) -> str:
    corr = _resolve_corridor(level, args["ref"])
    del level.corridors[corr.id]
    return f"Removed corridor between '{corr.from_room}' and '{corr.to_room}'."


def _placement(args: dict) -> tuple[str | None, str | None]:
    room = args.get("room")
    corridor = args.get("corridor")
    if (room is None) == (corridor is None):
        raise _Fail("provide exactly one of 'room' or 'corridor' to place the entity")
    return room, corridor


def _scope(args: dict) -> tuple[str | None, str | None]:
    room = args.get("room")
    corridor = args.get("corridor")
    if room is not None and corridor is not None:
        raise _Fail("give at most one of 'room' or 'corridor'")
    return room, corridor


def _add_enemy(args: dict, level: Dungeon, rules: DomainRules) -> str:
    room_ref, corridor_ref = _placement(args)
    health = args["health"]
    if health <= 0:
        raise _Fail(f"health must be positive, got {health}")
    enemy = Enemy(name=args["name"], description=args["description"],
                  species=args["species"], health=health)
    if room_ref is not None:
        room = _resolve_room(level, room_ref)
        _require_fresh_name(room, enemy.name, f"room '{room.name}'")
        if len(room.enemies) >= rules.max_enemies_per_room:
            raise _Fail(f"room '{room.name}' is full: it already holds "
                        f"{rules.max_enemies_per_room} enemies")
        room.enemies.append(enemy)
        return f"Added enemy '{enemy.name}' to room '{room.name}'."
    corr = _resolve_corridor(level, corridor_ref)
    _require_fresh_name(corr, enemy.name, f"corridor '{corr.id}'")
    cell = _place_in_corridor(corr, enemy, args.get("cell"))
    return f"Added enemy '{enemy.name}' to cell {cell} of corridor '{corr.id}'."


def _update_enemy(args: dict, level: Dungeon, rules: DomainRules) -> str:
    room, corridor = _scope(args)
    found = _locate(level, "enemy", args["ref"], room, corridor)
    enemy: Enemy = found.entity  # type: ignore[assignment]
    notes = []
    new_name = args.get("name")
    if new_name is not None and new_name != enemy.name:
        notes.append(f"renamed to '{new_name}'")
    old_name = enemy.name
    if new_name is not None:
        enemy.name = new_name
    if args.get("description") is not None:
        enemy.description = args["description"]
        notes.append("description")
    if args.get("species") is not None:
        enemy.species = args["species"]
        notes.append("species")
    health = args.get("health")
    if health is not None:
        if health <= 0:
            raise _Fail(f"health must be positive, got {health}")
        enemy.health = health
        notes.append("health")
    if not notes:
        raise _Fail("nothing to update: provide a new name, description, "
                    "species or health")
    return f"Updated enemy '{old_name}' in {found.label}: {', '.join(notes)}."


def _remove_enemy(args: dict, level: Dungeon, rules: DomainRules) -> str:
    room, corridor = _scope(args)
    found = _locate(level, "enemy", args["ref"], room, corridor)
    found.remove()
    return f"Removed enemy '{found.entity.name}' from {found.label}."


def _add_trap(args: dict, level: Dungeon, rules: DomainRules) -> str:
    damage = args["damage"]
    if damage < 0:
        raise _Fail(f"damage cannot be negative, got {damage}")
    corr = _resolve_corridor(level, args["corridor"])
    trap = Trap(name=args["name"], description=args["description"],
                effect=args["effect"], damage=damage)
    _require_fresh_name(corr, trap.name, f"corridor '{corr.id}'")
    cell = _place_in_corridor(corr, trap, args.get("cell"))
    return f"Added trap '{trap.name}' to cell {cell} of corridor '{corr.id}'."


def _update_trap(args: dict, level: Dungeon, rules: DomainRules) -> str:
    found = _locate(level, "trap", args["ref"], None, args.get("corridor"))
    trap: Trap = found.entity  # type: ignore[assignment]
    notes = []
    old_name = trap.name
    if args.get("name") is not None and args["name"] != trap.name:
        trap.name = args["name"]
        notes.append(f"renamed to '{trap.name}'")
    if args.get("description") is not None:
        trap.description = args["description"]
        notes.append("description")
    if args.get("effect") is not None:
        trap.effect = args["effect"]
        notes.append("effect")
    damage = args.get("damage")
    if damage is not None:
        if damage < 0:
            raise _Fail(f"damage cannot be negative, got {damage}")
        trap.damage = damage
        notes.append("damage")
    if not notes:
        raise _Fail("nothing to update: provide a new name, description, "
                    "effect or damage")
    return f"Updated trap '{old_name}' in {found.label}: {', '.join(notes)}."


def _remove_trap(args: dict, level: Dungeon, rules: DomainRules) -> str:
    found = _locate(level, "trap", args["ref"], None, args.get("corridor"))
    found.remove()
    return f"Removed trap '{found.entity.name}' from {found.label}."


def _add_treasure(args: dict, level: Dungeon, rules: DomainRules) -> str:
    room_ref, corridor_ref = _placement(args)
    treasure = Treasure(name=args["name"], description=args["description"],
                        loot=args["loot"])
    if room_ref is not None:
        room = _resolve_room(level, room_ref)
        _require_fresh_name(room, treasure.name, f"room '{room.name}'")
        if len(room.treasures) >= rules.max_treasures_per_room:
            cap = rules.max_treasures_per_room
            raise _Fail(f"room '{room.name}' is full: it already holds "
                        f"{cap} treasure{'s' if cap != 1 else ''}")
        room.treasures.append(treasure)
        return f"Added treasure '{treasure.name}' to room '{room.name}'."
    corr = _resolve_corridor(level, corridor_ref)
    _require_fresh_name(corr, treasure.name, f"corridor '{corr.id}'")
    cell = _place_in_corridor(corr, treasure, args.get("cell"))
    return f"Added treasure '{treasure.name}' to cell {cell} of corridor '{corr.id}'."


def _update_treasure(args: dict, level: Dungeon, rules: DomainRules) -> str:
    room, corridor = _scope(args)
    found = _locate(level, "treasure", args["ref"], room, corridor)
    treasure: Treasure = found.entity  # type: ignore[assignment]
    notes = []
    old_name = treasure.name
    if args.get("name") is not None and args["name"] != treasure.name:
        treasure.name = args["name"]
        notes.append(f"renamed to '{treasure.name}'")
    if args.get("description") is not None:
        treasure.description = args["description"]
        notes.append("description")
    if args.get("loot") is not None:
        treasure.loot = args["loot"]
        notes.append("loot")
    if not notes:
        raise _Fail("nothing to update: provide a new name, description or loot")
    return f"Updated treasure '{old_name}' in {found.label}: {', '.join(notes)}."


def _remove_treasure(args: dict, level: Dungeon, rules: DomainRules) -> str:
    room, corridor = _scope(args)
    found = _locate(level, "treasure", args["ref"], room, corridor)
    found.remove()
    return f"Removed treasure '{found.entity.name}' from {found.label}."


def _add_attack(args: dict, level: Dungeon, rules: DomainRules) -> str:
    damage = args["damage"]
    if damage < 0:
        raise _Fail(f"damage cannot be negative, got {damage}")
    found = _locate(level, "enemy", args["enemy"])
    enemy: Enemy = found.entity  # type: ignore[assignment]
    name = args["name"]
    if any(a.name == name for a in enemy.attacks):
        raise _Fail(f"enemy '{enemy.name}' already has an attack named '{name}'")
    enemy.attacks.append(Attack(name=name, description=args["description"],
                                damage=damage))
    return f"Added attack '{name}' to enemy '{enemy.name}'."


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


def _p(name: str, kind: str, required: bool, description: str) -> ParamSpec:
    return ParamSpec(name, kind, required, description)


_NAME_DESC = "what the new entity is called; must be unique within its room or corridor"
_ROOM_SCOPE = "room to search, only needed when the name is ambiguous"
_CORR_SCOPE = "corridor to search, only needed when the name is ambiguous"
_CELL_DESC = "1-based corridor cell to use; defaults to the first free cell"

_REGISTRY: tuple[ToolSpec, ...] = (
    ToolSpec(
        "add_room",
        "create a new room, linking it to an existing room once the level has any",
        "Create a new room. The first room stands alone; after that every new "
        "room must name an existing room to connect to, and a corridor between "
        "the two is created automatically. A room joins at most 4 corridors, "
        "holds at most 4 enemies and at most 1 treasure, and never contains traps.",
        (
            _p("name", TEXT, True, "what the room is called; room names are unique"),
            _p("description", TEXT, True, "flavour text describing the room"),
            _p("connect_to", ROOM_REF, False,
               "existing room to link the new room to; required once the level has rooms"),
            _p("direction", TEXT, False,
               "north, south, east or west; picks the connection slot, first free "
               "slot when omitted"),
        ),
    ),
    ToolSpec(
        "update_room",
        "rename a room or rewrite its description",
        "Rename an existing room and/or replace its description. Renaming keeps "
        "every corridor attached; the new name must not clash with another room.",
        (
            _p("ref", ROOM_REF, True, "current name of the room to change"),
            _p("name", TEXT, False, "new name for the room"),
            _p("description", TEXT, False, "new flavour text for the room"),
        ),
    ),
    ToolSpec(
        "remove_room",
        "delete a room and every corridor touching it",
        "Delete a room together with all corridors that touch it. The edit is "
        "rejected if the remaining rooms would no longer all be reachable.",
        (
            _p("ref", ROOM_REF, True, "name of the room to delete"),
        ),
    ),
    ToolSpec(
        "add_corridor",
        "connect two existing rooms with a corridor",
        "Create a corridor between two existing rooms. At most one corridor may "
        "join a given pair of rooms, a room joins at most 4 corridors, and a "
        "corridor is a row of cells each holding at most one enemy, trap or treasure.",
        (
            _p("from", ROOM_REF, True, "room at one end of the corridor"),
            _p("to", ROOM_REF, True, "room at the other end of the corridor"),
            _p("length", INTEGER, False, "number of cells, at least 1; defaults to 4"),
        ),
    ),
    ToolSpec(
        "update_corridor",
        "change the length of a corridor",
        "Resize an existing corridor. Growing adds empty cells at the far end; "
        "shrinking is rejected while the removed cells still hold anything.",
        (
            _p("ref", CORRIDOR_REF, True,
               "corridor to change, written as 'RoomA-RoomB'"),
            _p("length", INTEGER, False, "new number of cells, at least 1"),
        ),
    ),
    ToolSpec(
        "remove_corridor",
        "delete the corridor between two rooms",
        "Delete a corridor and everything in its cells. The edit is rejected if "
        "the rooms would no longer all be reachable afterwards.",
        (
            _p("ref", CORRIDOR_REF, True,
               "corridor to delete, written as 'RoomA-RoomB'"),
        ),
    ),
    ToolSpec(
        "add_enemy",
        "place a new enemy in a room or in a corridor cell",
        "Create a new enemy and place it either in a room (at most 4 enemies "
        "per room) or in a free corridor cell. New enemies start with no "
        "attacks; use add_attack to give them one.",
        (
            _p("name", TEXT, True, _NAME_DESC),
            _p("description", TEXT, True, "flavour text describing the enemy"),
            _p("species", TEXT, True, "what kind of creature this is, e.g. goblin"),
            _p("health", INTEGER, True, "hit points, a positive whole number"),
            _p("room", ROOM_REF, False, "room to place the enemy in"),
            _p("corridor", CORRIDOR_REF, False, "corridor to place the enemy in"),
            _p("cell", INTEGER, False, _CELL_DESC),
        ),
    ),
    ToolSpec(
        "update_enemy",
        "change an existing enemy's name, description, species or health",
        "Modify an existing enemy found by name anywhere in the level. Only the "
        "parameters you pass change; everything else is left alone.",
        (
            _p("ref", ENTITY_REF, True, "current name of the enemy to change"),
            _p("name", TEXT, False, "new name for the enemy"),
            _p("description", TEXT, False, "new flavour text for the enemy"),
            _p("species", TEXT, False, "new species for the enemy"),
            _p("health", INTEGER, False, "new hit points, a positive whole number"),
            _p("room", ROOM_REF, False, _ROOM_SCOPE),
            _p("corridor", CORRIDOR_REF, False, _CORR_SCOPE),
        ),
    ),
    ToolSpec(
        "remove_enemy",
        "delete an enemy from the level",
        "Delete an enemy found by name anywhere in the level, together with its attacks.",
        (
            _p("ref", ENTITY_REF, True, "name of the enemy to delete"),
            _p("room", ROOM_REF, False, _ROOM_SCOPE),
            _p("corridor", CORRIDOR_REF, False, _CORR_SCOPE),
        ),
    ),
    ToolSpec(
        "add_trap",
        "place a trap in a corridor cell",
        "Create a new trap in a free cell of a corridor. Traps only exist in "
        "corridors, never in rooms.",
        (
            _p("name", TEXT, True, _NAME_DESC),
            _p("description", TEXT, True, "flavour text describing the trap"),
            _p("effect", TEXT, True, "what the trap does when triggered"),
            _p("damage", NUMBER, True, "damage dealt when triggered, zero or more"),
            _p("corridor", CORRIDOR_REF, True, "corridor to place the trap in"),
            _p("cell", INTEGER, False, _CELL_DESC),
        ),
    ),
    ToolSpec(
        "update_trap",
        "change an existing trap's name, description, effect or damage",
        "Modify an existing trap found by name. Only the parameters you pass "
        "change; everything else is left alone.",
        (
            _p("ref", ENTITY_REF, True, "current name of the trap to change"),
            _p("name", TEXT, False, "new name for the trap"),
            _p("description", TEXT, False, "new flavour text for the trap"),
            _p("effect", TEXT, False, "new triggered effect for the trap"),
            _p("damage", NUMBER, False, "new damage dealt, zero or more"),
            _p("corridor", CORRIDOR_REF, False, _CORR_SCOPE),
        ),
    ),
    ToolSpec(
        "remove_trap",
        "delete a trap from its corridor",
        "Delete a trap found by name, leaving its corridor cell empty.",
        (
            _p("ref", ENTITY_REF, True, "name of the trap to delete"),
            _p("corridor", CORRIDOR_REF, False, _CORR_SCOPE),
        ),
    ),
    ToolSpec(
        "add_treasure",
        "place a treasure in a room or in a corridor cell",
        "Create a new treasure and place it either in a room (at most 1 treasure "
        "per room) or in a free corridor cell.",
        (
            _p("name", TEXT, True, _NAME_DESC),
            _p("description", TEXT, True, "flavour text describing the treasure"),
            _p("loot", TEXT, True, "what is inside, e.g. gold coins or a map piece"),
            _p("room", ROOM_REF, False, "room to place the treasure in"),
            _p("corridor", CORRIDOR_REF, False, "corridor to place the treasure in"),
            _p("cell", INTEGER, False, _CELL_DESC),
        ),
    ),
    ToolSpec(
        "update_treasure",
        "change an existing treasure's name, description or loot",
        "Modify an existing treasure found by name. Only the parameters you "
        "pass change; everything else is left alone.",
        (
            _p("ref", ENTITY_REF, True, "current name of the treasure to change"),
            _p("name", TEXT, False, "new name for the treasure"),
            _p("description", TEXT, False, "new flavour text for the treasure"),
            _p("loot", TEXT, False, "new contents for the treasure"),
            _p("room", ROOM_REF, False, _ROOM_SCOPE),
            _p("corridor", CORRIDOR_REF, False, _CORR_SCOPE),
        ),
    ),
    ToolSpec(
        "remove_treasure",
        "delete a treasure from the level",
        "Delete a treasure found by name anywhere in the level.",
        (
            _p("ref", ENTITY_REF, True, "name of the treasure to delete"),
            _p("room", ROOM_REF, False, _ROOM_SCOPE),
            _p("corridor", CORRIDOR_REF, False, _CORR_SCOPE),
        ),
    ),
    ToolSpec(
        "add_attack",
        "give an existing enemy a new attack",
        "Add an attack to an existing enemy. Attack names are unique per enemy "
        "and damage is zero or more.",
        (
            _p("enemy", ENTITY_REF, True, "name of the enemy receiving the attack"),
            _p("name", TEXT, True, "what the attack is called, unique per enemy"),
            _p("description", TEXT, True, "flavour text describing the attack"),
            _p("damage", NUMBER, True, "damage dealt by the attack, zero or more"),
        ),
    ),
)

_HANDLERS: dict[str, Callable[[dict, Dungeon, DomainRules], str]] = {
    "add_room": _add_room,
    "update_room": _update_room,
    "remove_room": _remove_room,
    "add_corridor": _add_corridor,
    "update_corridor": _update_corridor,
    "remove_corridor": _remove_corridor,
    "add_enemy": _add_enemy,
    "update_enemy": _update_enemy,
    "remove_enemy": _remove_enemy,
    "add_trap": _add_trap,
    "update_trap": _update_trap,
    "remove_trap": _remove_trap,
    "add_treasure": _add_treasure,
    "update_treasure": _update_treasure,
    "remove_treasure": _remove_treasure,
    "add_attack": _add_attack,
}


def registry() -> tuple[ToolSpec, ...]:
    """The full tool set, in its stable presentation order."""
    return _REGISTRY


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------


def _coerce_args(spec: ToolSpec, params: dict) -> dict:
    args: dict = {}
    missing: list[str] = []
    for p in spec.params:
        if p.name not in params or params[p.name] is None:
            if p.required:
                missing.append(p.name)
            continue
        value = params[p.name]
        if p.kind == INTEGER:
            try:
                if isinstance(value, bool):
                    raise ValueError
                if isinstance(value, float) and not value.is_integer():
                    raise ValueError
                args[p.name] = int(value)
            except (TypeError, ValueError):
                raise _Fail(f"parameter '{p.name}' must be an integer, got '{value}'")
        elif p.kind == NUMBER:
            try:
                if isinstance(value, bool):
                    raise ValueError
                args[p.name] = float(value)
            except (TypeError, ValueError):
                raise _Fail(f"parameter '{p.name}' must be a number, got '{value}'")
        else:
            text = str(value).strip()
            if not text:
                if p.required:
                    missing.append(p.name)
                continue
            args[p.name] = text
    if missing:
        raise _Fail("missing required parameter(s): " + ", ".join(missing))
    return args


def execute(name: str, params: dict, level: Dungeon, *,
            rules: DomainRules = DEFAULT_RULES,
            reg: tuple[ToolSpec, ...] | None = None) -> ToolOutcome:
    """Run one tool against a level.

    Never mutates ``level``. Functional problems (bad values, unknown
    references, violated caps) come back as ``ok=False`` with a message that
    names the offending parameter or constraint; only an unknown tool name
    raises, since by then intent detection should have filtered it.
    """
    spec = next((t for t in (reg or _REGISTRY) if t.name == name), None)
    if spec is None:
        raise UnknownToolError(name)
    try:
        args = _coerce_args(spec, params)
        work = level.clone()
        message = _HANDLERS[spec.name](args, work, rules)
    except _Fail as fail:
        return ToolOutcome(False, str(fail), None)
    report = validate_domain(work, rules)
    if not report.ok:
        return ToolOutcome(False, f"edit rejected: {report}", None)
    return ToolOutcome(True, message, work)


# ---------------------------------------------------------------------------
# Renderings
# ---------------------------------------------------------------------------


def render_intent_catalog(reg: tuple[ToolSpec, ...] | None = None) -> str:
    """One line per tool, no parameter details; what intent detection sees."""
    return "\n".join(f"{t.name}: {t.summary}" for t in (reg if reg is not None else _REGISTRY))


def render_parameter_prompt(tool: ToolSpec, level: Dungeon) -> str:
    """Everything the parameter-generation call needs for one tool."""
    lines = [f"Operation: {tool.name} — {tool.summary}.", "Parameters:"]
    for p in tool.params:
        need = "required" if p.required else "optional"
        lines.append(f"- {p.name} ({_KIND_LABEL[p.kind]}, {need}): {p.description}")
    lines.append("")
    lines.append("Current level:")
    lines.append(level_outline(level))
    lines.append("")
    lines.append("Reply with only a bulleted list, one line per parameter, like:")
    lines.append("- parameter: value")
    lines.append("Skip optional parameters you do not need.")
    return "\n".join(lines)


def render_json_schema(reg: tuple[ToolSpec, ...] | None = None) -> str:
    """Full function-calling schema for all tools, deterministic formatting."""
    functions = []
    for t in (reg if reg is not None else _REGISTRY):
        functions.append({
            "name": t.name,
            "description": t.description,
            "parameters": {
                "type": "object",
                "properties": {
                    p.name: {"type": _JSON_TYPE[p.kind], "description": p.description}
                    for p in t.params
                },
                "required": [p.name for p in t.params if p.required],
            },
        })
    return json.dumps(functions, indent=2)
