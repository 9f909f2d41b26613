"""Dungeon level model: rooms and corridors holding enemies, traps and treasures.

A level is treated as a value: editing code never mutates a level it was
given, it builds a copy (``Dungeon.clone``) and returns that. Structural
limits live in ``DomainRules`` so a stricter or looser game profile is one
constant away, and ``validate_domain`` reports every broken rule as data
instead of raising.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

# Violation codes reported by validate_domain.
DANGLING_CORRIDOR = "DANGLING_CORRIDOR"
SELF_CORRIDOR = "SELF_CORRIDOR"
DUPLICATE_CORRIDOR = "DUPLICATE_CORRIDOR"
ROOM_CONNECTION_CAP = "ROOM_CONNECTION_CAP"
ROOM_ENEMY_CAP = "ROOM_ENEMY_CAP"
ROOM_TREASURE_CAP = "ROOM_TREASURE_CAP"
DUPLICATE_ENTITY_NAME = "DUPLICATE_ENTITY_NAME"
DUPLICATE_ATTACK_NAME = "DUPLICATE_ATTACK_NAME"
EMPTY_NAME = "EMPTY_NAME"
BAD_HEALTH = "BAD_HEALTH"
BAD_DAMAGE = "BAD_DAMAGE"
BAD_CORRIDOR_LENGTH = "BAD_CORRIDOR_LENGTH"
CORRIDOR_CELL_MISMATCH = "CORRIDOR_CELL_MISMATCH"
AREA_KEY_MISMATCH = "AREA_KEY_MISMATCH"
DISCONNECTED = "DISCONNECTED"


@dataclass(frozen=True)
class DomainRules:
    """Structural caps; the defaults match the standard game profile."""

    max_enemies_per_room: int = 4
    max_treasures_per_room: int = 1
    max_room_connections: int = 4
    default_corridor_length: int = 4


DEFAULT_RULES = DomainRules()


@dataclass
class Attack:
    name: str
    description: str
    damage: float


@dataclass
class Enemy:
    name: str
    description: str
    species: str
    health: float
    attacks: list[Attack] = field(default_factory=list)


@dataclass
class Trap:
    name: str
    description: str
    effect: str
    damage: float


@dataclass
class Treasure:
    name: str
    description: str
    loot: str


# Anything that can occupy a corridor cell.
Encounter = Enemy | Trap | Treasure


@dataclass
class Room:
    name: str
    description: str
    enemies: list[Enemy] = field(default_factory=list)
    treasures: list[Treasure] = field(default_factory=list)


def corridor_id(room_a: str, room_b: str) -> str:
    return f"{room_a}-{room_b}"


@dataclass
class Corridor:
    from_room: str
    to_room: str
    length: int = DEFAULT_RULES.default_corridor_length
    cells: list[Encounter | None] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.cells is None:
            self.cells = [None] * self.length

    @property
    def id(self) -> str:
        return corridor_id(self.from_room, self.to_room)


@dataclass
class Dungeon:
    name: str = ""
    rooms: dict[str, Room] = field(default_factory=dict)
    corridors: dict[str, Corridor] = field(default_factory=dict)

    def clone(self) -> "Dungeon":
        return copy.deepcopy(self)


def kind_of(entity: Encounter) -> str:
    if isinstance(entity, Enemy):
        return "enemy"
    if isinstance(entity, Trap):
        return "trap"
    return "treasure"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def add(self, code: str, where: str, message: str) -> None:
        self.violations.append(Violation(code, where, message))

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(f"{v.code} at {v.where or 'level'}: {v.message}" for v in self.violations)


def _check_entity(report: ValidationReport, where: str, entity: Encounter) -> None:
    if not entity.name.strip():
        report.add(EMPTY_NAME, where, f"{kind_of(entity)} with empty name")
    if isinstance(entity, Enemy):
        if entity.health <= 0:
            report.add(BAD_HEALTH, where, f"enemy '{entity.name}' has health {entity.health}")
        seen = set()
        for atk in entity.attacks:
            if not atk.name.strip():
                report.add(EMPTY_NAME, where, f"attack of '{entity.name}' has empty name")
            if atk.name in seen:
                report.add(
                    DUPLICATE_ATTACK_NAME, where,
                    f"enemy '{entity.name}' has two attacks named '{atk.name}'")
            seen.add(atk.name)
            if atk.damage < 0:
                report.add(
                    BAD_DAMAGE, where,
                    f"attack '{atk.name}' of '{entity.name}' has damage {atk.damage}")
    elif isinstance(entity, Trap):
        if entity.damage < 0:
            report.add(BAD_DAMAGE, where, f"trap '{entity.name}' has damage {entity.damage}")


def _check_unique_names(report: ValidationReport, where: str, entities: list[Encounter]) -> None:
    seen: set[str] = set()
    for e in entities:
        if e.name in seen:
            report.add(DUPLICATE_ENTITY_NAME, where,
                       f"two entities named '{e.name}' in the same area")
        seen.add(e.name)


def validate_domain(level: Dungeon, rules: DomainRules = DEFAULT_RULES) -> ValidationReport:
    """Check every structural invariant; an empty report means a legal level."""
    report = ValidationReport()

    for key, room in level.rooms.items():
        where = f"room:{key}"
        if key != room.name:
            report.add(AREA_KEY_MISMATCH, where,
                       f"room stored under key '{key}' is named '{room.name}'")
        if not room.name.strip():
            report.add(EMPTY_NAME, where, "room with empty name")
        if len(room.enemies) > rules.max_enemies_per_room:
            report.add(ROOM_ENEMY_CAP, where,
                       f"room '{room.name}' holds {len(room.enemies)} enemies "
                       f"(cap {rules.max_enemies_per_room})")
        if len(room.treasures) > rules.max_treasures_per_room:
            report.add(ROOM_TREASURE_CAP, where,
                       f"room '{room.name}' holds {len(room.treasures)} treasures "
                       f"(cap {rules.max_treasures_per_room})")
        contents: list[Encounter] = [*room.enemies, *room.treasures]
        _check_unique_names(report, where, contents)
        for e in contents:
            _check_entity(report, where, e)

    seen_pairs: set[frozenset[str]] = set()
    connections: dict[str, int] = {name: 0 for name in level.rooms}
    for key, corr in level.corridors.items():
        where = f"corridor:{key}"
        if key != corr.id:
            report.add(AREA_KEY_MISMATCH, where,
                       f"corridor stored under key '{key}' joins "
                       f"'{corr.from_room}' and '{corr.to_room}'")
        for end in (corr.from_room, corr.to_room):
            if end in connections:
                connections[end] += 1
            else:
                report.add(DANGLING_CORRIDOR, where, f"endpoint '{end}' is not a room")
        if corr.from_room == corr.to_room:
            report.add(SELF_CORRIDOR, where,
                       f"corridor connects '{corr.from_room}' to itself")
        pair = frozenset((corr.from_room, corr.to_room))
        if pair in seen_pairs and len(pair) == 2:
            report.add(DUPLICATE_CORRIDOR, where,
                       f"second corridor between '{corr.from_room}' and '{corr.to_room}'")
        seen_pairs.add(pair)
        if corr.length < 1:
            report.add(BAD_CORRIDOR_LENGTH, where, f"length {corr.length} is below 1")
        if len(corr.cells) != corr.length:
            report.add(CORRIDOR_CELL_MISMATCH, where,
                       f"{len(corr.cells)} cells for length {corr.length}")
        occupied = [c for c in corr.cells if c is not None]
        _check_unique_names(report, where, occupied)
        for e in occupied:
            _check_entity(report, where, e)

    for name, count in connections.items():
        if count > rules.max_room_connections:
            report.add(ROOM_CONNECTION_CAP, f"room:{name}",
                       f"room '{name}' joins {count} corridors "
                       f"(cap {rules.max_room_connections})")

    if level.rooms:
        start = next(iter(level.rooms))
        reachable = {start}
        frontier = [start]
        while frontier:
            here = frontier.pop()
            for corr in level.corridors.values():
                for a, b in ((corr.from_room, corr.to_room), (corr.to_room, corr.from_room)):
                    if a == here and b in level.rooms and b not in reachable:
                        reachable.add(b)
                        frontier.append(b)
        stranded = sorted(set(level.rooms) - reachable)
        if stranded:
            report.add(DISCONNECTED, "level",
                       f"unreachable room(s): {', '.join(stranded)}")

    return report


# ---------------------------------------------------------------------------
# Structural diff
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiffEntry:
    area: str  # "" for the level itself, else "room:<name>" or "corridor:<id>"
    kind: str  # dungeon | room | corridor | enemy | trap | treasure
    name: str
    fields: frozenset[str] = frozenset()

    def describe(self) -> str:
        place = f" in {self.area}" if self.area else ""
        suffix = f" ({', '.join(sorted(self.fields))})" if self.fields else ""
        return f"{self.kind} '{self.name}'{place}{suffix}"


@dataclass
class EditDiff:
    added: list[DiffEntry] = field(default_factory=list)
    removed: list[DiffEntry] = field(default_factory=list)
    modified: list[DiffEntry] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.modified)

    def entries(self) -> list[tuple[str, DiffEntry]]:
        return ([("added", e) for e in self.added]
                + [("removed", e) for e in self.removed]
                + [("modified", e) for e in self.modified])


def _entity_fields(a: Encounter, b: Encounter) -> set[str]:
    changed: set[str] = set()
    if a.description != b.description:
        changed.add("description")
    if isinstance(a, Enemy):
        if a.species != b.species:
            changed.add("species")
        if a.health != b.health:
            changed.add("health")
        if a.attacks != b.attacks:
            changed.add("attacks")
    elif isinstance(a, Trap):
        if a.effect != b.effect:
            changed.add("effect")
        if a.damage != b.damage:
            changed.add("damage")
    else:
        if a.loot != b.loot:
            changed.add("loot")
    return changed


def _index_area(entities: list[tuple[Encounter, int | None]]) -> dict[tuple[str, str], tuple[Encounter, int | None]]:
    # Entities are identified by (kind, name) within their area; the int is
    # the cell index for corridor contents, None for room contents.
    out: dict[tuple[str, str], tuple[Encounter, int | None]] = {}
    for entity, pos in entities:
        out[(kind_of(entity), entity.name)] = (entity, pos)
    return out


def _room_contents(room: Room) -> list[tuple[Encounter, int | None]]:
    return [(e, None) for e in [*room.enemies, *room.treasures]]


def _corridor_contents(corr: Corridor) -> list[tuple[Encounter, int | None]]:
    return [(c, i) for i, c in enumerate(corr.cells) if c is not None]


def _diff_area(diff: EditDiff, area: str,
               before: list[tuple[Encounter, int | None]],
               after: list[tuple[Encounter, int | None]]) -> None:
    old = _index_area(before)
    new = _index_area(after)
    for key in old:
        if key not in new:
            diff.removed.append(DiffEntry(area, key[0], key[1]))
    for key, (entity, pos) in new.items():
        if key not in old:
            diff.added.append(DiffEntry(area, key[0], key[1]))
            continue
        old_entity, old_pos = old[key]
        fields = _entity_fields(old_entity, entity)
        if pos != old_pos:
            fields.add("cell")
        if fields:
            diff.modified.append(DiffEntry(area, key[0], key[1], frozenset(fields)))


def diff(before: Dungeon, after: Dungeon) -> EditDiff:
    """Structural difference between two levels.

    Entities are paired by name within their area, so a rename shows up as a
    removal plus an addition. Corridor contents also track which cell an
    entity occupies (reported as a ``cell`` field change).
    """
    out = EditDiff()
    if before.name != after.name:
        out.modified.append(DiffEntry("", "dungeon", after.name, frozenset({"name"})))

    for name in before.rooms:
        if name not in after.rooms:
            out.removed.append(DiffEntry("", "room", name))
    for name, room in after.rooms.items():
        if name not in before.rooms:
            out.added.append(DiffEntry("", "room", name))
            continue
        old = before.rooms[name]
        if old.description != room.description:
            out.modified.append(DiffEntry("", "room", name, frozenset({"description"})))
        _diff_area(out, f"room:{name}", _room_contents(old), _room_contents(room))

    for key in before.corridors:
        if key not in after.corridors:
            out.removed.append(DiffEntry("", "corridor", key))
    for key, corr in after.corridors.items():
        if key not in before.corridors:
            out.added.append(DiffEntry("", "corridor", key))
            continue
        old = before.corridors[key]
        if old.length != corr.length:
            out.modified.append(DiffEntry("", "corridor", key, frozenset({"length"})))
        _diff_area(out, f"corridor:{key}", _corridor_contents(old), _corridor_contents(corr))

    return out


def _find_in_area(level: Dungeon, area: str, kind: str, name: str) -> Encounter | None:
    if area.startswith("room:"):
        room = level.rooms.get(area[5:])
        pool = _room_contents(room) if room else []
    elif area.startswith("corridor:"):
        corr = level.corridors.get(area[9:])
        pool = _corridor_contents(corr) if corr else []
    else:
        return None
    for entity, _pos in pool:
        if kind_of(entity) == kind and entity.name == name:
            return entity
    return None


def _remove_from_area(level: Dungeon, area: str, kind: str, name: str) -> None:
    if area.startswith("room:"):
        room = level.rooms.get(area[5:])
        if room is None:
            return
        room.enemies = [e for e in room.enemies if not (kind == "enemy" and e.name == name)]
        room.treasures = [t for t in room.treasures if not (kind == "treasure" and t.name == name)]
    elif area.startswith("corridor:"):
        corr = level.corridors.get(area[9:])
        if corr is None:
            return
        for i, cell in enumerate(corr.cells):
            if cell is not None and kind_of(cell) == kind and cell.name == name:
                corr.cells[i] = None


def _place_in_area(target: Dungeon, source: Dungeon, area: str, kind: str, name: str) -> None:
    entity = _find_in_area(source, area, kind, name)
    if entity is None:
        return
    entity = copy.deepcopy(entity)
    if area.startswith("room:"):
        room = target.rooms.get(area[5:])
        if room is None:
            return
        if isinstance(entity, Enemy):
            room.enemies.append(entity)
        elif isinstance(entity, Treasure):
            room.treasures.append(entity)
    elif area.startswith("corridor:"):
        corr = target.corridors.get(area[9:])
        src = source.corridors.get(area[9:])
        if corr is None or src is None:
            return
        for i, cell in enumerate(src.cells):
            if cell is not None and kind_of(cell) == kind and cell.name == name:
                while len(corr.cells) <= i:
                    corr.cells.append(None)
                corr.cells[i] = entity
                return


def apply_diff(before: Dungeon, after: Dungeon, edit: EditDiff) -> Dungeon:
    """Replay ``edit`` onto ``before``, copying values from ``after``.

    The diff entries carry names and changed fields but not values, so the
    replay pulls each named entity or field out of ``after``. If the diff is
    complete this reproduces ``after`` (up to entity ordering, which carries
    no meaning).
    """
    work = before.clone()

    for entry in edit.modified:
        if entry.kind == "dungeon":
            work.name = after.name

    for entry in edit.removed:
        if entry.area == "":
            if entry.kind == "room":
                work.rooms.pop(entry.name, None)
            elif entry.kind == "corridor":
                work.corridors.pop(entry.name, None)
    for entry in edit.added:
        if entry.area == "":
            if entry.kind == "room":
                room = after.rooms.get(entry.name)
                if room is not None:
                    work.rooms[entry.name] = copy.deepcopy(room)
            elif entry.kind == "corridor":
                corr = after.corridors.get(entry.name)
                if corr is not None:
                    work.corridors[entry.name] = copy.deepcopy(corr)
    for entry in edit.modified:
        if entry.area == "" and entry.kind == "room":
            src = after.rooms.get(entry.name)
            dst = work.rooms.get(entry.name)
            if src is not None and dst is not None and "description" in entry.fields:
                dst.description = src.description
        elif entry.area == "" and entry.kind == "corridor":
            src = after.corridors.get(entry.name)
            dst = work.corridors.get(entry.name)
            if src is not None and dst is not None and "length" in entry.fields:
                dst.length = src.length
                while len(dst.cells) < dst.length:
                    dst.cells.append(None)
                del dst.cells[dst.length:]

    # Area contents: clear out every mentioned entity, then re-place the
    # surviving version from `after`.
    for entry in edit.removed + edit.modified:
        if entry.area:
            _remove_from_area(work, entry.area, entry.kind, entry.name)
    for entry in edit.modified + edit.added:
        if entry.area:
            _place_in_area(work, after, entry.area, entry.kind, entry.name)

    return work


def _canon(level: Dungeon) -> Dungeon:
    out = level.clone()
    for room in out.rooms.values():
        room.enemies.sort(key=lambda e: e.name)
        room.treasures.sort(key=lambda t: t.name)
        for enemy in room.enemies:
            enemy.attacks.sort(key=lambda a: a.name)
    for corr in out.corridors.values():
        for cell in corr.cells:
            if isinstance(cell, Enemy):
                cell.attacks.sort(key=lambda a: a.name)
    return out


def structurally_equal(a: Dungeon, b: Dungeon) -> bool:
    """Equality at entity-name and field granularity (list order ignored)."""
    return _canon(a) == _canon(b)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


class ParseError(ValueError):
    """Raised for input that does not follow the documented level layout."""

    code = "PARSE_ERROR"

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def _attack_dict(a: Attack) -> dict:
    return {"name": a.name, "description": a.description, "damage": a.damage}


def _enemy_dict(e: Enemy) -> dict:
    return {"name": e.name, "description": e.description, "species": e.species,
            "health": e.health, "attacks": [_attack_dict(a) for a in e.attacks]}


def _trap_dict(t: Trap) -> dict:
    return {"name": t.name, "description": t.description, "effect": t.effect,
            "damage": t.damage}


def _treasure_dict(t: Treasure) -> dict:
    return {"name": t.name, "description": t.description, "loot": t.loot}


def _cell_dict(cell: Encounter | None) -> dict | None:
    if cell is None:
        return None
    if isinstance(cell, Enemy):
        return {"kind": "enemy", **_enemy_dict(cell)}
    if isinstance(cell, Trap):
        return {"kind": "trap", **_trap_dict(cell)}
    return {"kind": "treasure", **_treasure_dict(cell)}


def to_dict(level: Dungeon) -> dict:
    return {
        "name": level.name,
        "rooms": [
            {"name": r.name, "description": r.description,
             "enemies": [_enemy_dict(e) for e in r.enemies],
             "treasures": [_treasure_dict(t) for t in r.treasures]}
            for r in level.rooms.values()
        ],
        "corridors": [
            {"from": c.from_room, "to": c.to_room, "length": c.length,
             "cells": [_cell_dict(cell) for cell in c.cells]}
            for c in level.corridors.values()
        ],
    }


def serialize(level: Dungeon) -> str:
    return json.dumps(to_dict(level), indent=2)


def _need(obj: dict, key: str, types, where: str):
    if not isinstance(obj, dict):
        raise ParseError("expected an object", where)
    if key not in obj:
        raise ParseError(f"missing field '{key}'", where)
    value = obj[key]
    if not isinstance(value, types) or (isinstance(value, bool) and types is not bool):
        raise ParseError(f"field '{key}' has the wrong type", where)
    return value


_NUM = (int, float)


def _attack_from(obj: dict, where: str) -> Attack:
    return Attack(name=_need(obj, "name", str, where),
                  description=_need(obj, "description", str, where),
                  damage=_need(obj, "damage", _NUM, where))


def _enemy_from(obj: dict, where: str) -> Enemy:
    attacks = obj.get("attacks", [])
    if not isinstance(attacks, list):
        raise ParseError("field 'attacks' must be a list", where)
    return Enemy(name=_need(obj, "name", str, where),
                 description=_need(obj, "description", str, where),
                 species=_need(obj, "species", str, where),
                 health=_need(obj, "health", _NUM, where),
                 attacks=[_attack_from(a, f"{where}.attacks[{i}]")
                          for i, a in enumerate(attacks)])


def _trap_from(obj: dict, where: str) -> Trap:
    return Trap(name=_need(obj, "name", str, where),
                description=_need(obj, "description", str, where),
                effect=_need(obj, "effect", str, where),
                damage=_need(obj, "damage", _NUM, where))


def _treasure_from(obj: dict, where: str) -> Treasure:
    return Treasure(name=_need(obj, "name", str, where),
                    description=_need(obj, "description", str, where),
                    loot=_need(obj, "loot", str, where))


def _cell_from(obj, where: str) -> Encounter | None:
    if obj is None:
        return None
    kind = _need(obj, "kind", str, where)
    if kind == "enemy":
        return _enemy_from(obj, where)
    if kind == "trap":
        return _trap_from(obj, where)
    if kind == "treasure":
        return _treasure_from(obj, where)
    raise ParseError(f"unknown cell kind '{kind}'", where)


def from_dict(data: dict) -> Dungeon:
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", "")
    level = Dungeon(name=_need(data, "name", str, ""))
    rooms = _need(data, "rooms", list, "")
    for i, obj in enumerate(rooms):
        where = f"rooms[{i}]"
        enemies = obj.get("enemies", []) if isinstance(obj, dict) else []
        treasures = obj.get("treasures", []) if isinstance(obj, dict) else []
        if not isinstance(enemies, list):
            raise ParseError("field 'enemies' must be a list", where)
        if not isinstance(treasures, list):
            raise ParseError("field 'treasures' must be a list", where)
        room = Room(name=_need(obj, "name", str, where),
                    description=_need(obj, "description", str, where),
                    enemies=[_enemy_from(e, f"{where}.enemies[{j}]")
                             for j, e in enumerate(enemies)],
                    treasures=[_treasure_from(t, f"{where}.treasures[{j}]")
                               for j, t in enumerate(treasures)])
        if room.name in level.rooms:
            raise ParseError(f"duplicate room name '{room.name}'", where)
        level.rooms[room.name] = room
    corridors = _need(data, "corridors", list, "")
    for i, obj in enumerate(corridors):
        where = f"corridors[{i}]"
        cells = _need(obj, "cells", list, where)
        corr = Corridor(from_room=_need(obj, "from", str, where),
                        to_room=_need(obj, "to", str, where),
                        length=_need(obj, "length", int, where),
                        cells=[_cell_from(c, f"{where}.cells[{j}]")
                               for j, c in enumerate(cells)])
        if corr.id in level.corridors:
            raise ParseError(f"duplicate corridor '{corr.id}'", where)
        level.corridors[corr.id] = corr
    return level


def deserialize(text: str) -> Dungeon:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from exc
    return from_dict(data)


# ---------------------------------------------------------------------------
# Compact text rendering for prompts
# ---------------------------------------------------------------------------


def _cell_label(cell: Encounter | None) -> str:
    return "empty" if cell is None else f"{kind_of(cell)} '{cell.name}'"


def level_outline(level: Dungeon) -> str:
    """Short, name-oriented rendering used inside role prompts."""
    if not level.rooms:
        return "The level is empty: no rooms yet."
    lines = [f"Level '{level.name}'" if level.name else "Level:"]
    for room in level.rooms.values():
        bits = []
        if room.enemies:
            bits.append("enemies: " + ", ".join(e.name for e in room.enemies))
        if room.treasures:
            bits.append("treasures: " + ", ".join(t.name for t in room.treasures))
        detail = "; ".join(bits) if bits else "empty"
        lines.append(f"- Room '{room.name}': {detail}")
    for corr in level.corridors.values():
        occupied = [(i + 1, c) for i, c in enumerate(corr.cells) if c is not None]
        if occupied:
            detail = ", ".join(f"cell {i}: {_cell_label(c)}" for i, c in occupied)
        else:
            detail = "all cells empty"
        lines.append(f"- Corridor '{corr.id}' ({corr.length} cells): {detail}")
    return "\n".join(lines)
