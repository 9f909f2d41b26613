"""Independent re-implementations used as ground truth in tests.

These deliberately use different algorithms from the package (union-find
instead of search for connectivity, full sign enumeration instead of the
subset-sum table for the Wilcoxon null) so a shared bug cannot hide.
"""

from __future__ import annotations

from itertools import product

from freyr.dungeon import DomainRules, Dungeon, Enemy, Trap


def _entity_ok(entity) -> bool:
    if not entity.name.strip():
        return False
    if isinstance(entity, Enemy):
        if entity.health <= 0:
            return False
        names = [a.name for a in entity.attacks]
        if len(names) != len(set(names)):
            return False
        if any(not a.name.strip() for a in entity.attacks):
            return False
        if any(a.damage < 0 for a in entity.attacks):
            return False
    if isinstance(entity, Trap) and entity.damage < 0:
        return False
    return True


def brute_force_valid(level: Dungeon, rules: DomainRules = DomainRules()) -> bool:
    """Re-check every structural invariant from scratch; True iff legal."""
    for key, room in level.rooms.items():
        if key != room.name or not room.name.strip():
            return False
        if len(room.enemies) > rules.max_enemies_per_room:
            return False
        if len(room.treasures) > rules.max_treasures_per_room:
            return False
        contents = [*room.enemies, *room.treasures]
        names = [e.name for e in contents]
        if len(names) != len(set(names)):
            return False
        if not all(_entity_ok(e) for e in contents):
            return False

    pairs = []
    degree = {name: 0 for name in level.rooms}
    for key, corr in level.corridors.items():
        if key != corr.id:
            return False
        if corr.from_room == corr.to_room:
            return False
        for end in (corr.from_room, corr.to_room):
            if end not in level.rooms:
                return False
            degree[end] += 1
        pair = frozenset((corr.from_room, corr.to_room))
        if pair in pairs:
            return False
        pairs.append(pair)
        if corr.length < 1 or len(corr.cells) != corr.length:
            return False
        occupied = [c for c in corr.cells if c is not None]
        names = [e.name for e in occupied]
        if len(names) != len(set(names)):
            return False
        if not all(_entity_ok(e) for e in occupied):
            return False
    if any(count > rules.max_room_connections for count in degree.values()):
        return False

    # Connectivity by union-find over corridor endpoints.
    parent = {name: name for name in level.rooms}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for corr in level.corridors.values():
        parent[find(corr.from_room)] = find(corr.to_room)
    roots = {find(name) for name in level.rooms}
    return len(roots) <= 1


def _midranks(values: list[float]) -> list[float]:
    ranks = [0.0] * len(values)
    pairs = sorted(range(len(values)), key=lambda i: values[i])
    i = 0
    while i < len(pairs):
        j = i
        while j + 1 < len(pairs) and values[pairs[j + 1]] == values[pairs[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[pairs[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def enumerate_wilcoxon(x, y) -> float:
    """Two-sided exact Wilcoxon p by brute-force sign enumeration."""
    diffs = [float(a) - float(b) for a, b in zip(x, y)]
    diffs = [d for d in diffs if d != 0]
    n = len(diffs)
    if n == 0:
        return 1.0
    ranks = _midranks([abs(d) for d in diffs])
    w_plus = sum(r for d, r in zip(diffs, ranks) if d > 0)
    total = sum(ranks)
    lo, hi = min(w_plus, total - w_plus), max(w_plus, total - w_plus)
    eps = 1e-9
    count = 0
    for signs in product((0, 1), repeat=n):
        w = sum(r for s, r in zip(signs, ranks) if s)
        if w <= lo + eps or w >= hi - eps:
            count += 1
    return min(1.0, count / 2 ** n)
