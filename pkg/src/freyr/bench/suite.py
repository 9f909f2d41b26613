"""Benchmark suites: requests, per-step start levels and design checks.

A design check is a conjunction of small predicates over the structural
diff between the step's start level and the level the pipeline produced.
``no_other_changes`` closes the world: every diff entry must be claimed by
one of the other predicates. Domain validity (is the produced level legal
at all) is checked separately and does not depend on the suite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from freyr.dungeon import (
    DEFAULT_RULES,
    DomainRules,
    Dungeon,
    EditDiff,
    ParseError,
    diff,
    from_dict,
    to_dict,
    validate_domain,
)


class SuiteParseError(ValueError):
    """Suite file problems, pointing at the offending step."""


@dataclass(frozen=True)
class CountBound:
    exact: int | None = None
    at_least: int | None = None
    at_most: int | None = None

    def matches(self, n: int) -> bool:
        if self.exact is not None and n != self.exact:
            return False
        if self.at_least is not None and n < self.at_least:
            return False
        if self.at_most is not None and n > self.at_most:
            return False
        return True

    def to_json(self):
        if self.exact is not None:
            return self.exact
        out = {}
        if self.at_least is not None:
            out["min"] = self.at_least
        if self.at_most is not None:
            out["max"] = self.at_most
        return out

    @staticmethod
    def from_json(raw) -> "CountBound":
        if isinstance(raw, bool) or raw is None:
            raise SuiteParseError(f"bad count: {raw!r}")
        if isinstance(raw, int):
            return CountBound(exact=raw)
        if isinstance(raw, dict):
            return CountBound(at_least=raw.get("min"), at_most=raw.get("max"))
        raise SuiteParseError(f"bad count: {raw!r}")


@dataclass(frozen=True)
class Predicate:
    op: str  # added | removed | modified | no_other_changes
    kind: str = ""
    area: str = ""
    name: str | None = None
    fields: frozenset[str] | None = None
    count: CountBound = field(default_factory=CountBound)

    def _hits(self, entries) -> list:
        out = []
        for e in entries:
            if e.kind != self.kind or e.area != self.area:
                continue
            if self.name is not None and e.name != self.name:
                continue
            if self.fields is not None and e.fields != self.fields:
                continue
            out.append(e)
        return out

    def to_json(self) -> dict:
        if self.op == "no_other_changes":
            return {"no_other_changes": True}
        body: dict = {"kind": self.kind, "area": self.area}
        if self.op == "modified":
            if self.name is not None:
                body["name"] = self.name
            if self.fields is not None:
                body["fields"] = sorted(self.fields)
        else:
            body["count"] = self.count.to_json()
        return {self.op: body}


@dataclass(frozen=True)
class CheckExpr:
    """Conjunction of predicates; empty means "anything goes"."""

    predicates: tuple[Predicate, ...] = ()

    def evaluate(self, edit: EditDiff) -> bool:
        pools = {"added": edit.added, "removed": edit.removed,
                 "modified": edit.modified}
        claimed: set[int] = set()
        ok = True
        close_world = False
        for pred in self.predicates:
            if pred.op == "no_other_changes":
                close_world = True
                continue
            if pred.op == "modified":
                hits = pred._hits(edit.modified)
                if not hits:
                    ok = False
            else:
                hits = pred._hits(pools[pred.op])
                if not pred.count.matches(len(hits)):
                    ok = False
            claimed.update(id(e) for e in hits)
        if close_world:
            for _section, entry in edit.entries():
                if id(entry) not in claimed:
                    ok = False
        return ok

    def to_json(self) -> dict:
        return {"all": [p.to_json() for p in self.predicates]}

    @staticmethod
    def from_json(raw: dict) -> "CheckExpr":
        if not isinstance(raw, dict) or "all" not in raw:
            raise SuiteParseError("design_check must be {'all': [...]}")
        preds: list[Predicate] = []
        for item in raw["all"]:
            if not isinstance(item, dict) or len(item) != 1:
                raise SuiteParseError(f"bad predicate: {item!r}")
            op, body = next(iter(item.items()))
            if op == "no_other_changes":
                preds.append(Predicate(op="no_other_changes"))
            elif op in ("added", "removed"):
                preds.append(Predicate(
                    op=op, kind=body["kind"], area=body.get("area", ""),
                    count=CountBound.from_json(body.get("count", 1))))
            elif op == "modified":
                fields = body.get("fields")
                preds.append(Predicate(
                    op=op, kind=body["kind"], area=body.get("area", ""),
                    name=body.get("name"),
                    fields=frozenset(fields) if fields is not None else None))
            else:
                raise SuiteParseError(f"unknown predicate '{op}'")
        return CheckExpr(tuple(preds))


@dataclass
class StepSpec:
    request: str
    start_level: Dungeon
    design_check: CheckExpr

    def to_json(self) -> dict:
        return {"request": self.request,
                "start_level": to_dict(self.start_level),
                "design_check": self.design_check.to_json()}


@dataclass
class TestSuite:
    name: str
    steps: list[StepSpec]

    def to_json(self) -> dict:
        return {"name": self.name, "steps": [s.to_json() for s in self.steps]}


def load_suite(path: str | Path) -> TestSuite:
    """Load and validate a suite file; every start level must be legal."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SuiteParseError(f"cannot read suite: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SuiteParseError(f"suite is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "name" not in data or "steps" not in data:
        raise SuiteParseError("suite must be an object with 'name' and 'steps'")
    steps: list[StepSpec] = []
    for i, raw in enumerate(data["steps"]):
        where = f"step {i + 1}"
        if not isinstance(raw, dict) or "request" not in raw:
            raise SuiteParseError(f"{where}: missing 'request'")
        try:
            level = from_dict(raw["start_level"])
        except (KeyError, ParseError) as exc:
            raise SuiteParseError(f"{where}: bad start_level: {exc}") from exc
        report = validate_domain(level)
        if not report.ok:
            raise SuiteParseError(f"{where}: start_level is not a legal level: {report}")
        try:
            check = CheckExpr.from_json(raw.get("design_check", {"all": []}))
        except (KeyError, SuiteParseError) as exc:
            raise SuiteParseError(f"{where}: bad design_check: {exc}") from exc
        steps.append(StepSpec(request=str(raw["request"]), start_level=level,
                              design_check=check))
    if not steps:
        raise SuiteParseError("suite has no steps")
    return TestSuite(name=str(data["name"]), steps=steps)


@dataclass
class StepVerdict:
    domain_valid: bool
    design_valid: bool

    @property
    def success(self) -> bool:
        return self.domain_valid and self.design_valid


def check_step(before: Dungeon, after: Dungeon, check: CheckExpr,
               rules: DomainRules = DEFAULT_RULES) -> StepVerdict:
    """Judge one step: is the produced level legal, and was the edit the
    one the request asked for (per the design check over the diff)."""
    return StepVerdict(domain_valid=validate_domain(after, rules).ok,
                       design_valid=check.evaluate(diff(before, after)))


_BUNDLED = ("t1", "t2", "t3", "t4", "t5")


def bundled_suite_path(name: str) -> Path:
    """Path of a bundled suite by case name (``t1`` .. ``t5``)."""
    key = name.lower()
    if key not in _BUNDLED:
        raise KeyError(f"no bundled suite '{name}'")
    return Path(str(resources.files("freyr").joinpath(f"bench/suites/{key}.json")))


def bundled_script_path(name: str, mode: str = "freyr") -> Path:
    """Path of the perfect-run replay script for a bundled suite."""
    key = name.lower()
    if key not in _BUNDLED:
        raise KeyError(f"no bundled suite '{name}'")
    suffix = "" if mode == "freyr" else f"_{mode}"
    return Path(str(resources.files("freyr").joinpath(
        f"bench/suites/{key}_script{suffix}.json")))
