"""Suite replay: run every step of a suite, repeatedly, and keep the raw
per-step records. Steps never terminate a run early — a failed step is
scored and the protocol moves on, each step starting from its own
predefined level. Failed steps still cost time and tokens and are counted
that way.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

from freyr.backend import Message
from freyr.baseline import run_step_tools
from freyr.dungeon import DEFAULT_RULES, DomainRules
from freyr.pipeline import PipelineConfig, run_step
from freyr.bench.stats import mean_interval
from freyr.bench.suite import TestSuite, check_step
from freyr.tools import ToolSpec, registry

logger = logging.getLogger(__name__)

MODES = ("freyr", "tools")

METRICS = ("steps_pct", "tokens_in", "tokens_out", "seconds")


@dataclass
class StepRecord:
    run: int
    step: int
    request: str
    success: bool
    domain_valid: bool
    design_valid: bool
    tokens_in: int
    tokens_out: int
    seconds: float
    retries: int

    def to_dict(self) -> dict:
        return {"run": self.run, "step": self.step, "request": self.request,
                "success": self.success, "domain_valid": self.domain_valid,
                "design_valid": self.design_valid, "tokens_in": self.tokens_in,
                "tokens_out": self.tokens_out, "seconds": self.seconds,
                "retries": self.retries}

    @staticmethod
    def from_dict(data: dict) -> "StepRecord":
        return StepRecord(**data)


class _Sink:
    """Append-only JSONL store so partial results survive an abort."""

    def __init__(self, path: Path | None):
        self.path = path
        self._lock = threading.Lock()
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text("")

    def append(self, record: StepRecord) -> None:
        if self.path is None:
            return
        with self._lock:
            with self.path.open("a") as fh:
                fh.write(json.dumps(record.to_dict()) + "\n")


@dataclass
class CaseResult:
    suite: str
    mode: str
    label: str
    runs: int
    steps_per_run: int
    records: list[StepRecord] = field(default_factory=list)

    def per_run(self, metric: str) -> list[float]:
        """One scalar per run: success percentage, or the per-step mean."""
        out = []
        for r in range(self.runs):
            rows = [rec for rec in self.records if rec.run == r]
            if not rows:
                continue
            if metric == "steps_pct":
                out.append(100.0 * sum(rec.success for rec in rows) / len(rows))
            elif metric == "tokens_in":
                out.append(sum(rec.tokens_in for rec in rows) / len(rows))
            elif metric == "tokens_out":
                out.append(sum(rec.tokens_out for rec in rows) / len(rows))
            elif metric == "seconds":
                out.append(sum(rec.seconds for rec in rows) / len(rows))
            else:
                raise KeyError(metric)
        return out

    def aggregates(self) -> dict:
        out = {}
        for metric in METRICS:
            per_run = self.per_run(metric)
            mean, half = mean_interval(per_run)
            out[metric] = {"per_run": per_run, "mean": mean,
                           "half_width_95": half}
        return out

    def to_dict(self) -> dict:
        return {"suite": self.suite, "mode": self.mode, "label": self.label,
                "runs": self.runs, "steps_per_run": self.steps_per_run,
                "records": [r.to_dict() for r in self.records],
                "aggregates": self.aggregates()}

    @staticmethod
    def from_dict(data: dict) -> "CaseResult":
        return CaseResult(
            suite=data["suite"], mode=data["mode"], label=data["label"],
            runs=data["runs"], steps_per_run=data["steps_per_run"],
            records=[StepRecord.from_dict(r) for r in data["records"]])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @staticmethod
    def load(path: str | Path) -> "CaseResult":
        return CaseResult.from_dict(json.loads(Path(path).read_text()))


def run_case(suite: TestSuite, mode: str, cfg: PipelineConfig, runs: int = 10, *,
             backend_factory=None, reg: tuple[ToolSpec, ...] | None = None,
             rules: DomainRules = DEFAULT_RULES, label: str = "",
             out_dir: str | Path | None = None) -> CaseResult:
    """Replay a suite ``runs`` times in one mode.

    ``backend_factory`` builds a fresh backend per run (a scripted backend
    must restart its queue each run); ``None`` means live HTTP. Raw records
    are appended to ``<out_dir>/raw_<suite>_<mode>.jsonl`` as they are
    produced, so an aborted session keeps what it measured.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got '{mode}'")
    reg = reg or registry()
    sink = _Sink(Path(out_dir) / f"raw_{suite.name.lower()}_{mode}.jsonl"
                 if out_dir else None)
    result = CaseResult(suite=suite.name, mode=mode, label=label or "unnamed",
                        runs=runs, steps_per_run=len(suite.steps))
    step_fn = run_step if mode == "freyr" else run_step_tools
    for run_idx in range(runs):
        backends = backend_factory() if backend_factory is not None else None
        conversation: list[Message] = []
        for step_idx, step in enumerate(suite.steps):
            level = step.start_level.clone()
            response, new_level, trace = step_fn(
                cfg, reg, conversation, step.request, level,
                backends=backends, rules=rules)
            verdict = check_step(step.start_level, new_level,
                                 step.design_check, rules)
            record = StepRecord(
                run=run_idx, step=step_idx, request=step.request,
                success=verdict.success, domain_valid=verdict.domain_valid,
                design_valid=verdict.design_valid,
                tokens_in=trace.total.tokens_in,
                tokens_out=trace.total.tokens_out,
                seconds=trace.total.wall_time,
                retries=trace.total_retries)
            result.records.append(record)
            sink.append(record)
            conversation.append(Message("user", step.request))
            conversation.append(Message("assistant", response))
        logger.info("run %d/%d done for %s/%s", run_idx + 1, runs,
                    suite.name, mode)
    return result
