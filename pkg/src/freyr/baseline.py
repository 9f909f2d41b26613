"""Native function-calling baseline.

One model receives the full JSON schema of every tool and drives the edit
itself: returned tool calls are executed left to right, functional errors
and malformed calls are fed back as tool messages for a bounded number of
re-queries, and a final call turns the tool results into the user-facing
reply. Traces use the exact same shape as the modular pipeline so the two
modes can be compared field by field.
"""

from __future__ import annotations

import json
import logging
from importlib import resources
from string import Template

from freyr.backend import (
    MalformedToolCall,
    Message,
    TransportError,
)
from freyr.dungeon import DEFAULT_RULES, DomainRules, Dungeon, level_outline, to_dict
from freyr.pipeline import (
    Backends,
    HISTORY_WINDOW,
    Observer,
    PipelineAbort,
    PipelineConfig,
    PipelineTrace,
    IntentRecord,
    _emit,
    backend_for,
)
from freyr.tools import ToolSpec, UnknownToolError, execute, render_json_schema

logger = logging.getLogger(__name__)


def _asset(name: str) -> Template:
    return Template(resources.files("freyr").joinpath(f"prompts/{name}.txt").read_text())


def run_step_tools(cfg: PipelineConfig, reg: tuple[ToolSpec, ...],
                   conversation: list[Message], message: str, level: Dungeon, *,
                   backends: Backends = None, rules: DomainRules = DEFAULT_RULES,
                   on_event: Observer = None) -> tuple[str, Dungeon, PipelineTrace]:
    """Handle one user request with native tool calling.

    Uses the ``parameters`` role configuration (single-model mode). The
    schema rides along on every call. A round whose calls all fail counts
    against ``max_retries``; when retries run out the last functional error
    becomes the reply. A plain-text reply at any point ends the step.
    """
    trace = PipelineTrace(mode="tools")
    schema = render_json_schema(reg)
    rc = cfg.roles["parameters"]
    backend = backend_for(backends, "parameters")

    messages = [Message("system", _asset("tools_system").substitute())]
    messages += list(conversation[-HISTORY_WINDOW:])
    messages.append(Message("user", _asset("tools_user").substitute(
        level=level_outline(level), message=message)))

    current = level
    response: str | None = None
    failed_attempts = 0
    max_rounds = cfg.max_retries + 1

    for _round in range(max_rounds):
        try:
            result, usage = backend.complete_with_tools(rc, messages, schema)
        except MalformedToolCall as bad:
            trace.record("tools", messages, f"<{bad.code}>", bad.usage)
            error = (f"your tool call could not be used: {bad}; reply again with "
                     "tool calls whose arguments form a JSON object")
            trace.intent_records.append(
                IntentRecord(intent="<malformed>", ok=False, message=str(bad)))
            _emit(on_event, {"type": "tool_failed", "intent": "<malformed>",
                             "message": str(bad)})
            failed_attempts += 1
            trace.retry_rounds += 1
            if failed_attempts >= cfg.max_retries:
                trace.outputs.append(error)
                response = error
                break
            _emit(on_event, {"type": "retry", "attempt": failed_attempts,
                             "feedback": error})
            messages.append(Message("tool", error))
            continue
        except TransportError as exc:
            raise PipelineAbort(f"tools call failed: {exc}") from exc

        if isinstance(result, str):
            trace.record("tools", messages, result, usage)
            response = result
            break

        rendered = json.dumps([c.to_dict() for c in result])
        trace.record("tools", messages, rendered, usage)
        messages.append(Message("assistant", rendered))
        round_failures: list[str] = []
        for call in result:
            trace.intents.append(call.name)
            record = IntentRecord(intent=call.name)
            _emit(on_event, {"type": "tool_started", "intent": call.name,
                             "attempt": failed_attempts + 1})
            try:
                outcome = execute(call.name, call.arguments, current,
                                  rules=rules, reg=reg)
            except UnknownToolError:
                outcome = None
            if outcome is not None and outcome.ok:
                current = outcome.new_level
                record.ok = True
                record.message = outcome.message
                trace.outputs.append(outcome.message)
                messages.append(Message("tool", outcome.message))
                _emit(on_event, {"type": "tool_succeeded", "intent": call.name,
                                 "message": outcome.message,
                                 "level": to_dict(current)})
            else:
                error = (outcome.message if outcome is not None
                         else f"unknown tool '{call.name}'")
                record.message = error
                round_failures.append(error)
                messages.append(Message("tool", error))
                _emit(on_event, {"type": "tool_failed", "intent": call.name,
                                 "message": error})
            trace.intent_records.append(record)

        if round_failures:
            failed_attempts += 1
            trace.retry_rounds += 1
            if failed_attempts >= cfg.max_retries:
                trace.outputs.extend(round_failures)
                response = round_failures[-1]
                break
            _emit(on_event, {"type": "retry", "attempt": failed_attempts,
                             "feedback": round_failures[-1]})
        # On an all-success round we still loop: the next reply is either
        # more tool calls or the final user-facing text.

    if response is None:
        response = "; ".join(trace.outputs) if trace.outputs else ""
        logger.debug("tools mode ran out of rounds without a text reply")
    trace.response = response
    _emit(on_event, {"type": "summary_ready", "response": response})
    return response, current, trace
