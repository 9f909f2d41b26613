"""The modular tool-usage pipeline.

One user request is handled by up to four small model roles: ``intent``
picks the operations, ``parameters`` fills each one in (with a bounded
retry loop fed by functional errors), ``summary`` writes the reply, and
``chat`` answers requests that need no edit. All glue is plain code; the
roles never see each other's prompts.

Role prompts live as text assets under ``prompts/`` and are assembled with
deterministic rules, so prompt wording is tunable without touching code.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from string import Template
from typing import Callable, Mapping

from freyr.backend import (
    HttpBackend,
    Message,
    RoleConfig,
    TransportError,
    UsageRecord,
)
from freyr.dungeon import DEFAULT_RULES, DomainRules, Dungeon, level_outline, to_dict
from freyr.tools import (
    INTEGER,
    NUMBER,
    ToolSpec,
    execute,
    render_intent_catalog,
    render_parameter_prompt,
)

logger = logging.getLogger(__name__)

CONVERSATION = "conversation"

# How much of the conversation the prompts may see.
HISTORY_WINDOW = 10


@dataclass
class PipelineConfig:
    roles: dict[str, RoleConfig]
    max_retries: int = 3
    max_intents: int = 10

    def __post_init__(self) -> None:
        for role in ("intent", "parameters", "summary", "chat"):
            if role not in self.roles:
                raise ValueError(f"missing role config: {role}")
        if self.max_retries < 1:
            raise ValueError("max_retries must be at least 1")
        if self.max_intents < 1:
            raise ValueError("max_intents must be at least 1")


class PipelineAbort(RuntimeError):
    """A backend transport failure ended the step; nothing was committed."""


class IntentError(ValueError):
    """The intent reply could not be turned into a clean operation list."""


class UnknownIntent(IntentError):
    def __init__(self, token: str):
        super().__init__(f"'{token}' is not an available operation" if token
                         else "the reply named no operation")
        self.token = token


class TooManyIntents(IntentError):
    def __init__(self, count: int, limit: int):
        super().__init__(f"{count} operations requested, the limit is {limit}")
        self.count = count
        self.limit = limit


class ParamParseError(ValueError):
    """The parameter reply was unusable; the message doubles as feedback."""


class MissingParams(ParamParseError):
    def __init__(self, names: list[str]):
        super().__init__("missing required parameter(s): " + ", ".join(names))
        self.names = names


class BadValue(ParamParseError):
    def __init__(self, name: str, reason: str):
        super().__init__(f"invalid value for '{name}': {reason}")
        self.name = name
        self.reason = reason


_BULLETS = ("-", "*", "•")


def _strip_bullet(line: str) -> str:
    line = line.strip()
    for marker in _BULLETS:
        if line.startswith(marker):
            return line[len(marker):].strip()
    return line


def parse_intents(text: str, tool_names: list[str] | tuple[str, ...] | set[str],
                  max_intents: int = 10) -> list[str]:
    """Turn a free-form intent reply into an ordered list of tool names.

    Splits on commas and newlines, trims, lowercases and drops bullet
    markers. Duplicates are kept (they mean "run it twice"). A reply of
    exactly ``conversation`` returns the sentinel list ``["conversation"]``.
    """
    tokens: list[str] = []
    for line in text.splitlines():
        for part in line.split(","):
            token = _strip_bullet(part).strip().strip("`").lower()
            if token:
                tokens.append(token)
    if tokens == [CONVERSATION]:
        return [CONVERSATION]
    if len(tokens) > max_intents:
        raise TooManyIntents(len(tokens), max_intents)
    if not tokens:
        raise UnknownIntent("")
    known = set(tool_names)
    for token in tokens:
        if token not in known:
            raise UnknownIntent(token)
    return tokens


def _strip_decor(text: str) -> str:
    text = text.strip()
    for quote in ('"', "'", "`"):
        if len(text) >= 2 and text.startswith(quote) and text.endswith(quote):
            text = text[1:-1].strip()
    return text


def parse_params(text: str, tool: ToolSpec) -> tuple[dict, list[str]]:
    """Parse a ``- name: value`` bulleted reply for one tool.

    Returns the coerced parameter dict plus warnings for dropped lines and
    unknown names. Missing required parameters and uncoercible values raise
    ``ParamParseError`` subclasses whose messages are used verbatim as retry
    feedback.
    """
    specs = {p.name: p for p in tool.params}
    params: dict = {}
    warnings: list[str] = []
    for raw in text.splitlines():
        line = _strip_bullet(raw)
        if not line:
            continue
        if ":" not in line:
            warnings.append(f"ignored line without a colon: {line[:60]!r}")
            continue
        key, _, value = line.partition(":")
        key = _strip_decor(key.strip().strip("*")).lower()
        value = _strip_decor(value)
        if key not in specs:
            warnings.append(f"dropped unknown parameter '{key}'")
            continue
        if not value:
            continue
        spec = specs[key]
        if spec.kind == INTEGER:
            try:
                params[key] = int(value.replace(",", ""))
            except ValueError:
                raise BadValue(key, f"'{value}' is not an integer")
        elif spec.kind == NUMBER:
            try:
                params[key] = float(value.replace(",", ""))
            except ValueError:
                raise BadValue(key, f"'{value}' is not a number")
        else:
            params[key] = value
    missing = [p.name for p in tool.params if p.required and p.name not in params]
    if missing:
        raise MissingParams(missing)
    return params, warnings


# ---------------------------------------------------------------------------
# Prompt assembly
# ---------------------------------------------------------------------------

_templates: dict[str, Template] = {}


def _template(name: str) -> Template:
    if name not in _templates:
        text = resources.files("freyr").joinpath(f"prompts/{name}.txt").read_text()
        _templates[name] = Template(text)
    return _templates[name]


def _history_block(conversation: list[Message]) -> str:
    tail = conversation[-HISTORY_WINDOW:]
    if not tail:
        return ""
    lines = [f"{m.role}: {m.content}" for m in tail]
    return "Recent conversation:\n" + "\n".join(lines) + "\n"


def build_role_prompts(role: str, *, catalog: str = "", level: Dungeon | None = None,
                       conversation: list[Message] | None = None, message: str = "",
                       tool_prompt: str = "", feedback: str | None = None,
                       outputs: list[str] | None = None, note: str = "") -> list[Message]:
    """Assemble the system+user message pair for one role call."""
    conversation = conversation or []
    outline = level_outline(level) if level is not None else ""
    history = _history_block(conversation)
    if role == "intent":
        system = _template("intent_system").substitute(catalog=catalog)
        user = _template("intent_user").substitute(level=outline, history=history,
                                                   message=message)
    elif role == "parameters":
        feedback_block = ""
        if feedback:
            feedback_block = ("\nThe previous attempt failed with this error:\n"
                              f"{feedback}\n"
                              "Fix the parameters and reply with the corrected list.")
        system = _template("parameters_system").substitute()
        user = _template("parameters_user").substitute(
            history=history, message=message, tool_prompt=tool_prompt,
            feedback=feedback_block)
    elif role == "summary":
        listed = "\n".join(f"- {out}" for out in (outputs or [])) or "- (nothing ran)"
        system = _template("summary_system").substitute()
        user = _template("summary_user").substitute(outputs=listed, level=outline)
    elif role == "chat":
        system = _template("chat_system").substitute(level=outline, note=note)
        user = _template("chat_user").substitute(history=history, message=message)
    else:
        raise ValueError(f"unknown role '{role}'")
    return [Message("system", system), Message("user", user)]


# ---------------------------------------------------------------------------
# Trace
# ---------------------------------------------------------------------------


@dataclass
class RoleCall:
    role: str
    prompt_summary: str
    response: str
    usage: UsageRecord

    def to_dict(self) -> dict:
        return {"role": self.role, "prompt_summary": self.prompt_summary,
                "response": self.response, **self.usage.to_dict()}


@dataclass
class IntentRecord:
    intent: str
    retries: int = 0
    feedback: list[str] = field(default_factory=list)
    ok: bool = False
    message: str = ""

    def to_dict(self) -> dict:
        return {"intent": self.intent, "retries": self.retries,
                "feedback": list(self.feedback), "ok": self.ok,
                "message": self.message}


@dataclass
class PipelineTrace:
    """One step's full record; the same shape for both pipeline modes."""

    mode: str = "freyr"
    intents: list[str] = field(default_factory=list)
    conversation_fallback: bool = False
    calls: list[RoleCall] = field(default_factory=list)
    intent_records: list[IntentRecord] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    response: str = ""
    warnings: list[str] = field(default_factory=list)
    retry_rounds: int = 0
    total: UsageRecord = field(default_factory=UsageRecord)

    def record(self, role: str, messages: list[Message], response: str,
               usage: UsageRecord) -> None:
        user = next((m.content for m in reversed(messages) if m.role == "user"), "")
        summary = " ".join(user.split())[:160]
        self.calls.append(RoleCall(role, summary, response, usage))
        self.total = self.total + usage

    def calls_for_role(self, role: str) -> list[RoleCall]:
        return [c for c in self.calls if c.role == role]

    @property
    def total_retries(self) -> int:
        return self.retry_rounds + sum(r.retries for r in self.intent_records)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "intents": list(self.intents),
            "conversation_fallback": self.conversation_fallback,
            "calls": [c.to_dict() for c in self.calls],
            "intent_records": [r.to_dict() for r in self.intent_records],
            "outputs": list(self.outputs),
            "response": self.response,
            "warnings": list(self.warnings),
            "retries": self.total_retries,
            "total": self.total.to_dict(),
        }


Backends = Mapping[str, object] | object | None


def backend_for(backends: Backends, role: str):
    """Pick the backend serving a role; a bare backend serves every role."""
    if backends is None:
        return _shared_http
    if isinstance(backends, Mapping):
        return backends[role]
    return backends


_shared_http = HttpBackend()
Observer = Callable[[dict], None] | None


def _emit(on_event: Observer, event: dict) -> None:
    if on_event is not None:
        on_event(event)


def _call(backends: Backends, cfg: PipelineConfig, role: str,
          messages: list[Message], trace: PipelineTrace) -> str:
    rc = cfg.roles[role]
    backend = backend_for(backends, role)
    try:
        text, usage = backend.complete(rc, messages)
    except TransportError as exc:
        raise PipelineAbort(f"{role} call failed: {exc}") from exc
    trace.record(role, messages, text, usage)
    return text


def run_step(cfg: PipelineConfig, reg: tuple[ToolSpec, ...],
             conversation: list[Message], message: str, level: Dungeon, *,
             backends: Backends = None, rules: DomainRules = DEFAULT_RULES,
             on_event: Observer = None) -> tuple[str, Dungeon, PipelineTrace]:
    """Handle one user request end to end.

    Flow: detect intents; a lone ``conversation`` intent goes straight to
    one chat call; otherwise each intent gets parameters generated and
    executed with up to ``max_retries`` attempts, feeding the latest
    functional error back into the next parameter prompt; finally one
    summary call phrases the outcomes. Partial success is kept: a failed
    intent contributes its last error to the summary while other edits
    stand. Only transport failures abort (``PipelineAbort``).
    """
    trace = PipelineTrace(mode="freyr")
    names = [t.name for t in reg]
    catalog = render_intent_catalog(reg)

    intents: list[str] | None = None
    last_problem: IntentError | None = None
    for _attempt in range(cfg.max_retries):
        messages = build_role_prompts("intent", catalog=catalog, level=level,
                                      conversation=conversation, message=message)
        reply = _call(backends, cfg, "intent", messages, trace)
        try:
            intents = parse_intents(reply, names, cfg.max_intents)
            break
        except IntentError as problem:
            last_problem = problem
            trace.warnings.append(f"intent reply rejected: {problem}")
            logger.debug("intent reply rejected: %s", problem)

    if intents is None:
        # The intent role never produced a usable list; apologize in chat.
        trace.conversation_fallback = True
        note = ("\nYou could not work out which operations the designer wants; "
                "apologize briefly and ask them to rephrase the request.\n")
        messages = build_role_prompts("chat", level=level, conversation=conversation,
                                      message=message, note=note)
        response = _call(backends, cfg, "chat", messages, trace)
        trace.response = response
        _emit(on_event, {"type": "summary_ready", "response": response,
                         "fallback": str(last_problem)})
        return response, level, trace

    trace.intents = list(intents)
    _emit(on_event, {"type": "intent_detected", "intents": list(intents)})

    if intents == [CONVERSATION]:
        messages = build_role_prompts("chat", level=level, conversation=conversation,
                                      message=message)
        response = _call(backends, cfg, "chat", messages, trace)
        trace.response = response
        _emit(on_event, {"type": "summary_ready", "response": response})
        return response, level, trace

    current = level
    for intent in intents:
        record = IntentRecord(intent=intent)
        tool = next(t for t in reg if t.name == intent)
        feedback: str | None = None
        for attempt in range(1, cfg.max_retries + 1):
            _emit(on_event, {"type": "tool_started", "intent": intent,
                             "attempt": attempt})
            tool_prompt = render_parameter_prompt(tool, current)
            messages = build_role_prompts("parameters", conversation=conversation,
                                          message=message, tool_prompt=tool_prompt,
                                          feedback=feedback)
            reply = _call(backends, cfg, "parameters", messages, trace)
            try:
                params, warnings = parse_params(reply, tool)
                trace.warnings.extend(warnings)
                outcome = execute(intent, params, current, rules=rules, reg=reg)
            except ParamParseError as problem:
                outcome = None
                error = str(problem)
            else:
                error = outcome.message if not outcome.ok else ""
            if outcome is not None and outcome.ok:
                current = outcome.new_level
                record.ok = True
                record.message = outcome.message
                trace.outputs.append(outcome.message)
                _emit(on_event, {"type": "tool_succeeded", "intent": intent,
                                 "message": outcome.message,
                                 "level": to_dict(current)})
                break
            record.retries += 1
            record.feedback.append(error)
            feedback = error
            if attempt < cfg.max_retries:
                _emit(on_event, {"type": "retry", "intent": intent,
                                 "attempt": attempt, "feedback": error})
        if not record.ok:
            record.message = feedback or ""
            trace.outputs.append(record.message)
            _emit(on_event, {"type": "tool_failed", "intent": intent,
                             "message": record.message})
        trace.intent_records.append(record)

    messages = build_role_prompts("summary", outputs=trace.outputs, level=current)
    response = _call(backends, cfg, "summary", messages, trace)
    trace.response = response
    _emit(on_event, {"type": "summary_ready", "response": response})
    return response, current, trace
