"""Chat-completion backends and usage accounting.

Two interchangeable backends: an HTTP client speaking the Ollama chat API,
and a scripted backend that replays canned responses FIFO for deterministic
tests and demos. Both expose ``complete`` (plain text) and
``complete_with_tools`` (text or parsed tool calls) and return a
``UsageRecord`` per call.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field

import requests

DEFAULT_ENDPOINT = os.environ.get("FREYR_ENDPOINT", "http://localhost:11434")

ROLES = ("intent", "parameters", "summary", "chat")


@dataclass
class Message:
    role: str  # system | user | assistant | tool
    content: str

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content}


@dataclass(frozen=True)
class GenerationOptions:
    model: str
    temperature: float = 0.8
    top_p: float = 0.6

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if not 0 < self.top_p <= 1:
            raise ValueError(f"top_p must be in (0, 1], got {self.top_p}")


@dataclass(frozen=True)
class RoleConfig:
    role: str
    options: GenerationOptions
    endpoint: str = DEFAULT_ENDPOINT


@dataclass
class UsageRecord:
    tokens_in: int = 0
    tokens_out: int = 0
    wall_time: float = 0.0

    def __post_init__(self) -> None:
        if self.tokens_in < 0 or self.tokens_out < 0 or self.wall_time < 0:
            raise ValueError("usage numbers cannot be negative")

    def __add__(self, other: "UsageRecord") -> "UsageRecord":
        return UsageRecord(self.tokens_in + other.tokens_in,
                           self.tokens_out + other.tokens_out,
                           self.wall_time + other.wall_time)

    def to_dict(self) -> dict:
        return {"tokens_in": self.tokens_in, "tokens_out": self.tokens_out,
                "wall_time": self.wall_time}


@dataclass
class ToolCall:
    name: str
    arguments: dict

    def to_dict(self) -> dict:
        return {"name": self.name, "arguments": self.arguments}


class TransportError(RuntimeError):
    """Base for failures that abort a pipeline step outright."""

    code = "TRANSPORT"


class BackendUnreachable(TransportError):
    code = "BACKEND_UNREACHABLE"


class BackendError(TransportError):
    code = "BACKEND_ERROR"

    def __init__(self, status: int, body: str):
        super().__init__(f"backend returned HTTP {status}: {body[:200]}")
        self.status = status
        self.body = body


class ScriptExhausted(TransportError):
    code = "SCRIPT_EXHAUSTED"


class MalformedToolCall(Exception):
    """The model's tool call could not be parsed; carries the usage anyway."""

    code = "MALFORMED_TOOL_CALL"

    def __init__(self, detail: str, usage: UsageRecord, raw=None):
        super().__init__(detail)
        self.usage = usage
        self.raw = raw


def count_tokens(text: str) -> int:
    """Approximate token count: whitespace words times 4/3, rounded up.

    Used whenever a backend does not report real counts, so that both
    pipeline modes are measured with the same yardstick.
    """
    words = len(text.split())
    return -(-words * 4 // 3)


def _messages_text(messages: list[Message]) -> str:
    return "\n".join(m.content for m in messages)


def _parse_tool_calls(message: dict, usage: UsageRecord) -> list[ToolCall]:
    calls = []
    for raw in message.get("tool_calls") or []:
        fn = raw.get("function", raw) if isinstance(raw, dict) else None
        if not isinstance(fn, dict):
            raise MalformedToolCall("tool call is not an object", usage, raw)
        name = fn.get("name")
        arguments = fn.get("arguments")
        if isinstance(arguments, str):
            try:
                arguments = json.loads(arguments)
            except json.JSONDecodeError:
                raise MalformedToolCall(
                    f"arguments of '{name}' are not a JSON object", usage, raw)
        if not isinstance(name, str) or not isinstance(arguments, dict):
            raise MalformedToolCall(
                f"arguments of '{name}' are not a JSON object", usage, raw)
        calls.append(ToolCall(name, arguments))
    return calls


class HttpBackend:
    """Client for an Ollama-compatible ``/api/chat`` endpoint.

    Stateless between calls and safe to share across threads. Token counts
    come from the server (``prompt_eval_count``/``eval_count``) with the
    word-count approximation as fallback.
    """

    def __init__(self, timeout: float = 120.0):
        self.timeout = timeout

    def _chat(self, cfg: RoleConfig, messages: list[Message],
              tools: list | None = None) -> tuple[dict, UsageRecord]:
        body = {
            "model": cfg.options.model,
            "messages": [m.to_dict() for m in messages],
            "stream": False,
            "options": {"temperature": cfg.options.temperature,
                        "top_p": cfg.options.top_p},
        }
        if tools is not None:
            body["tools"] = tools
        url = cfg.endpoint.rstrip("/") + "/api/chat"
        started = time.perf_counter()
        try:
            resp = requests.post(url, json=body, timeout=self.timeout)
        except requests.RequestException as exc:
            raise BackendUnreachable(f"cannot reach {url}: {exc}") from exc
        elapsed = time.perf_counter() - started
        if resp.status_code != 200:
            raise BackendError(resp.status_code, resp.text)
        try:
            data = resp.json()
        except ValueError as exc:
            raise BackendError(resp.status_code, resp.text) from exc
        message = data.get("message") or {}
        usage = UsageRecord(
            tokens_in=int(data.get("prompt_eval_count")
                          or count_tokens(_messages_text(messages))),
            tokens_out=int(data.get("eval_count")
                           or count_tokens(message.get("content") or "")),
            wall_time=elapsed,
        )
        return message, usage

    def complete(self, cfg: RoleConfig, messages: list[Message]) -> tuple[str, UsageRecord]:
        message, usage = self._chat(cfg, messages)
        return message.get("content") or "", usage

    def complete_with_tools(self, cfg: RoleConfig, messages: list[Message],
                            schema: str) -> tuple[list[ToolCall] | str, UsageRecord]:
        tools = [{"type": "function", "function": fn} for fn in json.loads(schema)]
        message, usage = self._chat(cfg, messages, tools)
        calls = _parse_tool_calls(message, usage)
        if calls:
            return calls, usage
        return message.get("content") or "", usage


class ScriptedBackend:
    """Replays a fixed script of responses, first in first out.

    Script entries:

    * ``str`` — a plain text reply;
    * ``list`` of ``ToolCall`` or ``{"name", "arguments"}`` dicts — a
      tool-call reply;
    * ``{"message": {...}}`` — a raw wire message, parsed exactly like an
      HTTP response (useful for malformed-call fixtures).

    Every prompt shown to the backend is recorded in ``transcript`` as
    ``(role, messages, reply_text)``. Token counts use the word-count
    approximation; for tool-enabled calls the schema text is counted into
    ``tokens_in``, mirroring how a real server folds the tool list into the
    prompt.
    """

    def __init__(self, script, delay: float = 0.0):
        self._queue = list(script)
        self._lock = threading.Lock()
        self.delay = delay
        self.transcript: list[tuple[str, list[Message], str]] = []

    def remaining(self) -> int:
        with self._lock:
            return len(self._queue)

    def _next(self, cfg: RoleConfig, messages: list[Message]):
        with self._lock:
            if not self._queue:
                raise ScriptExhausted(
                    f"script is empty but role '{cfg.role}' asked for a reply")
            return self._queue.pop(0)

    def _record(self, cfg: RoleConfig, messages: list[Message], rendered: str) -> None:
        with self._lock:
            self.transcript.append((cfg.role, list(messages), rendered))

    def complete(self, cfg: RoleConfig, messages: list[Message]) -> tuple[str, UsageRecord]:
        started = time.perf_counter()
        entry = self._next(cfg, messages)
        if self.delay:
            time.sleep(self.delay)
        if not isinstance(entry, str):
            raise TypeError(f"script gave {type(entry).__name__} to a plain "
                            f"completion for role '{cfg.role}'")
        self._record(cfg, messages, entry)
        usage = UsageRecord(tokens_in=count_tokens(_messages_text(messages)),
                            tokens_out=count_tokens(entry),
                            wall_time=time.perf_counter() - started)
        return entry, usage

    def complete_with_tools(self, cfg: RoleConfig, messages: list[Message],
                            schema: str) -> tuple[list[ToolCall] | str, UsageRecord]:
        started = time.perf_counter()
        entry = self._next(cfg, messages)
        if self.delay:
            time.sleep(self.delay)
        tokens_in = count_tokens(_messages_text(messages)) + count_tokens(schema)

        def usage_for(text: str) -> UsageRecord:
            return UsageRecord(tokens_in=tokens_in,
                               tokens_out=count_tokens(text),
                               wall_time=time.perf_counter() - started)

        if isinstance(entry, str):
            self._record(cfg, messages, entry)
            return entry, usage_for(entry)
        if isinstance(entry, list):
            calls = [c if isinstance(c, ToolCall) else ToolCall(c["name"], c["arguments"])
                     for c in entry]
            rendered = json.dumps([c.to_dict() for c in calls])
            self._record(cfg, messages, rendered)
            return calls, usage_for(rendered)
        if isinstance(entry, dict) and "message" in entry:
            message = entry["message"]
            rendered = json.dumps(message)
            self._record(cfg, messages, rendered)
            calls = _parse_tool_calls(message, usage_for(rendered))
            if calls:
                return calls, usage_for(rendered)
            return message.get("content") or "", usage_for(rendered)
        raise TypeError(f"unsupported script entry: {entry!r}")
