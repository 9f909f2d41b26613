"""HTTP session service: interactive design sessions over the pipeline.

Each session holds a conversation, a level and the traces of every step.
Steps are strictly serialized per session (a second message while one is
in flight gets 409 BUSY), while different sessions run freely in parallel.
Pipeline events are buffered per session with monotonically increasing
sequence numbers and served as a server-sent event stream; the stream
honours ``Last-Event-ID`` so a dropped client can resume without loss.

Payloads carry ``"version": 1``.

Endpoints::

    POST /sessions                     {mode, config?, level?} -> {id, mode}
    POST /sessions/{id}/messages       {text} -> {response, level, trace}
    GET  /sessions/{id}/level
    GET  /sessions/{id}/trace/{n}
    GET  /sessions/{id}/events         server-sent events (?after=N&follow=0/1)
"""

from __future__ import annotations

import asyncio
import json
import logging
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from freyr.backend import Message, TransportError
from freyr.baseline import run_step_tools
from freyr.config import ConfigError, LoadedConfig, config_from_dict, default_config
from freyr.dungeon import (
    DEFAULT_RULES,
    DomainRules,
    Dungeon,
    ParseError,
    from_dict,
    to_dict,
    validate_domain,
)
from freyr.pipeline import PipelineAbort, PipelineTrace, run_step
from freyr.tools import ToolSpec, registry

logger = logging.getLogger(__name__)

VERSION = 1
MODES = ("freyr", "tools")

# How long the event stream lingers after the buffer is drained and no step
# is in flight, before closing (clients auto-reconnect and resume by id).
_EVENT_POLL_SECONDS = 0.05
_EVENT_IDLE_POLLS = 4


class ApiError(Exception):
    def __init__(self, status: int, code: str, detail: str = ""):
        super().__init__(detail or code)
        self.status = status
        self.code = code
        self.detail = detail


class CreateSessionBody(BaseModel):
    mode: str = "freyr"
    config: dict | None = None
    level: dict | None = None


class MessageBody(BaseModel):
    text: str


@dataclass
class SessionState:
    id: str
    mode: str
    config: LoadedConfig
    backends: object
    level: Dungeon
    conversation: list[Message] = field(default_factory=list)
    traces: list[PipelineTrace] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    step_lock: threading.Lock = field(default_factory=threading.Lock)
    _events_lock: threading.Lock = field(default_factory=threading.Lock)

    def emit(self, event: dict) -> None:
        """Buffer a pipeline event; successful edits also advance the live
        level so reads during a step reflect exactly the applied edits."""
        with self._events_lock:
            self.events.append({"seq": len(self.events) + 1, **event})
        if event.get("type") == "tool_succeeded" and "level" in event:
            self.level = from_dict(event["level"])

    def events_after(self, seq: int) -> list[dict]:
        with self._events_lock:
            return list(self.events[seq:])


def create_app(default: LoadedConfig | None = None, *,
               reg: tuple[ToolSpec, ...] | None = None,
               rules: DomainRules = DEFAULT_RULES,
               snapshot_dir: str | Path | None = None) -> FastAPI:
    """Build the service app.

    ``default`` is the config used when a session is created without one;
    ``snapshot_dir``, if given, receives a JSON snapshot of each session
    after every completed step.
    """
    app = FastAPI(title="freyr session service")
    # The browser client is served as static files from some other origin,
    # so the API must answer cross-origin requests.
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions: dict[str, SessionState] = {}
    app.state.sessions = sessions
    reg = reg or registry()
    snapshot_path = Path(snapshot_dir) if snapshot_dir else None
    if snapshot_path:
        snapshot_path.mkdir(parents=True, exist_ok=True)

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status,
                            content={"error": exc.code, "detail": exc.detail})

    def _session(session_id: str) -> SessionState:
        try:
            return sessions[session_id]
        except KeyError:
            raise ApiError(404, "SESSION_NOT_FOUND",
                           f"no session '{session_id}'") from None

    def _snapshot(session: SessionState) -> None:
        if snapshot_path is None:
            return
        payload = {
            "version": VERSION,
            "id": session.id,
            "mode": session.mode,
            "level": to_dict(session.level),
            "conversation": [m.to_dict() for m in session.conversation],
            "traces": [t.to_dict() for t in session.traces],
        }
        (snapshot_path / f"{session.id}.json").write_text(
            json.dumps(payload, indent=2))

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        if body.mode not in MODES:
            raise ApiError(400, "BAD_CONFIG",
                           f"mode must be one of {MODES}, got '{body.mode}'")
        try:
            cfg = (config_from_dict(body.config) if body.config is not None
                   else default or default_config())
        except ConfigError as exc:
            raise ApiError(400, "BAD_CONFIG", str(exc)) from exc
        if body.level is not None:
            try:
                level = from_dict(body.level)
            except ParseError as exc:
                raise ApiError(400, "BAD_CONFIG",
                               f"bad start level: {exc}") from exc
            report = validate_domain(level, rules)
            if not report.ok:
                raise ApiError(400, "BAD_CONFIG",
                               f"start level breaks domain rules: {report}")
        else:
            level = Dungeon(name="New Dungeon")
        session = SessionState(id=uuid.uuid4().hex, mode=body.mode, config=cfg,
                               backends=cfg.backend_factory(), level=level)
        sessions[session.id] = session
        logger.info("created session %s (mode=%s)", session.id, session.mode)
        return {"version": VERSION, "id": session.id, "mode": session.mode}

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody) -> dict:
        session = _session(session_id)
        if not session.step_lock.acquire(blocking=False):
            raise ApiError(409, "BUSY", "a step is already in flight")
        try:
            step_fn = run_step if session.mode == "freyr" else run_step_tools
            try:
                response, new_level, trace = step_fn(
                    session.config.pipeline, reg, session.conversation,
                    body.text, session.level, backends=session.backends,
                    rules=rules, on_event=session.emit)
            except PipelineAbort as exc:
                cause = exc.__cause__
                code = getattr(cause, "code", "TRANSPORT")
                raise ApiError(502, code, str(exc)) from exc
            except TransportError as exc:
                raise ApiError(502, exc.code, str(exc)) from exc
            session.level = new_level
            session.conversation.append(Message("user", body.text))
            session.conversation.append(Message("assistant", response))
            session.traces.append(trace)
            _snapshot(session)
            return {"version": VERSION, "response": response,
                    "level": to_dict(new_level), "trace": trace.to_dict()}
        finally:
            session.step_lock.release()

    @app.get("/sessions/{session_id}/level")
    def get_level(session_id: str) -> dict:
        session = _session(session_id)
        return {"version": VERSION, "level": to_dict(session.level)}

    @app.get("/sessions/{session_id}/trace/{n}")
    def get_trace(session_id: str, n: int) -> dict:
        session = _session(session_id)
        if not 0 <= n < len(session.traces):
            raise ApiError(404, "TRACE_NOT_FOUND",
                           f"session has {len(session.traces)} traces, "
                           f"asked for index {n}")
        return {"version": VERSION, "step": n,
                "trace": session.traces[n].to_dict()}

    @app.get("/sessions/{session_id}/events")
    async def get_events(session_id: str, request: Request,
                         after: int = 0, follow: bool = False) -> StreamingResponse:
        session = _session(session_id)
        last_id = request.headers.get("last-event-id")
        if last_id and last_id.isdigit():
            after = max(after, int(last_id))

        async def stream():
            seen = after
            idle = 0
            while True:
                fresh = session.events_after(seen)
                for event in fresh:
                    seen = event["seq"]
                    payload = {k: v for k, v in event.items() if k != "seq"}
                    yield (f"id: {event['seq']}\n"
                           f"event: {event['type']}\n"
                           f"data: {json.dumps(payload)}\n\n")
                if fresh:
                    idle = 0
                elif not follow and not session.step_lock.locked():
                    idle += 1
                    if idle >= _EVENT_IDLE_POLLS:
                        return
                if await request.is_disconnected():
                    return
                await asyncio.sleep(_EVENT_POLL_SECONDS)

        return StreamingResponse(stream(), media_type="text/event-stream",
                                 headers={"Cache-Control": "no-cache"})

    return app
