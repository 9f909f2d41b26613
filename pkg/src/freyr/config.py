"""Run configuration: role models, sampling options and backend choice.

The file format is plain JSON::

    {
      "label": "qwen2.5:7b",
      "max_retries": 3,
      "max_intents": 10,
      "backend": {"kind": "http"},
      "roles": {
        "intent":     {"model": "qwen2.5:7b", "temperature": 0.8, "top_p": 0.6},
        "parameters": {"model": "qwen2.5:7b"},
        "summary":    {"model": "qwen2.5:0.5b"},
        "chat":       {"model": "qwen2.5:0.5b"}
      }
    }

Everything is optional; the defaults above apply. The intent and parameter
roles default to a mid-size model while summary and chat default to a small
one, since phrasing replies needs far less muscle than filling in edits.
A backend of ``{"kind": "scripted", "script": [...]}`` (or ``script_file``)
replays canned replies instead of calling a server; a fresh replay queue is
built per run so repeated runs stay independent. An optional ``delay`` (in
seconds, per reply) simulates model latency, which step-timing displays and
concurrency tests rely on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from freyr.backend import (
    DEFAULT_ENDPOINT,
    GenerationOptions,
    HttpBackend,
    RoleConfig,
    ScriptedBackend,
)
from freyr.pipeline import PipelineConfig

DEFAULT_MODELS = {
    "intent": "qwen2.5:7b",
    "parameters": "qwen2.5:7b",
    "summary": "qwen2.5:0.5b",
    "chat": "qwen2.5:0.5b",
}


class ConfigError(ValueError):
    code = "BAD_CONFIG"


@dataclass
class LoadedConfig:
    pipeline: PipelineConfig
    label: str
    backend_kind: str
    backend_factory: Callable[[], object]


def load_script(source) -> list:
    """Normalize a script: either a flat list of entries or a grouped
    ``{"steps": [{"entries": [...]}]}`` document (flattened in order)."""
    if isinstance(source, dict) and "steps" in source:
        flat: list = []
        for step in source["steps"]:
            flat.extend(step["entries"])
        return flat
    if isinstance(source, list):
        return list(source)
    raise ConfigError("script must be a list of entries or a {steps: [...]} document")


def config_from_dict(data: dict, *, base_dir: str | Path | None = None) -> LoadedConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    try:
        roles_in = data.get("roles", {})
        if not isinstance(roles_in, dict):
            raise ConfigError("'roles' must be an object")
        roles: dict[str, RoleConfig] = {}
        for role, default_model in DEFAULT_MODELS.items():
            entry = roles_in.get(role, {})
            if not isinstance(entry, dict):
                raise ConfigError(f"role '{role}' must be an object")
            options = GenerationOptions(
                model=entry.get("model", default_model),
                temperature=entry.get("temperature", 0.8),
                top_p=entry.get("top_p", 0.6),
            )
            roles[role] = RoleConfig(role=role, options=options,
                                     endpoint=entry.get("endpoint", DEFAULT_ENDPOINT))
        pipeline = PipelineConfig(roles=roles,
                                  max_retries=data.get("max_retries", 3),
                                  max_intents=data.get("max_intents", 10))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc

    backend = data.get("backend", {"kind": "http"})
    if not isinstance(backend, dict) or "kind" not in backend:
        raise ConfigError("'backend' must be an object with a 'kind'")
    kind = backend["kind"]
    if kind == "http":
        def factory() -> object:
            return HttpBackend()
    elif kind == "scripted":
        if "script_file" in backend:
            path = Path(backend["script_file"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            try:
                source = json.loads(path.read_text())
            except OSError as exc:
                raise ConfigError(f"cannot read script_file: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"script_file is not valid JSON: {exc}") from exc
        elif "script" in backend:
            source = backend["script"]
        else:
            raise ConfigError("scripted backend needs 'script' or 'script_file'")
        entries = load_script(source)
        delay = backend.get("delay", 0.0)
        if isinstance(delay, bool) or not isinstance(delay, (int, float)) \
                or delay < 0:
            raise ConfigError("'delay' must be a non-negative number")

        def factory() -> object:
            return ScriptedBackend(list(entries), delay=float(delay))
    else:
        raise ConfigError(f"unknown backend kind '{kind}'")

    label = data.get("label") or (pipeline.roles["parameters"].options.model
                                  if kind == "http" else "scripted")
    return LoadedConfig(pipeline=pipeline, label=str(label),
                        backend_kind=kind, backend_factory=factory)


def load_config(path: str | Path) -> LoadedConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(data, base_dir=Path(path).parent)


def default_config() -> LoadedConfig:
    return config_from_dict({})
