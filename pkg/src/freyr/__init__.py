"""FREYR: a modular tool-usage pipeline for LLM-driven dungeon editing.

The package splits tool use into small single-purpose model calls (intent
detection, parameter generation, summarization, plain conversation) glued
together by plain code, and ships a native function-calling baseline, a
benchmark harness with paired statistics, and an HTTP session service.
"""

from freyr.dungeon import (
    Attack,
    Corridor,
    DEFAULT_RULES,
    DiffEntry,
    DomainRules,
    Dungeon,
    EditDiff,
    Enemy,
    ParseError,
    Room,
    Trap,
    Treasure,
    ValidationReport,
    apply_diff,
    deserialize,
    diff,
    level_outline,
    serialize,
    structurally_equal,
    validate_domain,
)
from freyr.tools import (
    ParamSpec,
    ToolOutcome,
    ToolSpec,
    UnknownToolError,
    execute,
    registry,
    render_intent_catalog,
    render_json_schema,
    render_parameter_prompt,
)
from freyr.backend import (
    GenerationOptions,
    HttpBackend,
    Message,
    RoleConfig,
    ScriptedBackend,
    ToolCall,
    UsageRecord,
    count_tokens,
)
from freyr.pipeline import (
    PipelineConfig,
    PipelineTrace,
    parse_intents,
    parse_params,
    run_step,
)
from freyr.baseline import run_step_tools

__version__ = "0.1.0"

__all__ = [
    "Attack", "Corridor", "DEFAULT_RULES", "DiffEntry", "DomainRules",
    "Dungeon", "EditDiff", "Enemy", "ParseError", "Room", "Trap", "Treasure",
    "ValidationReport", "apply_diff", "deserialize", "diff", "level_outline",
    "serialize", "structurally_equal", "validate_domain",
    "ParamSpec", "ToolOutcome", "ToolSpec", "UnknownToolError", "execute",
    "registry", "render_intent_catalog", "render_json_schema",
    "render_parameter_prompt",
    "GenerationOptions", "HttpBackend", "Message", "RoleConfig",
    "ScriptedBackend", "ToolCall", "UsageRecord", "count_tokens",
    "PipelineConfig", "PipelineTrace", "parse_intents", "parse_params",
    "run_step", "run_step_tools",
]
