/**
 * Shared fixtures: levels lifted from the bundled benchmark suites (so the
 * shapes stay honest to real service payloads) plus hand-built traces.
 */

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

import {
  LevelSchema,
  TraceSchema,
  StepReplySchema,
  type Level,
  type StepReply,
  type Trace,
} from "../src/api.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const suitesDir = path.resolve(here, "../../src/freyr/bench/suites");

export function readSuiteFile(name: string): any {
  return JSON.parse(readFileSync(path.join(suitesDir, `${name}.json`), "utf8"));
}

/** The level a given editing-session step starts from (0-based index). */
export function sessionStartLevel(step: number): Level {
  const suite = readSuiteFile("t5");
  return LevelSchema.parse(suite.steps[step].start_level);
}

export function emptyLevel(name = "New Dungeon"): Level {
  return LevelSchema.parse({ name, rooms: [], corridors: [] });
}

export function makeCall(
  role: string,
  response = "ok",
  tokensIn = 100,
  tokensOut = 10,
  wallTime = 0.5,
) {
  return {
    role,
    prompt_summary: `${role} prompt`,
    response,
    tokens_in: tokensIn,
    tokens_out: tokensOut,
    wall_time: wallTime,
  };
}

export interface TraceOverrides {
  mode?: string;
  intents?: string[];
  conversation_fallback?: boolean;
  calls?: ReturnType<typeof makeCall>[];
  intent_records?: unknown[];
  outputs?: string[];
  response?: string;
  warnings?: string[];
  retries?: number;
}

export function makeTrace(overrides: TraceOverrides = {}): Trace {
  const calls = overrides.calls ?? [
    makeCall("intent", "add_enemy"),
    makeCall("parameters", "- name: Z"),
    makeCall("summary", "Done."),
  ];
  const totals = calls.reduce(
    (sum, call) => ({
      tokens_in: sum.tokens_in + call.tokens_in,
      tokens_out: sum.tokens_out + call.tokens_out,
      wall_time: sum.wall_time + call.wall_time,
    }),
    { tokens_in: 0, tokens_out: 0, wall_time: 0 },
  );
  return TraceSchema.parse({
    mode: overrides.mode ?? "freyr",
    intents: overrides.intents ?? ["add_enemy"],
    conversation_fallback: overrides.conversation_fallback ?? false,
    calls,
    intent_records: overrides.intent_records ?? [
      {
        intent: "add_enemy",
        retries: 0,
        feedback: [],
        ok: true,
        message: "Added enemy 'Z' to room 'Rome'.",
      },
    ],
    outputs: overrides.outputs ?? ["Added enemy 'Z' to room 'Rome'."],
    response: overrides.response ?? "Done.",
    warnings: overrides.warnings ?? [],
    retries: overrides.retries ?? 0,
    total: totals,
  });
}

export function makeReply(level: Level, trace: Trace, response?: string): StepReply {
  return StepReplySchema.parse({
    version: 1,
    response: response ?? trace.response,
    level,
    trace,
  });
}

/** Deep-copy a level payload so a fixture can be mutated safely. */
export function cloneLevel(level: Level): Level {
  return LevelSchema.parse(JSON.parse(JSON.stringify(level)));
}
