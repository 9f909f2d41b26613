/**
 * Typed client for the session service.
 *
 * Every payload is validated with zod before anything renders; unknown
 * fields are ignored (stripped), so the client tolerates additive server
 * changes. No domain logic lives here — the client only moves validated
 * JSON around.
 */

import { z } from "zod";

// --- payload schemas ------------------------------------------------------

export const AttackSchema = z.object({
  name: z.string(),
  damage: z.number(),
});

export const EnemySchema = z.object({
  name: z.string(),
  description: z.string(),
  species: z.string(),
  health: z.number(),
  attacks: z.array(AttackSchema).default([]),
});

export const TrapSchema = z.object({
  name: z.string(),
  description: z.string(),
  effect: z.string(),
  damage: z.number(),
});

export const TreasureSchema = z.object({
  name: z.string(),
  description: z.string(),
  loot: z.string(),
});

export const CellSchema = z
  .object({
    kind: z.string(),
    name: z.string(),
  })
  .nullable();

export const RoomSchema = z.object({
  name: z.string(),
  description: z.string(),
  enemies: z.array(EnemySchema).default([]),
  treasures: z.array(TreasureSchema).default([]),
});

export const CorridorSchema = z.object({
  from: z.string(),
  to: z.string(),
  length: z.number(),
  cells: z.array(CellSchema).default([]),
});

export const LevelSchema = z.object({
  name: z.string(),
  rooms: z.array(RoomSchema).default([]),
  corridors: z.array(CorridorSchema).default([]),
});
export type Level = z.infer<typeof LevelSchema>;

export const UsageSchema = z.object({
  tokens_in: z.number(),
  tokens_out: z.number(),
  wall_time: z.number(),
});

export const RoleCallSchema = UsageSchema.extend({
  role: z.string(),
  prompt_summary: z.string(),
  response: z.string(),
});

export const IntentRecordSchema = z.object({
  intent: z.string(),
  retries: z.number(),
  feedback: z.array(z.string()),
  ok: z.boolean(),
  message: z.string(),
});

export const TraceSchema = z.object({
  mode: z.string(),
  intents: z.array(z.string()),
  conversation_fallback: z.boolean(),
  calls: z.array(RoleCallSchema),
  intent_records: z.array(IntentRecordSchema),
  outputs: z.array(z.string()),
  response: z.string(),
  warnings: z.array(z.string()),
  retries: z.number(),
  total: UsageSchema,
});
export type Trace = z.infer<typeof TraceSchema>;

export const SessionCreatedSchema = z.object({
  version: z.number(),
  id: z.string(),
  mode: z.string(),
});

export const StepReplySchema = z.object({
  version: z.number(),
  response: z.string(),
  level: LevelSchema,
  trace: TraceSchema,
});
export type StepReply = z.infer<typeof StepReplySchema>;

export const ErrorBodySchema = z.object({
  error: z.string(),
  detail: z.string().default(""),
});

export const ServiceEventSchema = z
  .object({ type: z.string() })
  .passthrough();
export type ServiceEvent = z.infer<typeof ServiceEventSchema> &
  Record<string, unknown>;

// --- errors ---------------------------------------------------------------

/** A non-2xx reply that carried a structured error body. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail || code);
  }

  get busy(): boolean {
    return this.status === 409 && this.code === "BUSY";
  }
}

/** The service could not be reached at all (offline, refused, DNS). */
export class ServiceOffline extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${String(cause)}`);
  }
}

async function request<S extends z.ZodTypeAny>(
  url: string,
  schema: S,
  init?: RequestInit,
): Promise<z.output<S>> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (cause) {
    throw new ServiceOffline(cause);
  }
  const text = await response.text();
  if (!response.ok) {
    const parsed = ErrorBodySchema.safeParse(safeJson(text));
    const code = parsed.success ? parsed.data.error : `HTTP_${response.status}`;
    const detail = parsed.success ? parsed.data.detail : text;
    throw new ServiceError(response.status, code, detail);
  }
  return schema.parse(JSON.parse(text));
}

function safeJson(text: string): unknown {
  try {
    return JSON.parse(text);
  } catch {
    return {};
  }
}

/**
 * Parse a raw SSE body into validated service events, in arrival order.
 *
 * The frame id is attached to each event as `seq` so a finite read can be
 * resumed with `?after=<last seq>`.
 */
export function parseEventStream(body: string): ServiceEvent[] {
  const events: ServiceEvent[] = [];
  for (const block of body.split("\n\n")) {
    let seq: number | undefined;
    let data: string | undefined;
    for (const line of block.split("\n")) {
      if (line.startsWith("id: ")) seq = Number(line.slice("id: ".length));
      if (line.startsWith("data: ")) data = line.slice("data: ".length);
    }
    if (data === undefined) continue;
    const parsed = ServiceEventSchema.safeParse(safeJson(data));
    if (parsed.success) {
      const event = parsed.data as ServiceEvent;
      if (seq !== undefined && !Number.isNaN(seq)) event.seq = seq;
      events.push(event);
    }
  }
  return events;
}

// --- client ---------------------------------------------------------------

export interface CreateSessionOptions {
  mode?: string;
  config?: unknown;
  level?: unknown;
}

/** The slice of the client the UI shell needs; ApiClient implements it. */
export interface SessionClient {
  createSession(
    options?: CreateSessionOptions,
  ): Promise<{ version: number; id: string; mode: string }>;
  sendMessage(sessionId: string, text: string): Promise<StepReply>;
  getLevel(sessionId: string): Promise<Level>;
  getTrace(sessionId: string, step: number): Promise<Trace>;
  openEvents(
    sessionId: string,
    onEvent: (event: ServiceEvent) => void,
  ): () => void;
}

export class ApiClient implements SessionClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  async createSession(options: CreateSessionOptions = {}) {
    return request(this.url("/sessions"), SessionCreatedSchema, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(options),
    });
  }

  async sendMessage(sessionId: string, text: string): Promise<StepReply> {
    return request(
      this.url(`/sessions/${sessionId}/messages`),
      StepReplySchema,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ text }),
      },
    );
  }

  async getLevel(sessionId: string): Promise<Level> {
    const payload = await request(
      this.url(`/sessions/${sessionId}/level`),
      z.object({ level: LevelSchema }),
    );
    return payload.level;
  }

  async getTrace(sessionId: string, step: number): Promise<Trace> {
    const payload = await request(
      this.url(`/sessions/${sessionId}/trace/${step}`),
      z.object({ trace: TraceSchema }),
    );
    return payload.trace;
  }

  /** One finite read of the event buffer (the stream closes once idle). */
  async fetchEvents(sessionId: string, after = 0): Promise<ServiceEvent[]> {
    let response: Response;
    try {
      response = await fetch(
        this.url(`/sessions/${sessionId}/events?after=${after}`),
      );
    } catch (cause) {
      throw new ServiceOffline(cause);
    }
    if (!response.ok) {
      throw new ServiceError(response.status, `HTTP_${response.status}`, "");
    }
    return parseEventStream(await response.text());
  }

  /** Live event subscription for browsers; resumes via Last-Event-ID. */
  openEvents(
    sessionId: string,
    onEvent: (event: ServiceEvent) => void,
  ): () => void {
    const source = new EventSource(
      this.url(`/sessions/${sessionId}/events?follow=1`),
    );
    const handler = (raw: MessageEvent) => {
      const parsed = ServiceEventSchema.safeParse(safeJson(raw.data));
      if (parsed.success) onEvent(parsed.data as ServiceEvent);
    };
    for (const kind of [
      "intent_detected",
      "tool_started",
      "retry",
      "tool_succeeded",
      "tool_failed",
      "summary_ready",
    ]) {
      source.addEventListener(kind, handler);
    }
    return () => source.close();
  }
}
