/**
 * Pure view models.
 *
 * Everything here maps validated service payloads onto plain display
 * structures. No domain rules are evaluated client-side: a room is a node
 * because the payload lists it, an edge exists because a corridor does,
 * and a diff highlight comes from comparing two payloads field by field.
 */

import type { Level, Trace } from "./api.js";

// --- level graph ------------------------------------------------------------

export interface GraphMarker {
  kind: "enemy" | "treasure";
  name: string;
  label: string;
}

export interface GraphNode {
  name: string;
  description: string;
  markers: GraphMarker[];
  x: number;
  y: number;
}

export interface GraphEdge {
  from: string;
  to: string;
  length: number;
  /** One label per occupied cell, e.g. "trap: Pressure Plate". */
  contents: string[];
}

export interface LevelGraph {
  name: string;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

/**
 * Project a level payload onto a graph: rooms become nodes, corridors
 * become edges. Nodes are laid out on a circle in payload order, which is
 * stable across re-renders of the same level.
 */
export function levelToGraph(
  level: Level,
  width = 640,
  height = 420,
): LevelGraph {
  const count = level.rooms.length;
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.max(40, Math.min(cx, cy) - 70);
  const nodes = level.rooms.map((room, index): GraphNode => {
    const angle = (2 * Math.PI * index) / Math.max(count, 1) - Math.PI / 2;
    const markers: GraphMarker[] = [
      ...room.enemies.map(
        (enemy): GraphMarker => ({
          kind: "enemy",
          name: enemy.name,
          label: `${enemy.name} (${enemy.species}, hp ${enemy.health})`,
        }),
      ),
      ...room.treasures.map(
        (treasure): GraphMarker => ({
          kind: "treasure",
          name: treasure.name,
          label: `${treasure.name}: ${treasure.loot}`,
        }),
      ),
    ];
    return {
      name: room.name,
      description: room.description,
      markers,
      x: count === 1 ? cx : cx + radius * Math.cos(angle),
      y: count === 1 ? cy : cy + radius * Math.sin(angle),
    };
  });
  const edges = level.corridors.map((corridor): GraphEdge => {
    const contents: string[] = [];
    for (const cell of corridor.cells) {
      if (cell) contents.push(`${cell.kind}: ${cell.name}`);
    }
    return {
      from: corridor.from,
      to: corridor.to,
      length: corridor.length,
      contents,
    };
  });
  return { name: level.name, nodes, edges };
}

// --- trace inspector ---------------------------------------------------------

export interface InspectorRow {
  role: string;
  tokensIn: number;
  tokensOut: number;
  seconds: number;
  response: string;
}

export interface RetryEntry {
  intent: string;
  attempt: number;
  feedback: string;
}

export interface InspectorView {
  mode: string;
  intents: string[];
  conversationFallback: boolean;
  rows: InspectorRow[];
  retries: RetryEntry[];
  warnings: string[];
  totalTokensIn: number;
  totalTokensOut: number;
  totalSeconds: number;
  response: string;
}

/** Flatten a step trace into table rows plus one entry per retry. */
export function traceToInspector(trace: Trace): InspectorView {
  const rows = trace.calls.map(
    (call): InspectorRow => ({
      role: call.role,
      tokensIn: call.tokens_in,
      tokensOut: call.tokens_out,
      seconds: call.wall_time,
      response: call.response,
    }),
  );
  const retries: RetryEntry[] = [];
  for (const record of trace.intent_records) {
    record.feedback.forEach((feedback, index) => {
      retries.push({
        intent: record.intent,
        attempt: index + 1,
        feedback,
      });
    });
  }
  return {
    mode: trace.mode,
    intents: trace.intents,
    conversationFallback: trace.conversation_fallback,
    rows,
    retries,
    warnings: trace.warnings,
    totalTokensIn: trace.total.tokens_in,
    totalTokensOut: trace.total.tokens_out,
    totalSeconds: trace.total.wall_time,
    response: trace.response,
  };
}

// --- step diff highlighting ---------------------------------------------------

export interface LevelDiffView {
  rooms: string[];
  corridors: string[];
}

function roomIndex(level: Level): Map<string, string> {
  return new Map(
    level.rooms.map((room) => [room.name, JSON.stringify(room)]),
  );
}

function corridorIndex(level: Level): Map<string, string> {
  return new Map(
    level.corridors.map((corridor) => [
      `${corridor.from}↔${corridor.to}`,
      JSON.stringify(corridor),
    ]),
  );
}

/**
 * Names of rooms and corridors whose serialized payload differs between
 * two level snapshots (added, removed or edited). Used to highlight what a
 * selected step touched.
 */
export function changedAreas(before: Level, after: Level): LevelDiffView {
  const rooms = new Set<string>();
  const corridors = new Set<string>();
  const beforeRooms = roomIndex(before);
  const afterRooms = roomIndex(after);
  for (const [name, body] of afterRooms) {
    if (beforeRooms.get(name) !== body) rooms.add(name);
  }
  for (const name of beforeRooms.keys()) {
    if (!afterRooms.has(name)) rooms.add(name);
  }
  const beforeCorridors = corridorIndex(before);
  const afterCorridors = corridorIndex(after);
  for (const [key, body] of afterCorridors) {
    if (beforeCorridors.get(key) !== body) corridors.add(key);
  }
  for (const key of beforeCorridors.keys()) {
    if (!afterCorridors.has(key)) corridors.add(key);
  }
  return {
    rooms: [...rooms].sort(),
    corridors: [...corridors].sort(),
  };
}

// --- elapsed badge -------------------------------------------------------------

/**
 * A step normally completes within the 5-10 s band end to end; the badge
 * colours by where the current wait falls relative to it.
 */
export const EXPECTED_SECONDS_LOW = 5;
export const EXPECTED_SECONDS_HIGH = 10;

export type ElapsedBand = "fast" | "expected" | "slow";

export function elapsedBand(seconds: number): ElapsedBand {
  if (seconds < EXPECTED_SECONDS_LOW) return "fast";
  if (seconds <= EXPECTED_SECONDS_HIGH) return "expected";
  return "slow";
}

export function formatElapsed(seconds: number): string {
  return `${seconds.toFixed(1)}s`;
}
