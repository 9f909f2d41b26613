/**
 * Browser client for the design-loop service.
 *
 * Layout: a chat panel on the left (with the elapsed-time badge), the level
 * graph in the middle, and the step list + trace inspector on the right,
 * with an append-only event log underneath.
 *
 * Every fact on screen comes from a validated service payload; the only
 * client-side computation is presentation (layout, diffing two payloads to
 * pick highlight colours, formatting numbers).
 */

import {
  ApiClient,
  ServiceError,
  ServiceOffline,
  LevelSchema,
  type Level,
  type ServiceEvent,
  type SessionClient,
  type StepReply,
} from "./api.js";
import {
  changedAreas,
  elapsedBand,
  formatElapsed,
  levelToGraph,
  traceToInspector,
  EXPECTED_SECONDS_LOW,
  EXPECTED_SECONDS_HIGH,
  type LevelDiffView,
} from "./model.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface StepView {
  request: string;
  reply: StepReply;
  before: Level;
}

export interface AppState {
  sessionId: string | null;
  mode: string;
  level: Level;
  steps: StepView[];
  selected: number | null;
  inFlight: boolean;
}

const EMPTY_LEVEL: Level = LevelSchema.parse({
  name: "New Dungeon",
  rooms: [],
  corridors: [],
});

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  readonly state: AppState = {
    sessionId: null,
    mode: "freyr",
    level: EMPTY_LEVEL,
    steps: [],
    selected: null,
    inFlight: false,
  };

  private input!: HTMLInputElement;
  private sendButton!: HTMLButtonElement;
  private notice!: HTMLElement;
  private banner!: HTMLElement;
  private badge!: HTMLElement;
  private chatLog!: HTMLElement;
  private graphHost!: HTMLElement;
  private stepList!: HTMLElement;
  private inspector!: HTMLElement;
  private eventLog!: HTMLElement;
  private timer: ReturnType<typeof setInterval> | null = null;
  private reconnect: ReturnType<typeof setInterval> | null = null;
  private closeEvents: (() => void) | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: SessionClient,
  ) {}

  mount(): void {
    this.root.replaceChildren();
    this.banner = el("div", "offline-banner hidden",
      "Service unreachable — reconnecting…");
    this.root.append(this.banner);

    const columns = el("div", "columns");

    const chat = el("section", "chat-panel");
    chat.append(el("h2", undefined, "Chat"));
    this.chatLog = el("div", "chat-log");
    this.badge = el("span", "elapsed-badge hidden");
    this.badge.title =
      `expected ${EXPECTED_SECONDS_LOW}–${EXPECTED_SECONDS_HIGH}s per step`;
    this.notice = el("div", "notice hidden");
    const form = el("div", "chat-form");
    this.input = el("input") as HTMLInputElement;
    this.input.placeholder = "Describe an edit…";
    this.input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") void this.send();
    });
    this.sendButton = el("button", undefined, "Send") as HTMLButtonElement;
    this.sendButton.addEventListener("click", () => void this.send());
    form.append(this.input, this.sendButton, this.badge);
    chat.append(this.chatLog, this.notice, form);

    const graph = el("section", "graph-panel");
    graph.append(el("h2", undefined, "Level"));
    this.graphHost = el("div", "graph-host");
    graph.append(this.graphHost);

    const side = el("section", "side-panel");
    side.append(el("h2", undefined, "Steps"));
    this.stepList = el("ol", "step-list");
    side.append(this.stepList, el("h2", undefined, "Trace"));
    this.inspector = el("div", "inspector");
    side.append(this.inspector);

    columns.append(chat, graph, side);
    this.root.append(columns);

    const events = el("section", "events-panel");
    events.append(el("h2", undefined, "Events"));
    this.eventLog = el("ul", "event-log");
    events.append(this.eventLog);
    this.root.append(events);

    this.renderGraph();
    this.renderInspector(null);
  }

  async start(mode = "freyr", config?: unknown, level?: unknown): Promise<void> {
    const created = await this.client.createSession({ mode, config, level });
    this.state.sessionId = created.id;
    this.state.mode = created.mode;
    this.state.level = await this.client.getLevel(created.id);
    this.renderGraph();
    try {
      this.closeEvents = this.client.openEvents(created.id, (event) =>
        this.onEvent(event),
      );
    } catch {
      this.closeEvents = null; // no EventSource here; the log stays empty
    }
  }

  stop(): void {
    if (this.closeEvents) this.closeEvents();
    if (this.timer) clearInterval(this.timer);
    if (this.reconnect) clearInterval(this.reconnect);
  }

  /** Append-only: each event lands at the end of the log, never reordered. */
  onEvent(event: ServiceEvent): void {
    const line = el("li", `event event-${event.type}`);
    line.textContent = describeEvent(event);
    this.eventLog.append(line);
    if (event.type === "tool_succeeded" && event.level !== undefined) {
      const parsed = LevelSchema.safeParse(event.level);
      if (parsed.success) {
        this.state.level = parsed.data;
        this.renderGraph();
      }
    }
  }

  async send(): Promise<void> {
    const text = this.input.value.trim();
    if (!text || this.state.inFlight || !this.state.sessionId) return;
    this.beginStep();
    this.appendChat("user", text);
    try {
      const reply = await this.client.sendMessage(this.state.sessionId, text);
      const before = this.state.level;
      this.state.level = reply.level;
      this.state.steps.push({ request: text, reply, before });
      this.state.selected = this.state.steps.length - 1;
      this.appendChat("assistant", reply.response);
      this.input.value = "";
      this.renderGraph();
      this.renderSteps();
      this.renderInspector(this.state.selected);
    } catch (error) {
      this.handleError(error);
    } finally {
      this.endStep();
    }
  }

  private beginStep(): void {
    this.state.inFlight = true;
    this.input.disabled = true;
    this.sendButton.disabled = true;
    this.notice.classList.add("hidden");
    const startedAt = Date.now();
    this.badge.classList.remove("hidden");
    const tick = () => {
      const seconds = (Date.now() - startedAt) / 1000;
      this.badge.textContent =
        `${formatElapsed(seconds)} (expected ` +
        `${EXPECTED_SECONDS_LOW}–${EXPECTED_SECONDS_HIGH}s)`;
      this.badge.dataset.band = elapsedBand(seconds);
    };
    tick();
    this.timer = setInterval(tick, 100);
  }

  private endStep(): void {
    this.state.inFlight = false;
    this.input.disabled = false;
    this.sendButton.disabled = false;
    if (this.timer) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private handleError(error: unknown): void {
    if (error instanceof ServiceError && error.busy) {
      this.showNotice(
        "The session is busy with another request; wait for it to finish.",
      );
      return;
    }
    if (error instanceof ServiceOffline) {
      this.banner.classList.remove("hidden");
      this.startReconnect();
      return;
    }
    if (error instanceof ServiceError) {
      this.showNotice(`${error.code}: ${error.message}`);
      return;
    }
    this.showNotice(String(error));
  }

  private showNotice(text: string): void {
    this.notice.textContent = text;
    this.notice.classList.remove("hidden");
  }

  private startReconnect(): void {
    if (this.reconnect || !this.state.sessionId) return;
    const sessionId = this.state.sessionId;
    this.reconnect = setInterval(() => {
      this.client
        .getLevel(sessionId)
        .then((level) => {
          this.state.level = level;
          this.banner.classList.add("hidden");
          if (this.reconnect) clearInterval(this.reconnect);
          this.reconnect = null;
          this.renderGraph();
        })
        .catch(() => undefined);
    }, 2000);
  }

  private appendChat(role: "user" | "assistant", text: string): void {
    const bubble = el("div", `bubble bubble-${role}`, text);
    this.chatLog.append(bubble);
  }

  selectStep(index: number): void {
    if (index < 0 || index >= this.state.steps.length) return;
    this.state.selected = index;
    const step = this.state.steps[index]!;
    this.state.level = step.reply.level;
    this.renderGraph();
    this.renderSteps();
    this.renderInspector(index);
  }

  private renderSteps(): void {
    this.stepList.replaceChildren();
    this.state.steps.forEach((step, index) => {
      const item = el(
        "li",
        index === this.state.selected ? "step selected" : "step",
        step.request,
      );
      item.addEventListener("click", () => this.selectStep(index));
      this.stepList.append(item);
    });
  }

  private renderGraph(): void {
    const highlight: LevelDiffView =
      this.state.selected !== null && this.state.steps[this.state.selected]
        ? changedAreas(
            this.state.steps[this.state.selected]!.before,
            this.state.steps[this.state.selected]!.reply.level,
          )
        : { rooms: [], corridors: [] };
    this.graphHost.replaceChildren(renderLevelSvg(this.state.level, highlight));
    if (this.state.level.rooms.length === 0) {
      this.graphHost.append(
        el("p", "empty-state", "Nothing here yet — ask for a room."),
      );
    }
  }

  private renderInspector(step: number | null): void {
    this.inspector.replaceChildren();
    if (step === null || !this.state.steps[step]) {
      this.inspector.append(
        el("p", "empty-state", "No steps yet — the trace of each one lands here."),
      );
      return;
    }
    const view = traceToInspector(this.state.steps[step]!.reply.trace);
    const header = el(
      "p",
      "inspector-header",
      `${view.mode} · intents: ${view.intents.join(", ") || "(conversation)"}`,
    );
    this.inspector.append(header);

    const table = el("table", "role-table");
    const head = el("tr");
    for (const title of ["role", "tokens in", "tokens out", "time"]) {
      head.append(el("th", undefined, title));
    }
    table.append(head);
    for (const row of view.rows) {
      const tr = el("tr", "role-row");
      tr.append(
        el("td", undefined, row.role),
        el("td", undefined, String(row.tokensIn)),
        el("td", undefined, String(row.tokensOut)),
        el("td", undefined, formatElapsed(row.seconds)),
      );
      table.append(tr);
    }
    const totals = el("tr", "role-totals");
    totals.append(
      el("td", undefined, "total"),
      el("td", undefined, String(view.totalTokensIn)),
      el("td", undefined, String(view.totalTokensOut)),
      el("td", undefined, formatElapsed(view.totalSeconds)),
    );
    table.append(totals);
    this.inspector.append(table);

    if (view.retries.length > 0) {
      const list = el("ul", "retry-list");
      for (const retry of view.retries) {
        list.append(
          el(
            "li",
            "retry-entry",
            `${retry.intent} attempt ${retry.attempt}: ${retry.feedback}`,
          ),
        );
      }
      this.inspector.append(el("h3", undefined, "Retries"), list);
    }
    for (const warning of view.warnings) {
      this.inspector.append(el("p", "warning", warning));
    }
  }
}

function describeEvent(event: ServiceEvent): string {
  switch (event.type) {
    case "intent_detected":
      return `intents: ${(event.intents as string[] | undefined)?.join(", ") ?? ""}`;
    case "tool_started":
      return `running ${event.intent} (attempt ${event.attempt})`;
    case "retry":
      return `retry ${event.intent} (attempt ${event.attempt}): ${event.feedback}`;
    case "tool_succeeded":
      return `${event.intent}: ${event.message}`;
    case "tool_failed":
      return `${event.intent} failed: ${event.message}`;
    case "summary_ready":
      return `summary: ${event.response}`;
    default:
      return JSON.stringify(event);
  }
}

/** Draw the level as an SVG graph; highlighted names get a `changed` class. */
export function renderLevelSvg(
  level: Level,
  highlight: LevelDiffView = { rooms: [], corridors: [] },
): SVGSVGElement {
  const width = 640;
  const height = 420;
  const graph = levelToGraph(level, width, height);
  const changedRooms = new Set(highlight.rooms);
  const changedCorridors = new Set(highlight.corridors);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "level-graph");
  const byName = new Map(graph.nodes.map((node) => [node.name, node]));

  for (const edge of graph.edges) {
    const from = byName.get(edge.from);
    const to = byName.get(edge.to);
    if (!from || !to) continue;
    const group = document.createElementNS(SVG_NS, "g");
    const key = `${edge.from}↔${edge.to}`;
    group.setAttribute(
      "class",
      changedCorridors.has(key) ? "corridor changed" : "corridor",
    );
    group.setAttribute("data-corridor", key);
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(from.x));
    line.setAttribute("y1", String(from.y));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y));
    group.append(line);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String((from.x + to.x) / 2));
    label.setAttribute("y", String((from.y + to.y) / 2 - 6));
    label.setAttribute("class", "corridor-label");
    label.textContent =
      edge.contents.length > 0
        ? `${edge.length} · ${edge.contents.join("; ")}`
        : String(edge.length);
    group.append(label);
    svg.append(group);
  }

  for (const node of graph.nodes) {
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute(
      "class",
      changedRooms.has(node.name) ? "room changed" : "room",
    );
    group.setAttribute("data-room", node.name);
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(node.x));
    circle.setAttribute("cy", String(node.y));
    circle.setAttribute("r", "34");
    group.append(circle);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(node.x));
    label.setAttribute("y", String(node.y - 42));
    label.setAttribute("class", "room-label");
    label.textContent = node.name;
    group.append(label);
    node.markers.forEach((marker, index) => {
      const dot = document.createElementNS(SVG_NS, "circle");
      const angle = (2 * Math.PI * index) / Math.max(node.markers.length, 1);
      dot.setAttribute("cx", String(node.x + 22 * Math.cos(angle)));
      dot.setAttribute("cy", String(node.y + 22 * Math.sin(angle)));
      dot.setAttribute("r", "6");
      dot.setAttribute("class", `marker marker-${marker.kind}`);
      dot.setAttribute("data-marker", `${marker.kind}:${marker.name}`);
      const tooltip = document.createElementNS(SVG_NS, "title");
      tooltip.textContent = marker.label;
      dot.append(tooltip);
      group.append(dot);
    });
    svg.append(group);
  }
  return svg;
}

export function mountApp(root: HTMLElement, baseUrl: string): App {
  const app = new App(root, new ApiClient(baseUrl));
  app.mount();
  return app;
}
