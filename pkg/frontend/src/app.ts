/**
 * Single-page console: one session at a time, a query box, the response
 * transcript, a live event timeline, and the steering panel.
 *
 * At most one query is in flight per session; the submit button stays
 * disabled until the server answers. Event polling runs independently.
 */

import { ApiClient, ApiError } from "./api.js";
import { EventPoller, DEFAULT_POLL_INTERVAL_MS } from "./poll.js";
import { renderEventList, renderResponse } from "./render.js";
import { SettingsPanel } from "./settings.js";
import type { EventInfo } from "./types.js";

export interface AppOptions {
  baseUrl?: string;
  token?: string;
  pollIntervalMs?: number;
}

export class App {
  readonly api: ApiClient;
  readonly settings: SettingsPanel;
  readonly queryInput: HTMLInputElement;
  readonly submitButton: HTMLButtonElement;
  readonly transcript: HTMLElement;
  readonly timeline: HTMLElement;
  readonly statusLine: HTMLElement;
  readonly errorBox: HTMLElement;
  poller: EventPoller | null = null;
  sessionId: string | null = null;
  inFlight = false;
  private readonly pollIntervalMs: number;
  private seenSeqs = new Set<number>();

  constructor(
    readonly root: HTMLElement,
    options: AppOptions = {},
  ) {
    this.api = new ApiClient({ baseUrl: options.baseUrl, token: options.token });
    this.pollIntervalMs = options.pollIntervalMs ?? DEFAULT_POLL_INTERVAL_MS;

    this.statusLine = div("status-line", "connecting...");
    this.errorBox = div("app-error", "");
    this.transcript = div("transcript", "");
    this.timeline = div("timeline", "");

    const form = document.createElement("form");
    form.className = "query-form";
    this.queryInput = document.createElement("input");
    this.queryInput.type = "text";
    this.queryInput.name = "query";
    this.queryInput.placeholder = "ask something";
    this.submitButton = document.createElement("button");
    this.submitButton.type = "submit";
    this.submitButton.textContent = "send";
    form.appendChild(this.queryInput);
    form.appendChild(this.submitButton);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit(this.queryInput.value);
    });

    this.settings = new SettingsPanel(this.api);

    root.appendChild(this.statusLine);
    root.appendChild(this.errorBox);
    root.appendChild(this.settings.root);
    root.appendChild(form);
    root.appendChild(this.transcript);
    const timelinePanel = document.createElement("details");
    timelinePanel.className = "timeline-panel";
    const summary = document.createElement("summary");
    summary.textContent = "session events";
    timelinePanel.appendChild(summary);
    timelinePanel.appendChild(this.timeline);
    root.appendChild(timelinePanel);
  }

  async start(): Promise<void> {
    try {
      const session = await this.api.createSession();
      this.sessionId = session.id;
      this.statusLine.textContent = `session ${session.id}`;
      await this.settings.setSession(session.id);
      this.poller = new EventPoller(
        this.api,
        session.id,
        (events) => this.appendEvents(events),
        this.pollIntervalMs,
      );
      this.poller.start();
    } catch (exc) {
      this.surface(exc);
      this.statusLine.textContent = "no session";
    }
  }

  stop(): void {
    this.poller?.stop();
  }

  async submit(text: string): Promise<void> {
    const query = text.trim();
    if (!query || this.inFlight || this.sessionId === null) return;
    this.inFlight = true;
    this.submitButton.disabled = true;
    this.errorBox.textContent = "";
    const bubble = div("query-bubble", query);
    this.transcript.appendChild(bubble);
    try {
      const response = await this.api.query(query, this.sessionId);
      this.transcript.appendChild(renderResponse(response));
      this.queryInput.value = "";
    } catch (exc) {
      this.surface(exc);
    } finally {
      this.inFlight = false;
      this.submitButton.disabled = false;
    }
  }

  /** Append only unseen events, in seq order; screen order equals server order. */
  private appendEvents(events: EventInfo[]): void {
    const fresh = events.filter((e) => !this.seenSeqs.has(e.seq));
    if (fresh.length === 0) return;
    for (const event of fresh) this.seenSeqs.add(event.seq);
    const list = renderEventList(fresh);
    while (list.firstChild) {
      this.timeline.appendChild(list.firstChild);
    }
  }

  private surface(exc: unknown): void {
    if (exc instanceof ApiError) {
      this.errorBox.textContent = `request failed (${exc.status}): ${exc.message}`;
    } else {
      this.errorBox.textContent = `request failed: ${String(exc)}`;
    }
  }
}

function div(className: string, text: string): HTMLElement {
  const node = document.createElement("div");
  node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function mountApp(root: HTMLElement, options: AppOptions = {}): App {
  const app = new App(root, options);
  void app.start();
  return app;
}
