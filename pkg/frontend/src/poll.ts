/**
 * Event-log poller. The server has no push channel; the UI polls
 * GET /v1/sessions/{id}/events?after=<cursor> on a fixed interval
 * (default 500 ms) and hands new events to a callback in seq order.
 *
 * Ticks never overlap: the next one is scheduled only after the current
 * request settles, so a slow server cannot pile up requests. Polling runs
 * independently of query submission.
 */

import type { ApiClient } from "./api.js";
import type { EventInfo } from "./types.js";

export const DEFAULT_POLL_INTERVAL_MS = 500;

export class EventPoller {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private cursor = -1;
  private running = false;

  constructor(
    private readonly api: ApiClient,
    private sessionId: string,
    private readonly onEvents: (events: EventInfo[]) => void,
    readonly intervalMs: number = DEFAULT_POLL_INTERVAL_MS,
  ) {}

  get after(): number {
    return this.cursor;
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    this.schedule();
  }

  stop(): void {
    this.running = false;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  /** Point the poller at another session and restart its cursor. */
  switchSession(sessionId: string): void {
    this.sessionId = sessionId;
    this.cursor = -1;
  }

  private schedule(): void {
    if (!this.running) return;
    this.timer = setTimeout(() => {
      void this.tick().finally(() => this.schedule());
    }, this.intervalMs);
  }

  private async tick(): Promise<void> {
    try {
      const events = await this.api.events(this.sessionId, this.cursor);
      if (events.length === 0) return;
      const ordered = [...events].sort((a, b) => a.seq - b.seq);
      this.cursor = ordered[ordered.length - 1].seq;
      this.onEvents(ordered);
    } catch {
      // Transient fetch failures are expected while the server restarts;
      // keep polling.
    }
  }
}
