import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { ApiClient } from "../src/api.js";
import { DEFAULT_POLL_INTERVAL_MS, EventPoller } from "../src/poll.js";
import type { EventInfo } from "../src/types.js";

function event(seq: number): EventInfo {
  return { seq, kind: `k${seq}`, payload: {}, timestamp: seq };
}

function apiWithBatches(batches: EventInfo[][]): {
  api: ApiClient;
  calls: Array<{ sessionId: string; after: number }>;
} {
  const calls: Array<{ sessionId: string; after: number }> = [];
  let index = 0;
  const api = {
    events: async (sessionId: string, after: number) => {
      calls.push({ sessionId, after });
      const batch = batches[Math.min(index, batches.length - 1)] ?? [];
      index += 1;
      return batch;
    },
  } as unknown as ApiClient;
  return { api, calls };
}

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("EventPoller", () => {
  it("polls every 500 ms by default", async () => {
    const { api, calls } = apiWithBatches([[]]);
    const poller = new EventPoller(api, "s-1", () => {});
    expect(poller.intervalMs).toBe(DEFAULT_POLL_INTERVAL_MS);
    poller.start();
    await vi.advanceTimersByTimeAsync(499);
    expect(calls).toHaveLength(0);
    await vi.advanceTimersByTimeAsync(1);
    expect(calls).toHaveLength(1);
    await vi.advanceTimersByTimeAsync(500);
    expect(calls).toHaveLength(2);
    poller.stop();
  });

  it("honors a custom interval", async () => {
    const { api, calls } = apiWithBatches([[]]);
    const poller = new EventPoller(api, "s-1", () => {}, 50);
    poller.start();
    await vi.advanceTimersByTimeAsync(200);
    expect(calls).toHaveLength(4);
    poller.stop();
  });

  it("advances the after cursor past delivered events", async () => {
    const { api, calls } = apiWithBatches([
      [event(0), event(1), event(2)],
      [],
    ]);
    const seen: number[] = [];
    const poller = new EventPoller(api, "s-1", (events) => {
      seen.push(...events.map((e) => e.seq));
    });
    poller.start();
    await vi.advanceTimersByTimeAsync(500);
    expect(calls[0]).toEqual({ sessionId: "s-1", after: -1 });
    expect(seen).toEqual([0, 1, 2]);
    await vi.advanceTimersByTimeAsync(500);
    expect(calls[1]).toEqual({ sessionId: "s-1", after: 2 });
    poller.stop();
  });

  it("delivers events in seq order even if the server shuffles them", async () => {
    const { api } = apiWithBatches([[event(4), event(2), event(3)], []]);
    const seen: number[] = [];
    const poller = new EventPoller(api, "s-1", (events) => {
      seen.push(...events.map((e) => e.seq));
    });
    poller.start();
    await vi.advanceTimersByTimeAsync(500);
    expect(seen).toEqual([2, 3, 4]);
    poller.stop();
  });

  it("skips the callback and keeps the cursor on empty batches", async () => {
    const { api, calls } = apiWithBatches([[]]);
    const onEvents = vi.fn();
    const poller = new EventPoller(api, "s-1", onEvents);
    poller.start();
    await vi.advanceTimersByTimeAsync(1500);
    expect(onEvents).not.toHaveBeenCalled();
    expect(calls.every((c) => c.after === -1)).toBe(true);
    poller.stop();
  });

  it("stops cleanly", async () => {
    const { api, calls } = apiWithBatches([[]]);
    const poller = new EventPoller(api, "s-1", () => {});
    poller.start();
    await vi.advanceTimersByTimeAsync(500);
    poller.stop();
    await vi.advanceTimersByTimeAsync(2000);
    expect(calls).toHaveLength(1);
  });

  it("keeps polling through fetch failures", async () => {
    let attempts = 0;
    const api = {
      events: async () => {
        attempts += 1;
        if (attempts === 1) throw new Error("connection refused");
        return [event(0)];
      },
    } as unknown as ApiClient;
    const seen: number[] = [];
    const poller = new EventPoller(api, "s-1", (events) => {
      seen.push(...events.map((e) => e.seq));
    });
    poller.start();
    await vi.advanceTimersByTimeAsync(1000);
    expect(attempts).toBe(2);
    expect(seen).toEqual([0]);
    poller.stop();
  });

  it("resets the cursor when switched to another session", async () => {
    const { api, calls } = apiWithBatches([[event(7)], [], []]);
    const poller = new EventPoller(api, "s-1", () => {});
    poller.start();
    await vi.advanceTimersByTimeAsync(500);
    expect(poller.after).toBe(7);
    poller.switchSession("s-2");
    await vi.advanceTimersByTimeAsync(500);
    expect(calls[1]).toEqual({ sessionId: "s-2", after: -1 });
    poller.stop();
  });
});
