import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

type FetchCall = { url: string; init: RequestInit | undefined };

function fakeFetch(
  status: number,
  payload: unknown,
): { calls: FetchCall[]; fn: typeof fetch } {
  const calls: FetchCall[] = [];
  const fn = (async (url: unknown, init?: RequestInit) => {
    calls.push({ url: String(url), init });
    return {
      ok: status >= 200 && status < 300,
      status,
      statusText: "",
      json: async () => payload,
    };
  }) as unknown as typeof fetch;
  return { calls, fn };
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("posts queries as JSON with the session id", async () => {
    const { calls, fn } = fakeFetch(200, { answer: "hi" });
    vi.stubGlobal("fetch", fn);
    const api = new ApiClient({ baseUrl: "http://host:1" });
    await api.query("hello", "s-1");
    expect(calls).toHaveLength(1);
    expect(calls[0].url).toBe("http://host:1/v1/query");
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({
      query: "hello",
      session_id: "s-1",
    });
    const headers = calls[0].init?.headers as Record<string, string>;
    expect(headers["Content-Type"]).toBe("application/json");
  });

  it("attaches the bearer token when configured", async () => {
    const { calls, fn } = fakeFetch(200, {});
    vi.stubGlobal("fetch", fn);
    const api = new ApiClient({ baseUrl: "http://host:1", token: "sesame" });
    await api.health();
    const headers = calls[0].init?.headers as Record<string, string>;
    expect(headers["Authorization"]).toBe("Bearer sesame");
  });

  it("builds the events path with the after cursor", async () => {
    const { calls, fn } = fakeFetch(200, { events: [] });
    vi.stubGlobal("fetch", fn);
    const api = new ApiClient();
    await api.events("s-2", 5);
    expect(calls[0].url).toBe("/v1/sessions/s-2/events?after=5");
  });

  it("puts settings patches", async () => {
    const { calls, fn } = fakeFetch(200, {
      mode_override: null,
      thinking_override: "high",
    });
    vi.stubGlobal("fetch", fn);
    const api = new ApiClient();
    const settings = await api.putSettings("s-3", { thinking_override: "high" });
    expect(calls[0].init?.method).toBe("PUT");
    expect(settings.thinking_override).toBe("high");
  });

  it("raises ApiError with the server's message on non-2xx", async () => {
    const { fn } = fakeFetch(400, { error: "query must be a nonempty string" });
    vi.stubGlobal("fetch", fn);
    const api = new ApiClient();
    const failure = api.query(" ");
    await expect(failure).rejects.toBeInstanceOf(ApiError);
    await expect(failure).rejects.toMatchObject({
      status: 400,
      message: "query must be a nonempty string",
    });
  });

  it("falls back to a generic message when the error body is not JSON", async () => {
    const fn = (async () => ({
      ok: false,
      status: 500,
      statusText: "",
      json: async () => {
        throw new Error("not json");
      },
    })) as unknown as typeof fetch;
    vi.stubGlobal("fetch", fn);
    const api = new ApiClient();
    await expect(api.health()).rejects.toMatchObject({
      status: 500,
      message: "HTTP 500",
    });
  });

  it("strips a trailing slash from the base url", async () => {
    const { calls, fn } = fakeFetch(200, { status: "ok" });
    vi.stubGlobal("fetch", fn);
    const api = new ApiClient({ baseUrl: "http://host:9/" });
    await api.health();
    expect(calls[0].url).toBe("http://host:9/v1/health");
  });
});
