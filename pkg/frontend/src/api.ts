/** Thin fetch client for the REST endpoints; no state beyond base URL + token. */

import type {
  EventInfo,
  QueryResponse,
  SessionInfo,
  SessionSettingsInfo,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface ApiOptions {
  baseUrl?: string;
  token?: string;
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly token: string | undefined;

  constructor(options: ApiOptions = {}) {
    // Same-origin by default; strip one trailing slash so paths concatenate.
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.token = options.token;
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<unknown> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const res = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    let payload: unknown = null;
    try {
      payload = await res.json();
    } catch {
      payload = null;
    }
    if (!res.ok) {
      const detail =
        typeof payload === "object" && payload !== null && "error" in payload
          ? String((payload as { error: unknown }).error)
          : res.statusText || `HTTP ${res.status}`;
      throw new ApiError(res.status, detail);
    }
    return payload;
  }

  health(): Promise<unknown> {
    return this.request("GET", "/v1/health");
  }

  async createSession(userId = "operator"): Promise<SessionInfo> {
    return (await this.request("POST", "/v1/sessions", {
      user_id: userId,
    })) as SessionInfo;
  }

  async query(text: string, sessionId?: string): Promise<QueryResponse> {
    const body: Record<string, unknown> = { query: text };
    if (sessionId) body.session_id = sessionId;
    return (await this.request("POST", "/v1/query", body)) as QueryResponse;
  }

  async events(sessionId: string, after = -1): Promise<EventInfo[]> {
    const path = `/v1/sessions/${encodeURIComponent(sessionId)}/events?after=${after}`;
    const payload = (await this.request("GET", path)) as { events: EventInfo[] };
    return payload.events;
  }

  async getSettings(sessionId: string): Promise<SessionSettingsInfo> {
    const path = `/v1/sessions/${encodeURIComponent(sessionId)}/settings`;
    return (await this.request("GET", path)) as SessionSettingsInfo;
  }

  async putSettings(
    sessionId: string,
    patch: Partial<SessionSettingsInfo>,
  ): Promise<SessionSettingsInfo> {
    const path = `/v1/sessions/${encodeURIComponent(sessionId)}/settings`;
    return (await this.request("PUT", path, patch)) as SessionSettingsInfo;
  }
}
