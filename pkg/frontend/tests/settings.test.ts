import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { SettingsPanel } from "../src/settings.js";
import { FakeServer } from "./helpers/fake_server.js";

function change(select: HTMLSelectElement, value: string): void {
  select.value = value;
  select.dispatchEvent(new Event("change"));
}

async function panelWithSession(): Promise<{
  server: FakeServer;
  panel: SettingsPanel;
  sessionId: string;
}> {
  const server = new FakeServer();
  vi.stubGlobal("fetch", server.fetch);
  const api = new ApiClient();
  const session = await api.createSession();
  const panel = new SettingsPanel(api);
  await panel.setSession(session.id);
  return { server, panel, sessionId: session.id };
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("SettingsPanel", () => {
  it("shows the current settings after load", async () => {
    const { panel } = await panelWithSession();
    expect(panel.root.querySelector(".settings-current")?.textContent).toBe(
      "overrides: mode engine pick, thinking engine pick",
    );
    expect(panel.disabled).toBe(false);
  });

  it("PUTs a thinking override and reflects the acknowledged state", async () => {
    const { server, panel, sessionId } = await panelWithSession();
    change(panel.thinkingSelect, "high");
    await vi.waitFor(() => {
      expect(panel.root.querySelector(".settings-current")?.textContent).toBe(
        "overrides: mode engine pick, thinking high",
      );
    });
    expect(server.sessions.get(sessionId)?.settings.thinking_override).toBe(
      "high",
    );
  });

  it("PUTs a mode override", async () => {
    const { server, panel, sessionId } = await panelWithSession();
    change(panel.modeSelect, "collaborative");
    await vi.waitFor(() => {
      expect(
        server.sessions.get(sessionId)?.settings.mode_override,
      ).toBe("collaborative");
    });
  });

  it("clears an override by selecting engine pick", async () => {
    const { server, panel, sessionId } = await panelWithSession();
    change(panel.thinkingSelect, "high");
    await vi.waitFor(() => {
      expect(
        server.sessions.get(sessionId)?.settings.thinking_override,
      ).toBe("high");
    });
    change(panel.thinkingSelect, "");
    await vi.waitFor(() => {
      expect(
        server.sessions.get(sessionId)?.settings.thinking_override,
      ).toBeNull();
    });
  });

  it("surfaces a 400 inline and keeps the controls enabled", async () => {
    const { panel } = await panelWithSession();
    await panel.push({ thinking_override: "blazing" });
    expect(panel.errorText).toContain("settings error (400)");
    expect(panel.errorText).toContain("unknown thinking level");
    expect(panel.disabled).toBe(false);
  });

  it("disables the controls when the session does not exist", async () => {
    const server = new FakeServer();
    vi.stubGlobal("fetch", server.fetch);
    const panel = new SettingsPanel(new ApiClient());
    await panel.setSession("s-gone");
    expect(panel.errorText).toContain("settings error (404)");
    expect(panel.errorText).toContain("no such session");
    expect(panel.disabled).toBe(true);
  });

  it("stays disabled with no session attached", () => {
    const server = new FakeServer();
    vi.stubGlobal("fetch", server.fetch);
    const panel = new SettingsPanel(new ApiClient());
    void panel.setSession(null);
    expect(panel.disabled).toBe(true);
  });
});
