/**
 * Session steering panel: reasoning-mode and thinking-level overrides via
 * PUT settings. The selects always reflect the server's acknowledged state,
 * not the local choice, and 4xx responses surface inline.
 */

import { ApiClient, ApiError } from "./api.js";
import type { SessionSettingsInfo } from "./types.js";

const MODE_CHOICES = ["quick", "standard", "deep", "collaborative"];
const THINKING_CHOICES = ["off", "minimal", "low", "medium", "high", "xhigh"];
const ENGINE_PICK = "";

function makeSelect(name: string, choices: string[]): HTMLSelectElement {
  const select = document.createElement("select");
  select.name = name;
  const auto = document.createElement("option");
  auto.value = ENGINE_PICK;
  auto.textContent = "engine pick";
  select.appendChild(auto);
  for (const choice of choices) {
    const option = document.createElement("option");
    option.value = choice;
    option.textContent = choice;
    select.appendChild(option);
  }
  return select;
}

export class SettingsPanel {
  readonly root: HTMLElement;
  readonly modeSelect: HTMLSelectElement;
  readonly thinkingSelect: HTMLSelectElement;
  private readonly currentLine: HTMLElement;
  private readonly errorBox: HTMLElement;
  private sessionId: string | null;

  constructor(
    private readonly api: ApiClient,
    sessionId: string | null = null,
  ) {
    this.sessionId = sessionId;
    this.root = document.createElement("section");
    this.root.className = "settings-panel";

    this.currentLine = document.createElement("div");
    this.currentLine.className = "settings-current";
    this.root.appendChild(this.currentLine);

    this.modeSelect = makeSelect("mode_override", MODE_CHOICES);
    this.thinkingSelect = makeSelect("thinking_override", THINKING_CHOICES);
    this.root.appendChild(labeled("mode", this.modeSelect));
    this.root.appendChild(labeled("thinking", this.thinkingSelect));

    this.errorBox = document.createElement("div");
    this.errorBox.className = "settings-error";
    this.root.appendChild(this.errorBox);

    this.modeSelect.addEventListener("change", () => {
      void this.push({ mode_override: this.modeSelect.value || null });
    });
    this.thinkingSelect.addEventListener("change", () => {
      void this.push({ thinking_override: this.thinkingSelect.value || null });
    });
    this.showCurrent(null);
  }

  get disabled(): boolean {
    return this.modeSelect.disabled && this.thinkingSelect.disabled;
  }

  get errorText(): string {
    return this.errorBox.textContent ?? "";
  }

  setSession(sessionId: string | null): Promise<void> {
    this.sessionId = sessionId;
    this.setDisabled(sessionId === null);
    this.errorBox.textContent = "";
    this.showCurrent(null);
    return sessionId === null ? Promise.resolve() : this.load();
  }

  async load(): Promise<void> {
    if (this.sessionId === null) return;
    try {
      const settings = await this.api.getSettings(this.sessionId);
      this.apply(settings);
    } catch (exc) {
      this.surface(exc);
    }
  }

  async push(patch: Partial<SessionSettingsInfo>): Promise<void> {
    if (this.sessionId === null) return;
    try {
      const settings = await this.api.putSettings(this.sessionId, patch);
      this.apply(settings);
    } catch (exc) {
      this.surface(exc);
    }
  }

  private apply(settings: SessionSettingsInfo): void {
    this.errorBox.textContent = "";
    this.setDisabled(false);
    this.modeSelect.value = settings.mode_override ?? ENGINE_PICK;
    this.thinkingSelect.value = settings.thinking_override ?? ENGINE_PICK;
    this.showCurrent(settings);
  }

  private showCurrent(settings: SessionSettingsInfo | null): void {
    const mode = settings?.mode_override ?? "engine pick";
    const thinking = settings?.thinking_override ?? "engine pick";
    this.currentLine.textContent = `overrides: mode ${mode}, thinking ${thinking}`;
  }

  private surface(exc: unknown): void {
    if (exc instanceof ApiError) {
      this.errorBox.textContent = `settings error (${exc.status}): ${exc.message}`;
      // A vanished session cannot be steered; anything else stays editable.
      if (exc.status === 404) this.setDisabled(true);
    } else {
      this.errorBox.textContent = `settings error: ${String(exc)}`;
    }
  }

  private setDisabled(disabled: boolean): void {
    this.modeSelect.disabled = disabled;
    this.thinkingSelect.disabled = disabled;
  }
}

function labeled(caption: string, control: HTMLElement): HTMLElement {
  const label = document.createElement("label");
  label.className = "settings-field";
  const span = document.createElement("span");
  span.textContent = caption;
  label.appendChild(span);
  label.appendChild(control);
  return label;
}
