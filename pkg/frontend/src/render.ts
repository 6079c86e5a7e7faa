/**
 * DOM renderers for query responses: answer text, source chips, confidence
 * badge, deliberation card, trace panel.
 *
 * Read-only by design: every number shown on screen is copied verbatim from
 * the server payload. The one piece of client logic is picking a badge color
 * band, which mirrors the server's own acceptance thresholds.
 */

import type {
  EventInfo,
  QueryResponse,
  SourceResultInfo,
  TraceStepInfo,
} from "./types.js";
import { isQueryResponse } from "./types.js";

export type Band = "low" | "mid" | "high";

/** Bands match the engine thresholds: below 0.6 weak, above 0.8 strong. */
export function confidenceBand(value: number): Band {
  if (value < 0.6) return "low";
  if (value > 0.8) return "high";
  return "mid";
}

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

function row(parent: HTMLElement, className: string, text: string): HTMLElement {
  const node = el("div", className, text);
  parent.appendChild(node);
  return node;
}

export function renderBadge(confidence: number): HTMLElement {
  const badge = el("span", `confidence-badge band-${confidenceBand(confidence)}`);
  badge.textContent = String(confidence);
  badge.dataset.band = confidenceBand(confidence);
  badge.title = "self-evaluated confidence";
  return badge;
}

/** One chip per source result, grouped by source in first-appearance order. */
export function renderSourceChips(sources: SourceResultInfo[]): HTMLElement {
  const wrap = el("div", "source-chips");
  const groups = new Map<string, HTMLElement>();
  for (const result of sources) {
    let group = groups.get(result.source);
    if (!group) {
      group = el("div", "chip-group");
      group.dataset.source = result.source;
      groups.set(result.source, group);
      wrap.appendChild(group);
    }
    const chip = el("a", "chip");
    chip.href = result.url;
    chip.target = "_blank";
    chip.rel = "noreferrer";
    chip.dataset.source = result.source;
    chip.title = result.snippet;
    chip.appendChild(el("span", "chip-source", result.source));
    chip.appendChild(el("span", "chip-title", result.title));
    group.appendChild(chip);
  }
  return wrap;
}

export function renderDeliberationCard(response: QueryResponse): HTMLElement {
  const card = el("details", "deliberation-card");
  card.appendChild(el("summary", "", "deliberation"));
  const body = el("div", "card-body");
  const decision = response.deliberation;
  row(body, "delib-action", `action: ${decision.action}`);
  if (decision.action === "respond_directly") {
    row(body, "delib-tools", "no tools used");
  } else {
    row(body, "delib-tools", `tools: ${decision.selected_tools.join(", ")}`);
  }
  if (decision.mandatory_override) {
    row(body, "delib-override", "mandatory override: yes");
  }
  row(body, "delib-rationale", `rationale: ${decision.rationale}`);
  row(body, "delib-hint", `complexity hint: ${decision.thinking_hint}`);
  if (decision.suggested_mode) {
    row(body, "delib-mode", `model-suggested mode: ${decision.suggested_mode}`);
  }
  card.appendChild(body);
  return card;
}

/** Ordered event list; stable sort by seq so screen order equals server order. */
export function renderEventList(events: EventInfo[]): HTMLElement {
  const list = el("ol", "event-list");
  const ordered = [...events].sort((a, b) => a.seq - b.seq);
  for (const event of ordered) {
    const item = el("li", "event");
    item.dataset.seq = String(event.seq);
    item.appendChild(el("span", "event-kind", event.kind));
    item.appendChild(el("span", "event-payload", JSON.stringify(event.payload)));
    list.appendChild(item);
  }
  return list;
}

function renderTraceSteps(steps: TraceStepInfo[]): HTMLElement {
  const list = el("ol", "trace-steps");
  for (const step of steps) {
    const item = el("li", `trace-step trace-${step.kind.toLowerCase()}`);
    const head =
      step.confidence === null
        ? step.kind
        : `${step.kind} (${String(step.confidence)})`;
    item.appendChild(el("span", "step-kind", head));
    item.appendChild(el("span", "step-content", step.content));
    list.appendChild(item);
  }
  return list;
}

export function renderTracePanel(response: QueryResponse): HTMLElement {
  const panel = el("details", "trace-panel");
  panel.appendChild(el("summary", "", "trace"));
  const body = el("div", "card-body");
  if (response.trace && response.trace.length > 0) {
    body.appendChild(renderTraceSteps(response.trace));
  }
  if (response.report) {
    const breakdown = el("dl", "confidence-breakdown");
    for (const [name, value] of Object.entries(response.report.components)) {
      breakdown.appendChild(el("dt", "", name));
      breakdown.appendChild(el("dd", "", String(value)));
    }
    breakdown.appendChild(el("dt", "", "overall"));
    breakdown.appendChild(el("dd", "", String(response.report.overall)));
    body.appendChild(breakdown);
  }
  body.appendChild(renderEventList(response.events));
  panel.appendChild(body);
  return panel;
}

/** Last resort for payloads the schema guard rejects: show them untouched. */
export function renderRawFallback(payload: unknown): HTMLElement {
  const panel = el("div", "raw-fallback");
  row(panel, "fallback-note", "unrecognized response shape; raw payload below");
  const pre = el("pre", "raw-payload");
  pre.textContent = JSON.stringify(payload, null, 2);
  panel.appendChild(pre);
  return panel;
}

export function renderResponse(payload: unknown): HTMLElement {
  if (!isQueryResponse(payload)) {
    return renderRawFallback(payload);
  }
  const view = el("article", "response");

  const meta = el("div", "response-meta");
  const modeBanner = el("span", "mode-banner", `mode: ${payload.mode}`);
  if (payload.degraded_from) {
    modeBanner.textContent += ` (degraded from ${payload.degraded_from})`;
  }
  meta.appendChild(modeBanner);
  const budget = el(
    "span",
    "thinking-stat",
    `thinking: ${payload.thinking_level} (budget ${String(payload.thinking_budget)})`,
  );
  budget.dataset.budget = String(payload.thinking_budget);
  meta.appendChild(budget);
  meta.appendChild(renderBadge(payload.confidence));
  view.appendChild(meta);

  if (payload.error) {
    row(view, "response-error", `error: ${payload.error}`);
  }
  row(view, "answer", payload.answer);
  view.appendChild(renderSourceChips(payload.sources));
  const errorSources = Object.entries(payload.source_errors ?? {});
  if (errorSources.length > 0) {
    const notes = errorSources.map(([name, msg]) => `${name}: ${msg}`);
    row(view, "source-errors", `source errors: ${notes.join("; ")}`);
  }
  view.appendChild(renderDeliberationCard(payload));
  view.appendChild(renderTracePanel(payload));
  if (payload.refinement_rounds > 0) {
    row(
      view,
      "refinement-note",
      `refinement rounds: ${String(payload.refinement_rounds)}`,
    );
  }
  return view;
}
