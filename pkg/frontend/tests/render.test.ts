import { describe, expect, it } from "vitest";

import {
  confidenceBand,
  renderBadge,
  renderEventList,
  renderResponse,
} from "../src/render.js";
import type { EventInfo, QueryResponse } from "../src/types.js";
import researchPayload from "./fixtures/response_research.json";

const research = researchPayload as QueryResponse;

function directPayload(): QueryResponse {
  return {
    ...research,
    answer: "Hello! What can I help you with?",
    mode: "quick",
    thinking_level: "minimal",
    thinking_budget: 1024,
    task_type: "chat",
    deliberation: {
      action: "respond_directly",
      rationale: "greeting needs no sources",
      selected_tools: [],
      thinking_hint: "simple",
      suggested_mode: null,
      mandatory_override: false,
    },
    sources: [],
    confidence: 0.7,
    trace: null,
    trace_concluded: null,
    events: [],
  };
}

describe("confidenceBand", () => {
  it("splits at 0.6 and 0.8", () => {
    expect(confidenceBand(0.0)).toBe("low");
    expect(confidenceBand(0.59)).toBe("low");
    expect(confidenceBand(0.6)).toBe("mid");
    expect(confidenceBand(0.75)).toBe("mid");
    expect(confidenceBand(0.8)).toBe("mid");
    expect(confidenceBand(0.81)).toBe("high");
  });

  it("puts full confidence in the top band", () => {
    expect(confidenceBand(1.0)).toBe("high");
    const badge = renderBadge(1.0);
    expect(badge.classList.contains("band-high")).toBe(true);
  });
});

describe("renderResponse on the research fixture", () => {
  const view = renderResponse(research);

  it("renders one chip per source result, four in all", () => {
    const chips = view.querySelectorAll(".chip");
    expect(chips).toHaveLength(4);
  });

  it("groups chips by source in first-appearance order", () => {
    const groups = [...view.querySelectorAll(".chip-group")];
    expect(groups.map((g) => (g as HTMLElement).dataset.source)).toEqual([
      "arxiv",
      "web",
    ]);
    expect(groups[0].querySelectorAll(".chip")).toHaveLength(3);
    expect(groups[1].querySelectorAll(".chip")).toHaveLength(1);
  });

  it("gives every chip the source name, title, and link", () => {
    const first = view.querySelector(".chip") as HTMLAnchorElement;
    expect(first.querySelector(".chip-source")?.textContent).toBe("arxiv");
    expect(first.querySelector(".chip-title")?.textContent).toBe(
      "Sparse attention with learned block patterns",
    );
    expect(first.href).toBe("https://arxiv.org/abs/2401.00001");
  });

  it("shows the answer text", () => {
    expect(view.querySelector(".answer")?.textContent).toBe(research.answer);
  });

  it("colors the badge by band and prints the payload value verbatim", () => {
    const badge = view.querySelector(".confidence-badge");
    expect(badge?.classList.contains("band-high")).toBe(true);
    expect(badge?.textContent).toBe("0.85");
  });

  it("reports the thinking budget verbatim", () => {
    const stat = view.querySelector(".thinking-stat") as HTMLElement;
    expect(stat.textContent).toBe("thinking: high (budget 32768)");
    expect(stat.dataset.budget).toBe("32768");
  });

  it("renders an expandable deliberation card", () => {
    const card = view.querySelector("details.deliberation-card");
    expect(card).not.toBeNull();
    expect(card?.textContent).toContain("action: use_tools");
    expect(card?.textContent).toContain("tools: search_arxiv, search_web");
    expect(card?.textContent).toContain("mandatory override: yes");
    expect(card?.textContent).toContain(
      "rationale: freshness-sensitive research question",
    );
  });

  it("renders an expandable trace panel with steps and events", () => {
    const panel = view.querySelector("details.trace-panel");
    expect(panel).not.toBeNull();
    expect(panel?.querySelectorAll(".trace-step")).toHaveLength(4);
    expect(panel?.querySelectorAll(".event")).toHaveLength(3);
  });

  it("prints confidence components verbatim from the report", () => {
    const breakdown = view.querySelector(".confidence-breakdown");
    const terms = [...(breakdown?.querySelectorAll("dt") ?? [])].map(
      (n) => n.textContent,
    );
    const values = [...(breakdown?.querySelectorAll("dd") ?? [])].map(
      (n) => n.textContent,
    );
    expect(terms).toContain("relevance");
    expect(values[terms.indexOf("relevance")]).toBe("0.9");
    expect(values[terms.indexOf("overall")]).toBe("0.85");
  });
});

describe("renderResponse on a direct answer", () => {
  const view = renderResponse(directPayload());

  it("renders zero chips", () => {
    expect(view.querySelectorAll(".chip")).toHaveLength(0);
  });

  it("states that no tools were used", () => {
    const card = view.querySelector(".deliberation-card");
    expect(card?.textContent).toContain("no tools used");
  });
});

describe("renderEventList", () => {
  it("orders events by seq even when the input is shuffled", () => {
    const events: EventInfo[] = [
      { seq: 3, kind: "c", payload: {}, timestamp: 3 },
      { seq: 1, kind: "a", payload: {}, timestamp: 1 },
      { seq: 2, kind: "b", payload: {}, timestamp: 2 },
    ];
    const list = renderEventList(events);
    const seqs = [...list.querySelectorAll(".event")].map(
      (n) => (n as HTMLElement).dataset.seq,
    );
    expect(seqs).toEqual(["1", "2", "3"]);
  });

  it("maps every rendered element to exactly one event seq", () => {
    const events: EventInfo[] = [
      { seq: 5, kind: "x", payload: { a: 1 }, timestamp: 0 },
      { seq: 6, kind: "y", payload: { b: 2 }, timestamp: 1 },
    ];
    const items = [...renderEventList(events).querySelectorAll(".event")];
    const seqs = items.map((n) => (n as HTMLElement).dataset.seq);
    expect(new Set(seqs).size).toBe(events.length);
  });
});

describe("renderResponse fallback", () => {
  it("shows the raw payload when the schema does not match", () => {
    const view = renderResponse({ weird: true });
    expect(view.classList.contains("raw-fallback")).toBe(true);
    expect(view.querySelector(".raw-payload")?.textContent).toContain(
      '"weird": true',
    );
  });

  it("survives non-object payloads", () => {
    const view = renderResponse("oops");
    expect(view.classList.contains("raw-fallback")).toBe(true);
  });
});
