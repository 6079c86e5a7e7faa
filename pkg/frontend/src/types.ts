/**
 * Payload shapes served by the REST API. Field names are part of the server
 * contract; the UI reads them verbatim and never derives its own numbers.
 */

export interface DeliberationInfo {
  action: "respond_directly" | "use_tools";
  rationale: string;
  selected_tools: string[];
  thinking_hint: string;
  suggested_mode: string | null;
  mandatory_override: boolean;
}

export interface SourceResultInfo {
  source: string;
  title: string;
  url: string;
  snippet: string;
  rank: number;
}

export interface EventInfo {
  seq: number;
  kind: string;
  payload: Record<string, unknown>;
  timestamp: number;
}

export interface ConfidenceReportInfo {
  components: Record<string, number>;
  overall: number;
  acceptable: boolean;
}

export interface TraceStepInfo {
  kind: string;
  content: string;
  confidence: number | null;
  timestamp: number;
}

export interface QueryResponse {
  session_id: string;
  query: string;
  answer: string;
  mode: string;
  thinking_level: string;
  thinking_budget: number;
  task_type: string;
  deliberation: DeliberationInfo;
  sources: SourceResultInfo[];
  source_errors: Record<string, string>;
  confidence: number;
  report: ConfidenceReportInfo | null;
  refinement_rounds: number;
  trace: TraceStepInfo[] | null;
  trace_concluded: boolean | null;
  events: EventInfo[];
  degraded_from: string | null;
  memory_entry_id: string | null;
  error: string | null;
}

export interface SessionSettingsInfo {
  mode_override: string | null;
  thinking_override: string | null;
}

export interface SessionInfo {
  id: string;
  user_id: string;
  created_at: number;
  settings: SessionSettingsInfo;
  turns_handled: number;
  turns: number;
  events: number;
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function isDeliberation(value: unknown): value is DeliberationInfo {
  if (!isRecord(value)) return false;
  return (
    (value.action === "respond_directly" || value.action === "use_tools") &&
    typeof value.rationale === "string" &&
    Array.isArray(value.selected_tools)
  );
}

function isSourceResult(value: unknown): value is SourceResultInfo {
  if (!isRecord(value)) return false;
  return (
    typeof value.source === "string" &&
    typeof value.title === "string" &&
    typeof value.url === "string"
  );
}

export function isEventInfo(value: unknown): value is EventInfo {
  if (!isRecord(value)) return false;
  return typeof value.seq === "number" && typeof value.kind === "string";
}

/**
 * Checks the fields the renderer depends on. Anything that fails lands in
 * the raw-payload fallback panel instead of a half-rendered card.
 */
export function isQueryResponse(value: unknown): value is QueryResponse {
  if (!isRecord(value)) return false;
  return (
    typeof value.answer === "string" &&
    typeof value.mode === "string" &&
    typeof value.thinking_level === "string" &&
    typeof value.thinking_budget === "number" &&
    typeof value.confidence === "number" &&
    isDeliberation(value.deliberation) &&
    Array.isArray(value.sources) &&
    value.sources.every(isSourceResult) &&
    Array.isArray(value.events) &&
    value.events.every(isEventInfo)
  );
}

export function isSessionSettings(value: unknown): value is SessionSettingsInfo {
  if (!isRecord(value)) return false;
  return "mode_override" in value && "thinking_override" in value;
}
