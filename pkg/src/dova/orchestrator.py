"""Query orchestration: deliberate, select a mode and budget, execute, score.

The pipeline for every query is fixed: evict expired memory, recall context,
deliberate over whether tools are needed, select a reasoning mode and a
thinking budget, gather sources when deliberation chose tools, execute the
mode (single completion, tool loop, ensemble, or full hybrid; judgment
queries route to a debate), score and possibly refine the answer, store the
exchange to memory, and append the turns. Every stage appends to the
session's event log, which is the single source of truth for ordering.

Stage failures degrade one mode at a time (collaborative -> deep ->
standard -> quick) before the query fails outright with the partial event
log attached.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .collaboration import (
    Blackboard,
    EnsembleAgent,
    EnsembleResult,
    HybridResult,
    run_ensemble,
    run_hybrid,
)
from .config import DovaConfig
from .debate import DebateConclusion, DebateState, run_debate
from .deliberation import (
    DEBATE_FLAG,
    ConversationContext,
    Deliberation,
    DeliberationAction,
    UserModel,
    deliberate,
)
from .errors import DovaError, StoreFull
from .events import Event, EventLog
from .memory import SHORT_TERM, MemoryStore, MmrParams
from .providers import (
    CallRecord,
    CompletionRequest,
    CompletionResponse,
    EmbeddingVector,
    ProviderPort,
    TaskType,
    simple_request,
)
from .reasoning import (
    DEFAULT_SYSTEM_PROMPT,
    ReactConfig,
    ReasoningTrace,
    Tool,
    ToolRegistry,
    run_react,
)
from .routing import (
    SOURCE_ORDER,
    Source,
    SourceResult,
    SourceSearch,
    classify,
    search_sources,
    sources_for,
)
from .self_eval import ConfidenceReport, evaluate_and_refine, score
from .thinking import ComplexityHint, ThinkingLevel, budget_of, select_level
from .validation import validate_code

logger = logging.getLogger(__name__)


class ReasoningMode(str, Enum):
    QUICK = "quick"
    STANDARD = "standard"
    DEEP = "deep"
    COLLABORATIVE = "collaborative"


HINT_MODE: dict[ComplexityHint, ReasoningMode] = {
    ComplexityHint.SIMPLE: ReasoningMode.QUICK,
    ComplexityHint.NORMAL: ReasoningMode.STANDARD,
    ComplexityHint.COMPLEX: ReasoningMode.DEEP,
    ComplexityHint.VERY_COMPLEX: ReasoningMode.COLLABORATIVE,
}

DEGRADE: dict[ReasoningMode, ReasoningMode] = {
    ReasoningMode.COLLABORATIVE: ReasoningMode.DEEP,
    ReasoningMode.DEEP: ReasoningMode.STANDARD,
    ReasoningMode.STANDARD: ReasoningMode.QUICK,
}

ROLE_PROMPTS: dict[str, str] = {
    "research": (
        "You are the research agent. Gather facts with the search tools "
        "before concluding; cite what you found."
    ),
    "profiling": (
        "You are the profiling agent. Infer user expertise and preferences "
        "from the conversation, conservatively."
    ),
    "validation": (
        "You are the validation agent. Check claims and code for defects "
        "using the validate tool where code is involved."
    ),
    "synthesis": (
        "You are the synthesis agent. Combine the available material into "
        "one clear, complete answer."
    ),
    "debate": (
        "You are the debate agent. Weigh arguments for and against before "
        "concluding."
    ),
}

ENSEMBLE_ROLES = ("research", "synthesis", "validation")


@dataclass
class SessionSettings:
    """Per-session steering knobs; None means engine-decided."""

    mode_override: Optional[ReasoningMode] = None
    thinking_override: Optional[ThinkingLevel] = None

    def to_dict(self) -> dict:
        return {
            "mode_override": self.mode_override.value if self.mode_override else None,
            "thinking_override": (
                self.thinking_override.label if self.thinking_override else None
            ),
        }

    def apply(self, raw: dict) -> None:
        """Update from a settings payload; unknown keys are rejected."""
        unknown = set(raw) - {"mode_override", "thinking_override"}
        if unknown:
            raise ValueError(f"unknown settings keys: {sorted(unknown)}")
        if "mode_override" in raw:
            value = raw["mode_override"]
            self.mode_override = ReasoningMode(value) if value else None
        if "thinking_override" in raw:
            value = raw["thinking_override"]
            self.thinking_override = (
                ThinkingLevel.from_label(value) if value else None
            )


def select_mode(decision: Deliberation, settings: SessionSettings) -> ReasoningMode:
    """Session override wins outright; otherwise the complexity hint maps to
    a mode, direct responses cap at standard, and tool use floors at
    standard (the quick path never runs tools)."""
    if settings.mode_override is not None:
        return settings.mode_override
    mode = HINT_MODE[decision.thinking_hint]
    if decision.action is DeliberationAction.RESPOND_DIRECTLY and mode in (
        ReasoningMode.DEEP,
        ReasoningMode.COLLABORATIVE,
    ):
        mode = ReasoningMode.STANDARD
    if decision.action is DeliberationAction.USE_TOOLS and mode is ReasoningMode.QUICK:
        mode = ReasoningMode.STANDARD
    return mode


@dataclass(frozen=True)
class TokenUsage:
    input_tokens: int = 0
    output_tokens: int = 0
    thinking_tokens: int = 0

    @property
    def total(self) -> int:
        return self.input_tokens + self.output_tokens + self.thinking_tokens

    def to_dict(self) -> dict:
        return {
            "input_tokens": self.input_tokens,
            "output_tokens": self.output_tokens,
            "thinking_tokens": self.thinking_tokens,
            "total": self.total,
        }

    @classmethod
    def from_records(cls, records: list[CallRecord]) -> "TokenUsage":
        return cls(
            input_tokens=sum(r.response.input_tokens for r in records),
            output_tokens=sum(r.response.output_tokens for r in records),
            thinking_tokens=sum(r.response.thinking_tokens for r in records),
        )


class _RecordingProvider:
    """Pass-through provider that keeps its own call records, so one query's
    token usage stays exact even when sessions run concurrently."""

    def __init__(self, inner: ProviderPort):
        self.inner = inner
        self.records: list[CallRecord] = []
        self._lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        response = self.inner.complete(request)
        with self._lock:
            self.records.append(CallRecord(request, response))
        return response

    def embed(self, text: str) -> EmbeddingVector:
        return self.inner.embed(text)

    @property
    def call_log(self) -> list[CallRecord]:
        with self._lock:
            return list(self.records)


class Session:
    """One conversation: settings, history, per-session blackboard, events."""

    def __init__(self, session_id: str, user_id: str, clock: Callable[[], float]):
        self.id = session_id
        self.user_id = user_id
        self.created_at = clock()
        self.settings = SessionSettings()
        self.user_model = UserModel(user_id)
        self.context = ConversationContext(clock)
        self.deliberation_log: list[Deliberation] = []
        self.events = EventLog(clock)
        self.board = Blackboard()
        self.turns_handled = 0
        self.lock = threading.Lock()  # serializes queries within the session

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "user_id": self.user_id,
            "created_at": self.created_at,
            "settings": self.settings.to_dict(),
            "turns_handled": self.turns_handled,
            "turns": len(self.context.turns),
            "events": len(self.events),
        }


@dataclass(frozen=True)
class OrchestratedResponse:
    session_id: str
    query: str
    answer: str
    mode: ReasoningMode
    thinking_level: ThinkingLevel
    thinking_budget: int
    task_type: TaskType
    deliberation: Deliberation
    sources: tuple[SourceResult, ...] = ()
    source_errors: dict[str, str] = field(default_factory=dict)
    confidence: float = 0.0
    report: Optional[ConfidenceReport] = None
    refinement_rounds: int = 0
    trace: Optional[ReasoningTrace] = None
    ensemble: Optional[EnsembleResult] = None
    collaboration: Optional[HybridResult] = None
    debate: Optional[tuple[DebateState, DebateConclusion]] = None
    usage: TokenUsage = TokenUsage()
    events: tuple[Event, ...] = ()
    degraded_from: Optional[ReasoningMode] = None
    memory_entry_id: Optional[str] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        ensemble = None
        if self.ensemble is not None:
            ensemble = _ensemble_dict(self.ensemble)
        collaboration = None
        if self.collaboration is not None:
            collaboration = {
                "answer": self.collaboration.answer,
                "confidence": self.collaboration.confidence,
                "agreement": self.collaboration.agreement,
                "synthesis": self.collaboration.synthesis,
                "refine_rounds": self.collaboration.refine_rounds,
                "ensemble": _ensemble_dict(self.collaboration.ensemble),
            }
        debate = None
        if self.debate is not None:
            state, conclusion = self.debate
            debate = {"state": state.to_dict(), "conclusion": conclusion.to_dict()}
        return {
            "session_id": self.session_id,
            "query": self.query,
            "answer": self.answer,
            "mode": self.mode.value,
            "thinking_level": self.thinking_level.label,
            "thinking_budget": self.thinking_budget,
            "task_type": self.task_type.value,
            "deliberation": self.deliberation.to_dict(),
            "sources": [r.to_dict() for r in self.sources],
            "source_errors": dict(self.source_errors),
            "confidence": self.confidence,
            "report": self.report.to_dict() if self.report else None,
            "refinement_rounds": self.refinement_rounds,
            "trace": (
                [s.to_dict() for s in self.trace.steps] if self.trace else None
            ),
            "trace_concluded": self.trace.concluded if self.trace else None,
            "ensemble": ensemble,
            "collaboration": collaboration,
            "debate": debate,
            "usage": self.usage.to_dict(),
            "events": [e.to_dict() for e in self.events],
            "degraded_from": self.degraded_from.value if self.degraded_from else None,
            "memory_entry_id": self.memory_entry_id,
            "error": self.error,
        }


def _ensemble_dict(ensemble: EnsembleResult) -> dict:
    return {
        "answers": [
            {"agent": name, "answer": answer, "confidence": confidence}
            for name, answer, confidence in ensemble.answers
        ],
        "best_answer": ensemble.best_answer,
        "best_confidence": ensemble.best_confidence,
        "mean_confidence": ensemble.mean_confidence,
        "agreement": ensemble.agreement,
        "dissenting": list(ensemble.dissenting),
    }


@dataclass(frozen=True)
class AgentHandle:
    name: str
    role: str
    system_prompt: str
    tools: ToolRegistry


class _EmptySearchBackend:
    def search(self, query: str, source: Source) -> list[SourceResult]:
        return []


class Orchestrator:
    def __init__(
        self,
        provider: ProviderPort,
        config: Optional[DovaConfig] = None,
        search_backend=None,
        memory: Optional[MemoryStore] = None,
        clock: Callable[[], float] = time.time,
    ):
        self.config = config or DovaConfig()
        self.provider = provider
        self.clock = clock
        if search_backend is not None:
            self.search_backend = search_backend
        elif self.config.fixtures_dir:
            from .routing import FixtureSearchBackend

            self.search_backend = FixtureSearchBackend(self.config.fixtures_dir)
        else:
            self.search_backend = _EmptySearchBackend()
        self.memory = memory or MemoryStore(
            embedder=provider.embed,
            clock=clock,
            persist_dir=self.config.memory_dir,
            max_entries=self.config.memory_max_entries,
        )
        self._sessions: dict[str, Session] = {}
        self._session_counter = 0
        self._lock = threading.Lock()
        self._queries_handled = 0
        self._errors = 0
        self._mode_counts: dict[str, int] = {}

    # -- sessions ---------------------------------------------------------

    def create_session(self, user_id: str = "user") -> Session:
        with self._lock:
            self._session_counter += 1
            session = Session(f"s-{self._session_counter:06d}", user_id, self.clock)
            self._sessions[session.id] = session
            return session

    def get_session(self, session_id: str) -> Optional[Session]:
        with self._lock:
            return self._sessions.get(session_id)

    def delete_session(self, session_id: str) -> bool:
        with self._lock:
            return self._sessions.pop(session_id, None) is not None

    def list_sessions(self) -> list[Session]:
        with self._lock:
            return sorted(self._sessions.values(), key=lambda s: s.id)

    def metrics(self) -> dict:
        with self._lock:
            return {
                "sessions": len(self._sessions),
                "queries_handled": self._queries_handled,
                "errors": self._errors,
                "mode_counts": dict(self._mode_counts),
                "memory_entries": len(self.memory),
                "provider_calls": len(self.provider.call_log),
            }

    # -- tool plumbing ----------------------------------------------------

    def enabled_sources(self) -> tuple[Source, ...]:
        enabled = set(self.config.enabled_sources)
        return tuple(s for s in SOURCE_ORDER if s.value in enabled)

    def source_tool_names(self) -> list[str]:
        return [f"search_{s.value}" for s in self.enabled_sources()]

    def _source_registry(
        self, collector: list[SourceResult], only: Optional[set[str]] = None
    ) -> ToolRegistry:
        registry = ToolRegistry()
        for source in self.enabled_sources():
            tool_name = f"search_{source.value}"
            if only is not None and tool_name not in only:
                continue

            def handler(args: dict, _source: Source = source) -> str:
                query = str(args.get("query") or args.get("input") or "")
                if not query:
                    return "ERROR: search needs a query argument"
                outcome = search_sources(query, (_source,), self.search_backend)
                results = outcome.flatten()
                collector.extend(results)
                if outcome.errors:
                    return f"ERROR: {_source.value} unavailable: {outcome.errors[_source]}"
                if not results:
                    return f"no {_source.value} results for {query!r}"
                return "\n".join(
                    f"[{r.source.value}#{r.rank}] {r.title} ({r.url}): {r.snippet}"
                    for r in results
                )

            registry.register(
                Tool(tool_name, f"Search {source.value} for relevant material", handler)
            )
        return registry

    def _validator_registry(self) -> ToolRegistry:
        def handler(args: dict) -> str:
            content = str(args.get("content") or args.get("input") or "")
            report = validate_code(content)
            if report.ok:
                return f"validation passed ({report.blocks} code blocks)"
            return "validation issues: " + "; ".join(report.issues)

        registry = ToolRegistry()
        registry.register(
            Tool("validate", "Static checks over fenced code blocks", handler)
        )
        return registry

    def spawn_pool(self, collector: list[SourceResult]) -> dict[str, AgentHandle]:
        """Five role agents: research carries the source tools, validation
        carries the static validator, the rest work tool-free."""
        pool = {}
        for role, prompt in ROLE_PROMPTS.items():
            if role == "research":
                tools = self._source_registry(collector)
            elif role == "validation":
                tools = self._validator_registry()
            else:
                tools = ToolRegistry()
            pool[role] = AgentHandle(
                name=role, role=role, system_prompt=prompt, tools=tools
            )
        return pool

    def _agent_system_prompt(self, handle: AgentHandle) -> str:
        parts = [handle.system_prompt, DEFAULT_SYSTEM_PROMPT]
        if len(handle.tools):
            parts.append(f"Tools:\n{handle.tools.describe()}")
        return "\n\n".join(parts)

    def _ensemble_agents(
        self,
        provider: ProviderPort,
        collector: list[SourceResult],
        thinking_budget: int,
        events: EventLog,
    ) -> list[EnsembleAgent]:
        pool = self.spawn_pool(collector)
        size = max(2, min(self.config.ensemble_size, len(ENSEMBLE_ROLES)))
        agents = []
        for role in ENSEMBLE_ROLES[:size]:
            handle = pool[role]

            def runner(problem: str, _handle: AgentHandle = handle) -> tuple[str, float]:
                result = run_react(
                    problem,
                    _handle.tools,
                    provider,
                    ReactConfig(
                        max_iterations=self.config.max_iterations,
                        reflect=False,
                        task_type=TaskType.REASONING,
                        thinking_budget=thinking_budget,
                        system_prompt=self._agent_system_prompt(_handle),
                        agent_name=_handle.name,
                    ),
                    events=events,
                )
                return result.answer, result.confidence

            agents.append(EnsembleAgent(handle.name, runner))
        return agents

    # -- pipeline ---------------------------------------------------------

    def handle_query(self, query: str, session: Session) -> OrchestratedResponse:
        if not query.strip():
            raise ValueError("query must be nonempty")
        with session.lock:
            return self._handle(query, session)

    def _handle(self, query: str, session: Session) -> OrchestratedResponse:
        events = session.events
        first_seq = len(events)
        proxy = _RecordingProvider(self.provider)

        evicted = self.memory.evict_expired()
        events.append("memory_evicted", count=evicted)
        recalled = self.memory.search(
            query,
            MmrParams(self.config.mmr_lambda, self.config.recall_top_k),
        )
        events.append(
            "memory_recall",
            count=len(recalled),
            entry_ids=[entry.id for entry, _ in recalled],
        )

        decision = deliberate(
            query,
            session.user_model,
            session.context,
            self.source_tool_names(),
            proxy,
            events=events,
        )
        session.deliberation_log.append(decision)

        mode = select_mode(decision, session.settings)
        events.append(
            "mode_selected",
            mode=mode.value,
            override=session.settings.mode_override is not None,
            suggested=decision.suggested_mode,
        )

        task = (
            TaskType.RESEARCH
            if decision.action is DeliberationAction.USE_TOOLS
            else TaskType.CHAT
        )
        if session.settings.thinking_override is not None:
            level = session.settings.thinking_override
        elif mode is ReasoningMode.QUICK:
            level = ThinkingLevel.MINIMAL
        else:
            level = select_level(task, query, decision.thinking_hint)
        budget = budget_of(level)
        events.append(
            "thinking_selected", level=level.label, budget=budget, task=task.value
        )

        collector: list[SourceResult] = []
        source_errors: dict[str, str] = {}
        if decision.action is DeliberationAction.USE_TOOLS:
            outcome = self._gather_sources(query, decision, collector)
            source_errors = {s.value: msg for s, msg in outcome.errors.items()}
            events.append(
                "source_search",
                sources=[s.value for s in outcome.groups],
                results=len(collector),
                errors=source_errors,
            )

        problem = _frame_problem(query, recalled, collector)

        answer: Optional[str] = None
        native_confidence: Optional[float] = None
        trace: Optional[ReasoningTrace] = None
        ensemble: Optional[EnsembleResult] = None
        collaboration: Optional[HybridResult] = None
        debate_payload: Optional[tuple[DebateState, DebateConclusion]] = None
        degraded_from: Optional[ReasoningMode] = None
        attempt = mode

        if DEBATE_FLAG in decision.selected_tools and mode is not ReasoningMode.QUICK:
            exec_start = len(proxy.records)
            events.append("execution_started", mode="debate")
            try:
                state, conclusion = run_debate(
                    query,
                    proxy,
                    context=_debate_context(recalled, collector),
                    rounds=self.config.debate_rounds,
                    events=events,
                )
                debate_payload = (state, conclusion)
                answer = conclusion.summary
                native_confidence = conclusion.confidence
                events.append(
                    "execution_finished",
                    mode="debate",
                    calls=len(proxy.records) - exec_start,
                )
            except Exception as exc:
                logger.warning("debate path failed, falling back to %s: %s", mode, exc)
                events.append("debate_failed", error=str(exc))

        while answer is None:
            exec_start = len(proxy.records)
            events.append("execution_started", mode=attempt.value)
            try:
                answer, native_confidence, trace, ensemble, collaboration = (
                    self._execute_mode(
                        attempt, problem, task, budget, decision, proxy,
                        collector, session, events,
                    )
                )
                events.append(
                    "execution_finished",
                    mode=attempt.value,
                    calls=len(proxy.records) - exec_start,
                )
            except Exception as exc:
                if attempt is ReasoningMode.QUICK:
                    events.append("pipeline_failed", mode=attempt.value, error=str(exc))
                    with self._lock:
                        self._errors += 1
                    return OrchestratedResponse(
                        session_id=session.id,
                        query=query,
                        answer="",
                        mode=attempt,
                        thinking_level=level,
                        thinking_budget=budget,
                        task_type=task,
                        deliberation=decision,
                        sources=tuple(collector),
                        source_errors=source_errors,
                        usage=TokenUsage.from_records(proxy.records),
                        events=tuple(events.events(after=first_seq - 1)),
                        degraded_from=degraded_from,
                        error=str(exc),
                    )
                next_mode = DEGRADE[attempt]
                logger.warning(
                    "mode %s failed (%s); degrading to %s", attempt, exc, next_mode
                )
                events.append(
                    "mode_degraded",
                    from_mode=attempt.value,
                    to_mode=next_mode.value,
                    error=str(exc),
                )
                if degraded_from is None:
                    degraded_from = mode
                attempt = next_mode

        def regenerate(refine_prompt: str) -> str:
            return proxy.complete(
                simple_request(refine_prompt, task_type=task, thinking_budget=budget)
            ).text

        refinement = evaluate_and_refine(answer, query, regenerate)
        events.append(
            "scoring",
            overall=refinement.report.overall,
            acceptable=refinement.report.acceptable,
            refinement_rounds=refinement.rounds_used,
            degraded=refinement.degraded,
        )
        answer = refinement.response
        report = refinement.report
        confidence = (
            native_confidence if native_confidence is not None else report.overall
        )

        memory_entry_id: Optional[str] = None
        try:
            entry = self.memory.store(
                f"Q: {query}\nA: {answer}",
                tier=SHORT_TERM,
                metadata={"session_id": session.id, "mode": attempt.value},
            )
            memory_entry_id = entry.id
            events.append("memory_store", entry_id=entry.id)
        except StoreFull as exc:
            logger.warning("memory store full: %s", exc)
            events.append("memory_store_failed", error=str(exc))

        session.context.append_turn("user", query)
        session.context.append_turn("assistant", answer)
        session.turns_handled += 1
        events.append("turn_appended", turns=len(session.context.turns))
        events.append(
            "response_ready", mode=attempt.value, confidence=confidence
        )

        with self._lock:
            self._queries_handled += 1
            self._mode_counts[attempt.value] = (
                self._mode_counts.get(attempt.value, 0) + 1
            )

        return OrchestratedResponse(
            session_id=session.id,
            query=query,
            answer=answer,
            mode=attempt,
            thinking_level=level,
            thinking_budget=budget,
            task_type=task,
            deliberation=decision,
            sources=tuple(collector),
            source_errors=source_errors,
            confidence=confidence,
            report=report,
            refinement_rounds=refinement.rounds_used,
            trace=trace,
            ensemble=ensemble,
            collaboration=collaboration,
            debate=debate_payload,
            usage=TokenUsage.from_records(proxy.records),
            events=tuple(events.events(after=first_seq - 1)),
            degraded_from=degraded_from,
            memory_entry_id=memory_entry_id,
        )

    def _gather_sources(
        self, query: str, decision: Deliberation, collector: list[SourceResult]
    ) -> SourceSearch:
        enabled = self.enabled_sources()
        wanted = [
            name for name in decision.selected_tools if name.startswith("search_")
        ]
        if wanted:
            chosen = tuple(
                s for s in enabled if f"search_{s.value}" in wanted
            )
        else:
            routed = sources_for(classify(query))
            chosen = tuple(s for s in routed if s in enabled)
        outcome = search_sources(query, chosen, self.search_backend)
        collector.extend(outcome.flatten())
        return outcome

    def _execute_mode(
        self,
        mode: ReasoningMode,
        problem: str,
        task: TaskType,
        budget: int,
        decision: Deliberation,
        proxy: _RecordingProvider,
        collector: list[SourceResult],
        session: Session,
        events: EventLog,
    ) -> tuple[
        str,
        Optional[float],
        Optional[ReasoningTrace],
        Optional[EnsembleResult],
        Optional[HybridResult],
    ]:
        if mode is ReasoningMode.QUICK:
            response = proxy.complete(
                simple_request(
                    problem,
                    task_type=task,
                    thinking_budget=budget,
                )
            )
            return response.text, None, None, None, None

        if mode is ReasoningMode.STANDARD:
            selected = {
                name
                for name in decision.selected_tools
                if name.startswith("search_")
            }
            registry = self._source_registry(collector, only=selected or set())
            system_prompt = DEFAULT_SYSTEM_PROMPT
            if len(registry):
                system_prompt = f"{DEFAULT_SYSTEM_PROMPT}\n\nTools:\n{registry.describe()}"
            result = run_react(
                problem,
                registry,
                proxy,
                ReactConfig(
                    max_iterations=self.config.max_iterations,
                    reflect=True,
                    task_type=task,
                    thinking_budget=budget,
                    system_prompt=system_prompt,
                ),
                events=events,
            )
            return result.answer, result.confidence, result.trace, None, None

        agents = self._ensemble_agents(proxy, collector, budget, events)
        if mode is ReasoningMode.DEEP:
            ensemble = run_ensemble(problem, agents, events=events)
            return (
                ensemble.best_answer,
                ensemble.best_confidence,
                None,
                ensemble,
                None,
            )

        hybrid = run_hybrid(
            problem,
            agents,
            proxy,
            session.board,
            events=events,
        )
        return hybrid.answer, hybrid.confidence, None, hybrid.ensemble, hybrid


def _frame_problem(
    query: str,
    recalled: list,
    results: list[SourceResult],
) -> str:
    parts = [query]
    if recalled:
        lines = "\n".join(f"- {entry.content}" for entry, _ in recalled)
        parts.append(f"Relevant memory:\n{lines}")
    if results:
        lines = "\n".join(
            f"- [{r.source.value}] {r.title}: {r.snippet}" for r in results
        )
        parts.append(f"Search results:\n{lines}")
    return "\n\n".join(parts)


def _debate_context(recalled: list, results: list[SourceResult]) -> str:
    parts = []
    if recalled:
        parts.append(
            "Memory:\n" + "\n".join(f"- {entry.content}" for entry, _ in recalled)
        )
    if results:
        parts.append(
            "Search results:\n"
            + "\n".join(f"- [{r.source.value}] {r.title}: {r.snippet}" for r in results)
        )
    return "\n\n".join(parts)
