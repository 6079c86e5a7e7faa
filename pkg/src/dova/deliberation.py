"""Deliberation before action.

Before any tools run, the engine asks a model whether this query needs them
at all, conditioned on a digest of who is asking (expertise, preferences),
what the conversation has mentioned (entities, recent turns), and which tools
exist. Mandatory triggers (temporal words, recent years, source-specificity
phrases) override a direct-response decision so freshness-sensitive queries
always reach the tools. Judgment-seeking queries additionally select the
debate flag so the orchestrator can run a structured pro/contra exchange.
"""

from __future__ import annotations

import logging
import re
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

from .errors import EmptyLog, ProviderError
from .events import EventLog
from .providers import (
    CompletionRequest,
    Message,
    ProviderPort,
    TaskType,
    resolve_tier,
)
from .thinking import ComplexityHint

logger = logging.getLogger(__name__)

RECENT_TURNS = 6
DEBATE_FLAG = "debate"

TEMPORAL_TRIGGERS: tuple[str, ...] = (
    "latest",
    "recent",
    "current",
    "today",
    "this week",
)
SPECIFICITY_TRIGGERS: tuple[str, ...] = (
    "specific papers",
    "specific paper",
    "cite sources",
    "with citations",
)
MIN_TRIGGER_YEAR = 2025

EVALUATIVE_KEYWORDS: tuple[str, ...] = ("should", "is it worth", "pros and cons")

_YEAR = re.compile(r"\b(2\d{3})\b")
_WORD_SHOULD = re.compile(r"\bshould\b")
_QUOTED = re.compile(r"[\"`]([^\"`]{1,80})[\"`]")
_CAP_SPAN = re.compile(r"\b[A-Z][A-Za-z0-9]*(?:\s+[A-Z][A-Za-z0-9]*)*")
_SENTENCE_START = re.compile(r"(?:^|[.!?]\s+)([A-Z][A-Za-z0-9]*)")


@dataclass
class UserModel:
    """What the engine believes about the person asking."""

    user_id: str
    expertise_areas: list[tuple[str, str]] = field(default_factory=list)
    preferences: dict = field(default_factory=dict)
    interaction_count: int = 0

    def __post_init__(self) -> None:
        topics = [topic for topic, _ in self.expertise_areas]
        if len(topics) != len(set(topics)):
            raise ValueError("expertise topics must be unique")

    def set_expertise(self, topic: str, level: str) -> None:
        for i, (existing, _) in enumerate(self.expertise_areas):
            if existing == topic:
                self.expertise_areas[i] = (topic, level)
                return
        self.expertise_areas.append((topic, level))

    def format_expertise(self) -> str:
        if not self.expertise_areas:
            return "(no expertise recorded)"
        return "; ".join(f"{level} in {topic}" for topic, level in self.expertise_areas)

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "expertise_areas": [list(pair) for pair in self.expertise_areas],
            "preferences": self.preferences,
            "interaction_count": self.interaction_count,
        }


@dataclass(frozen=True)
class Turn:
    role: str
    text: str
    timestamp: float


@dataclass(frozen=True)
class EntityMention:
    kind: str  # "name" | "quoted"
    last_turn: int


def extract_entities(text: str) -> list[tuple[str, str]]:
    """Heuristic mention extraction: quoted spans plus capitalized spans.

    A single capitalized token only counts when it does not open a sentence,
    which discards most function-word false positives without a tagger.
    """
    found: list[tuple[str, str]] = []
    seen: set[str] = set()
    for match in _QUOTED.finditer(text):
        name = match.group(1).strip()
        if name and name not in seen:
            seen.add(name)
            found.append((name, "quoted"))
    sentence_initial = {m.group(1) for m in _SENTENCE_START.finditer(text)}
    for match in _CAP_SPAN.finditer(text):
        span = match.group(0)
        tokens = span.split()
        if len(tokens) == 1:
            token = tokens[0]
            if token == "I" or token in sentence_initial:
                continue
        if span not in seen:
            seen.add(span)
            found.append((span, "name"))
    return found


class ConversationContext:
    """Turn history plus the entity mentions accumulated across it."""

    def __init__(self, clock: Callable[[], float] = time.time):
        self._clock = clock
        self.turns: list[Turn] = []
        self.entities: dict[str, EntityMention] = {}

    def append_turn(self, role: str, text: str) -> Turn:
        if role not in ("user", "assistant"):
            raise ValueError(f"unknown turn role: {role!r}")
        turn = Turn(role, text, self._clock())
        self.turns.append(turn)
        index = len(self.turns) - 1
        for name, kind in extract_entities(text):
            self.entities[name] = EntityMention(kind, index)
        return turn

    def recent(self, k: int = RECENT_TURNS) -> list[Turn]:
        return self.turns[-k:]

    def format_entities(self, limit: int = 10) -> str:
        if not self.entities:
            return "(none)"
        ordered = sorted(
            self.entities.items(), key=lambda kv: (-kv[1].last_turn, kv[0])
        )[:limit]
        return "; ".join(
            f"{name} ({mention.kind}, turn {mention.last_turn})"
            for name, mention in ordered
        )

    def format_recent(self, k: int = RECENT_TURNS) -> str:
        turns = self.recent(k)
        if not turns:
            return "(no prior turns)"
        return "\n".join(f"{t.role}: {t.text}" for t in turns)


@dataclass(frozen=True)
class TriggerConfig:
    temporal: tuple[str, ...] = TEMPORAL_TRIGGERS
    specificity: tuple[str, ...] = SPECIFICITY_TRIGGERS
    min_year: int = MIN_TRIGGER_YEAR


def fired_triggers(query: str, config: TriggerConfig = TriggerConfig()) -> list[str]:
    """Names of the mandatory triggers this query sets off."""
    lowered = query.lower()
    fired = [f"temporal:{kw}" for kw in config.temporal if kw in lowered]
    fired.extend(
        f"year:{m.group(1)}"
        for m in _YEAR.finditer(query)
        if int(m.group(1)) >= config.min_year
    )
    fired.extend(f"specificity:{kw}" for kw in config.specificity if kw in lowered)
    return fired


def mandatory_triggers(query: str, config: TriggerConfig = TriggerConfig()) -> bool:
    return bool(fired_triggers(query, config))


def is_evaluative(query: str) -> bool:
    """Does the query ask for a judgment rather than a fact?"""
    lowered = query.lower()
    if _WORD_SHOULD.search(lowered):
        return True
    return any(kw in lowered for kw in EVALUATIVE_KEYWORDS[1:])


class DeliberationAction(str, Enum):
    RESPOND_DIRECTLY = "respond_directly"
    USE_TOOLS = "use_tools"


@dataclass(frozen=True)
class Deliberation:
    action: DeliberationAction
    rationale: str
    selected_tools: tuple[str, ...] = ()
    thinking_hint: ComplexityHint = ComplexityHint.NORMAL
    suggested_mode: Optional[str] = None
    mandatory_override: bool = False

    def __post_init__(self) -> None:
        nonempty = bool(self.selected_tools)
        if nonempty != (self.action is DeliberationAction.USE_TOOLS):
            raise ValueError("selected_tools nonempty iff action is use_tools")

    def to_dict(self) -> dict:
        return {
            "action": self.action.value,
            "rationale": self.rationale,
            "selected_tools": list(self.selected_tools),
            "thinking_hint": self.thinking_hint.value,
            "suggested_mode": self.suggested_mode,
            "mandatory_override": self.mandatory_override,
        }


DELIBERATION_SYSTEM_PROMPT = (
    "You decide how to handle a query before any work happens. Respond exactly:\n"
    "ACTION: respond_directly | use_tools\n"
    "RATIONALE: <one or two sentences>\n"
    "TOOLS: <comma-separated tool names, or none>\n"
    "MODE: quick | standard | deep | collaborative | none\n"
    "COMPLEXITY: simple | normal | complex | very_complex"
)

_DELIB_BLOCK = re.compile(
    r"ACTION:\s*(?P<action>[a-z_]+)\s*"
    r"RATIONALE:\s*(?P<rationale>.*?)\s*"
    r"(?:TOOLS:\s*(?P<tools>.*?)\s*)?"
    r"(?:MODE:\s*(?P<mode>[a-z_]+)\s*)?"
    r"(?:COMPLEXITY:\s*(?P<complexity>[a-z_]+)\s*)?\Z",
    re.S | re.I,
)

_MODES = ("quick", "standard", "deep", "collaborative")

DELIB_REPROMPT = (
    "Your previous output could not be parsed. "
    + DELIBERATION_SYSTEM_PROMPT.split("Respond exactly:\n", 1)[1]
)


def build_deliberation_prompt(
    query: str,
    user_model: UserModel,
    context: ConversationContext,
    available_tools: Sequence[str],
) -> str:
    return (
        f"User expertise: {user_model.format_expertise()}\n"
        f"Known entities: {context.format_entities()}\n"
        f"Recent turns:\n{context.format_recent()}\n"
        f"Available tools: {', '.join(available_tools) or 'none'}\n\n"
        f"Query: {query}\n\n"
        f"Decide whether this query needs tools, which ones, and how complex it is."
    )


def parse_deliberation(
    text: str, available_tools: Sequence[str]
) -> Optional[tuple[DeliberationAction, str, tuple[str, ...], Optional[str], ComplexityHint]]:
    match = _DELIB_BLOCK.search(text.strip())
    if match is None:
        return None
    action_raw = match.group("action").lower()
    try:
        action = DeliberationAction(action_raw)
    except ValueError:
        return None
    rationale = match.group("rationale").strip()
    if not rationale:
        return None
    tools_raw = (match.group("tools") or "").strip().lower()
    tools: tuple[str, ...] = ()
    if tools_raw and tools_raw != "none":
        allowed = set(available_tools)
        tools = tuple(
            name.strip()
            for name in tools_raw.split(",")
            if name.strip() and name.strip() in allowed
        )
    mode_raw = (match.group("mode") or "").lower()
    mode = mode_raw if mode_raw in _MODES else None
    complexity_raw = (match.group("complexity") or "normal").lower()
    try:
        hint = ComplexityHint.from_label(complexity_raw)
    except ValueError:
        hint = ComplexityHint.NORMAL
    return action, rationale, tools, mode, hint


def _fail_open(
    available_tools: Sequence[str], rationale: str, hint: ComplexityHint
) -> Deliberation:
    return Deliberation(
        action=DeliberationAction.USE_TOOLS,
        rationale=rationale,
        selected_tools=tuple(available_tools),
        thinking_hint=hint,
    )


def deliberate(
    query: str,
    user_model: UserModel,
    context: ConversationContext,
    available_tools: Sequence[str],
    provider: ProviderPort,
    triggers: TriggerConfig = TriggerConfig(),
    task_type: TaskType = TaskType.REASONING,
    thinking_budget: int = 0,
    events: EventLog | None = None,
) -> Deliberation:
    """Decide respond-directly versus use-tools for one query.

    With no tools available the decision is forced to respond_directly and no
    model call happens. Otherwise one model call (plus one re-prompt on a
    parse failure) yields the decision; an unusable or failing model fails
    open to use_tools with every tool selected, because wasting a search is
    cheaper than answering a freshness-sensitive query from stale weights.
    """
    if not available_tools:
        return Deliberation(
            action=DeliberationAction.RESPOND_DIRECTLY,
            rationale="no tools available; answering directly",
        )

    spec = resolve_tier(task_type)
    prompt = build_deliberation_prompt(query, user_model, context, available_tools)

    def call(text: str) -> str:
        request = CompletionRequest(
            messages=(
                Message("system", DELIBERATION_SYSTEM_PROMPT),
                Message("user", text),
            ),
            task_type=task_type,
            max_tokens=max(spec.max_tokens, 1),
            temperature=spec.temperature,
            thinking_budget=thinking_budget,
        )
        return provider.complete(request).text

    parsed = None
    try:
        parsed = parse_deliberation(call(prompt), available_tools)
        if parsed is None:
            logger.debug("deliberation parse failed, re-prompting once")
            parsed = parse_deliberation(
                call(f"{prompt}\n\n{DELIB_REPROMPT}"), available_tools
            )
    except ProviderError as exc:
        logger.warning("deliberation provider call failed: %s", exc)
        decision = _fail_open(
            available_tools, "deliberation unavailable; using tools", ComplexityHint.NORMAL
        )
        if events is not None:
            events.append("deliberation", **decision.to_dict())
        return decision

    if parsed is None:
        decision = _fail_open(
            available_tools, "deliberation unparseable; using tools", ComplexityHint.NORMAL
        )
        if events is not None:
            events.append("deliberation", **decision.to_dict())
        return decision

    action, rationale, tools, mode, hint = parsed

    fired = fired_triggers(query, triggers)
    override = bool(fired)
    if fired:
        action = DeliberationAction.USE_TOOLS
        rationale = f"{rationale} [mandatory triggers: {', '.join(fired)}]"

    if is_evaluative(query):
        action = DeliberationAction.USE_TOOLS
        if DEBATE_FLAG not in tools:
            tools = tools + (DEBATE_FLAG,)

    if action is DeliberationAction.USE_TOOLS and not tools:
        tools = tuple(available_tools)
    if action is DeliberationAction.RESPOND_DIRECTLY:
        tools = ()

    decision = Deliberation(
        action=action,
        rationale=rationale,
        selected_tools=tools,
        thinking_hint=hint,
        suggested_mode=mode,
        mandatory_override=override,
    )
    if events is not None:
        events.append("deliberation", **decision.to_dict())
    return decision


def tool_call_fraction(log: Sequence[Deliberation]) -> float:
    """Fraction of deliberations that chose respond_directly."""
    if not log:
        raise EmptyLog("no deliberations recorded")
    direct = sum(
        1 for d in log if d.action is DeliberationAction.RESPOND_DIRECTLY
    )
    return direct / len(log)


def expected_tool_volume(log: Sequence[Deliberation]) -> float:
    """Expected tool-augmented fraction: 1 - f_d."""
    return 1.0 - tool_call_fraction(log)
