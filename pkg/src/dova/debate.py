"""Two-sided debate with a synthesis verdict.

An advocate and a skeptic alternate for a fixed number of rounds. Within a
round the advocate sees every prior skeptic argument and the skeptic sees
every advocate argument including the one just made, so each side always
responds to the full opposing record. A final synthesis call condenses the
exchange into a summary, strengths, concerns, and a confidence. A complete
debate at R rounds costs exactly 2R + 1 provider calls; a provider failure
mid-debate flags the state partial and synthesizes whatever was gathered.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import NoArguments, ProviderError
from .events import EventLog
from .providers import (
    CompletionRequest,
    Message,
    ProviderPort,
    TaskType,
    resolve_tier,
)

logger = logging.getLogger(__name__)

DEFAULT_ROUNDS = 2
FALLBACK_CONFIDENCE = 0.5

BULL_SYSTEM_PROMPT = (
    "You argue FOR the position under discussion. Make the strongest honest "
    "case this round, engaging directly with the opposing arguments shown."
)
BEAR_SYSTEM_PROMPT = (
    "You argue AGAINST the position under discussion. Make the strongest "
    "honest case this round, engaging directly with the opposing arguments shown."
)
SYNTHESIS_SYSTEM_PROMPT = (
    "You are a neutral judge condensing a debate. Respond exactly:\n"
    "SUMMARY: <balanced overview>\n"
    "STRENGTHS:\n- <point>\n"
    "CONCERNS:\n- <point>\n"
    "CONFIDENCE: <number between 0 and 1>"
)

_SYNTH_BLOCK = re.compile(
    r"SUMMARY:\s*(?P<summary>.*?)\s*"
    r"STRENGTHS:\s*(?P<strengths>.*?)\s*"
    r"CONCERNS:\s*(?P<concerns>.*?)\s*"
    r"CONFIDENCE:\s*(?P<confidence>\S+)",
    re.S,
)


@dataclass
class DebateState:
    topic: str
    bull_args: list[str] = field(default_factory=list)
    bear_args: list[str] = field(default_factory=list)
    rounds_completed: int = 0
    partial: bool = False

    def to_dict(self) -> dict:
        return {
            "topic": self.topic,
            "bull_args": list(self.bull_args),
            "bear_args": list(self.bear_args),
            "rounds_completed": self.rounds_completed,
            "partial": self.partial,
        }


@dataclass(frozen=True)
class DebateConclusion:
    summary: str
    strengths: tuple[str, ...]
    concerns: tuple[str, ...]
    confidence: float

    def to_dict(self) -> dict:
        return {
            "summary": self.summary,
            "strengths": list(self.strengths),
            "concerns": list(self.concerns),
            "confidence": self.confidence,
        }


def _call(provider: ProviderPort, system: str, prompt: str) -> str:
    spec = resolve_tier(TaskType.REASONING)
    request = CompletionRequest(
        messages=(Message("system", system), Message("user", prompt)),
        task_type=TaskType.REASONING,
        max_tokens=max(spec.max_tokens, 1),
        temperature=spec.temperature,
    )
    return provider.complete(request).text


def _render_args(label: str, args: list[str]) -> str:
    if not args:
        return f"{label}: (none yet)"
    numbered = "\n".join(f"{i + 1}. {arg}" for i, arg in enumerate(args))
    return f"{label}:\n{numbered}"


def _side_prompt(
    topic: str, context: str, own: list[str], opposing: list[str], round_no: int
) -> str:
    parts = [f"Topic: {topic}"]
    if context:
        parts.append(f"Context:\n{context}")
    parts.append(_render_args("Opposing arguments so far", opposing))
    parts.append(_render_args("Your previous arguments", own))
    parts.append(f"Round {round_no}: give your argument for this round.")
    return "\n\n".join(parts)


def _parse_points(block: str) -> tuple[str, ...]:
    points = []
    for line in block.splitlines():
        stripped = line.strip()
        if stripped.startswith(("-", "*")):
            stripped = stripped[1:].strip()
        if stripped:
            points.append(stripped)
    return tuple(points)


def synthesize_debate(
    topic: str,
    bull_args: list[str],
    bear_args: list[str],
    provider: ProviderPort,
) -> DebateConclusion:
    """One judge call over the full exchange.

    A response missing the tagged sections falls back to the raw text as the
    summary; an unparseable confidence falls back to 0.5.
    """
    if not bull_args and not bear_args:
        raise NoArguments("nothing to synthesize: no arguments on either side")
    prompt = (
        f"Topic: {topic}\n\n"
        f"{_render_args('Arguments in favor', bull_args)}\n\n"
        f"{_render_args('Arguments against', bear_args)}\n\n"
        f"Deliver your verdict."
    )
    text = _call(provider, SYNTHESIS_SYSTEM_PROMPT, prompt)
    match = _SYNTH_BLOCK.search(text)
    if match is None:
        return DebateConclusion(
            summary=text.strip() or "(empty synthesis)",
            strengths=(),
            concerns=(),
            confidence=FALLBACK_CONFIDENCE,
        )
    try:
        confidence = float(match.group("confidence"))
        confidence = max(0.0, min(1.0, confidence))
    except ValueError:
        confidence = FALLBACK_CONFIDENCE
    return DebateConclusion(
        summary=match.group("summary").strip(),
        strengths=_parse_points(match.group("strengths")),
        concerns=_parse_points(match.group("concerns")),
        confidence=confidence,
    )


def run_debate(
    topic: str,
    provider: ProviderPort,
    context: str = "",
    rounds: int = DEFAULT_ROUNDS,
    events: EventLog | None = None,
) -> tuple[DebateState, DebateConclusion]:
    """Alternate advocate and skeptic for the given rounds, then judge.

    A ProviderError mid-debate stops the exchange, marks the state partial,
    and synthesizes over the arguments gathered so far; if nothing at all
    was gathered the error propagates.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if not topic.strip():
        raise ValueError("topic must be nonempty")
    state = DebateState(topic=topic)

    try:
        for round_no in range(1, rounds + 1):
            bull = _call(
                provider,
                BULL_SYSTEM_PROMPT,
                _side_prompt(topic, context, state.bull_args, state.bear_args, round_no),
            )
            state.bull_args.append(bull)
            if events is not None:
                events.append("debate_argument", side="bull", round=round_no)
            bear = _call(
                provider,
                BEAR_SYSTEM_PROMPT,
                _side_prompt(topic, context, state.bear_args, state.bull_args, round_no),
            )
            state.bear_args.append(bear)
            if events is not None:
                events.append("debate_argument", side="bear", round=round_no)
            state.rounds_completed = round_no
    except ProviderError as exc:
        logger.warning("debate truncated after an argument failed: %s", exc)
        state.partial = True
        if not state.bull_args and not state.bear_args:
            raise

    conclusion = synthesize_debate(topic, state.bull_args, state.bear_args, provider)
    if events is not None:
        events.append(
            "debate_synthesis",
            confidence=conclusion.confidence,
            partial=state.partial,
        )
    return state, conclusion
