"""Hybrid collaborative reasoning: ensemble, blackboard, refinement.

Phase 1 runs several agents on the same problem concurrently and measures
how much they agree (1 minus the population variance of their confidences,
floored at zero). Phase 2 clears a shared blackboard, posts the best answer
as a hypothesis at the ensemble's mean confidence, posts each dissenting
answer as low-confidence evidence, and synthesizes the board into one draft.
Phase 3 runs a short critique/revise exchange over that draft. The final
confidence averages the ensemble mean with the refinement's confidence, so
neither a loud ensemble nor a confident reviser can dominate alone.
"""

from __future__ import annotations

import logging
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from statistics import pvariance
from typing import Callable, Optional, Sequence

from .errors import EmptyBoard, EnsembleFailed, ProviderError
from .events import EventLog
from .providers import (
    CompletionRequest,
    Message,
    ProviderPort,
    TaskType,
    resolve_tier,
)

logger = logging.getLogger(__name__)

DISSENT_CONFIDENCE = 0.3
MAX_REFINE_ROUNDS = 2
MIN_ENSEMBLE_AGENTS = 2


class PostKind(str, Enum):
    HYPOTHESIS = "hypothesis"
    EVIDENCE = "evidence"
    CRITIQUE = "critique"


@dataclass
class BlackboardPost:
    post_id: int
    kind: PostKind
    content: str
    base_confidence: float
    author: str
    votes: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "post_id": self.post_id,
            "kind": self.kind.value,
            "content": self.content,
            "base_confidence": self.base_confidence,
            "author": self.author,
            "votes": dict(self.votes),
        }


def weighted_confidence(post: BlackboardPost) -> float:
    """base * (1 + mean(votes)) / 2, with an empty vote list meaning 0.

    Unanimous agreement recovers the base confidence; unanimous disagreement
    drives the weight to zero; silence halves it.
    """
    if post.votes:
        mean_vote = sum(post.votes.values()) / len(post.votes)
    else:
        mean_vote = 0.0
    return post.base_confidence * (1.0 + mean_vote) / 2.0


class Blackboard:
    """Shared post board; post ids are the total order of arrival."""

    def __init__(self) -> None:
        self._posts: list[BlackboardPost] = []
        self._lock = threading.Lock()

    def post(
        self,
        kind: PostKind,
        content: str,
        base_confidence: float,
        author: str = "system",
    ) -> BlackboardPost:
        if not content:
            raise ValueError("post content must be nonempty")
        if not 0.0 <= base_confidence <= 1.0:
            raise ValueError("base_confidence out of range [0, 1]")
        with self._lock:
            entry = BlackboardPost(
                post_id=len(self._posts),
                kind=kind,
                content=content,
                base_confidence=base_confidence,
                author=author,
            )
            self._posts.append(entry)
            return entry

    def vote(self, post_id: int, voter: str, value: float) -> None:
        """Record voter's stance in [-1, 1]; a repeat vote replaces the old one."""
        if not -1.0 <= value <= 1.0:
            raise ValueError("vote value out of range [-1, 1]")
        with self._lock:
            for post in self._posts:
                if post.post_id == post_id:
                    post.votes[voter] = value
                    return
        raise KeyError(f"no post with id {post_id}")

    def posts(self, kind: Optional[PostKind] = None) -> list[BlackboardPost]:
        with self._lock:
            return [p for p in self._posts if kind is None or p.kind is kind]

    def clear(self) -> None:
        with self._lock:
            self._posts.clear()

    def __len__(self) -> int:
        with self._lock:
            return len(self._posts)


@dataclass(frozen=True)
class EnsembleAgent:
    """A runnable independent solver: problem text in, (answer, confidence) out."""

    name: str
    run: Callable[[str], tuple[str, float]]


@dataclass(frozen=True)
class EnsembleResult:
    answers: tuple[tuple[str, str, float], ...]  # (agent, answer, confidence)
    best_answer: str
    best_confidence: float
    mean_confidence: float
    agreement: float
    dissenting: tuple[str, ...]


def _normalize_answer(text: str) -> str:
    return " ".join(text.split()).lower()


def run_ensemble(
    problem: str,
    agents: Sequence[EnsembleAgent],
    events: EventLog | None = None,
) -> EnsembleResult:
    """Run every agent on the same problem concurrently.

    Results are collected in agent order regardless of completion order, so
    the outcome is deterministic for deterministic agents. Failing agents
    are dropped; if all fail the ensemble fails.
    """
    if len(agents) < MIN_ENSEMBLE_AGENTS:
        raise ValueError(f"ensemble needs >= {MIN_ENSEMBLE_AGENTS} agents")

    def attempt(agent: EnsembleAgent):
        try:
            return agent.run(problem)
        except Exception as exc:
            logger.warning("ensemble agent %s failed: %s", agent.name, exc)
            return exc

    with ThreadPoolExecutor(max_workers=len(agents)) as pool:
        outcomes = list(pool.map(attempt, agents))

    answers: list[tuple[str, str, float]] = []
    for agent, outcome in zip(agents, outcomes):
        if isinstance(outcome, Exception):
            continue
        answer, confidence = outcome
        answers.append((agent.name, answer, confidence))
        if events is not None:
            events.append(
                "ensemble_answer", agent=agent.name, confidence=confidence
            )
    if not answers:
        raise EnsembleFailed("every ensemble agent failed")

    confidences = [c for _, _, c in answers]
    _, best_answer, best_confidence = _first_best(answers)
    agreement = max(0.0, 1.0 - pvariance(confidences))
    best_norm = _normalize_answer(best_answer)
    dissenting = tuple(
        answer
        for _, answer, _ in answers
        if _normalize_answer(answer) != best_norm
    )
    return EnsembleResult(
        answers=tuple(answers),
        best_answer=best_answer,
        best_confidence=best_confidence,
        mean_confidence=sum(confidences) / len(confidences),
        agreement=agreement,
        dissenting=dissenting,
    )


def _first_best(
    answers: list[tuple[str, str, float]]
) -> tuple[str, str, float]:
    # Highest confidence wins; ties go to the earlier agent in order.
    best = answers[0]
    for candidate in answers[1:]:
        if candidate[2] > best[2]:
            best = candidate
    return best


SYNTHESIS_SYSTEM_PROMPT = (
    "You merge a board of hypotheses and evidence into one coherent answer. "
    "Favor higher-weight posts but account for credible dissent."
)


def _call(provider: ProviderPort, system: str, prompt: str) -> str:
    spec = resolve_tier(TaskType.REASONING)
    request = CompletionRequest(
        messages=(Message("system", system), Message("user", prompt)),
        task_type=TaskType.REASONING,
        max_tokens=max(spec.max_tokens, 1),
        temperature=spec.temperature,
    )
    return provider.complete(request).text


def synthesize_blackboard(
    board: Blackboard,
    provider: ProviderPort,
    problem: str,
) -> tuple[str, BlackboardPost]:
    """One provider call over the ranked board; returns (synthesis, top post).

    Posts are ranked by weighted confidence, ties to the earlier post.
    """
    posts = board.posts()
    if not any(p.kind is PostKind.HYPOTHESIS for p in posts):
        raise EmptyBoard("blackboard holds no hypothesis")
    ranked = sorted(
        posts, key=lambda p: (-weighted_confidence(p), p.post_id)
    )
    rendering = "\n".join(
        f"[{p.kind.value} w={weighted_confidence(p):.3f} by {p.author}] {p.content}"
        for p in ranked
    )
    prompt = (
        f"Problem: {problem}\n\n"
        f"Board (highest weight first):\n{rendering}\n\n"
        f"Produce the single best unified answer."
    )
    synthesis = _call(provider, SYNTHESIS_SYSTEM_PROMPT, prompt)
    return synthesis, ranked[0]


CRITIC_SYSTEM_PROMPT = (
    "You critique a draft answer. If it stands as written, reply with the "
    "single word APPROVE. Otherwise state concretely what must change."
)

REVISER_SYSTEM_PROMPT = (
    "You revise a draft answer according to a critique. Respond exactly:\n"
    "REVISION: <the full revised answer>\n"
    "CONFIDENCE: <number between 0 and 1>"
)

_REVISION_BLOCK = re.compile(
    r"REVISION:\s*(?P<revision>.*?)\s*CONFIDENCE:\s*(?P<confidence>[0-9.eE+\-]+)",
    re.S,
)


@dataclass(frozen=True)
class RefineOutcome:
    text: str
    confidence: float
    rounds_executed: int


def iterative_refine(
    problem: str,
    draft: str,
    provider: ProviderPort,
    rounds: int = MAX_REFINE_ROUNDS,
    initial_confidence: float = 0.5,
    events: EventLog | None = None,
) -> RefineOutcome:
    """Alternating critique/revise calls, capped at two rounds.

    A critique beginning with APPROVE ends refinement with the draft as it
    stands; an unparseable revision keeps the current draft and confidence
    for that round rather than guessing.
    """
    current = draft
    confidence = initial_confidence
    executed = 0
    for _ in range(min(MAX_REFINE_ROUNDS, rounds)):
        executed += 1
        critique = _call(
            provider,
            CRITIC_SYSTEM_PROMPT,
            f"Problem: {problem}\n\nDraft:\n{current}",
        )
        if events is not None:
            events.append("refine_critique", round=executed, critique=critique)
        if critique.strip().upper().startswith("APPROVE"):
            break
        revision_text = _call(
            provider,
            REVISER_SYSTEM_PROMPT,
            f"Problem: {problem}\n\nDraft:\n{current}\n\nCritique:\n{critique}",
        )
        match = _REVISION_BLOCK.search(revision_text)
        if match is None:
            logger.debug("revision output unparseable; keeping current draft")
            continue
        current = match.group("revision").strip() or current
        try:
            confidence = max(0.0, min(1.0, float(match.group("confidence"))))
        except ValueError:
            pass
        if events is not None:
            events.append("refine_revision", round=executed, confidence=confidence)
    return RefineOutcome(current, confidence, executed)


@dataclass(frozen=True)
class HybridResult:
    answer: str
    confidence: float
    agreement: float
    ensemble: EnsembleResult
    synthesis: str
    refine_rounds: int


def run_hybrid(
    problem: str,
    agents: Sequence[EnsembleAgent],
    provider: ProviderPort,
    board: Blackboard,
    refine_rounds: int = MAX_REFINE_ROUNDS,
    events: EventLog | None = None,
) -> HybridResult:
    """Full three-phase pipeline over a shared blackboard.

    The board is cleared at the start of every run so state never leaks
    between problems. Final confidence = (ensemble mean + refinement
    confidence) / 2.
    """
    ensemble = run_ensemble(problem, agents, events=events)
    if events is not None:
        events.append(
            "ensemble_done",
            agreement=ensemble.agreement,
            mean_confidence=ensemble.mean_confidence,
        )

    board.clear()
    hypothesis = board.post(
        PostKind.HYPOTHESIS,
        ensemble.best_answer,
        ensemble.mean_confidence,
        author="ensemble",
    )
    for dissent in ensemble.dissenting:
        board.post(PostKind.EVIDENCE, dissent, DISSENT_CONFIDENCE, author="dissent")
    if events is not None:
        events.append(
            "blackboard_posted",
            hypothesis_id=hypothesis.post_id,
            dissent_count=len(ensemble.dissenting),
        )

    synthesis, _top = synthesize_blackboard(board, provider, problem)
    if events is not None:
        events.append("blackboard_synthesis", length=len(synthesis))

    refined = iterative_refine(
        problem,
        synthesis,
        provider,
        rounds=refine_rounds,
        initial_confidence=ensemble.mean_confidence,
        events=events,
    )
    final_confidence = (ensemble.mean_confidence + refined.confidence) / 2.0
    return HybridResult(
        answer=refined.text,
        confidence=final_confidence,
        agreement=ensemble.agreement,
        ensemble=ensemble,
        synthesis=synthesis,
        refine_rounds=refined.rounds_executed,
    )
