"""Multi-component response confidence and the refinement loop.

Four bounded component scores (length adequacy, refusal detection, format
compliance, keyword relevance) combine as a weighted mean. Responses under
the refinement threshold get regenerated with targeted feedback for up to two
rounds, keeping the best-seen response throughout.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import ProviderError
from .providers import tokenize

logger = logging.getLogger(__name__)

TAU_LEN = 200
LENGTH_FLOOR = 0.2
REFUSAL_PENALTY = 0.3
THETA_MIN = 0.6
REFINE_THRESHOLD = 0.7
MAX_REFINE_ROUNDS = 2
RELEVANCE_COVERAGE = 0.3

REFUSAL_KEYWORDS: tuple[str, ...] = (
    "i cannot",
    "i can't",
    "i'm unable",
    "as an ai",
    "i do not have access",
)

# Fixed 50-token stopword list; keyword sets are the remaining lowercase
# alphanumeric tokens under set semantics.
STOPWORDS: frozenset[str] = frozenset(
    {
        "a", "an", "the", "and", "or", "but", "if", "then", "else", "of",
        "to", "in", "on", "at", "by", "for", "with", "from", "as", "is",
        "are", "was", "were", "be", "been", "being", "it", "its", "this",
        "that", "these", "those", "i", "you", "he", "she", "we", "they",
        "them", "his", "her", "my", "your", "our", "their", "what", "which",
        "who", "how", "when",
    }
)

_BULLET_LINE = re.compile(r"^\s*(?:[-*]|\d+[.)])\s+\S")


def keywords(text: str) -> set[str]:
    return set(tokenize(text)) - STOPWORDS


@dataclass(frozen=True)
class FormatSpec:
    """Optional output-format contract; each configured field is one check."""

    must_contain: tuple[str, ...] = ()
    parse_as: Optional[str] = None  # "json" | "list" | "number"
    min_length: Optional[int] = None
    max_length: Optional[int] = None

    def __post_init__(self) -> None:
        if self.parse_as not in (None, "json", "list", "number"):
            raise ValueError(f"unknown parse_as: {self.parse_as!r}")

    def checks(self, response: str) -> list[bool]:
        results = [needle in response for needle in self.must_contain]
        if self.parse_as is not None:
            results.append(_parses_as(response, self.parse_as))
        if self.min_length is not None:
            results.append(len(response) >= self.min_length)
        if self.max_length is not None:
            results.append(len(response) <= self.max_length)
        return results


def _parses_as(response: str, kind: str) -> bool:
    text = response.strip()
    if kind == "json":
        try:
            json.loads(text)
            return True
        except json.JSONDecodeError:
            return False
    if kind == "number":
        try:
            float(text)
            return True
        except ValueError:
            return False
    # list: a JSON array or at least two bulleted/numbered lines
    try:
        return isinstance(json.loads(text), list)
    except json.JSONDecodeError:
        pass
    bullets = [line for line in text.splitlines() if _BULLET_LINE.match(line)]
    return len(bullets) >= 2


@dataclass(frozen=True)
class EvalConfig:
    tau_len: int = TAU_LEN
    theta_min: float = THETA_MIN
    refine_threshold: float = REFINE_THRESHOLD
    max_rounds: int = MAX_REFINE_ROUNDS
    refusal_keywords: tuple[str, ...] = REFUSAL_KEYWORDS
    weights: dict[str, float] = field(
        default_factory=lambda: {
            "length": 1.0,
            "refusal": 1.0,
            "format": 1.0,
            "relevance": 1.0,
        }
    )

    def __post_init__(self) -> None:
        if sum(self.weights.values()) <= 0:
            raise ValueError("component weights must sum to a positive value")


DEFAULT_EVAL_CONFIG = EvalConfig()


@dataclass(frozen=True)
class ComponentScores:
    length: float
    refusal: float
    format: float
    relevance: float

    def as_dict(self) -> dict[str, float]:
        return {
            "length": self.length,
            "refusal": self.refusal,
            "format": self.format,
            "relevance": self.relevance,
        }

    def weakest(self) -> str:
        scores = self.as_dict()
        return min(scores, key=lambda k: (scores[k], _COMPONENT_ORDER[k]))


_COMPONENT_ORDER = {"length": 0, "refusal": 1, "format": 2, "relevance": 3}


@dataclass(frozen=True)
class ConfidenceReport:
    components: ComponentScores
    overall: float
    acceptable: bool

    def to_dict(self) -> dict:
        return {
            "components": self.components.as_dict(),
            "overall": self.overall,
            "acceptable": self.acceptable,
        }


def length_score(response: str, tau_len: int = TAU_LEN) -> float:
    return max(LENGTH_FLOOR, min(1.0, len(response) / tau_len))


def refusal_score(
    response: str, refusal_keywords: tuple[str, ...] = REFUSAL_KEYWORDS
) -> float:
    lowered = response.lower()
    if any(kw in lowered for kw in refusal_keywords):
        return REFUSAL_PENALTY
    return 1.0


def format_score(response: str, spec: Optional[FormatSpec]) -> float:
    if spec is None:
        return 1.0
    checks = spec.checks(response)
    if not checks:
        return 1.0
    return sum(checks) / len(checks)


def relevance_score(response: str, prompt: str) -> float:
    prompt_keywords = keywords(prompt)
    if not prompt_keywords:
        return 1.0
    overlap = len(keywords(response) & prompt_keywords)
    return min(1.0, overlap / (RELEVANCE_COVERAGE * len(prompt_keywords)))


def component_scores(
    response: str,
    prompt: str,
    format_spec: Optional[FormatSpec] = None,
    config: EvalConfig = DEFAULT_EVAL_CONFIG,
) -> ComponentScores:
    return ComponentScores(
        length=length_score(response, config.tau_len),
        refusal=refusal_score(response, config.refusal_keywords),
        format=format_score(response, format_spec),
        relevance=relevance_score(response, prompt),
    )


def score(
    response: str,
    prompt: str,
    format_spec: Optional[FormatSpec] = None,
    config: EvalConfig = DEFAULT_EVAL_CONFIG,
) -> ConfidenceReport:
    """Weighted mean of the component scores; acceptable iff >= theta_min."""
    components = component_scores(response, prompt, format_spec, config)
    values = components.as_dict()
    total_weight = sum(config.weights.get(k, 1.0) for k in values)
    overall = sum(config.weights.get(k, 1.0) * v for k, v in values.items()) / total_weight
    return ConfidenceReport(
        components=components,
        overall=overall,
        acceptable=overall >= config.theta_min,
    )


_FEEDBACK = {
    "length": "Give a longer, more complete answer.",
    "refusal": "Answer the question directly instead of refusing.",
    "format": "Follow the required output format exactly.",
    "relevance": "Address the question's key terms directly.",
}


@dataclass(frozen=True)
class RefinementResult:
    response: str
    report: ConfidenceReport
    rounds_used: int
    degraded: bool = False  # a regeneration call failed; best-so-far returned


def evaluate_and_refine(
    response: str,
    prompt: str,
    regenerate: Callable[[str], str],
    format_spec: Optional[FormatSpec] = None,
    config: EvalConfig = DEFAULT_EVAL_CONFIG,
) -> RefinementResult:
    """Score, then regenerate with targeted feedback while below threshold.

    At most config.max_rounds regenerations; the best-seen response always
    wins, so a refinement round that scores worse is discarded.
    """
    best_response = response
    best_report = score(response, prompt, format_spec, config)
    rounds = 0
    degraded = False
    while best_report.overall < config.refine_threshold and rounds < config.max_rounds:
        rounds += 1
        weakest = best_report.components.weakest()
        refine_prompt = (
            f"{prompt}\n\n"
            f"Your previous answer needs improvement. {_FEEDBACK[weakest]}\n"
            f"Previous answer:\n{best_response}"
        )
        try:
            candidate = regenerate(refine_prompt)
        except ProviderError as exc:
            logger.warning("refinement round %d failed: %s", rounds, exc)
            degraded = True
            break
        candidate_report = score(candidate, prompt, format_spec, config)
        if candidate_report.overall > best_report.overall:
            best_response = candidate
            best_report = candidate_report
    return RefinementResult(best_response, best_report, rounds, degraded)
