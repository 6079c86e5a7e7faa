"""Query-intent classification and source routing.

A query is scored against per-type keyword lexicons (each phrase present in
the lowercased query counts once) with a flat bonus for person-shaped
biographical queries; the winning type picks which sources to search. Source
lookups run against a backend port; the bundled fixture backend reads canned
result files so the whole pipeline works offline, and per-source failures
never poison the other sources.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Optional, Protocol, Sequence

from .errors import BackendUnavailable

logger = logging.getLogger(__name__)


class Source(str, Enum):
    ARXIV = "arxiv"
    GITHUB = "github"
    HUGGINGFACE = "huggingface"
    WEB = "web"


SOURCE_ORDER: tuple[Source, ...] = (
    Source.ARXIV,
    Source.GITHUB,
    Source.HUGGINGFACE,
    Source.WEB,
)


class QueryType(str, Enum):
    TECHNICAL = "technical"
    NEWS = "news"
    BIOGRAPHICAL = "biographical"
    FACTUAL = "factual"
    GENERAL = "general"


# Tie-break priority when scores are equal and nonzero.
TYPE_PRIORITY: tuple[QueryType, ...] = (
    QueryType.TECHNICAL,
    QueryType.NEWS,
    QueryType.BIOGRAPHICAL,
    QueryType.FACTUAL,
    QueryType.GENERAL,
)

DEFAULT_LEXICONS: dict[QueryType, tuple[str, ...]] = {
    QueryType.TECHNICAL: (
        "code",
        "implementation",
        "algorithm",
        "paper",
        "model",
        "benchmark",
        "library",
    ),
    QueryType.NEWS: ("news", "announced", "release", "today"),
    QueryType.BIOGRAPHICAL: ("who is", "biography", "born", "career"),
    QueryType.FACTUAL: ("what is", "define", "when did", "how many"),
    QueryType.GENERAL: (),
}

PERSON_BONUS = 2

SOURCE_ROUTES: dict[QueryType, tuple[Source, ...]] = {
    QueryType.TECHNICAL: SOURCE_ORDER,
    QueryType.NEWS: (Source.WEB,),
    QueryType.BIOGRAPHICAL: (Source.WEB,),
    QueryType.FACTUAL: (Source.ARXIV, Source.WEB),
    QueryType.GENERAL: SOURCE_ORDER,
}

_PERSON_TRIGGER = re.compile(r"\b(who is|who was)\b", re.I)
_CAPITALIZED = re.compile(r"^[A-Z][\w.\-]*$")
_HONORIFIC = re.compile(r"\b(?:[Mm]r|[Mm]rs|[Mm]s|[Dd]r|[Pp]rof|[Ss]ir)\.?\s+[A-Z]")


@dataclass(frozen=True)
class KeywordLexicon:
    phrases: dict[QueryType, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_LEXICONS)
    )
    person_bonus: int = PERSON_BONUS


DEFAULT_LEXICON = KeywordLexicon()


def is_person(query: str) -> bool:
    """Does the query look like it asks about a specific person?

    Fires on "who is"/"who was" followed anywhere by a span of one or two
    capitalized tokens, or on an honorific followed by a capitalized name.
    """
    match = _PERSON_TRIGGER.search(query)
    if match is not None:
        remainder = query[match.end():]
        if any(_CAPITALIZED.match(token) for token in remainder.split()):
            return True
    return bool(_HONORIFIC.search(query))


def classify_scores(
    query: str, lexicon: KeywordLexicon = DEFAULT_LEXICON
) -> dict[QueryType, int]:
    lowered = query.lower()
    scores = {
        qtype: sum(1 for phrase in phrases if phrase in lowered)
        for qtype, phrases in lexicon.phrases.items()
    }
    for qtype in QueryType:
        scores.setdefault(qtype, 0)
    if is_person(query):
        scores[QueryType.BIOGRAPHICAL] += lexicon.person_bonus
    return scores


def classify(query: str, lexicon: KeywordLexicon = DEFAULT_LEXICON) -> QueryType:
    """Highest-scoring type wins; all-zero means general; ties resolve by
    the fixed priority order."""
    scores = classify_scores(query, lexicon)
    if all(score == 0 for score in scores.values()):
        return QueryType.GENERAL
    best = TYPE_PRIORITY[0]
    for qtype in TYPE_PRIORITY:
        if scores[qtype] > scores[best]:
            best = qtype
    return best


def sources_for(qtype: QueryType) -> tuple[Source, ...]:
    return SOURCE_ROUTES[qtype]


@dataclass(frozen=True)
class SourceResult:
    source: Source
    title: str
    url: str
    snippet: str
    rank: int

    def to_dict(self) -> dict:
        return {
            "source": self.source.value,
            "title": self.title,
            "url": self.url,
            "snippet": self.snippet,
            "rank": self.rank,
        }


class SearchBackend(Protocol):
    def search(self, query: str, source: Source) -> list[SourceResult]: ...


def slugify(query: str) -> str:
    """Normalized query to a filename-safe slug: lowercase, whitespace
    collapsed, non-alphanumeric runs become single hyphens."""
    normalized = " ".join(query.lower().split())
    slug = re.sub(r"[^a-z0-9]+", "-", normalized).strip("-")
    return slug or "empty"


class FixtureSearchBackend:
    """Serves canned results from <fixtures_dir>/<source>/<slug>.json.

    Each file holds a JSON array of {title, url, snippet} objects; a missing
    file is an empty result, not an error, so fixtures only need to cover the
    queries a scenario actually exercises.
    """

    def __init__(self, fixtures_dir: str | Path):
        self.fixtures_dir = Path(fixtures_dir)

    def search(self, query: str, source: Source) -> list[SourceResult]:
        path = self.fixtures_dir / source.value / f"{slugify(query)}.json"
        if not path.exists():
            return []
        try:
            records = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise BackendUnavailable(f"bad fixture {path}: {exc}") from exc
        if not isinstance(records, list):
            raise BackendUnavailable(f"fixture {path} must hold a JSON array")
        results = []
        for i, record in enumerate(records):
            results.append(
                SourceResult(
                    source=source,
                    title=str(record.get("title", "")),
                    url=str(record.get("url", "")),
                    snippet=str(record.get("snippet", "")),
                    rank=i + 1,
                )
            )
        return results


class CallableSearchBackend:
    """Per-source callables; handy for fault injection in tests."""

    def __init__(self, handlers: dict[Source, Callable[[str], list[SourceResult]]]):
        self.handlers = handlers

    def search(self, query: str, source: Source) -> list[SourceResult]:
        handler = self.handlers.get(source)
        if handler is None:
            return []
        return handler(query)


@dataclass(frozen=True)
class SourceSearch:
    """Search outcome grouped by source, with per-source failures isolated."""

    groups: dict[Source, list[SourceResult]]
    errors: dict[Source, str]

    def flatten(self) -> list[SourceResult]:
        ordered: list[SourceResult] = []
        for source in SOURCE_ORDER:
            ordered.extend(self.groups.get(source, []))
        return ordered

    def to_dict(self) -> dict:
        return {
            "groups": {
                source.value: [r.to_dict() for r in results]
                for source, results in self.groups.items()
            },
            "errors": {source.value: message for source, message in self.errors.items()},
        }


def search_sources(
    query: str,
    sources: Iterable[Source],
    backend: SearchBackend,
) -> SourceSearch:
    """Query each source independently; one source failing (or raising) is
    recorded in errors and never affects the others."""
    groups: dict[Source, list[SourceResult]] = {}
    errors: dict[Source, str] = {}
    for source in SOURCE_ORDER:
        if source not in set(sources):
            continue
        try:
            groups[source] = backend.search(query, source)
        except Exception as exc:
            logger.warning("source %s failed: %s", source.value, exc)
            errors[source] = str(exc)
            groups[source] = []
    return SourceSearch(groups=groups, errors=errors)


def route_and_search(
    query: str,
    backend: SearchBackend,
    lexicon: KeywordLexicon = DEFAULT_LEXICON,
    enabled: Optional[Sequence[Source]] = None,
) -> tuple[QueryType, SourceSearch]:
    """Classify, route, and search in one step; enabled filters the route."""
    qtype = classify(query, lexicon)
    routed = sources_for(qtype)
    if enabled is not None:
        allowed = set(enabled)
        routed = tuple(s for s in routed if s in allowed)
    return qtype, search_sources(query, routed, backend)
