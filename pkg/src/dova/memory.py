"""Tiered memory with TTL eviction and diversity-aware retrieval.

Three tiers: short-term entries expire after a TTL (default one day),
long-term and procedural entries persist until deleted and are durably
written to per-tier append logs when a persistence directory is configured.
Retrieval embeds the query and runs greedy maximal-marginal-relevance
selection, trading relevance against redundancy with the selected set.

The clock is injectable so expiry is testable at exact boundaries. Linear
scan only: the store is capped at MAX_ENTRIES and approximate indexes are
out of scope at that size.
"""

from __future__ import annotations

import json
import logging
import math
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

from .errors import DimensionMismatch, StoreFull
from .providers import EmbeddingVector, embed_text

logger = logging.getLogger(__name__)

SHORT_TERM = "short_term"
LONG_TERM = "long_term"
PROCEDURAL = "procedural"
TIERS = (SHORT_TERM, LONG_TERM, PROCEDURAL)

DEFAULT_SHORT_TERM_TTL = 86_400.0  # one day
MAX_ENTRIES = 50_000  # hard cap; store() raises StoreFull beyond it
DEFAULT_LAMBDA = 0.5
DEFAULT_TOP_K = 4

_ID_SUFFIX = re.compile(r"^mem-(\d+)$")


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity; zero-norm vectors are similar to nothing."""
    if a.dimension != b.dimension:
        raise DimensionMismatch(
            f"cosine over dimensions {a.dimension} and {b.dimension}"
        )
    dot = 0.0
    norm_a = 0.0
    norm_b = 0.0
    for x, y in zip(a.values, b.values):
        dot += x * y
        norm_a += x * x
        norm_b += y * y
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return dot / (math.sqrt(norm_a) * math.sqrt(norm_b))


@dataclass(frozen=True)
class MemoryEntry:
    id: str
    content: str
    tier: str
    embedding: EmbeddingVector
    created_at: float
    ttl_seconds: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.tier not in TIERS:
            raise ValueError(f"unknown memory tier: {self.tier!r}")
        if self.ttl_seconds is not None and self.ttl_seconds <= 0:
            raise ValueError("ttl_seconds must be positive when set")

    def expired(self, now: float) -> bool:
        if self.ttl_seconds is None:
            return False
        return self.created_at + self.ttl_seconds <= now

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "content": self.content,
            "tier": self.tier,
            "embedding": list(self.embedding.values),
            "created_at": self.created_at,
            "ttl_seconds": self.ttl_seconds,
            "metadata": self.metadata,
        }

    @classmethod
    def from_record(cls, record: dict) -> "MemoryEntry":
        return cls(
            id=record["id"],
            content=record["content"],
            tier=record["tier"],
            embedding=EmbeddingVector(tuple(float(v) for v in record["embedding"])),
            created_at=record["created_at"],
            ttl_seconds=record.get("ttl_seconds"),
            metadata=record.get("metadata") or {},
        )


@dataclass(frozen=True)
class MmrParams:
    lambda_: float = DEFAULT_LAMBDA
    top_k: int = DEFAULT_TOP_K

    def __post_init__(self) -> None:
        if not 0.0 <= self.lambda_ <= 1.0:
            raise ValueError("lambda_ out of range [0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


def mmr_select(
    query: EmbeddingVector,
    candidates: list[MemoryEntry],
    params: MmrParams,
) -> list[tuple[MemoryEntry, float]]:
    """Greedy MMR: each step takes argmax of
    lambda * sim(d, q) - (1 - lambda) * max_{s in selected} sim(d, s),
    with the diversity term zero for the first pick. Ties go to the earliest
    (created_at, id); candidates are scanned in that order with strict
    improvement, so the rule needs no epsilon.
    """
    ordered = sorted(candidates, key=lambda e: (e.created_at, e.id))
    sims = {e.id: cosine(e.embedding, query) for e in ordered}
    selected: list[tuple[MemoryEntry, float]] = []
    remaining = list(ordered)
    while remaining and len(selected) < params.top_k:
        best: Optional[MemoryEntry] = None
        best_score = -math.inf
        for entry in remaining:
            if selected:
                diversity = max(
                    cosine(entry.embedding, chosen.embedding)
                    for chosen, _ in selected
                )
            else:
                diversity = 0.0
            mmr = params.lambda_ * sims[entry.id] - (1.0 - params.lambda_) * diversity
            if mmr > best_score:
                best = entry
                best_score = mmr
        assert best is not None
        selected.append((best, best_score))
        remaining.remove(best)
    return selected


class MemoryStore:
    """Tiered entry store with embedded retrieval.

    embedder maps text to a vector (defaults to the hashed bag-of-tokens
    embedding); clock supplies the current time for creation stamps and
    expiry. With persist_dir set, long-term and procedural writes append to
    per-tier JSONL logs that are compacted on load.
    """

    PERSISTED_TIERS = (LONG_TERM, PROCEDURAL)

    def __init__(
        self,
        embedder: Callable[[str], EmbeddingVector] = embed_text,
        clock: Callable[[], float] = time.time,
        persist_dir: Optional[str | Path] = None,
        max_entries: int = MAX_ENTRIES,
    ):
        self._embedder = embedder
        self._clock = clock
        self._persist_dir = Path(persist_dir) if persist_dir else None
        self._max_entries = max_entries
        self._entries: dict[str, MemoryEntry] = {}
        self._counter = 0
        self._lock = threading.RLock()
        if self._persist_dir is not None:
            self._persist_dir.mkdir(parents=True, exist_ok=True)
            self._load()

    def _log_path(self, tier: str) -> Path:
        assert self._persist_dir is not None
        return self._persist_dir / f"{tier}.jsonl"

    def _load(self) -> None:
        for tier in self.PERSISTED_TIERS:
            path = self._log_path(tier)
            if not path.exists():
                continue
            loaded: dict[str, MemoryEntry] = {}
            for line in path.read_text().splitlines():
                if not line.strip():
                    continue
                try:
                    entry = MemoryEntry.from_record(json.loads(line))
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    logger.warning("skipping bad record in %s: %s", path, exc)
                    continue
                loaded[entry.id] = entry  # later records win on duplicate ids
            self._entries.update(loaded)
            # compact: rewrite with the surviving records only
            with path.open("w") as fh:
                for entry in loaded.values():
                    fh.write(json.dumps(entry.to_record(), sort_keys=True) + "\n")
        for entry_id in self._entries:
            match = _ID_SUFFIX.match(entry_id)
            if match:
                self._counter = max(self._counter, int(match.group(1)))

    def _append_log(self, entry: MemoryEntry) -> None:
        if self._persist_dir is None or entry.tier not in self.PERSISTED_TIERS:
            return
        with self._log_path(entry.tier).open("a") as fh:
            fh.write(json.dumps(entry.to_record(), sort_keys=True) + "\n")

    def store(
        self,
        content: str,
        tier: str = SHORT_TERM,
        metadata: Optional[dict] = None,
        ttl_seconds: Optional[float] = None,
    ) -> MemoryEntry:
        """Embed and keep content. Short-term entries default to a one-day
        TTL; other tiers default to no expiry."""
        if not content.strip():
            raise ValueError("memory content must be nonempty")
        with self._lock:
            if len(self._entries) >= self._max_entries:
                raise StoreFull(f"memory store at capacity ({self._max_entries})")
            if ttl_seconds is None and tier == SHORT_TERM:
                ttl_seconds = DEFAULT_SHORT_TERM_TTL
            self._counter += 1
            entry = MemoryEntry(
                id=f"mem-{self._counter:06d}",
                content=content,
                tier=tier,
                embedding=self._embedder(content),
                created_at=self._clock(),
                ttl_seconds=ttl_seconds,
                metadata=metadata or {},
            )
            self._entries[entry.id] = entry
            self._append_log(entry)
            return entry

    def get(self, entry_id: str) -> Optional[MemoryEntry]:
        with self._lock:
            return self._entries.get(entry_id)

    def entries(self, tier: Optional[str] = None) -> list[MemoryEntry]:
        with self._lock:
            found = [
                e for e in self._entries.values() if tier is None or e.tier == tier
            ]
        return sorted(found, key=lambda e: (e.created_at, e.id))

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def evict_expired(self, now: Optional[float] = None) -> int:
        """Drop every entry whose TTL has elapsed; returns the count."""
        with self._lock:
            moment = self._clock() if now is None else now
            dead = [i for i, e in self._entries.items() if e.expired(moment)]
            for entry_id in dead:
                del self._entries[entry_id]
            return len(dead)

    def search(
        self,
        query: str,
        params: MmrParams = MmrParams(),
        tiers: Optional[Iterable[str]] = None,
        now: Optional[float] = None,
    ) -> list[tuple[MemoryEntry, float]]:
        """MMR retrieval over live entries; expired ones never surface even
        before an eviction pass."""
        wanted = set(tiers) if tiers is not None else set(TIERS)
        query_vec = self._embedder(query)
        with self._lock:
            moment = self._clock() if now is None else now
            candidates = [
                e
                for e in self._entries.values()
                if e.tier in wanted and not e.expired(moment)
            ]
        return mmr_select(query_vec, candidates, params)
