"""Totally ordered event log.

Every pipeline stage appends here so interfaces (CLI stage rendering, the
REST event endpoint, tests asserting stage ordering) see one sequence.
Sequence numbers, not timestamps, define the order; the clock is injectable
for deterministic runs.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    payload: dict[str, Any]
    timestamp: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "kind": self.kind,
            "payload": self.payload,
            "timestamp": self.timestamp,
        }


class EventLog:
    def __init__(self, clock: Callable[[], float] = time.time):
        self._clock = clock
        self._events: list[Event] = []
        self._lock = threading.Lock()

    def append(self, kind: str, **payload: Any) -> Event:
        with self._lock:
            event = Event(len(self._events), kind, payload, self._clock())
            self._events.append(event)
            return event

    def events(self, after: int = -1) -> list[Event]:
        """Events with seq strictly greater than after, in order."""
        with self._lock:
            if after < 0:
                return list(self._events)
            return [e for e in self._events if e.seq > after]

    def __len__(self) -> int:
        with self._lock:
            return len(self._events)

    def kinds(self) -> list[str]:
        return [e.kind for e in self.events()]
