"""Adaptive thinking-budget selection.

Six discrete reasoning allocations; a task-type default is nudged by an
explicit complexity hint and by query length, then clamped to the ladder.
Selection is pure arithmetic over an index, so it costs nothing per query.
"""

from __future__ import annotations

from enum import Enum, IntEnum

from .providers import TaskType


class ThinkingLevel(IntEnum):
    OFF = 0
    MINIMAL = 1
    LOW = 2
    MEDIUM = 3
    HIGH = 4
    XHIGH = 5

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "ThinkingLevel":
        try:
            return cls[label.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown thinking level: {label!r}") from None


# Token allocation per level, index-aligned with ThinkingLevel values.
BUDGETS: tuple[int, ...] = (0, 1024, 4096, 16_384, 32_768, 65_536)


class ComplexityHint(Enum):
    SIMPLE = "simple"
    NORMAL = "normal"
    COMPLEX = "complex"
    VERY_COMPLEX = "very_complex"

    @property
    def adjustment(self) -> int:
        return _HINT_ADJUSTMENT[self]

    @classmethod
    def from_label(cls, label: str) -> "ComplexityHint":
        normalized = label.strip().lower().replace("-", "_").replace(" ", "_")
        for hint in cls:
            if hint.value == normalized:
                return hint
        raise ValueError(f"unknown complexity hint: {label!r}")


_HINT_ADJUSTMENT = {
    ComplexityHint.SIMPLE: -1,
    ComplexityHint.NORMAL: 0,
    ComplexityHint.COMPLEX: 1,
    ComplexityHint.VERY_COMPLEX: 2,
}

# Default level per task type: cheap tasks start near the bottom of the
# ladder, open-ended reasoning and research start high, embeddings never
# think at all.
TASK_DEFAULTS: dict[TaskType, ThinkingLevel] = {
    TaskType.CLASSIFICATION: ThinkingLevel.MINIMAL,
    TaskType.SUMMARIZATION: ThinkingLevel.LOW,
    TaskType.CHAT: ThinkingLevel.LOW,
    TaskType.CODE_GENERATION: ThinkingLevel.MEDIUM,
    TaskType.REASONING: ThinkingLevel.HIGH,
    TaskType.RESEARCH: ThinkingLevel.HIGH,
    TaskType.EMBEDDING: ThinkingLevel.OFF,
}

LONG_QUERY_CHARS = 2000
SHORT_QUERY_CHARS = 50


def length_adjustment(query: str) -> int:
    """+1 for very long queries, -1 for very short ones, else 0."""
    n = len(query)
    if n > LONG_QUERY_CHARS:
        return 1
    if n < SHORT_QUERY_CHARS:
        return -1
    return 0


def select_level(
    task: TaskType,
    query: str,
    hint: ComplexityHint = ComplexityHint.NORMAL,
) -> ThinkingLevel:
    """Clamp (task default + hint adjustment + length adjustment) to the ladder."""
    index = TASK_DEFAULTS[task] + hint.adjustment + length_adjustment(query)
    index = max(0, min(len(BUDGETS) - 1, index))
    return ThinkingLevel(index)


def budget_of(level: ThinkingLevel) -> int:
    return BUDGETS[level]
