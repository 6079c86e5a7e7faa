"""Error taxonomy shared across the engine.

Callers that need to distinguish transient provider trouble from logic bugs
should catch ProviderError; everything else derives from DovaError so a single
except clause at an interface boundary cannot swallow unrelated failures.
"""

from __future__ import annotations


class DovaError(Exception):
    """Base class for all engine errors."""


class ConfigError(DovaError):
    """Invalid or unreadable configuration."""


class ProviderError(DovaError):
    """A model provider call failed.

    retryable distinguishes transport-level trouble (timeouts, 5xx) from
    permanent failures (bad request, no matching script rule).
    """

    def __init__(self, message: str, retryable: bool = False):
        super().__init__(message)
        self.retryable = retryable


class NoScriptMatch(ProviderError):
    """The scripted backend had no rule matching the last user message."""

    def __init__(self, message: str):
        super().__init__(message, retryable=False)


class DimensionMismatch(DovaError):
    """Two vectors of different dimensionality were combined."""


class ToolError(DovaError):
    """A tool handler raised; recoverable inside the reasoning loop."""


class EmptyTrace(DovaError):
    """Confidence requested for a trace with no thought steps."""


class EmptyLog(DovaError):
    """Statistic requested over an empty deliberation log."""


class EmptyBoard(DovaError):
    """Synthesis requested from a blackboard holding no hypothesis."""


class EnsembleFailed(DovaError):
    """Every ensemble agent failed; no candidate answers exist."""


class NoArguments(DovaError):
    """Debate synthesis requested with no arguments on either side."""


class BackendUnavailable(DovaError):
    """A search backend (or one source within it) could not be reached."""


class StoreFull(DovaError):
    """The memory store refused a write at its configured entry cap."""
