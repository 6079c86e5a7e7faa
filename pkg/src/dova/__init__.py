"""Deliberation-first research engine.

Every query runs one pipeline: recall from tiered memory, deliberate over
whether tools are needed at all, pick a reasoning mode and thinking budget,
gather sources, execute (single shot, tool loop, ensemble, hybrid, or
debate), score the answer against itself, and remember the exchange.
"""

from .config import DovaConfig, build_provider
from .deliberation import Deliberation, DeliberationAction, deliberate
from .errors import DovaError, ProviderError
from .memory import MemoryStore, MmrParams
from .orchestrator import (
    OrchestratedResponse,
    Orchestrator,
    ReasoningMode,
    Session,
    select_mode,
)
from .providers import (
    HttpProvider,
    ProviderPort,
    ScriptedProvider,
    TaskType,
    load_script,
)
from .thinking import ComplexityHint, ThinkingLevel, budget_of, select_level

__version__ = "0.1.0"

__all__ = [
    "ComplexityHint",
    "Deliberation",
    "DeliberationAction",
    "DovaConfig",
    "DovaError",
    "HttpProvider",
    "MemoryStore",
    "MmrParams",
    "OrchestratedResponse",
    "Orchestrator",
    "ProviderError",
    "ProviderPort",
    "ReasoningMode",
    "ScriptedProvider",
    "Session",
    "TaskType",
    "ThinkingLevel",
    "__version__",
    "budget_of",
    "deliberate",
    "load_script",
    "select_level",
    "select_mode",
]
