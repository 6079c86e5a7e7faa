"""Iterative reasoning loop with tool use and terminal self-reflection.

Each iteration asks the model for a tagged THOUGHT/ACTION/CONFIDENCE block.
Concluding ends the loop with the thought text as the answer; otherwise the
named tool runs and its output lands in the trace and the scratchpad. After a
concluded run one reflection call may revise the answer. Trace confidence is
the arithmetic mean of the thought-step confidences.

Model output parsing is strict, with one re-prompt; if that also fails the
whole output is treated as a concluding thought at confidence 0.5 so a
misbehaving model degrades a run instead of crashing it.
"""

from __future__ import annotations

import json
import logging
import re
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .errors import EmptyTrace, ToolError
from .events import EventLog
from .providers import (
    CompletionRequest,
    Message,
    ProviderPort,
    TaskType,
    resolve_tier,
)

logger = logging.getLogger(__name__)

FALLBACK_CONFIDENCE = 0.5
DEFAULT_MAX_ITERATIONS = 8

_THOUGHT_BLOCK = re.compile(
    r"THOUGHT:\s*(?P<thought>.*?)\s*"
    r"ACTION:\s*(?P<action>.*?)\s*"
    r"CONFIDENCE:\s*(?P<confidence>[0-9.eE+\-]+)",
    re.S,
)

REPROMPT_INSTRUCTIONS = (
    "Your previous output could not be parsed. Respond exactly in this format:\n"
    "THOUGHT: <your reasoning>\n"
    "ACTION: conclude | <tool_name> {\"arg\": \"value\"}\n"
    "CONFIDENCE: <number between 0 and 1>"
)


class StepKind(str, Enum):
    THOUGHT = "thought"
    ACTION = "action"
    OBSERVATION = "observation"
    REFLECTION = "reflection"


@dataclass(frozen=True)
class TraceStep:
    kind: StepKind
    content: str
    confidence: Optional[float]
    timestamp: float

    def __post_init__(self) -> None:
        if not self.content:
            raise ValueError("trace step content must be nonempty")
        if self.kind is StepKind.THOUGHT:
            if self.confidence is None:
                raise ValueError("thought steps carry a confidence")
            if not 0.0 <= self.confidence <= 1.0:
                raise ValueError("confidence out of range [0, 1]")
        elif self.confidence is not None:
            raise ValueError(f"{self.kind.value} steps carry no confidence")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "content": self.content,
            "confidence": self.confidence,
            "timestamp": self.timestamp,
        }


class ReasoningTrace:
    """Append-only step sequence; never reordered."""

    def __init__(self) -> None:
        self.steps: list[TraceStep] = []
        self.concluded = False

    def append(self, step: TraceStep) -> None:
        self.steps.append(step)

    def thought_confidences(self) -> list[float]:
        return [
            s.confidence
            for s in self.steps
            if s.kind is StepKind.THOUGHT and s.confidence is not None
        ]

    def render(self) -> str:
        lines = []
        for step in self.steps:
            lines.append(f"{step.kind.value.upper()}: {step.content}")
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        return "\n".join(
            json.dumps(step.to_dict(), sort_keys=True) for step in self.steps
        )

    @classmethod
    def from_jsonl(cls, text: str, concluded: bool = False) -> "ReasoningTrace":
        trace = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            trace.append(
                TraceStep(
                    kind=StepKind(record["kind"]),
                    content=record["content"],
                    confidence=record.get("confidence"),
                    timestamp=record["timestamp"],
                )
            )
        trace.concluded = concluded
        return trace


def trace_confidence(trace: ReasoningTrace) -> float:
    """Arithmetic mean of thought-step confidences."""
    confidences = trace.thought_confidences()
    if not confidences:
        raise EmptyTrace("trace has no thought steps")
    return sum(confidences) / len(confidences)


class Scratchpad:
    """Accumulated tool observations, injected into every think prompt."""

    def __init__(self) -> None:
        self.observations: list[str] = []

    def append(self, observation: str) -> None:
        self.observations.append(observation)

    def render(self) -> str:
        if not self.observations:
            return "(none yet)"
        return "\n".join(f"[{i + 1}] {obs}" for i, obs in enumerate(self.observations))

    def __len__(self) -> int:
        return len(self.observations)


@dataclass(frozen=True)
class Tool:
    name: str
    description: str
    handler: Callable[[dict], str]


class ToolRegistry:
    def __init__(self, tools: list[Tool] | None = None):
        self._tools: dict[str, Tool] = {}
        for tool in tools or []:
            self.register(tool)

    def register(self, tool: Tool) -> None:
        if tool.name in self._tools:
            raise ValueError(f"duplicate tool name: {tool.name}")
        self._tools[tool.name] = tool

    def get(self, name: str) -> Optional[Tool]:
        return self._tools.get(name)

    def names(self) -> list[str]:
        return list(self._tools)

    def describe(self) -> str:
        if not self._tools:
            return "(no tools available)"
        return "\n".join(f"- {t.name}: {t.description}" for t in self._tools.values())

    def __len__(self) -> int:
        return len(self._tools)


CONCLUDE = "conclude"


@dataclass(frozen=True)
class ThoughtOutcome:
    thought: str
    confidence: float
    action: str  # CONCLUDE or a tool name
    args: dict
    parse_fallback: bool = False

    @property
    def concludes(self) -> bool:
        return self.action == CONCLUDE


def _parse_action(raw: str) -> tuple[str, dict]:
    raw = raw.strip()
    if raw.lower() == CONCLUDE:
        return CONCLUDE, {}
    match = re.match(r"([A-Za-z_][\w\-]*)\s*(.*)", raw, re.S)
    if match is None:
        raise ValueError(f"unparseable action: {raw!r}")
    name, rest = match.group(1), match.group(2).strip()
    if rest.startswith("(") and rest.endswith(")"):
        rest = rest[1:-1].strip()
    if not rest:
        return name, {}
    try:
        args = json.loads(rest)
    except json.JSONDecodeError:
        return name, {"input": rest}
    if not isinstance(args, dict):
        args = {"input": args}
    return name, args


def parse_thought(text: str) -> Optional[ThoughtOutcome]:
    """Strictly parse one THOUGHT/ACTION/CONFIDENCE block; None on failure."""
    match = _THOUGHT_BLOCK.search(text)
    if match is None:
        return None
    thought = match.group("thought").strip()
    if not thought:
        return None
    try:
        confidence = float(match.group("confidence"))
        action, args = _parse_action(match.group("action"))
    except ValueError:
        return None
    confidence = max(0.0, min(1.0, confidence))
    return ThoughtOutcome(thought, confidence, action, args)


def fallback_outcome(text: str) -> ThoughtOutcome:
    """Treat an unparseable output as a concluding thought at mid confidence."""
    return ThoughtOutcome(
        thought=text.strip() or "(empty model output)",
        confidence=FALLBACK_CONFIDENCE,
        action=CONCLUDE,
        args={},
        parse_fallback=True,
    )


DEFAULT_SYSTEM_PROMPT = (
    "You reason step by step toward an answer. At each step emit exactly:\n"
    "THOUGHT: <your reasoning this step>\n"
    "ACTION: conclude | <tool_name> {\"arg\": \"value\"}\n"
    "CONFIDENCE: <number between 0 and 1>\n"
    "Use ACTION: conclude when the THOUGHT contains your final answer."
)

REFLECTION_SYSTEM_PROMPT = (
    "You review a draft answer for errors and omissions. Respond exactly as:\n"
    "CRITIQUE: <what is wrong or missing, or a brief approval>\n"
    "REVISION: <the full improved answer; repeat the draft verbatim if it stands>"
)

_REFLECTION_BLOCK = re.compile(
    r"CRITIQUE:\s*(?P<critique>.*?)\s*REVISION:\s*(?P<revision>.*)\s*\Z", re.S
)


@dataclass
class ReactConfig:
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    reflect: bool = True
    task_type: TaskType = TaskType.REASONING
    thinking_budget: int = 0
    system_prompt: str = DEFAULT_SYSTEM_PROMPT
    agent_name: str = "agent"

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class ReactResult:
    answer: str
    trace: ReasoningTrace
    confidence: float
    concluded: bool


def _think_prompt(
    problem: str, trace: ReasoningTrace, pad: Scratchpad, agent_name: str
) -> str:
    # The agent name leads the prompt so scripted runs can address role
    # agents individually even when they share a problem.
    return (
        f"Agent: {agent_name}\n"
        f"Problem: {problem}\n\n"
        f"Trace so far:\n{trace.render() or '(empty)'}\n\n"
        f"Observations:\n{pad.render()}\n\n"
        f"Decide the next step."
    )


def _call(
    provider: ProviderPort,
    config: ReactConfig,
    prompt: str,
) -> str:
    spec = resolve_tier(config.task_type)
    request = CompletionRequest(
        messages=(
            Message("system", config.system_prompt),
            Message("user", prompt),
        ),
        task_type=config.task_type,
        max_tokens=max(spec.max_tokens, 1),
        temperature=spec.temperature,
        thinking_budget=config.thinking_budget,
    )
    return provider.complete(request).text


def _think(
    provider: ProviderPort,
    config: ReactConfig,
    problem: str,
    trace: ReasoningTrace,
    pad: Scratchpad,
) -> ThoughtOutcome:
    prompt = _think_prompt(problem, trace, pad, config.agent_name)
    text = _call(provider, config, prompt)
    outcome = parse_thought(text)
    if outcome is not None:
        return outcome
    logger.debug("thought parse failed, re-prompting once")
    text = _call(provider, config, f"{prompt}\n\n{REPROMPT_INSTRUCTIONS}")
    outcome = parse_thought(text)
    if outcome is not None:
        return outcome
    return fallback_outcome(text)


def _execute_tool(tools: ToolRegistry, name: str, args: dict) -> str:
    tool = tools.get(name)
    if tool is None:
        return f"ERROR: unknown tool {name!r}; available: {', '.join(tools.names()) or 'none'}"
    try:
        return tool.handler(args)
    except ToolError as exc:
        return f"ERROR: {exc}"
    except Exception as exc:  # tool bugs must not kill the loop
        logger.warning("tool %s raised: %s", name, exc)
        return f"ERROR: tool {name} failed: {exc}"


def reflect_answer(
    problem: str,
    answer: str,
    trace: ReasoningTrace,
    provider: ProviderPort,
    config: ReactConfig,
) -> tuple[str, str]:
    """One review call; returns (critique, revised_answer).

    An output without the CRITIQUE/REVISION headers keeps the draft and
    stores the raw output as the critique.
    """
    prompt = (
        f"Problem: {problem}\n\n"
        f"Draft answer:\n{answer}\n\n"
        f"Trace:\n{trace.render()}"
    )
    reflect_config = ReactConfig(
        max_iterations=config.max_iterations,
        reflect=False,
        task_type=config.task_type,
        thinking_budget=config.thinking_budget,
        system_prompt=REFLECTION_SYSTEM_PROMPT,
        agent_name=config.agent_name,
    )
    text = _call(provider, reflect_config, prompt)
    match = _REFLECTION_BLOCK.search(text)
    if match is None:
        return text.strip(), answer
    critique = match.group("critique").strip()
    revision = match.group("revision").strip()
    if not revision:
        return critique or text.strip(), answer
    return critique or "(no critique)", revision


def run_react(
    problem: str,
    tools: ToolRegistry,
    provider: ProviderPort,
    config: ReactConfig | None = None,
    clock: Callable[[], float] = time.monotonic,
    events: EventLog | None = None,
) -> ReactResult:
    """Run the think/act/observe loop.

    Exhausting max_iterations without a conclusion returns the final thought
    text as the answer with the trace marked non-concluded. Tool failures
    become ERROR observations and the loop continues.
    """
    if not problem.strip():
        raise ValueError("problem must be nonempty")
    config = config or ReactConfig()
    trace = ReasoningTrace()
    pad = Scratchpad()
    answer: Optional[str] = None

    def emit(kind: str, **payload) -> None:
        if events is not None:
            events.append(kind, agent=config.agent_name, **payload)

    for iteration in range(config.max_iterations):
        outcome = _think(provider, config, problem, trace, pad)
        trace.append(
            TraceStep(StepKind.THOUGHT, outcome.thought, outcome.confidence, clock())
        )
        emit(
            "trace_step",
            step=StepKind.THOUGHT.value,
            content=outcome.thought,
            confidence=outcome.confidence,
        )
        if outcome.concludes:
            answer = outcome.thought
            trace.concluded = True
            break
        action_repr = f"{outcome.action}({json.dumps(outcome.args, sort_keys=True)})"
        trace.append(TraceStep(StepKind.ACTION, action_repr, None, clock()))
        emit("trace_step", step=StepKind.ACTION.value, content=action_repr)
        observation = _execute_tool(tools, outcome.action, outcome.args)
        if not observation.strip():
            observation = "(tool returned no output)"
        trace.append(TraceStep(StepKind.OBSERVATION, observation, None, clock()))
        pad.append(observation)
        emit("trace_step", step=StepKind.OBSERVATION.value, content=observation)

    if answer is None:
        # Iterations exhausted; best effort is the last thought.
        answer = trace.steps[-1].content if trace.steps else ""
        for step in reversed(trace.steps):
            if step.kind is StepKind.THOUGHT:
                answer = step.content
                break

    if config.reflect and trace.concluded:
        critique, revised = reflect_answer(problem, answer, trace, provider, config)
        trace.append(TraceStep(StepKind.REFLECTION, critique, None, clock()))
        emit("trace_step", step=StepKind.REFLECTION.value, content=critique)
        answer = revised

    return ReactResult(
        answer=answer,
        trace=trace,
        confidence=trace_confidence(trace),
        concluded=trace.concluded,
    )
