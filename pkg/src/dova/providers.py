"""Model provider port: task-tier routing, a deterministic scripted backend
for offline runs, a generic HTTP backend for live providers, and a hashed
bag-of-tokens embedder.

The scripted backend is the workhorse of the test suite: it maps the last
user message of a request to a canned response via ordered matcher rules, so
every multi-step pipeline in the engine can be driven without a network.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import re
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Optional, Protocol, Sequence, runtime_checkable

from .errors import ConfigError, NoScriptMatch, ProviderError

logger = logging.getLogger(__name__)

EMBEDDING_DIM = 256
MAX_THINKING_BUDGET = 65_536

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")


class TaskType(str, Enum):
    CLASSIFICATION = "classification"
    SUMMARIZATION = "summarization"
    CHAT = "chat"
    CODE_GENERATION = "code_generation"
    REASONING = "reasoning"
    RESEARCH = "research"
    EMBEDDING = "embedding"


class ModelTier(str, Enum):
    BASIC = "basic"
    STANDARD = "standard"
    ADVANCED = "advanced"


@dataclass(frozen=True)
class TierSpec:
    """Resolved capability row for one task type."""

    tier: ModelTier
    max_tokens: int
    temperature: float


# Task -> (tier, max_tokens, temperature). The research row deliberately
# aliases the reasoning row: deep multi-source work needs the same class of
# model, just different orchestration around it.
TIER_TABLE: dict[TaskType, TierSpec] = {
    TaskType.CLASSIFICATION: TierSpec(ModelTier.BASIC, 10_000, 0.0),
    TaskType.SUMMARIZATION: TierSpec(ModelTier.BASIC, 20_000, 0.3),
    TaskType.CHAT: TierSpec(ModelTier.STANDARD, 40_000, 0.7),
    TaskType.CODE_GENERATION: TierSpec(ModelTier.ADVANCED, 80_000, 0.2),
    TaskType.REASONING: TierSpec(ModelTier.ADVANCED, 40_000, 0.7),
    TaskType.RESEARCH: TierSpec(ModelTier.ADVANCED, 40_000, 0.7),
    TaskType.EMBEDDING: TierSpec(ModelTier.BASIC, 0, 0.0),
}


def resolve_tier(task: TaskType) -> TierSpec:
    return TIER_TABLE[task]


@dataclass(frozen=True)
class Message:
    role: str  # "system" | "user" | "assistant"
    content: str

    def __post_init__(self) -> None:
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"unknown message role: {self.role!r}")


@dataclass(frozen=True)
class CompletionRequest:
    """One model call. max_tokens must be positive; thinking_budget is capped
    at the largest supported reasoning allocation."""

    messages: tuple[Message, ...]
    task_type: TaskType = TaskType.CHAT
    max_tokens: int = 1024
    temperature: float = 0.0
    thinking_budget: int = 0

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("CompletionRequest needs at least one message")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature out of range [0, 2]")
        if not 0 <= self.thinking_budget <= MAX_THINKING_BUDGET:
            raise ValueError(
                f"thinking_budget out of range [0, {MAX_THINKING_BUDGET}]"
            )

    def last_user_message(self) -> Optional[str]:
        for msg in reversed(self.messages):
            if msg.role == "user":
                return msg.content
        return None


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    model_id: str
    input_tokens: int
    output_tokens: int
    thinking_tokens: int = 0
    stop_reason: str = "end"


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class CallRecord:
    """One completed provider call, kept for token accounting and assertions."""

    request: CompletionRequest
    response: CompletionResponse


@runtime_checkable
class ProviderPort(Protocol):
    def complete(self, request: CompletionRequest) -> CompletionResponse: ...

    def embed(self, text: str) -> EmbeddingVector: ...

    @property
    def call_log(self) -> list[CallRecord]: ...


def tokenize(text: str) -> list[str]:
    """Lowercase split on non-alphanumeric runs; empty tokens dropped."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def embed_text(text: str, dim: int = EMBEDDING_DIM) -> EmbeddingVector:
    """Deterministic hashed bag-of-tokens embedding.

    Each token lands in a bucket chosen by a stable digest (never the
    process-salted builtin hash), counts accumulate, and the vector is
    L2-normalized. No tokens means the zero vector, which cosine treats as
    orthogonal to everything.
    """
    counts = [0.0] * dim
    for token in tokenize(text):
        digest = hashlib.md5(token.encode("utf-8")).digest()
        counts[int.from_bytes(digest[:8], "big") % dim] += 1.0
    norm = math.sqrt(sum(c * c for c in counts))
    if norm == 0.0:
        return EmbeddingVector(tuple(counts))
    return EmbeddingVector(tuple(c / norm for c in counts))


def _estimate_tokens(text: str) -> int:
    return len(text) // 4


@dataclass(frozen=True)
class ScriptRule:
    """One canned response.

    matcher fires on the last user message of a request: kind "substring"
    (default) checks containment, "exact" checks full equality. A rule with a
    confidence and a plain response is served as a ready-made concluding
    thought block so flat fixture files can drive full agent runs; responses
    that already carry tagged lines are returned verbatim.
    """

    matcher: str
    response: str
    kind: str = "substring"
    confidence: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in ("substring", "exact"):
            raise ValueError(f"unknown matcher kind: {self.kind!r}")
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError("rule confidence out of range [0, 1]")

    def matches(self, message: str) -> bool:
        if self.kind == "exact":
            return message == self.matcher
        return self.matcher in message

    def rendered_response(self) -> str:
        if self.confidence is None or "THOUGHT:" in self.response:
            return self.response
        return (
            f"THOUGHT: {self.response}\n"
            f"ACTION: conclude\n"
            f"CONFIDENCE: {self.confidence}"
        )


class ScriptedProvider:
    """Offline backend: ordered matcher rules over the last user message.

    First registered matching rule wins; no match raises NoScriptMatch.
    complete() is a pure function of (rules, request) apart from the shared
    call log, which is lock-guarded so concurrent agents can interleave.
    """

    def __init__(self, rules: Iterable[ScriptRule] = ()):
        self._rules: list[ScriptRule] = list(rules)
        self._log: list[CallRecord] = []
        self._lock = threading.Lock()

    def add_rule(
        self,
        matcher: str,
        response: str,
        kind: str = "substring",
        confidence: Optional[float] = None,
    ) -> None:
        with self._lock:
            self._rules.append(ScriptRule(matcher, response, kind, confidence))

    @property
    def rules(self) -> list[ScriptRule]:
        with self._lock:
            return list(self._rules)

    @property
    def call_log(self) -> list[CallRecord]:
        with self._lock:
            return list(self._log)

    def clear_log(self) -> None:
        with self._lock:
            self._log.clear()

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        message = request.last_user_message()
        if message is None:
            raise NoScriptMatch("request carries no user message to match")
        with self._lock:
            rules = list(self._rules)
        for rule in rules:
            if rule.matches(message):
                text = rule.rendered_response()
                response = CompletionResponse(
                    text=text,
                    model_id=f"scripted-{resolve_tier(request.task_type).tier.value}",
                    input_tokens=sum(
                        _estimate_tokens(m.content) for m in request.messages
                    ),
                    output_tokens=_estimate_tokens(text),
                    thinking_tokens=request.thinking_budget // 8,
                )
                with self._lock:
                    self._log.append(CallRecord(request, response))
                return response
        raise NoScriptMatch(f"no script rule matches: {message[:120]!r}")

    def embed(self, text: str) -> EmbeddingVector:
        return embed_text(text)


def load_script(path: str | Path) -> list[ScriptRule]:
    """Read a script fixture: one JSON object per line with keys
    match, response, and optionally kind and confidence. Blank lines and
    #-comment lines are skipped."""
    rules = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            record = json.loads(stripped)
            rules.append(
                ScriptRule(
                    matcher=record["match"],
                    response=record["response"],
                    kind=record.get("kind", "substring"),
                    confidence=record.get("confidence"),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad script record: {exc}") from exc
    return rules


# Default model ids per tier for the HTTP backend; overridden via config.
DEFAULT_TIER_MODELS: dict[ModelTier, str] = {
    ModelTier.BASIC: "basic-default",
    ModelTier.STANDARD: "standard-default",
    ModelTier.ADVANCED: "advanced-default",
}


class HttpProvider:
    """Generic chat-completions client for live providers.

    Speaks the de-facto JSON POST shape ({base_url}/chat/completions and
    {base_url}/embeddings), resolves the model id from the task tier, and
    retries exactly once after a fixed delay on transport failure. The
    transport is injectable so fault-injection tests never open a socket.
    """

    RETRY_DELAY = 1.0

    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        tier_models: Optional[dict[ModelTier, str]] = None,
        transport: Optional[Callable[[str, dict, dict], dict]] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.tier_models = dict(DEFAULT_TIER_MODELS)
        if tier_models:
            self.tier_models.update(tier_models)
        self._transport = transport or self._http_post
        self._sleep = sleep
        self._log: list[CallRecord] = []
        self._lock = threading.Lock()

    @property
    def call_log(self) -> list[CallRecord]:
        with self._lock:
            return list(self._log)

    def _http_post(self, url: str, headers: dict, body: dict) -> dict:
        import requests

        resp = requests.post(url, headers=headers, json=body, timeout=120)
        resp.raise_for_status()
        return resp.json()

    def _post(self, path: str, body: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        url = f"{self.base_url}{path}"
        try:
            return self._transport(url, headers, body)
        except Exception as exc:  # transport errors are worth one retry
            logger.warning("provider call failed, retrying once: %s", exc)
            self._sleep(self.RETRY_DELAY)
            try:
                return self._transport(url, headers, body)
            except Exception as retry_exc:
                raise ProviderError(str(retry_exc), retryable=True) from retry_exc

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        spec = resolve_tier(request.task_type)
        model_id = self.tier_models[spec.tier]
        body: dict = {
            "model": model_id,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
        }
        if request.thinking_budget > 0:
            body["reasoning"] = {"max_tokens": request.thinking_budget}
        data = self._post("/chat/completions", body)
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed completion payload: {exc}") from exc
        usage = data.get("usage", {})
        response = CompletionResponse(
            text=text,
            model_id=data.get("model", model_id),
            input_tokens=int(usage.get("prompt_tokens", 0)),
            output_tokens=int(usage.get("completion_tokens", 0)),
            thinking_tokens=int(usage.get("reasoning_tokens", 0)),
            stop_reason=data["choices"][0].get("finish_reason", "end"),
        )
        with self._lock:
            self._log.append(CallRecord(request, response))
        return response

    def embed(self, text: str) -> EmbeddingVector:
        data = self._post(
            "/embeddings",
            {"model": self.tier_models[ModelTier.BASIC], "input": text},
        )
        try:
            values = tuple(float(v) for v in data["data"][0]["embedding"])
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed embedding payload: {exc}") from exc
        return EmbeddingVector(values)


def simple_request(
    prompt: str,
    task_type: TaskType = TaskType.CHAT,
    system: Optional[str] = None,
    thinking_budget: int = 0,
    max_tokens: Optional[int] = None,
    temperature: Optional[float] = None,
    history: Sequence[Message] = (),
) -> CompletionRequest:
    """Build a request at the task's tier defaults with prompt as the final
    user message."""
    spec = resolve_tier(task_type)
    messages: list[Message] = []
    if system:
        messages.append(Message("system", system))
    messages.extend(history)
    messages.append(Message("user", prompt))
    return CompletionRequest(
        messages=tuple(messages),
        task_type=task_type,
        max_tokens=max_tokens if max_tokens is not None else max(spec.max_tokens, 1),
        temperature=temperature if temperature is not None else spec.temperature,
        thinking_budget=min(thinking_budget, MAX_THINKING_BUDGET),
    )
