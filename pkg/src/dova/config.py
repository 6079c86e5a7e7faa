"""Engine configuration.

One flat JSON file (see README for the schema) controls provider backend
selection, tier-to-model bindings, source enablement, memory persistence,
and interface settings. Everything has a sensible offline default: with no
config at all the engine runs against the scripted backend and fixture
sources.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .providers import (
    HttpProvider,
    ModelTier,
    ProviderPort,
    ScriptedProvider,
    load_script,
)

DEFAULT_REST_PORT = 8646


@dataclass
class DovaConfig:
    provider_backend: str = "scripted"  # "scripted" | "http"
    script_path: Optional[str] = None
    base_url: str = ""
    api_key_env: str = "DOVA_API_KEY"
    tier_models: dict[str, str] = field(default_factory=dict)
    enabled_sources: tuple[str, ...] = ("arxiv", "github", "huggingface", "web")
    fixtures_dir: Optional[str] = None
    memory_dir: Optional[str] = None
    memory_max_entries: int = 50_000
    mmr_lambda: float = 0.5
    recall_top_k: int = 4
    ensemble_size: int = 3
    max_iterations: int = 8
    debate_rounds: int = 2
    rest_host: str = "127.0.0.1"
    rest_port: int = DEFAULT_REST_PORT
    rest_token: Optional[str] = None

    def __post_init__(self) -> None:
        if self.provider_backend not in ("scripted", "http"):
            raise ConfigError(f"unknown provider backend: {self.provider_backend!r}")
        if self.provider_backend == "http" and not self.base_url:
            raise ConfigError("http provider backend requires base_url")
        if not 0.0 <= self.mmr_lambda <= 1.0:
            raise ConfigError("mmr_lambda out of range [0, 1]")
        if self.ensemble_size < 2:
            raise ConfigError("ensemble_size must be >= 2")
        if self.max_iterations < 1 or self.debate_rounds < 1:
            raise ConfigError("iteration counts must be >= 1")

    @classmethod
    def from_dict(cls, raw: dict) -> "DovaConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "enabled_sources" in raw:
            raw = dict(raw, enabled_sources=tuple(raw["enabled_sources"]))
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "DovaConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        return {
            "provider_backend": self.provider_backend,
            "script_path": self.script_path,
            "base_url": self.base_url,
            "api_key_env": self.api_key_env,
            "tier_models": dict(self.tier_models),
            "enabled_sources": list(self.enabled_sources),
            "fixtures_dir": self.fixtures_dir,
            "memory_dir": self.memory_dir,
            "memory_max_entries": self.memory_max_entries,
            "mmr_lambda": self.mmr_lambda,
            "recall_top_k": self.recall_top_k,
            "ensemble_size": self.ensemble_size,
            "max_iterations": self.max_iterations,
            "debate_rounds": self.debate_rounds,
            "rest_host": self.rest_host,
            "rest_port": self.rest_port,
            "rest_token": self.rest_token,
        }


def build_provider(config: DovaConfig) -> ProviderPort:
    """Instantiate the configured provider backend."""
    if config.provider_backend == "scripted":
        rules = load_script(config.script_path) if config.script_path else []
        return ScriptedProvider(rules)
    tier_models = {}
    for label, model_id in config.tier_models.items():
        try:
            tier_models[ModelTier(label)] = model_id
        except ValueError:
            raise ConfigError(f"unknown model tier in tier_models: {label!r}") from None
    return HttpProvider(
        base_url=config.base_url,
        api_key=os.environ.get(config.api_key_env, ""),
        tier_models=tier_models,
    )
