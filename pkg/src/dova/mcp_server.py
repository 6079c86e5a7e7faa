"""Stdio JSON-RPC server exposing the engine as five callable tools.

Speaks line-delimited JSON-RPC 2.0 over a pair of text streams. A malformed
line answers with a parse error and keeps the stream alive; notifications
(no id) are absorbed silently. The orchestrator is constructed lazily on
the first call that needs it so a bare initialize/tools-list handshake
stays cheap.
"""

from __future__ import annotations

import json
import logging
from typing import Callable, Optional, TextIO

from .debate import run_debate
from .orchestrator import Orchestrator, ReasoningMode, Session
from .routing import SOURCE_ORDER, Source, search_sources, sources_for, classify
from .validation import validate_code

logger = logging.getLogger(__name__)

PROTOCOL_VERSION = "2024-11-05"
SERVER_NAME = "dova"
SERVER_VERSION = "0.1.0"

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603

TOOL_SPECS: list[dict] = [
    {
        "name": "dova_research",
        "description": (
            "Run a research query through the full engine: deliberation, "
            "mode selection, source gathering, reasoning, and scoring. "
            "Returns the answer with confidence, mode, and sources."
        ),
        "inputSchema": {
            "type": "object",
            "properties": {
                "query": {"type": "string", "description": "The question to research"},
                "mode": {
                    "type": "string",
                    "enum": ["quick", "standard", "deep", "collaborative"],
                    "description": "Optional reasoning mode override",
                },
            },
            "required": ["query"],
        },
    },
    {
        "name": "dova_search",
        "description": (
            "Classify a query and search the routed knowledge sources. "
            "Returns grouped results without running the reasoning engine."
        ),
        "inputSchema": {
            "type": "object",
            "properties": {
                "query": {"type": "string", "description": "Search query"},
                "sources": {
                    "type": "array",
                    "items": {
                        "type": "string",
                        "enum": [s.value for s in SOURCE_ORDER],
                    },
                    "description": "Optional explicit source list; omitted means routed",
                },
            },
            "required": ["query"],
        },
    },
    {
        "name": "dova_debate",
        "description": (
            "Argue both sides of a judgment question over fixed rounds and "
            "return a judged verdict with confidence."
        ),
        "inputSchema": {
            "type": "object",
            "properties": {
                "topic": {"type": "string", "description": "The question to debate"},
                "rounds": {
                    "type": "integer",
                    "minimum": 1,
                    "description": "Argument rounds per side (default 2)",
                },
            },
            "required": ["topic"],
        },
    },
    {
        "name": "dova_validate",
        "description": (
            "Statically check fenced code blocks in text: fence balance, "
            "language tags, bracket matching, and Python syntax."
        ),
        "inputSchema": {
            "type": "object",
            "properties": {
                "content": {"type": "string", "description": "Text with fenced code blocks"},
            },
            "required": ["content"],
        },
    },
    {
        "name": "dova_web_search",
        "description": "Search the web source only and return ranked results.",
        "inputSchema": {
            "type": "object",
            "properties": {
                "query": {"type": "string", "description": "Search query"},
            },
            "required": ["query"],
        },
    },
]

TOOL_NAMES = tuple(spec["name"] for spec in TOOL_SPECS)


class McpServer:
    """One server instance per stdio connection."""

    def __init__(self, orchestrator_factory: Callable[[], Orchestrator]):
        self._factory = orchestrator_factory
        self._orchestrator: Optional[Orchestrator] = None
        self._session: Optional[Session] = None

    def _orch(self) -> Orchestrator:
        if self._orchestrator is None:
            self._orchestrator = self._factory()
        return self._orchestrator

    def _mcp_session(self) -> Session:
        if self._session is None:
            self._session = self._orch().create_session(user_id="mcp")
        return self._session

    # -- request handling -------------------------------------------------

    def handle_line(self, line: str) -> Optional[str]:
        """Process one wire line; returns the response line or None for
        notifications and blank input."""
        line = line.strip()
        if not line:
            return None
        try:
            message = json.loads(line)
        except json.JSONDecodeError:
            return _error_line(None, PARSE_ERROR, "parse error: invalid JSON")
        if not isinstance(message, dict) or "method" not in message:
            return _error_line(
                message.get("id") if isinstance(message, dict) else None,
                INVALID_REQUEST,
                "invalid request: missing method",
            )
        method = message["method"]
        params = message.get("params") or {}
        request_id = message.get("id")
        if request_id is None:
            logger.debug("notification %s ignored", method)
            return None
        try:
            result = self._dispatch(method, params)
        except _RpcError as exc:
            return _error_line(request_id, exc.code, exc.message)
        except Exception as exc:
            logger.exception("internal error handling %s", method)
            return _error_line(request_id, INTERNAL_ERROR, f"internal error: {exc}")
        return json.dumps(
            {"jsonrpc": "2.0", "id": request_id, "result": result}, sort_keys=True
        )

    def _dispatch(self, method: str, params: dict) -> dict:
        if method == "initialize":
            return {
                "protocolVersion": PROTOCOL_VERSION,
                "capabilities": {"tools": {}},
                "serverInfo": {"name": SERVER_NAME, "version": SERVER_VERSION},
            }
        if method == "ping":
            return {}
        if method == "tools/list":
            return {"tools": TOOL_SPECS}
        if method == "tools/call":
            return self._call_tool(params)
        raise _RpcError(METHOD_NOT_FOUND, f"method not found: {method}")

    def _call_tool(self, params: dict) -> dict:
        name = params.get("name")
        arguments = params.get("arguments") or {}
        if not isinstance(name, str) or name not in TOOL_NAMES:
            raise _RpcError(INVALID_PARAMS, f"unknown tool: {name!r}")
        if not isinstance(arguments, dict):
            raise _RpcError(INVALID_PARAMS, "arguments must be an object")
        handler = getattr(self, f"_tool_{name.removeprefix('dova_')}")
        try:
            payload = handler(arguments)
        except _RpcError:
            raise
        except Exception as exc:
            logger.warning("tool %s failed: %s", name, exc)
            return {
                "content": [{"type": "text", "text": f"{type(exc).__name__}: {exc}"}],
                "isError": True,
            }
        return {
            "content": [{"type": "text", "text": json.dumps(payload, sort_keys=True)}],
            "isError": False,
        }

    # -- tools ------------------------------------------------------------

    def _tool_research(self, args: dict) -> dict:
        query = _require_str(args, "query")
        session = self._mcp_session()
        mode = args.get("mode")
        if mode is not None:
            try:
                session.settings.mode_override = ReasoningMode(mode)
            except ValueError:
                raise _RpcError(INVALID_PARAMS, f"unknown mode: {mode!r}")
        try:
            response = self._orch().handle_query(query, session)
        finally:
            if mode is not None:
                session.settings.mode_override = None
        return {
            "answer": response.answer,
            "confidence": response.confidence,
            "mode": response.mode.value,
            "thinking_budget": response.thinking_budget,
            "deliberation": response.deliberation.to_dict(),
            "sources": [r.to_dict() for r in response.sources],
            "error": response.error,
        }

    def _tool_search(self, args: dict) -> dict:
        query = _require_str(args, "query")
        raw_sources = args.get("sources")
        if raw_sources:
            try:
                chosen = tuple(Source(s) for s in raw_sources)
            except ValueError as exc:
                raise _RpcError(INVALID_PARAMS, f"unknown source: {exc}")
        else:
            chosen = sources_for(classify(query))
        outcome = search_sources(query, chosen, self._orch().search_backend)
        return outcome.to_dict()

    def _tool_debate(self, args: dict) -> dict:
        topic = _require_str(args, "topic")
        rounds = args.get("rounds", 2)
        if not isinstance(rounds, int) or rounds < 1:
            raise _RpcError(INVALID_PARAMS, "rounds must be a positive integer")
        state, conclusion = run_debate(topic, self._orch().provider, rounds=rounds)
        return {"state": state.to_dict(), "conclusion": conclusion.to_dict()}

    def _tool_validate(self, args: dict) -> dict:
        content = _require_str(args, "content")
        return validate_code(content).to_dict()

    def _tool_web_search(self, args: dict) -> dict:
        query = _require_str(args, "query")
        outcome = search_sources(query, (Source.WEB,), self._orch().search_backend)
        return outcome.to_dict()

    # -- stream loop ------------------------------------------------------

    def serve(self, in_stream: TextIO, out_stream: TextIO) -> None:
        for line in in_stream:
            response = self.handle_line(line)
            if response is not None:
                out_stream.write(response + "\n")
                out_stream.flush()


class _RpcError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _error_line(request_id, code: int, message: str) -> str:
    return json.dumps(
        {
            "jsonrpc": "2.0",
            "id": request_id,
            "error": {"code": code, "message": message},
        },
        sort_keys=True,
    )


def _require_str(args: dict, key: str) -> str:
    value = args.get(key)
    if not isinstance(value, str) or not value.strip():
        raise _RpcError(INVALID_PARAMS, f"{key} must be a nonempty string")
    return value
