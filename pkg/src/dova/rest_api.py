"""HTTP interface over the orchestrator, on the standard library only.

Endpoints live under /v1. When a bearer token is configured every route
except /v1/health requires it. The server is a ThreadingHTTPServer so a
long-running query does not block health checks; per-session locks inside
the orchestrator keep concurrent queries on one session serialized.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from .debate import run_debate
from .errors import DovaError
from .memory import MmrParams, TIERS
from .orchestrator import Orchestrator
from .routing import Source, classify, search_sources, sources_for
from .validation import validate_code

logger = logging.getLogger(__name__)

MAX_BODY_BYTES = 1_000_000

_SESSION_PATH = re.compile(r"^/v1/sessions/([^/]+)(/events|/settings)?$")


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


def make_handler(orchestrator: Orchestrator, token: Optional[str]):
    """Build the request handler class bound to one orchestrator."""

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, format, *args):  # noqa: A002 - stdlib signature
            logger.debug("%s - %s", self.address_string(), format % args)

        # -- plumbing -----------------------------------------------------

        def _send(self, status: int, payload: dict) -> None:
            body = json.dumps(payload, sort_keys=True).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _authorized(self) -> bool:
            if token is None:
                return True
            header = self.headers.get("Authorization", "")
            return header == f"Bearer {token}"

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length > MAX_BODY_BYTES:
                raise ApiError(400, "request body too large")
            raw = self.rfile.read(length) if length else b""
            if not raw:
                return {}
            try:
                parsed = json.loads(raw)
            except json.JSONDecodeError:
                raise ApiError(400, "request body is not valid JSON")
            if not isinstance(parsed, dict):
                raise ApiError(400, "request body must be a JSON object")
            return parsed

        def _route(self, method: str) -> None:
            path, _, query_string = self.path.partition("?")
            if path == "/v1/health" and method == "GET":
                self._send(200, {"status": "ok"})
                return
            if not self._authorized():
                self._send(401, {"error": "missing or invalid bearer token"})
                return
            try:
                handled = self._dispatch(method, path, query_string)
            except ApiError as exc:
                self._send(exc.status, {"error": exc.message})
                return
            except DovaError as exc:
                self._send(500, {"error": f"{type(exc).__name__}: {exc}"})
                return
            except Exception as exc:
                logger.exception("unhandled error on %s %s", method, path)
                self._send(500, {"error": f"internal error: {exc}"})
                return
            if not handled:
                self._send(404, {"error": f"no route for {method} {path}"})

        def _dispatch(self, method: str, path: str, query_string: str) -> bool:
            if path == "/v1/query" and method == "POST":
                self._post_query()
            elif path == "/v1/sessions" and method == "POST":
                self._post_session()
            elif path == "/v1/sessions" and method == "GET":
                self._send(
                    200,
                    {"sessions": [s.to_dict() for s in orchestrator.list_sessions()]},
                )
            elif (match := _SESSION_PATH.match(path)) is not None:
                self._session_route(method, match, query_string)
            elif path == "/v1/memory/search" and method == "POST":
                self._post_memory_search()
            elif path == "/v1/memory/entries" and method == "GET":
                self._get_memory_entries(query_string)
            elif path == "/v1/memory/entries" and method == "POST":
                self._post_memory_entry()
            elif path == "/v1/debate" and method == "POST":
                self._post_debate()
            elif path == "/v1/validate" and method == "POST":
                self._post_validate()
            elif path == "/v1/sources/search" and method == "POST":
                self._post_sources_search()
            elif path == "/v1/metrics" and method == "GET":
                self._send(200, orchestrator.metrics())
            else:
                return False
            return True

        # -- queries ------------------------------------------------------

        def _post_query(self) -> None:
            body = self._read_body()
            query = body.get("query")
            if not isinstance(query, str) or not query.strip():
                raise ApiError(400, "query must be a nonempty string")
            session_id = body.get("session_id")
            if session_id:
                session = orchestrator.get_session(session_id)
                if session is None:
                    raise ApiError(404, f"no such session: {session_id}")
            else:
                session = orchestrator.create_session(
                    user_id=body.get("user_id") or "user"
                )
            response = orchestrator.handle_query(query, session)
            status = 500 if response.error else 200
            self._send(status, response.to_dict())

        # -- sessions -----------------------------------------------------

        def _post_session(self) -> None:
            body = self._read_body()
            session = orchestrator.create_session(
                user_id=body.get("user_id") or "user"
            )
            self._send(201, session.to_dict())

        def _session_route(self, method: str, match: re.Match, query_string: str) -> None:
            session_id, tail = match.group(1), match.group(2)
            session = orchestrator.get_session(session_id)
            if session is None:
                raise ApiError(404, f"no such session: {session_id}")
            if tail is None:
                if method == "GET":
                    self._send(200, session.to_dict())
                elif method == "DELETE":
                    orchestrator.delete_session(session_id)
                    self._send(200, {"deleted": session_id})
                else:
                    raise ApiError(404, f"no route for {method} on session")
            elif tail == "/events":
                if method != "GET":
                    raise ApiError(404, "events endpoint is GET only")
                after = _query_param_int(query_string, "after", default=-1)
                events = session.events.events(after=after)
                self._send(200, {"events": [e.to_dict() for e in events]})
            else:
                if method == "GET":
                    self._send(200, session.settings.to_dict())
                elif method == "PUT":
                    body = self._read_body()
                    try:
                        session.settings.apply(body)
                    except (ValueError, KeyError) as exc:
                        raise ApiError(400, f"bad settings: {exc}")
                    self._send(200, session.settings.to_dict())
                else:
                    raise ApiError(404, "settings endpoint is GET or PUT")

        # -- memory -------------------------------------------------------

        def _post_memory_search(self) -> None:
            body = self._read_body()
            query = body.get("query")
            if not isinstance(query, str) or not query.strip():
                raise ApiError(400, "query must be a nonempty string")
            top_k = body.get("top_k", orchestrator.config.recall_top_k)
            lambda_ = body.get("lambda", orchestrator.config.mmr_lambda)
            tiers = body.get("tiers")
            if tiers is not None:
                unknown = set(tiers) - set(TIERS)
                if unknown:
                    raise ApiError(400, f"unknown tiers: {sorted(unknown)}")
            try:
                params = MmrParams(lambda_=float(lambda_), top_k=int(top_k))
            except (TypeError, ValueError) as exc:
                raise ApiError(400, f"bad search params: {exc}")
            hits = orchestrator.memory.search(query, params, tiers=tiers)
            self._send(
                200,
                {
                    "hits": [
                        {"entry": entry.to_record(), "score": score}
                        for entry, score in hits
                    ]
                },
            )

        def _get_memory_entries(self, query_string: str) -> None:
            tier = _query_param(query_string, "tier")
            if tier is not None and tier not in TIERS:
                raise ApiError(400, f"unknown tier: {tier}")
            entries = orchestrator.memory.entries(tier)
            self._send(200, {"entries": [e.to_record() for e in entries]})

        def _post_memory_entry(self) -> None:
            body = self._read_body()
            content = body.get("content")
            if not isinstance(content, str) or not content.strip():
                raise ApiError(400, "content must be a nonempty string")
            tier = body.get("tier", "short_term")
            if tier not in TIERS:
                raise ApiError(400, f"unknown tier: {tier}")
            ttl = body.get("ttl")
            if ttl is not None:
                try:
                    ttl = float(ttl)
                except (TypeError, ValueError):
                    raise ApiError(400, "ttl must be a number")
            metadata = body.get("metadata") or {}
            if not isinstance(metadata, dict):
                raise ApiError(400, "metadata must be an object")
            try:
                entry = orchestrator.memory.store(
                    content, tier=tier, ttl_seconds=ttl, metadata=metadata
                )
            except (ValueError, DovaError) as exc:
                raise ApiError(400, str(exc))
            self._send(201, {"entry": entry.to_record()})

        # -- components ---------------------------------------------------

        def _post_debate(self) -> None:
            body = self._read_body()
            topic = body.get("topic")
            if not isinstance(topic, str) or not topic.strip():
                raise ApiError(400, "topic must be a nonempty string")
            rounds = body.get("rounds", orchestrator.config.debate_rounds)
            if not isinstance(rounds, int) or rounds < 1:
                raise ApiError(400, "rounds must be a positive integer")
            state, conclusion = run_debate(
                topic,
                orchestrator.provider,
                context=str(body.get("context") or ""),
                rounds=rounds,
            )
            self._send(
                200, {"state": state.to_dict(), "conclusion": conclusion.to_dict()}
            )

        def _post_validate(self) -> None:
            body = self._read_body()
            content = body.get("content")
            if not isinstance(content, str):
                raise ApiError(400, "content must be a string")
            self._send(200, validate_code(content).to_dict())

        def _post_sources_search(self) -> None:
            body = self._read_body()
            query = body.get("query")
            if not isinstance(query, str) or not query.strip():
                raise ApiError(400, "query must be a nonempty string")
            raw_sources = body.get("sources")
            if raw_sources:
                try:
                    chosen = tuple(Source(s) for s in raw_sources)
                except ValueError:
                    raise ApiError(400, f"unknown source in {raw_sources}")
            else:
                chosen = sources_for(classify(query))
            outcome = search_sources(query, chosen, orchestrator.search_backend)
            payload = outcome.to_dict()
            payload["query_type"] = classify(query).value
            self._send(200, payload)

        # -- HTTP verbs ---------------------------------------------------

        def do_GET(self) -> None:  # noqa: N802 - stdlib naming
            self._route("GET")

        def do_POST(self) -> None:  # noqa: N802
            self._route("POST")

        def do_PUT(self) -> None:  # noqa: N802
            self._route("PUT")

        def do_DELETE(self) -> None:  # noqa: N802
            self._route("DELETE")

    return Handler


def _query_param(query_string: str, key: str) -> Optional[str]:
    for part in query_string.split("&"):
        if "=" in part:
            name, value = part.split("=", 1)
            if name == key:
                return value
    return None


def _query_param_int(query_string: str, key: str, default: int) -> int:
    raw = _query_param(query_string, key)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ApiError(400, f"{key} must be an integer")


def make_server(
    orchestrator: Orchestrator,
    host: str = "127.0.0.1",
    port: int = 8533,
    token: Optional[str] = None,
) -> ThreadingHTTPServer:
    handler = make_handler(orchestrator, token)
    return ThreadingHTTPServer((host, port), handler)


def serve_in_thread(
    orchestrator: Orchestrator,
    host: str = "127.0.0.1",
    port: int = 0,
    token: Optional[str] = None,
) -> tuple[ThreadingHTTPServer, threading.Thread, str]:
    """Start the server on a daemon thread; port 0 picks a free port.
    Returns (server, thread, base_url); call server.shutdown() to stop."""
    server = make_server(orchestrator, host, port, token)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    actual_host, actual_port = server.server_address[:2]
    return server, thread, f"http://{actual_host}:{actual_port}"
