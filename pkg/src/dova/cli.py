"""Command-line entry points: interactive chat, one-shot queries, the REST
server, the stdio tool server, and memory inspection.

Chat renders every response as seven stages (observe, recall, reason, plan,
act, reflect, respond) pulled from the response payload and its event
slice, so the terminal shows the same pipeline the API exposes.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, TextIO

from .config import DovaConfig, build_provider
from .errors import ConfigError, DovaError
from .mcp_server import McpServer
from .memory import TIERS
from .orchestrator import Orchestrator, OrchestratedResponse, ReasoningMode, Session
from .rest_api import make_server
from .thinking import ThinkingLevel

logger = logging.getLogger(__name__)

STAGES = ("observe", "recall", "reason", "plan", "act", "reflect", "respond")

CHAT_HELP = """commands:
  /status                 show session and engine state
  /thinking <level|auto>  force a thinking level (off minimal low medium high xhigh)
  /orchestrator <mode|auto>  force a mode (quick standard deep collaborative)
  /quit                   leave the chat"""


def build_config(args: argparse.Namespace) -> DovaConfig:
    if args.config:
        config = DovaConfig.from_file(args.config)
    else:
        config = DovaConfig()
    overrides = {}
    if getattr(args, "scripted", None):
        overrides["provider_backend"] = "scripted"
        overrides["script_path"] = args.scripted
    if getattr(args, "fixtures_dir", None):
        overrides["fixtures_dir"] = args.fixtures_dir
    if overrides:
        merged = config.to_dict()
        merged.update(overrides)
        config = DovaConfig.from_dict(merged)
    return config


def build_orchestrator(config: DovaConfig) -> Orchestrator:
    provider = build_provider(config)
    return Orchestrator(provider, config)


def _event_payloads(response: OrchestratedResponse, kind: str) -> list[dict]:
    return [e.payload for e in response.events if e.kind == kind]


def render_stages(
    response: OrchestratedResponse,
    session: Session,
    show_deliberation: bool,
) -> str:
    """Seven fixed stages, one block each, built from the response."""
    lines: list[str] = []

    def stage(name: str, *rows: str) -> None:
        lines.append(f"[{name}]")
        lines.extend(f"  {row}" for row in rows)

    stage(
        "observe",
        f"query: {response.query}",
        f"session: {response.session_id} (turn {session.turns_handled})",
    )

    recalls = _event_payloads(response, "memory_recall")
    recalled = recalls[0]["entry_ids"] if recalls else []
    stage(
        "recall",
        f"memory hits: {len(recalled)}"
        + (f" ({', '.join(recalled)})" if recalled else ""),
    )

    stage(
        "reason",
        f"mode: {response.mode.value}"
        + (
            f" (degraded from {response.degraded_from.value})"
            if response.degraded_from
            else ""
        ),
        f"thinking: {response.thinking_level.label} (budget {response.thinking_budget})",
        f"task: {response.task_type.value}",
    )

    decision = response.deliberation
    plan_rows = [
        f"action: {decision.action.value}",
        f"tools: {', '.join(decision.selected_tools) or '(none)'}",
    ]
    if decision.mandatory_override:
        plan_rows.append("mandatory override: yes")
    if show_deliberation:
        plan_rows.append(f"rationale: {decision.rationale}")
        plan_rows.append(f"complexity hint: {decision.thinking_hint.value}")
        if decision.suggested_mode:
            plan_rows.append(f"model-suggested mode: {decision.suggested_mode}")
    stage("plan", *plan_rows)

    act_rows = [f"sources gathered: {len(response.sources)}"]
    for r in response.sources[:5]:
        act_rows.append(f"- [{r.source.value}] {r.title}")
    if response.source_errors:
        act_rows.append(f"source errors: {response.source_errors}")
    if response.debate is not None:
        state, _ = response.debate
        act_rows.append(
            f"debate: {len(state.bull_args)} for / {len(state.bear_args)} against"
        )
    if response.ensemble is not None:
        act_rows.append(
            f"ensemble agreement: {response.ensemble.agreement:.3f}"
            f" (dissenting: {len(response.ensemble.dissenting)})"
        )
    if response.trace is not None:
        act_rows.append(
            f"trace: {len(response.trace.steps)} steps,"
            f" concluded={response.trace.concluded}"
        )
    stage("act", *act_rows)

    reflect_rows = []
    if response.report is not None:
        parts = ", ".join(
            f"{k}={v:.2f}" for k, v in response.report.components.as_dict().items()
        )
        reflect_rows.append(
            f"self-eval: {response.report.overall:.2f} ({parts})"
        )
        reflect_rows.append(f"refinement rounds: {response.refinement_rounds}")
    else:
        reflect_rows.append("self-eval: skipped")
    stage("reflect", *reflect_rows)

    stage(
        "respond",
        f"confidence: {response.confidence:.2f}",
        "",
    )
    lines.append(response.answer if not response.error else f"error: {response.error}")
    return "\n".join(lines)


def handle_command(
    line: str, session: Session, orchestrator: Orchestrator, out: TextIO
) -> bool:
    """Process a slash command; returns False when the chat should end."""
    parts = line.split()
    command, args = parts[0], parts[1:]
    if command == "/quit":
        return False
    if command == "/status":
        metrics = orchestrator.metrics()
        out.write(
            f"session {session.id}: {session.turns_handled} turns handled\n"
            f"  mode override: "
            f"{session.settings.mode_override.value if session.settings.mode_override else 'auto'}\n"
            f"  thinking override: "
            f"{session.settings.thinking_override.label if session.settings.thinking_override else 'auto'}\n"
            f"  memory entries: {metrics['memory_entries']}\n"
            f"  provider calls: {metrics['provider_calls']}\n"
        )
        return True
    if command == "/thinking":
        if not args:
            out.write("usage: /thinking <off|minimal|low|medium|high|xhigh|auto>\n")
            return True
        if args[0] == "auto":
            session.settings.thinking_override = None
            out.write("thinking level restored to automatic\n")
            return True
        try:
            level = ThinkingLevel.from_label(args[0])
        except ValueError:
            out.write(f"unknown thinking level: {args[0]}\n")
            return True
        session.settings.thinking_override = level
        out.write(f"thinking level forced to {level.label}\n")
        return True
    if command == "/orchestrator":
        if not args:
            out.write("usage: /orchestrator <quick|standard|deep|collaborative|auto>\n")
            return True
        if args[0] == "auto":
            session.settings.mode_override = None
            out.write("mode restored to automatic\n")
            return True
        try:
            mode = ReasoningMode(args[0])
        except ValueError:
            out.write(f"unknown mode: {args[0]}\n")
            return True
        session.settings.mode_override = mode
        out.write(f"mode forced to {mode.value}\n")
        return True
    out.write(f"unknown command: {command}\n{CHAT_HELP}\n")
    return True


def run_chat(
    orchestrator: Orchestrator,
    in_stream: TextIO,
    out_stream: TextIO,
    show_deliberation: bool = False,
) -> None:
    session = orchestrator.create_session()
    out_stream.write(f"session {session.id} ready; /quit to exit\n")
    out_stream.flush()
    for raw in in_stream:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("/"):
            if not handle_command(line, session, orchestrator, out_stream):
                break
            out_stream.flush()
            continue
        try:
            response = orchestrator.handle_query(line, session)
        except DovaError as exc:
            out_stream.write(f"error: {exc}\n")
            out_stream.flush()
            continue
        out_stream.write(
            render_stages(response, session, show_deliberation) + "\n"
        )
        out_stream.flush()
    out_stream.write("bye\n")
    out_stream.flush()


def _apply_session_flags(session: Session, args: argparse.Namespace) -> None:
    if getattr(args, "mode", None):
        session.settings.mode_override = ReasoningMode(args.mode)
    if getattr(args, "thinking", None):
        session.settings.thinking_override = ThinkingLevel.from_label(args.thinking)


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dova",
        description="Deliberation-first research engine",
    )
    parser.add_argument("--config", help="path to a JSON config file")
    parser.add_argument("--scripted", help="path to a scripted-provider JSONL file")
    parser.add_argument("--fixtures-dir", help="directory of source fixtures")
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="debug logging"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    chat = sub.add_parser("chat", help="interactive session")
    chat.add_argument("--mode", choices=[m.value for m in ReasoningMode])
    chat.add_argument(
        "--thinking", choices=[level.label for level in ThinkingLevel]
    )
    chat.add_argument(
        "--show-deliberation",
        action="store_true",
        help="print full deliberation rationale per turn",
    )

    query = sub.add_parser("query", help="answer one query and exit")
    query.add_argument("text", help="the query")
    query.add_argument("--mode", choices=[m.value for m in ReasoningMode])
    query.add_argument(
        "--thinking", choices=[level.label for level in ThinkingLevel]
    )
    query.add_argument(
        "--show-deliberation", action="store_true",
        help="print full deliberation rationale",
    )
    query.add_argument(
        "--json", action="store_true", help="emit the full response as JSON"
    )

    rest = sub.add_parser("rest", help="serve the HTTP API")
    rest.add_argument("--host", help="bind host (default from config)")
    rest.add_argument("--port", type=int, help="bind port (default from config)")

    sub.add_parser("mcp", help="serve tools over stdio")

    memory = sub.add_parser("memory", help="inspect the memory store")
    memory_sub = memory.add_subparsers(dest="memory_command", required=True)
    dump = memory_sub.add_parser("dump", help="print entries as JSON lines")
    dump.add_argument("--tier", choices=list(TIERS))

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = build_config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "chat":
        orchestrator = build_orchestrator(config)
        run_chat(orchestrator, sys.stdin, sys.stdout, args.show_deliberation)
        return 0

    if args.command == "query":
        orchestrator = build_orchestrator(config)
        session = orchestrator.create_session()
        _apply_session_flags(session, args)
        response = orchestrator.handle_query(args.text, session)
        if args.json:
            print(json.dumps(response.to_dict(), sort_keys=True, indent=2))
        else:
            print(render_stages(response, session, args.show_deliberation))
        return 1 if response.error else 0

    if args.command == "rest":
        orchestrator = build_orchestrator(config)
        host = args.host or config.rest_host
        port = args.port if args.port is not None else config.rest_port
        server = make_server(orchestrator, host, port, config.rest_token)
        print(f"serving on http://{host}:{port}", file=sys.stderr)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            server.shutdown()
        return 0

    if args.command == "mcp":
        server = McpServer(lambda: build_orchestrator(config))
        server.serve(sys.stdin, sys.stdout)
        return 0

    if args.command == "memory":
        orchestrator = build_orchestrator(config)
        for entry in orchestrator.memory.entries(args.tier):
            print(json.dumps(entry.to_record(), sort_keys=True))
        return 0

    parser.error(f"unknown command {args.command}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
