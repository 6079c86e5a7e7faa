"""Measure how often deliberation skips tool calls on a mixed workload.

Builds a workload of conversational and research queries, runs each through
the deliberation gate with a scripted decision model, and reports the
direct-response fraction and the expected tool-call volume relative to a
search-always baseline. Queries that hit a mandatory trigger (freshness
words, recent years, citation requests) are counted separately because the
gate refuses to answer those from stale weights regardless of the model's
own judgment.
"""

from __future__ import annotations

import argparse
import sys

from dova.deliberation import (
    ConversationContext,
    DeliberationAction,
    UserModel,
    deliberate,
    expected_tool_volume,
    tool_call_fraction,
)
from dova.providers import ScriptedProvider

CHAT_QUERIES = [
    "hello, can you explain what a hash map is",
    "thanks, that makes sense to me",
    "what does big-O notation mean in practice",
    "rewrite my sentence to sound more formal",
    "why is my loop variable shadowed here",
    "give me a mnemonic for the OSI layers",
    "what is the difference between a process and a thread",
    "can you walk me through how quicksort partitions",
    "explain tail recursion like I am new to it",
    "what makes a function pure",
]

RESEARCH_QUERIES = [
    "what are the latest results on long-context models",
    "find recent benchmarks for vector databases",
    "what is the current state of sparse attention work",
    "survey work from 2025 on speculative decoding",
    "which papers this week cover retrieval evaluation",
    "cite sources on chain-of-thought faithfulness",
    "list specific papers about tool-use agents",
    "what did the 2026 scaling analyses conclude",
    "what are today's open problems in alignment evals",
    "recent progress on kv-cache compression",
]


def build_provider() -> ScriptedProvider:
    provider = ScriptedProvider()
    for query in CHAT_QUERIES:
        provider.add_rule(
            f"Query: {query}",
            "ACTION: respond_directly\nRATIONALE: answerable from general knowledge",
        )
    provider.add_rule(
        "Decide whether this query needs tools",
        "ACTION: use_tools\nRATIONALE: needs source material\nTOOLS: search_arxiv, search_web",
    )
    return provider


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--repeat", type=int, default=1, help="repeat the workload N times"
    )
    args = parser.parse_args(argv)
    if args.repeat < 1:
        parser.error("--repeat must be at least 1")

    provider = build_provider()
    tools = ["search_arxiv", "search_github", "search_huggingface", "search_web"]
    decisions = []
    forced = 0
    for _ in range(args.repeat):
        for query in CHAT_QUERIES + RESEARCH_QUERIES:
            user_model = UserModel("bench")
            context = ConversationContext()
            decision = deliberate(query, user_model, context, tools, provider)
            decisions.append(decision)
            if decision.mandatory_override:
                forced += 1

    total = len(decisions)
    direct = sum(
        1 for d in decisions if d.action is DeliberationAction.RESPOND_DIRECTLY
    )
    fraction_with_tools = tool_call_fraction(decisions)
    volume = expected_tool_volume(decisions)
    print(f"queries:            {total}")
    print(f"direct responses:   {direct} ({direct / total:.1%})")
    print(f"tool-augmented:     {total - direct} ({fraction_with_tools:.1%})")
    print(f"mandatory triggers: {forced}")
    print(f"tool-call volume:   {volume:.2f} of the search-always baseline 1.00")
    print(f"volume saved:       {1 - volume:.1%}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
