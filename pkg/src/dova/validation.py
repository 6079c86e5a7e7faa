"""Static validation of model-produced text.

Deliberately provider-free: these are parse and lint level checks over
fenced code blocks so a validation agent can vet output without burning a
model call. Python blocks additionally get a syntax check via compile().
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_FENCE = re.compile(r"^```", re.M)
_BLOCK = re.compile(r"```([^\n`]*)\n(.*?)```", re.S)

_PAIRS = {"(": ")", "[": "]", "{": "}"}
_CLOSERS = {v: k for k, v in _PAIRS.items()}


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    blocks: int
    issues: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "blocks": self.blocks, "issues": list(self.issues)}


def _brackets_balanced(code: str) -> bool:
    # String/comment-aware enough for lint purposes: skip quoted runs.
    stack: list[str] = []
    quote: str | None = None
    i = 0
    while i < len(code):
        ch = code[i]
        if quote is not None:
            if ch == "\\":
                i += 2
                continue
            if ch == quote:
                quote = None
        elif ch in ("'", '"'):
            quote = ch
        elif ch == "#":
            newline = code.find("\n", i)
            i = len(code) if newline == -1 else newline
        elif ch in _PAIRS:
            stack.append(ch)
        elif ch in _CLOSERS:
            if not stack or stack[-1] != _CLOSERS[ch]:
                return False
            stack.pop()
        i += 1
    return not stack


def validate_code(text: str) -> ValidationReport:
    """Check fenced code blocks: balanced fences, language tags, bracket
    balance, and Python syntax where the tag says python."""
    issues: list[str] = []
    fence_count = len(_FENCE.findall(text))
    if fence_count % 2 != 0:
        issues.append("unbalanced code fences")
    blocks = _BLOCK.findall(text)
    for index, (tag, code) in enumerate(blocks, start=1):
        label = tag.strip().lower()
        if not label:
            issues.append(f"block {index}: missing language tag")
        if not _brackets_balanced(code):
            issues.append(f"block {index}: unbalanced brackets")
        if label in ("python", "py"):
            try:
                compile(code, f"<block-{index}>", "exec")
            except SyntaxError as exc:
                issues.append(f"block {index}: python syntax error: {exc.msg}")
    return ValidationReport(ok=not issues, blocks=len(blocks), issues=tuple(issues))
