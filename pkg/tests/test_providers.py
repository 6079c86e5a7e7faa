import math
import threading

import pytest
from hypothesis import given, strategies as st

from dova.errors import ConfigError, NoScriptMatch, ProviderError
from dova.providers import (
    EMBEDDING_DIM,
    TIER_TABLE,
    CompletionRequest,
    HttpProvider,
    Message,
    ModelTier,
    ScriptedProvider,
    TaskType,
    embed_text,
    load_script,
    resolve_tier,
    simple_request,
    tokenize,
)


def user_request(text, task=TaskType.CHAT):
    return CompletionRequest(
        messages=(Message("user", text),),
        task_type=task,
        max_tokens=100,
        temperature=0.0,
        thinking_budget=0,
    )


class TestTierTable:
    def test_every_task_has_a_tier(self):
        assert set(TIER_TABLE) == set(TaskType)

    def test_known_rows(self):
        assert resolve_tier(TaskType.CLASSIFICATION).tier is ModelTier.BASIC
        assert resolve_tier(TaskType.CLASSIFICATION).max_tokens == 10000
        assert resolve_tier(TaskType.CLASSIFICATION).temperature == 0.0
        assert resolve_tier(TaskType.CHAT).tier is ModelTier.STANDARD
        assert resolve_tier(TaskType.CODE_GENERATION).max_tokens == 80000
        assert resolve_tier(TaskType.CODE_GENERATION).temperature == 0.2
        assert resolve_tier(TaskType.RESEARCH).tier is ModelTier.ADVANCED
        assert resolve_tier(TaskType.EMBEDDING).max_tokens == 0


class TestRequestValidation:
    def test_empty_messages_rejected(self):
        with pytest.raises(ValueError):
            CompletionRequest(
                messages=(),
                task_type=TaskType.CHAT,
                max_tokens=10,
                temperature=0.0,
                thinking_budget=0,
            )

    def test_bad_role_rejected(self):
        with pytest.raises(ValueError):
            Message("wizard", "hi")

    def test_budget_over_cap_rejected(self):
        with pytest.raises(ValueError):
            CompletionRequest(
                messages=(Message("user", "x"),),
                task_type=TaskType.CHAT,
                max_tokens=10,
                temperature=0.0,
                thinking_budget=65537,
            )

    def test_last_user_message_skips_trailing_assistant(self):
        request = CompletionRequest(
            messages=(
                Message("user", "first"),
                Message("assistant", "reply"),
            ),
            task_type=TaskType.CHAT,
            max_tokens=10,
            temperature=0.0,
            thinking_budget=0,
        )
        assert request.last_user_message() == "first"


class TestScriptedProvider:
    def test_first_registered_rule_wins(self):
        p = ScriptedProvider()
        p.add_rule("alpha", "first")
        p.add_rule("alpha beta", "second")
        assert p.complete(user_request("alpha beta")).text == "first"

    def test_exact_kind_requires_full_match(self):
        p = ScriptedProvider()
        p.add_rule("ping", "pong", kind="exact")
        assert p.complete(user_request("ping")).text == "pong"
        with pytest.raises(NoScriptMatch):
            p.complete(user_request("ping extra"))

    def test_no_match_raises(self):
        p = ScriptedProvider()
        with pytest.raises(NoScriptMatch):
            p.complete(user_request("anything"))

    def test_confidence_wraps_plain_response(self):
        p = ScriptedProvider()
        p.add_rule("q", "the answer", confidence=0.7)
        text = p.complete(user_request("q")).text
        assert "THOUGHT: the answer" in text
        assert "ACTION: conclude" in text
        assert "CONFIDENCE: 0.7" in text

    def test_confidence_leaves_structured_response_alone(self):
        p = ScriptedProvider()
        scripted = "THOUGHT: step\nACTION: conclude\nCONFIDENCE: 0.9"
        p.add_rule("q", scripted, confidence=0.5)
        assert p.complete(user_request("q")).text == scripted

    def test_token_accounting(self):
        p = ScriptedProvider()
        p.add_rule("", "x" * 40)
        request = CompletionRequest(
            messages=(Message("system", "a" * 80), Message("user", "b" * 40)),
            task_type=TaskType.CHAT,
            max_tokens=10,
            temperature=0.0,
            thinking_budget=1024,
        )
        response = p.complete(request)
        assert response.input_tokens == 80 // 4 + 40 // 4
        assert response.output_tokens == 10
        assert response.thinking_tokens == 1024 // 8

    def test_call_log_records_in_order(self):
        p = ScriptedProvider()
        p.add_rule("", "ok")
        p.complete(user_request("one"))
        p.complete(user_request("two"))
        assert [r.request.last_user_message() for r in p.call_log] == ["one", "two"]

    def test_call_log_thread_safe(self):
        p = ScriptedProvider()
        p.add_rule("", "ok")

        def worker():
            for _ in range(50):
                p.complete(user_request("x"))

        threads = [threading.Thread(target=worker) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(p.call_log) == 200


class TestLoadScript:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "script.jsonl"
        path.write_text(
            "# comment\n"
            '{"match": "hi", "response": "hello"}\n'
            "\n"
            '{"match": "exact", "response": "ok", "kind": "exact", "confidence": 0.5}\n'
        )
        rules = load_script(path)
        assert len(rules) == 2
        assert rules[0].matcher == "hi"
        assert rules[1].kind == "exact"
        assert rules[1].confidence == 0.5

    def test_bad_line_reports_line_number(self, tmp_path):
        path = tmp_path / "script.jsonl"
        path.write_text('{"match": "a", "response": "b"}\nnot json\n')
        with pytest.raises(ConfigError, match="2"):
            load_script(path)


class TestEmbedding:
    def test_dimension_fixed(self):
        assert embed_text("hello world").dimension == EMBEDDING_DIM

    def test_unit_norm(self):
        values = embed_text("the quick brown fox").values
        norm = math.sqrt(sum(v * v for v in values))
        assert norm == pytest.approx(1.0)

    def test_empty_text_gives_zero_vector(self):
        assert all(v == 0.0 for v in embed_text("").values)

    def test_deterministic(self):
        assert embed_text("same text").values == embed_text("same text").values

    @given(st.text(max_size=80))
    def test_norm_is_zero_or_one(self, text):
        values = embed_text(text).values
        norm = math.sqrt(sum(v * v for v in values))
        assert norm == pytest.approx(1.0) or norm == 0.0

    def test_tokenize_drops_punctuation(self):
        assert tokenize("Hello, World! 123") == ["hello", "world", "123"]


class TestHttpProvider:
    def test_complete_posts_chat_body(self):
        calls = []

        def transport(url, headers, body):
            calls.append((url, headers, body))
            return {
                "choices": [{"message": {"content": "hi"}}],
                "usage": {"prompt_tokens": 3, "completion_tokens": 2},
            }

        provider = HttpProvider(
            base_url="http://127.0.0.1:9", api_key="k", transport=transport
        )
        response = provider.complete(
            simple_request("ping", task_type=TaskType.CHAT, thinking_budget=1024)
        )
        assert response.text == "hi"
        url, headers, body = calls[0]
        assert url.endswith("/chat/completions")
        assert headers["Authorization"] == "Bearer k"
        assert body["reasoning"]["max_tokens"] == 1024
        assert body["messages"][-1]["content"] == "ping"

    def test_retries_once_then_raises_retryable(self):
        attempts = []

        def transport(url, headers, body):
            attempts.append(1)
            raise OSError("connection refused")

        slept = []
        provider = HttpProvider(
            base_url="http://127.0.0.1:9",
            api_key="k",
            transport=transport,
            sleep=slept.append,
        )
        with pytest.raises(ProviderError) as excinfo:
            provider.complete(simple_request("ping"))
        assert excinfo.value.retryable
        assert len(attempts) == 2
        assert slept == [HttpProvider.RETRY_DELAY]

    def test_embed_uses_embeddings_route(self):
        def transport(url, headers, body):
            assert url.endswith("/embeddings")
            return {"data": [{"embedding": [0.6, 0.8]}]}

        provider = HttpProvider(
            base_url="http://127.0.0.1:9", api_key="k", transport=transport
        )
        assert provider.embed("x").values == (0.6, 0.8)
