from __future__ import annotations

import pytest

from ragforge.errors import ProviderRefusalError, ProviderUnreachableError
from ragforge.gen import (
    DEFAULT_PREAMBLE,
    REFUSAL_ANSWER,
    EchoProvider,
    GenerationRequest,
    RankedContext,
    RefusalProvider,
    RemoteChatProvider,
    build_prompt,
    build_user_body,
    generate,
    select_contexts,
)


def _ctx(i: int, text: str, score: float) -> RankedContext:
    return RankedContext(chunk_id=f"c{i}", text=text, score=score)


class TestRequestValidation:
    def test_empty_question_rejected(self):
        with pytest.raises(ValueError):
            GenerationRequest(question="")

    def test_top_p_bounds(self):
        with pytest.raises(ValueError):
            GenerationRequest(question="q", sampling_top_p=0.0)
        with pytest.raises(ValueError):
            GenerationRequest(question="q", sampling_top_p=1.5)
        GenerationRequest(question="q", sampling_top_p=1.0)


class TestBuildPrompt:
    def test_template_exact(self):
        req = GenerationRequest(
            question="What is X?",
            contexts=[_ctx(1, "First passage.", 0.9), _ctx(2, "Second passage.", 0.25)],
            system_preamble="SYS",
        )
        assert build_prompt(req) == (
            "SYS\n\n"
            "[Context 1] (score=0.9000)\nFirst passage.\n\n"
            "[Context 2] (score=0.2500)\nSecond passage.\n\n"
            "Question: What is X?"
        )

    def test_vanilla_prompt_has_no_context_blocks(self):
        req = GenerationRequest(question="What is X?", system_preamble="SYS")
        assert build_prompt(req) == "SYS\n\nQuestion: What is X?"

    def test_deterministic(self):
        req = GenerationRequest(question="q", contexts=[_ctx(1, "t", 0.5)])
        assert build_prompt(req) == build_prompt(req)

    def test_greedy_budget_reference_case(self):
        # 30 contexts of 1000 chars against a 12,000-char budget: 12 fit.
        contexts = [_ctx(i, "x" * 1000, 1.0 - i / 100) for i in range(30)]
        req = GenerationRequest(question="q", contexts=contexts, max_context_chars=12_000)
        chosen = select_contexts(req)
        assert len(chosen) == 12
        assert chosen == contexts[:12]
        body = build_user_body(req)
        assert "[Context 12]" in body
        assert "[Context 13]" not in body

    def test_overflowing_context_stops_inclusion(self):
        # The second context exceeds the budget; the third is not considered
        # even though it would fit.
        contexts = [_ctx(1, "a" * 500, 0.9), _ctx(2, "b" * 600, 0.8), _ctx(3, "c" * 10, 0.7)]
        req = GenerationRequest(question="q", contexts=contexts, max_context_chars=1000)
        assert select_contexts(req) == contexts[:1]

    def test_contexts_verbatim_never_truncated(self):
        text = "A long passage\nwith a newline."
        req = GenerationRequest(question="q", contexts=[_ctx(1, text, 0.4)])
        assert text in build_prompt(req)


class TestCannedProviders:
    def test_echo_returns_first_sentence_of_top_context(self):
        req = GenerationRequest(
            question="q",
            contexts=[_ctx(1, "The widget spins. It also hums.", 0.8),
                      _ctx(2, "Unrelated text.", 0.2)],
        )
        result = generate(req, EchoProvider())
        assert result.answer == "The widget spins."

    def test_echo_handles_single_sentence_context(self):
        req = GenerationRequest(question="q", contexts=[_ctx(1, "No terminator here", 0.8)])
        assert generate(req, EchoProvider()).answer == "No terminator here"

    def test_echo_refuses_without_context(self):
        req = GenerationRequest(question="q")
        assert generate(req, EchoProvider()).answer == REFUSAL_ANSWER

    def test_refusal_provider_always_refuses(self):
        req = GenerationRequest(question="q", contexts=[_ctx(1, "Facts.", 0.9)])
        assert generate(req, RefusalProvider()).answer == REFUSAL_ANSWER

    def test_generate_records_used_contexts(self):
        contexts = [_ctx(1, "a" * 600, 0.9), _ctx(2, "b" * 600, 0.8)]
        req = GenerationRequest(question="q", contexts=contexts, max_context_chars=700)
        result = generate(req, EchoProvider())
        assert result.used_contexts == ["c1"]
        assert result.provider_latency_ms >= 0.0

    def test_echo_is_deterministic(self):
        req = GenerationRequest(question="q", contexts=[_ctx(1, "Fact one. Fact two.", 0.8)])
        answers = {generate(req, EchoProvider()).answer for _ in range(3)}
        assert len(answers) == 1


def _chat_ok(body: dict) -> tuple[int, dict]:
    return 200, {"choices": [{"message": {"content": "canned reply"}}]}


class TestRemoteChatProvider:
    def test_wire_protocol_carries_top_p(self, http_stub):
        http_stub.set_default(_chat_ok)
        provider = RemoteChatProvider(http_stub.url, backoff_base=0.01)
        req = GenerationRequest(
            question="What is X?",
            contexts=[_ctx(1, "Passage.", 0.5)],
            sampling_top_p=0.95,
            model_name="chat-model",
        )
        result = generate(req, provider)
        assert result.answer == "canned reply"
        path, body = http_stub.requests[0]
        assert path == "/v1/chat/completions"
        assert body["top_p"] == 0.95
        assert body["model"] == "chat-model"
        assert [m["role"] for m in body["messages"]] == ["system", "user"]
        assert body["messages"][0]["content"] == DEFAULT_PREAMBLE
        assert "Question: What is X?" in body["messages"][1]["content"]
        assert "[Context 1] (score=0.5000)\nPassage." in body["messages"][1]["content"]

    def test_retry_then_success(self, http_stub):
        http_stub.enqueue((502, {"error": "flaky"}))
        http_stub.set_default(_chat_ok)
        provider = RemoteChatProvider(http_stub.url, backoff_base=0.01)
        assert provider.complete("s", "u", top_p=0.5, model="m") == "canned reply"
        assert len(http_stub.requests) == 2

    def test_unreachable_after_three_attempts(self, http_stub):
        http_stub.set_default((500, {"error": "down"}))
        provider = RemoteChatProvider(http_stub.url, backoff_base=0.01)
        with pytest.raises(ProviderUnreachableError):
            provider.complete("s", "u", top_p=0.5, model="m")
        assert len(http_stub.requests) == 3

    def test_client_error_is_refusal(self, http_stub):
        http_stub.set_default((403, {"error": "no"}))
        provider = RemoteChatProvider(http_stub.url, backoff_base=0.01)
        with pytest.raises(ProviderRefusalError):
            provider.complete("s", "u", top_p=0.5, model="m")
        assert len(http_stub.requests) == 1

    def test_empty_answer_is_refusal(self, http_stub):
        http_stub.set_default(lambda body: (200, {"choices": [{"message": {"content": ""}}]}))
        provider = RemoteChatProvider(http_stub.url, backoff_base=0.01)
        with pytest.raises(ProviderRefusalError):
            provider.complete("s", "u", top_p=0.5, model="m")
