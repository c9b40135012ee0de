"""Prompt assembly and chat-completion providers.

build_prompt is a fixed deterministic template: preamble, then ranked
contexts included greedily until the character budget is hit, then the
verbatim question. Contexts are included whole or not at all; the first
context that does not fit stops inclusion, so nothing is ever truncated
mid-text. Zero contexts yields the context-free "vanilla" prompt.
"""

from __future__ import annotations

import logging
import os
import re
import threading
import time
from dataclasses import dataclass, field

import requests

from .errors import ProviderRefusalError, ProviderUnreachableError

logger = logging.getLogger(__name__)

LLM_API_KEY_ENV = "RAGFORGE_LLM_API_KEY"

DEFAULT_TOP_P = 0.95
DEFAULT_MAX_CONTEXT_CHARS = 12_000
DEFAULT_PREAMBLE = (
    "You are a research assistant for wireless networks and communications. "
    "Answer the question using the provided context when available."
)

REFUSAL_ANSWER = "I do not have information about that."


@dataclass(frozen=True)
class RankedContext:
    chunk_id: str
    text: str
    score: float


@dataclass
class GenerationRequest:
    question: str
    contexts: list[RankedContext] = field(default_factory=list)
    system_preamble: str = DEFAULT_PREAMBLE
    sampling_top_p: float = DEFAULT_TOP_P
    max_context_chars: int = DEFAULT_MAX_CONTEXT_CHARS
    model_name: str = "test-model"

    def __post_init__(self):
        if not self.question:
            raise ValueError("question must be non-empty")
        if not 0.0 < self.sampling_top_p <= 1.0:
            raise ValueError("sampling_top_p must be in (0, 1]")


@dataclass(frozen=True)
class GenerationResult:
    answer: str
    used_contexts: list[str]  # chunk_ids actually included in the prompt
    provider_latency_ms: float


def select_contexts(req: GenerationRequest) -> list[RankedContext]:
    """Greedy whole-context inclusion in rank order within the char budget.

    The budget counts context text characters only. The first context that
    does not fully fit stops inclusion.
    """
    chosen: list[RankedContext] = []
    used = 0
    for ctx in req.contexts:
        if used + len(ctx.text) > req.max_context_chars:
            break
        chosen.append(ctx)
        used += len(ctx.text)
    return chosen


def build_user_body(req: GenerationRequest) -> str:
    """Context blocks followed by the verbatim question."""
    parts = []
    for i, ctx in enumerate(select_contexts(req), start=1):
        parts.append(f"[Context {i}] (score={ctx.score:.4f})\n{ctx.text}")
    parts.append(f"Question: {req.question}")
    return "\n\n".join(parts)


def build_prompt(req: GenerationRequest) -> str:
    """The full deterministic prompt: system preamble plus the user body."""
    return f"{req.system_preamble}\n\n{build_user_body(req)}"


class EchoProvider:
    """Canned test provider: deterministic function of the prompt.

    Answers with the first sentence of the top-ranked context; refuses with
    a fixed sentence when the prompt carries no context (vanilla mode).
    """

    _ctx_header = re.compile(r"^\[Context 1\] \(score=[-0-9.]+\)$", re.MULTILINE)

    def complete(self, system: str, user: str, *, top_p: float, model: str) -> str:
        match = self._ctx_header.search(user)
        if not match:
            return REFUSAL_ANSWER
        rest = user[match.end():].lstrip("\n")
        first_line = rest.split("\n", 1)[0]
        sentence = re.split(r"(?<=[.!?])\s", first_line, maxsplit=1)[0]
        return sentence.strip() or REFUSAL_ANSWER


class RefusalProvider:
    """Canned provider that always refuses; the vanilla-baseline stand-in."""

    def complete(self, system: str, user: str, *, top_p: float, model: str) -> str:
        return REFUSAL_ANSWER


class RemoteChatProvider:
    """OpenAI-compatible chat completions: POST {endpoint}/v1/chat/completions.

    The configured top_p is forwarded verbatim. Connection-level failures
    retry with exponential backoff; 4xx responses surface as refusals.
    """

    def __init__(self, endpoint: str, *, max_attempts: int = 3,
                 backoff_base: float = 0.5, max_in_flight: int = 2,
                 timeout: float = 120.0):
        if not endpoint:
            raise ValueError("remote chat provider requires an endpoint")
        self.endpoint = endpoint
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.timeout = timeout
        self._session = requests.Session()
        self._gate = threading.Semaphore(max_in_flight)

    def complete(self, system: str, user: str, *, top_p: float, model: str) -> str:
        url = self.endpoint.rstrip("/") + "/v1/chat/completions"
        body = {
            "model": model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "top_p": top_p,
        }
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(LLM_API_KEY_ENV, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        last_exc: Exception | None = None
        for attempt in range(self.max_attempts):
            try:
                with self._gate:
                    resp = self._session.post(url, json=body, headers=headers, timeout=self.timeout)
                if resp.status_code >= 500:
                    raise requests.ConnectionError(f"server error {resp.status_code}")
                if resp.status_code >= 400:
                    raise ProviderRefusalError(
                        f"chat endpoint refused request: {resp.status_code} {resp.text[:200]}"
                    )
                content = resp.json()["choices"][0]["message"]["content"]
                if not content:
                    raise ProviderRefusalError("chat endpoint returned an empty answer")
                return content
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_exc = exc
                if attempt < self.max_attempts - 1:
                    delay = self.backoff_base * (2 ** attempt)
                    logger.warning("chat request failed (%s); retrying in %.2fs", exc, delay)
                    time.sleep(delay)
        raise ProviderUnreachableError(
            f"chat endpoint unreachable after {self.max_attempts} attempts: {last_exc}"
        )


def generate(req: GenerationRequest, provider) -> GenerationResult:
    """Build the prompt, call the provider, record which contexts went in."""
    included = select_contexts(req)
    body = build_user_body(req)
    start = time.perf_counter()
    answer = provider.complete(
        req.system_preamble, body, top_p=req.sampling_top_p, model=req.model_name
    )
    latency_ms = (time.perf_counter() - start) * 1000.0
    return GenerationResult(
        answer=answer,
        used_contexts=[ctx.chunk_id for ctx in included],
        provider_latency_ms=latency_ms,
    )
