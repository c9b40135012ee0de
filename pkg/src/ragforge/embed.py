"""Text-to-vector providers behind a single embedding contract.

Every provider returns unit-L2 vectors, so cosine similarity downstream is
a plain dot product. The deterministic provider needs no model or network:
it hashes lowercased whitespace tokens into count buckets, which gives
meaningful cosine overlap for shared vocabulary and bitwise-reproducible
output across runs and platforms.
"""

from __future__ import annotations

import functools
import hashlib
import logging
import os
import threading
import time
from dataclasses import dataclass

import numpy as np
import requests

from .errors import DimensionMismatchError, ProviderUnreachableError, ProviderRefusalError

logger = logging.getLogger(__name__)

KIND_DETERMINISTIC = "deterministic-test"
KIND_REMOTE = "remote-service"

EMBED_API_KEY_ENV = "RAGFORGE_EMBED_API_KEY"

# Provider context window of 8192 tokens, taken as ~4 chars per token.
DEFAULT_MAX_INPUT_CHARS = 8192 * 4

_HASH_KEY = b"ragforge.embed.v1"


@dataclass(eq=False)
class EmbeddingVector:
    """Fixed-dimension unit vector. values are float64, finite, ||v|| = 1."""

    values: np.ndarray
    dim: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.dim,):
            raise DimensionMismatchError(
                f"vector has shape {self.values.shape}, expected ({self.dim},)"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("embedding vector contains non-finite values")
        norm = float(np.linalg.norm(self.values))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"embedding vector is not unit-norm (||v|| = {norm})")


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity; a dot product since vectors are unit-norm."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"cosine over mismatched dims {a.dim} != {b.dim}")
    return float(np.dot(a.values, b.values))


@dataclass(frozen=True)
class EmbedderSpec:
    kind: str = KIND_DETERMINISTIC
    endpoint: str = ""
    model_name: str = "gte-test"
    dim: int = 256
    max_input_chars: int = DEFAULT_MAX_INPUT_CHARS
    batch_size: int = 64

    def __post_init__(self):
        if self.kind not in (KIND_DETERMINISTIC, KIND_REMOTE):
            raise ValueError(f"unknown embedder kind: {self.kind!r}")
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        if self.kind == KIND_REMOTE and not self.endpoint:
            raise ValueError("remote-service embedder requires an endpoint")


@functools.lru_cache(maxsize=65536)
def _token_hash(token: str) -> int:
    """Stable 64-bit keyed hash; pure integer before any float conversion."""
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=_HASH_KEY).digest()
    return int.from_bytes(digest, "little")


def token_bucket(token: str, dim: int) -> int:
    return _token_hash(token) % dim


class DeterministicEmbedder:
    """Offline bag-of-hashed-tokens embedder for tests and CI."""

    def __init__(self, spec: EmbedderSpec):
        self.spec = spec

    def embed_text(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot embed empty text")
        if len(text) > self.spec.max_input_chars:
            logger.warning(
                "input of %d chars exceeds max_input_chars=%d; truncating",
                len(text), self.spec.max_input_chars,
            )
            text = text[: self.spec.max_input_chars]
        # Whitespace-only input has no tokens; hash the raw string as one
        # pseudo-token so the unit-norm contract holds for any input.
        tokens = text.lower().split() or [text]
        counts = np.zeros(self.spec.dim, dtype=np.float64)
        for tok in tokens:
            counts[token_bucket(tok, self.spec.dim)] += 1.0
        values = counts / np.linalg.norm(counts)
        return EmbeddingVector(values=values, dim=self.spec.dim)

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]:
        out = []
        for i, text in enumerate(texts):
            try:
                out.append(self.embed_text(text))
            except Exception as exc:
                raise type(exc)(f"batch element {i}: {exc}") from exc
        return out


class RemoteEmbedder:
    """OpenAI-compatible embeddings endpoint: POST {endpoint}/v1/embeddings.

    Returned vectors are re-normalized locally so the unit-norm contract
    holds regardless of what the service emits. Retries connection-level
    failures with exponential backoff; a dimension disagreement is fatal.
    """

    def __init__(self, spec: EmbedderSpec, *, max_attempts: int = 3,
                 backoff_base: float = 0.5, max_in_flight: int = 4,
                 timeout: float = 60.0):
        self.spec = spec
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.timeout = timeout
        self._session = requests.Session()
        self._gate = threading.Semaphore(max_in_flight)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(EMBED_API_KEY_ENV, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post(self, inputs: list[str]) -> list[list[float]]:
        url = self.spec.endpoint.rstrip("/") + "/v1/embeddings"
        body = {"model": self.spec.model_name, "input": inputs}
        last_exc: Exception | None = None
        for attempt in range(self.max_attempts):
            try:
                with self._gate:
                    resp = self._session.post(
                        url, json=body, headers=self._headers(), timeout=self.timeout
                    )
                if resp.status_code >= 500:
                    raise requests.ConnectionError(f"server error {resp.status_code}")
                if resp.status_code >= 400:
                    raise ProviderRefusalError(
                        f"embeddings endpoint refused request: {resp.status_code} {resp.text[:200]}"
                    )
                data = resp.json()["data"]
                data = sorted(data, key=lambda item: item["index"])
                return [item["embedding"] for item in data]
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_exc = exc
                if attempt < self.max_attempts - 1:
                    delay = self.backoff_base * (2 ** attempt)
                    logger.warning("embeddings request failed (%s); retrying in %.2fs", exc, delay)
                    time.sleep(delay)
        raise ProviderUnreachableError(
            f"embeddings endpoint unreachable after {self.max_attempts} attempts: {last_exc}"
        )

    def _to_vector(self, raw: list[float]) -> EmbeddingVector:
        arr = np.asarray(raw, dtype=np.float64)
        if arr.shape != (self.spec.dim,):
            raise DimensionMismatchError(
                f"provider returned dim {arr.shape[0] if arr.ndim == 1 else arr.shape}, "
                f"spec declares {self.spec.dim}"
            )
        norm = float(np.linalg.norm(arr))
        if norm == 0.0 or not np.isfinite(norm):
            raise ValueError("provider returned a degenerate embedding")
        return EmbeddingVector(values=arr / norm, dim=self.spec.dim)

    def embed_text(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot embed empty text")
        if len(text) > self.spec.max_input_chars:
            logger.warning(
                "input of %d chars exceeds max_input_chars=%d; truncating",
                len(text), self.spec.max_input_chars,
            )
            text = text[: self.spec.max_input_chars]
        return self._to_vector(self._post([text])[0])

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]:
        out: list[EmbeddingVector] = []
        for start in range(0, len(texts), self.spec.batch_size):
            window = texts[start:start + self.spec.batch_size]
            window = [t[: self.spec.max_input_chars] for t in window]
            for offset, raw in enumerate(self._post(window)):
                try:
                    out.append(self._to_vector(raw))
                except Exception as exc:
                    raise type(exc)(f"batch element {start + offset}: {exc}") from exc
        return out


Embedder = DeterministicEmbedder | RemoteEmbedder


def make_embedder(spec: EmbedderSpec, **kwargs) -> Embedder:
    if spec.kind == KIND_DETERMINISTIC:
        return DeterministicEmbedder(spec)
    return RemoteEmbedder(spec, **kwargs)


def embed_text(spec: EmbedderSpec, text: str) -> EmbeddingVector:
    return make_embedder(spec).embed_text(text)


def embed_batch(spec: EmbedderSpec, texts: list[str]) -> list[EmbeddingVector]:
    return make_embedder(spec).embed_batch(texts)
