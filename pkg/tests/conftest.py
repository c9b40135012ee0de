"""Shared fixtures: a programmable HTTP stub and vector helpers."""

from __future__ import annotations

import json
import threading
from collections import deque
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from ragforge.embed import EmbeddingVector, token_bucket


class HttpStub:
    """Tiny JSON endpoint with a scriptable response plan.

    Each queued action is either (status, payload) or a callable taking the
    parsed request body and returning (status, payload). With the plan
    empty, the default action answers. Every request is recorded as
    (path, body) for wire-level assertions.
    """

    def __init__(self):
        self.requests: list[tuple[str, dict]] = []
        self._plan: deque = deque()
        self._default = (500, {"error": "no response configured"})
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                body = json.loads(self.rfile.read(length) or b"{}")
                stub.requests.append((self.path, body))
                action = stub._plan.popleft() if stub._plan else stub._default
                status, payload = action(body) if callable(action) else action
                raw = json.dumps(payload).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(raw)))
                self.end_headers()
                self.wfile.write(raw)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self._server.server_address[1]}"

    def enqueue(self, action) -> None:
        self._plan.append(action)

    def set_default(self, action) -> None:
        self._default = action

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def http_stub():
    stub = HttpStub()
    yield stub
    stub.close()


def unit_vector(rng: np.random.Generator, dim: int = 256) -> EmbeddingVector:
    v = rng.normal(size=dim)
    return EmbeddingVector(values=v / np.linalg.norm(v), dim=dim)


def assert_distinct_buckets(tokens: list[str], dim: int = 256) -> None:
    """Guard for tests that rely on exact cosine values: the chosen tokens
    must hash to distinct buckets or the construction is invalid."""
    buckets = [token_bucket(t, dim) for t in tokens]
    assert len(set(buckets)) == len(buckets), f"bucket collision among {tokens}"
