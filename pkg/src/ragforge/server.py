"""Threaded HTTP service exposing the pipeline to clients.

Endpoints: GET /healthz (liveness plus entry count), POST /query (answer a
question in rag or vanilla mode), GET /config (effective non-secret
config), and GET /ui/* (static chat client assets, when a UI directory is
configured). All bodies are UTF-8 JSON; errors come back as
{"error": {"code": ..., "message": ...}} and never crash the service.

The knowledge base is an immutable snapshot while serving; re-ingestion
requires a restart.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import signal
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .config import MODE_RAG, MODE_VANILLA, public_config_dict
from .errors import EmptyIndexError, ProviderRefusalError, ProviderUnreachableError
from .pipeline import Pipeline

logger = logging.getLogger(__name__)

MAX_BODY_BYTES = 1 << 20


class RagServer(ThreadingHTTPServer):
    # Keep-alive clients may hold connections open indefinitely; handler
    # threads must never block shutdown waiting for them to hang up.
    daemon_threads = True
    block_on_close = False

    def __init__(self, address: tuple[str, int], pipeline: Pipeline,
                 ui_dir: str | Path | None = None):
        super().__init__(address, _Handler)
        self.pipeline = pipeline
        self.ui_dir = Path(ui_dir).resolve() if ui_dir else None


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    timeout = 60  # reap idle keep-alive connections
    server: RagServer

    def log_message(self, fmt, *args):
        logger.debug("%s %s", self.address_string(), fmt % args)

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, status: int, code: str, message: str) -> None:
        self._send_json(status, {"error": {"code": code, "message": message}})

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/healthz":
            self._send_json(200, {
                "status": "ok",
                "index_entries": self.server.pipeline.index_entries,
            })
        elif path == "/config":
            self._send_json(200, public_config_dict(self.server.pipeline.config))
        elif path == "/" and self.server.ui_dir is not None:
            self.send_response(307)
            self.send_header("Location", "/ui/")
            self.send_header("Content-Length", "0")
            self.end_headers()
        elif path.startswith("/ui"):
            self._serve_static(path)
        else:
            self._send_error_json(404, "not_found", f"no route for {path}")

    def _serve_static(self, path: str) -> None:
        root = self.server.ui_dir
        if root is None:
            self._send_error_json(404, "ui_disabled", "no UI directory configured")
            return
        rel = path[len("/ui"):].lstrip("/") or "index.html"
        target = (root / rel).resolve()
        # Containment check defeats .. traversal.
        if root not in target.parents and target != root:
            self._send_error_json(404, "not_found", "no such asset")
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            self._send_error_json(404, "not_found", f"no such asset: {rel}")
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        path = self.path.split("?", 1)[0]
        if path != "/query":
            self._send_error_json(404, "not_found", f"no route for {path}")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
        except ValueError:
            length = -1
        if length < 0 or length > MAX_BODY_BYTES:
            self._send_error_json(413, "body_too_large", "request body missing or too large")
            return
        try:
            obj = json.loads(self.rfile.read(length).decode("utf-8") or "{}")
            if not isinstance(obj, dict):
                raise ValueError("body must be a JSON object")
        except (ValueError, UnicodeDecodeError) as exc:
            self._send_error_json(400, "invalid_json", str(exc))
            return

        question = obj.get("question", "")
        if not isinstance(question, str) or not question.strip():
            self._send_error_json(400, "empty_question", "question must be a non-empty string")
            return
        mode = obj.get("mode", self.server.pipeline.mode)
        if mode not in (MODE_RAG, MODE_VANILLA):
            self._send_error_json(400, "invalid_mode", f"mode must be rag or vanilla, got {mode!r}")
            return

        try:
            response = self.server.pipeline.answer_query(question, mode=mode)
        except EmptyIndexError as exc:
            self._send_error_json(503, "index_unavailable", str(exc))
        except ProviderUnreachableError as exc:
            self._send_error_json(502, "provider_unreachable", str(exc))
        except ProviderRefusalError as exc:
            self._send_error_json(502, "provider_refusal", str(exc))
        except ValueError as exc:
            self._send_error_json(400, "bad_request", str(exc))
        except Exception as exc:
            logger.exception("query failed")
            self._send_error_json(500, "internal", f"{type(exc).__name__}: {exc}")
        else:
            self._send_json(200, response.to_payload())


def make_server(pipeline: Pipeline, host: str = "127.0.0.1", port: int = 0,
                ui_dir: str | Path | None = None) -> RagServer:
    """Bind (port 0 picks an ephemeral port) without starting the loop."""
    return RagServer((host, port), pipeline, ui_dir=ui_dir)


def serve(pipeline: Pipeline, host: str, port: int,
          ui_dir: str | Path | None = None) -> None:
    """Run the service until SIGINT/SIGTERM."""
    server = make_server(pipeline, host, port, ui_dir=ui_dir)

    def _term(_signum, _frame):
        raise KeyboardInterrupt

    signal.signal(signal.SIGTERM, _term)
    bound_host, bound_port = server.server_address[:2]
    logger.info("serving on http://%s:%d (index entries: %d)",
                bound_host, bound_port, pipeline.index_entries)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        logger.info("shutdown requested")
    finally:
        server.server_close()


def start_in_thread(pipeline: Pipeline, host: str = "127.0.0.1",
                    ui_dir: str | Path | None = None) -> tuple[RagServer, threading.Thread]:
    """Test helper: ephemeral-port server on a background thread."""
    server = make_server(pipeline, host, 0, ui_dir=ui_dir)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread
