"""Serve any in-process backend over the wire protocol.

Responses use the canonical serialization from PROTOCOL.md (compact JSON,
fixed key order, UTF-8 without ASCII escaping) so independent protocol
implementations can be compared byte-for-byte on shared fixtures.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any

from ..errors import BackendUnavailable, DataError, InputTooLong
from .base import Backend, request_from_wire, result_to_wire

DEFAULT_MAX_INPUT_CHARS = 200_000


def canonical_json(payload: Any) -> bytes:
    """Compact UTF-8 JSON with insertion key order preserved."""
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "halldet-backend"

    # set by make_server on the server object
    backend: Backend
    max_input_chars: int
    quiet: bool

    def log_message(self, fmt: str, *args: Any) -> None:  # noqa: D102
        if not getattr(self.server, "quiet", True):
            super().log_message(fmt, *args)

    def do_GET(self) -> None:  # noqa: N802
        if self.path == "/v1/health":
            self._reply(200, {"status": "ok"})
        else:
            self._reply(404, {"error": f"no such endpoint: {self.path}"})

    def do_POST(self) -> None:  # noqa: N802
        if self.path != "/v1/generate":
            self._reply(404, {"error": f"no such endpoint: {self.path}"})
            return
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            self._reply(400, {"error": "request body is not valid JSON"})
            return
        try:
            request = request_from_wire(body)
        except DataError as exc:
            self._reply(400, {"error": str(exc)})
            return
        if len(request.input) > self.server.max_input_chars:  # type: ignore[attr-defined]
            self._reply(413, {"error": "input exceeds the backend limit; truncation is unsound"})
            return
        try:
            result = self.server.backend.generate(request)  # type: ignore[attr-defined]
        except InputTooLong as exc:
            self._reply(413, {"error": str(exc)})
            return
        except BackendUnavailable as exc:
            self._reply(503, {"error": str(exc)})
            return
        self._reply(200, result_to_wire(result))

    def _reply(self, status: int, payload: Any) -> None:
        body = canonical_json(payload)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def make_server(
    backend: Backend,
    host: str = "127.0.0.1",
    port: int = 0,
    *,
    max_input_chars: int = DEFAULT_MAX_INPUT_CHARS,
    quiet: bool = True,
) -> ThreadingHTTPServer:
    """Build (but do not start) a protocol server wrapping ``backend``."""
    server = ThreadingHTTPServer((host, port), _Handler)
    server.backend = backend  # type: ignore[attr-defined]
    server.max_input_chars = max_input_chars  # type: ignore[attr-defined]
    server.quiet = quiet  # type: ignore[attr-defined]
    return server


class ServerThread:
    """Run a protocol server on a daemon thread; for tests and tooling."""

    def __init__(self, backend: Backend, **kwargs: Any) -> None:
        self.server = make_server(backend, **kwargs)
        self._thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}"

    def __enter__(self) -> "ServerThread":
        self._thread.start()
        return self

    def __exit__(self, *exc: Any) -> None:
        self.server.shutdown()
        self.server.server_close()
        self._thread.join(timeout=5)
