"""Serving loops: stdio (newline-delimited JSON) and HTTP POST.

Both run a single inference at a time; stdio answers in request order, the
HTTP server handles one connection at a time (clients may still pipeline —
ids carry the matching).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, HTTPServer
from typing import Callable

import numpy as np

from .protocol import handle_request_line

Predict = Callable[[np.ndarray], str]


@dataclass(frozen=True)
class ServerConfig:
    mode: str  # "stdio" | "http"
    host: str = "127.0.0.1"
    port: int = 8765

    def __post_init__(self):
        if self.mode not in ("stdio", "http"):
            raise ValueError(f"mode must be stdio or http, got {self.mode!r}")


def serve_stdio(predict: Predict, stdin=None, stdout=None) -> None:
    """Answer one response line per request line; returns on EOF."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        stdout.write(handle_request_line(line, predict) + "\n")
        stdout.flush()


def make_http_server(predict: Predict, config: ServerConfig) -> HTTPServer:
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            body = self.rfile.read(length).decode("utf-8", errors="replace")
            payload = handle_request_line(body, predict).encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            # one request per connection keeps the single-threaded loop live
            self.send_header("Connection", "close")
            self.close_connection = True
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, fmt, *args):
            sys.stderr.write("modelserver: " + fmt % args + "\n")

    return HTTPServer((config.host, config.port), Handler)


def serve(predict: Predict, config: ServerConfig) -> None:
    if config.mode == "stdio":
        serve_stdio(predict)
    else:
        server = make_http_server(predict, config)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.server_close()
