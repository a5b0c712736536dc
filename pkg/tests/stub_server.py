"""Threaded HTTP stub serving the oracle wire protocol for client tests."""

import hashlib
import json
import math
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from advpad.classifier import StubOracle, handle_request


def make_fake_whitebox_oracle(n_classes: int = 3):
    """Deterministic white-box stub: scores from a content hash, so label
    always equals argmax(distribution) and results are process-stable."""

    def scores(data: bytes):
        digest = hashlib.sha256(data).digest()
        raw = [digest[i] / 255.0 * 4.0 for i in range(n_classes)]
        exp = [math.exp(x) for x in raw]
        total = sum(exp)
        return [x / total for x in exp]

    return StubOracle(
        label_fn=lambda b: max(range(n_classes), key=lambda i: scores(b)[i]),
        n_classes=n_classes,
        distribution_fn=scores,
        embedding_fn=lambda b: [b[i % len(b)] / 255.0 for i in range(8)],
    )


def start_stub_server(oracle, mutate_response=None):
    """Serve `oracle` over HTTP; returns (base_url, shutdown_fn)."""

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            payload = self.rfile.read(length)
            status, body = handle_request(oracle, self.path, payload)
            if mutate_response is not None:
                status, body = mutate_response(self.path, status, body)
            if isinstance(body, (dict, list)):
                raw = json.dumps(body, sort_keys=True).encode("utf-8")
                ctype = "application/json"
            else:
                raw = bytes(body)
                ctype = "text/plain"
            self.send_response(status)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(raw)))
            self.end_headers()
            self.wfile.write(raw)

        def log_message(self, *args):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()

    def shutdown():
        server.shutdown()
        server.server_close()

    return "http://127.0.0.1:%d" % server.server_address[1], shutdown
