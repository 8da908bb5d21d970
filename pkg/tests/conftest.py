from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from instructgen.database import load_manifest
from instructgen.engine import load_steps
from instructgen.extraction import ExtractorConfig, Lexicon, build_extractor
from instructgen.resources import (
    labeled_steps_path,
    pneumatic_lexicon_path,
    pneumatic_manifest_path,
    pneumatic_steps_path,
    templates_path,
)
from instructgen.sft import load_templates


@pytest.fixture(scope="session")
def pneumatic_lexicon() -> Lexicon:
    return Lexicon.from_file(pneumatic_lexicon_path())


@pytest.fixture(scope="session")
def pneumatic_db():
    return load_manifest(pneumatic_manifest_path())


@pytest.fixture(scope="session")
def pneumatic_steps():
    return load_steps(pneumatic_steps_path())


@pytest.fixture(scope="session")
def bundled_templates():
    return load_templates(templates_path())


@pytest.fixture(scope="session")
def labeled_cases():
    return json.loads(labeled_steps_path().read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def rule_extractor(pneumatic_lexicon):
    return build_extractor(ExtractorConfig(mode="rule"), pneumatic_lexicon)


@pytest.fixture
def gateway(pneumatic_db, pneumatic_steps, pneumatic_lexicon, rule_extractor):
    """Factory starting real gateway servers on ephemeral ports; all stopped on teardown."""
    from instructgen.gateway import GatewayState, create_app, serve_in_thread

    handles = []

    def start(db=None, steps=None, extractor=None):
        state = GatewayState(
            db if db is not None else pneumatic_db,
            steps if steps is not None else pneumatic_steps,
            pneumatic_lexicon,
            extractor if extractor is not None else rule_extractor,
        )
        handle = serve_in_thread(create_app(state))
        handles.append(handle)
        return handle, state

    yield start
    for handle in handles:
        handle.stop()


class StubEndpoint:
    """Tiny HTTP endpoint standing in for a hosted extraction model."""

    def __init__(self, reply: bytes = b"small screws, base, 1", delay: float = 0.0):
        self.reply = reply
        self.delay = delay
        self.requests: list[dict] = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):  # noqa: N802 (http.server API)
                length = int(self.headers.get("content-length", 0))
                stub.requests.append(json.loads(self.rfile.read(length)))
                if stub.delay:
                    threading.Event().wait(stub.delay)
                self.send_response(200)
                self.send_header("content-type", "text/plain; charset=utf-8")
                self.end_headers()
                self.wfile.write(stub.reply)

            def log_message(self, *args):
                pass

        self.server = HTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def url(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}/generate"

    def stop(self):
        self.server.shutdown()
        self.thread.join(timeout=2)


@pytest.fixture
def stub_endpoint():
    stubs = []

    def start(reply: bytes = b"small screws, base, 1", delay: float = 0.0) -> StubEndpoint:
        stub = StubEndpoint(reply=reply, delay=delay)
        stubs.append(stub)
        return stub

    yield start
    for stub in stubs:
        stub.stop()
