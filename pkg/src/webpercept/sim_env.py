"""Simulated environment: a mock HTTP Thing, a TD directory, a page server.

The mock thing is a conformant Web Thing by construction: it serves a
TD generated from its config (so generated TDs always pass strict
validation — tests assert this), and its behavior is exactly the
configured state plus declarative action effects. No hidden state.

Everything binds to loopback on an ephemeral port by default and runs
in a daemon thread; handles are context managers that shut the server
down cleanly.
"""

from __future__ import annotations

import errno
import json
import threading
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Callable

from .errors import PortUnavailable

TD_CONTENT_TYPE = "application/td+json"
WELL_KNOWN_TD_PATH = "/.well-known/wot"


# --- configuration ------------------------------------------------------------


@dataclass(frozen=True)
class Effect:
    """Declarative action effect: assign a value to one property.

    The assigned value is the action input by default, or ``const``
    when ``from_input`` is false.
    """

    target: str
    from_input: bool = True
    const: object = None


@dataclass(frozen=True)
class PropertySpec:
    initial: object
    schema: dict = field(default_factory=dict)  # TD data-schema fragment
    read_only: bool = False


@dataclass(frozen=True)
class ActionSpec:
    effect: Effect
    input: dict | None = None  # TD data-schema fragment


@dataclass(frozen=True)
class MockThingConfig:
    title: str
    properties: dict[str, PropertySpec] = field(default_factory=dict)
    actions: dict[str, ActionSpec] = field(default_factory=dict)
    port: int = 0  # 0 = ephemeral

    def __post_init__(self) -> None:
        for name, spec in self.actions.items():
            if spec.effect.target not in self.properties:
                raise ValueError(
                    f"action {name!r} assigns unknown property {spec.effect.target!r}"
                )


@dataclass
class ServerHandle:
    base_url: str
    shutdown: Callable[[], None]
    td_url: str | None = None
    thing_id: str | None = None

    def __enter__(self) -> "ServerHandle":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.shutdown()


# --- shared server plumbing -----------------------------------------------------


class _QuietHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, format: str, *args: object) -> None:  # noqa: A002
        pass  # tests do not want request logs on stderr

    def send_json(self, status: int, payload: object, content_type: str = "application/json") -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def send_empty(self, status: int) -> None:
        self.send_response(status)
        self.send_header("Content-Length", "0")
        self.end_headers()

    def read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""


def _start(server: ThreadingHTTPServer) -> Callable[[], None]:
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()

    def shutdown() -> None:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)

    return shutdown


def _bind(factory: Callable[[], ThreadingHTTPServer]) -> ThreadingHTTPServer:
    try:
        return factory()
    except OSError as exc:
        if exc.errno in (errno.EADDRINUSE, errno.EACCES):
            raise PortUnavailable(str(exc)) from exc
        raise


# --- mock thing ------------------------------------------------------------------


def generate_td(config: MockThingConfig, base_url: str, thing_id: str) -> dict:
    """The TD this mock publishes, derived purely from its config."""
    td: dict = {
        "@context": "https://www.w3.org/2022/wot/td/v1.1",
        "id": thing_id,
        "title": config.title,
        "base": base_url + "/",
        "security": ["nosec_sc"],
        "securityDefinitions": {"nosec_sc": {"scheme": "nosec"}},
    }
    if config.properties:
        td["properties"] = {}
        for name, spec in config.properties.items():
            body = dict(spec.schema)
            if spec.read_only:
                body["readOnly"] = True
            ops = ["readproperty"] if spec.read_only else ["readproperty", "writeproperty"]
            body["forms"] = [
                {"href": f"properties/{name}", "op": ops, "contentType": "application/json"}
            ]
            td["properties"][name] = body
    if config.actions:
        td["actions"] = {}
        for name, spec in config.actions.items():
            body = {}
            if spec.input is not None:
                body["input"] = dict(spec.input)
            body["forms"] = [
                {"href": f"actions/{name}", "op": ["invokeaction"], "contentType": "application/json"}
            ]
            td["actions"][name] = body
    return td


class _ThingServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], config: MockThingConfig):
        super().__init__(address, _ThingHandler)
        self.config = config
        self.thing_id = f"urn:uuid:{uuid.uuid4()}"
        self.state = {name: spec.initial for name, spec in config.properties.items()}
        self.state_lock = threading.Lock()
        host, port = self.server_address[:2]
        self.base_url = f"http://127.0.0.1:{port}"
        self.td = generate_td(config, self.base_url, self.thing_id)


class _ThingHandler(_QuietHandler):
    server: _ThingServer

    def do_GET(self) -> None:
        if self.path == WELL_KNOWN_TD_PATH:
            self.send_json(200, self.server.td, content_type=TD_CONTENT_TYPE)
            return
        if self.path.startswith("/properties/"):
            name = self.path[len("/properties/") :]
            if name in self.server.config.properties:
                with self.server.state_lock:
                    value = self.server.state[name]
                self.send_json(200, value)
                return
        self.send_json(404, {"error": f"no such resource: {self.path}"})

    def do_PUT(self) -> None:
        if self.path.startswith("/properties/"):
            name = self.path[len("/properties/") :]
            spec = self.server.config.properties.get(name)
            if spec is None:
                self.send_json(404, {"error": f"no such property: {name}"})
                return
            if spec.read_only:
                self.send_json(405, {"error": f"property {name} is read-only"})
                return
            try:
                value = json.loads(self.read_body() or b"null")
            except json.JSONDecodeError:
                self.send_json(400, {"error": "body is not valid JSON"})
                return
            with self.server.state_lock:
                self.server.state[name] = value
            self.send_empty(204)
            return
        self.send_json(404, {"error": f"no such resource: {self.path}"})

    def do_POST(self) -> None:
        if self.path.startswith("/actions/"):
            name = self.path[len("/actions/") :]
            spec = self.server.config.actions.get(name)
            if spec is None:
                self.send_json(404, {"error": f"no such action: {name}"})
                return
            try:
                payload = json.loads(self.read_body() or b"null")
            except json.JSONDecodeError:
                self.send_json(400, {"error": "body is not valid JSON"})
                return
            effect = spec.effect
            value = payload if effect.from_input else effect.const
            with self.server.state_lock:
                self.server.state[effect.target] = value
            self.send_empty(204)
            return
        self.send_json(404, {"error": f"no such resource: {self.path}"})


def start_mock_thing(config: MockThingConfig) -> ServerHandle:
    """Serve a Web Thing derived from config; ephemeral port by default."""
    server = _bind(lambda: _ThingServer(("127.0.0.1", config.port), config))
    shutdown = _start(server)
    return ServerHandle(
        base_url=server.base_url,
        shutdown=shutdown,
        td_url=server.base_url + WELL_KNOWN_TD_PATH,
        thing_id=server.thing_id,
    )


# --- TD directory ----------------------------------------------------------------


class _DirectoryServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], documents: list[str]):
        super().__init__(address, _DirectoryHandler)
        self.documents = list(documents)
        host, port = self.server_address[:2]
        self.base_url = f"http://127.0.0.1:{port}"


class _DirectoryHandler(_QuietHandler):
    server: _DirectoryServer

    def do_GET(self) -> None:
        if self.path.rstrip("/") == "/things" or self.path == "/things":
            body = "[" + ",".join(self.server.documents) + "]"
            raw = body.encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(raw)))
            self.end_headers()
            self.wfile.write(raw)
            return
        self.send_json(404, {"error": f"no such resource: {self.path}"})


def start_directory(td_documents: list[str], port: int = 0) -> ServerHandle:
    """A minimal TD directory: GET /things returns the configured TDs."""
    server = _bind(lambda: _DirectoryServer(("127.0.0.1", port), td_documents))
    return ServerHandle(base_url=server.base_url, shutdown=_start(server))


# --- static page server -----------------------------------------------------------

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".json": "application/json",
    ".txt": "text/plain; charset=utf-8",
}


class _PageServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], root: Path, substitutions: dict[str, str]):
        super().__init__(address, _PageHandler)
        self.root = root
        self.substitutions = substitutions
        host, port = self.server_address[:2]
        self.base_url = f"http://127.0.0.1:{port}"


class _PageHandler(_QuietHandler):
    server: _PageServer

    def do_GET(self) -> None:
        relative = self.path.lstrip("/").split("?", 1)[0] or "index.html"
        target = (self.server.root / relative).resolve()
        if not str(target).startswith(str(self.server.root.resolve())) or not target.is_file():
            self.send_json(404, {"error": f"no such file: {self.path}"})
            return
        data = target.read_bytes()
        content_type = _CONTENT_TYPES.get(target.suffix.lower(), "application/octet-stream")
        if target.suffix.lower() == ".html" and self.server.substitutions:
            text = data.decode("utf-8")
            for key, value in self.server.substitutions.items():
                text = text.replace("{{" + key + "}}", value)
            data = text.encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def start_page_server(
    fixture_dir: str | Path,
    substitutions: dict[str, str] | None = None,
    port: int = 0,
) -> ServerHandle:
    """Serve fixture HTML, substituting {{KEY}} placeholders at request time."""
    root = Path(fixture_dir)
    if not root.is_dir():
        raise OSError(errno.ENOENT, f"fixture directory does not exist: {root}")
    server = _bind(lambda: _PageServer(("127.0.0.1", port), root, substitutions or {}))
    return ServerHandle(base_url=server.base_url, shutdown=_start(server))
