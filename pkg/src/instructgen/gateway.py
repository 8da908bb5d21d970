"""HTTP gateway: the server between the extractor side and the trainer UI.

Endpoints
---------
POST /extraction        apply a triple (raw text body or JSON object)
POST /session/next      consume the next step via the configured extractor
POST /session/previous  restore the snapshot taken before the last Next
GET  /scene             full scene document plus revision
GET  /scene/snapshot    the canonical text encoding of the scene
GET  /steps             the loaded step script
GET  /manifest          component records for rendering
GET  /events?since=N    newline-delimited JSON deltas, one per revision

Every mutation is serialized behind one lock and assigned the next
revision number; the delta (changed instances + clip + cursor) is kept in
an in-memory log so /events can replay any suffix. Replaying all events
over the initial scene reconstructs GET /scene exactly. Slow event
consumers get a ``{"gap": true}`` marker and are expected to re-sync via
GET /scene, reconnecting with ?since=<revision>.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass, replace
from typing import Any, Callable, Iterator

import uvicorn
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse
from starlette.concurrency import run_in_threadpool

from . import engine
from .animation import DEFAULT_PARAMS, AnimationParams
from .errors import (
    AtBeginning,
    EndOfSteps,
    EngineError,
    ExtractionError,
    ExtractorTimeout,
    PipelineError,
    QueueFull,
    TransportError,
)
from .extraction import Lexicon, RawTriple, parse_llm_output, resolve_names
from .model import (
    AnimationClip,
    AssemblyStep,
    Database,
    InstanceState,
    SceneState,
    TrainingSession,
)
from .snapshot import canonical_snapshot

DEFAULT_PORT = 8844
MAX_PENDING_MUTATIONS = 512
_EVENT_QUEUE_SIZE = 256
_GAP = object()  # sentinel pushed to overflowing subscriber queues


def diff_scenes(old: SceneState, new: SceneState) -> list[dict]:
    """Per-instance states that changed between two scenes, key-sorted."""
    changed = []
    for key in sorted(set(old.states) | set(new.states)):
        before = old.states.get(key)
        after = new.states.get(key)
        if before != after and after is not None:
            changed.append({"component": key[0], "instance": key[1], "state": after.to_dict()})
    return changed


def apply_delta(scene: SceneState, event: dict) -> SceneState:
    """Fold one event onto a scene; the inverse of ``diff_scenes`` (plus clip/cursor)."""
    states = dict(scene.states)
    for entry in event["changed"]:
        states[(entry["component"], entry["instance"])] = InstanceState.from_dict(entry["state"])
    clip = AnimationClip.from_dict(event["clip"]) if event["clip"] else None
    return SceneState(states=states, current_clip=clip, step_cursor=event["step_cursor"])


class GatewayState:
    """Everything the routes share: session, revision counter, event log."""

    def __init__(
        self,
        db: Database,
        steps: list[AssemblyStep],
        lexicon: Lexicon,
        extractor: engine.Extractor,
        params: AnimationParams = DEFAULT_PARAMS,
    ):
        self.db = db
        self.lexicon = lexicon
        self.extractor = extractor
        self.params = params
        self.session: TrainingSession = engine.new_session(db, steps)
        self.revision = 0
        self.log: list[dict] = []
        self.ready = threading.Event()
        self.stopping = threading.Event()
        self._lock = threading.Lock()
        self._sub_lock = threading.Lock()
        self._subscribers: list[queue.Queue] = []
        self._pending = 0
        self._pending_lock = threading.Lock()

    # -- mutations ---------------------------------------------------------

    def _mutate(self, fn: Callable[[TrainingSession], tuple[TrainingSession, dict]]) -> dict:
        with self._pending_lock:
            if self._pending >= MAX_PENDING_MUTATIONS:
                raise QueueFull(f"more than {MAX_PENDING_MUTATIONS} mutations already queued")
            self._pending += 1
        try:
            with self._lock:
                old = self.session
                new_session, extra = fn(old)
                self.revision += 1
                event = {
                    "revision": self.revision,
                    "step_cursor": new_session.cursor,
                    "clip": new_session.scene.current_clip.to_dict()
                    if new_session.scene.current_clip
                    else None,
                    "changed": diff_scenes(old.scene, new_session.scene),
                }
                self.session = new_session
                self._publish(event)
                return {**event, **extra}
        finally:
            with self._pending_lock:
                self._pending -= 1

    def apply_extraction(self, body: bytes, content_type: str) -> dict:
        triple = self._parse_body(body, content_type)
        result = resolve_names(triple, self.lexicon)

        def fn(session: TrainingSession) -> tuple[TrainingSession, dict]:
            scene = engine.generate_instruction(self.db, session.scene, result, self.params)
            return replace(session, scene=scene), {"triple": result.to_dict(), "step_text": None}

        return self._mutate(fn)

    def apply_next(self) -> dict:
        def fn(session: TrainingSession) -> tuple[TrainingSession, dict]:
            advanced = engine.next_step(session, self.extractor, self.db, self.params)
            return advanced, {
                "triple": None,
                "step_text": session.steps[session.cursor].text,
            }

        return self._mutate(fn)

    def apply_previous(self) -> dict:
        def fn(session: TrainingSession) -> tuple[TrainingSession, dict]:
            restored = engine.previous_step(session)
            return restored, {
                "triple": None,
                "step_text": session.steps[restored.cursor].text,
            }

        return self._mutate(fn)

    @staticmethod
    def _parse_body(body: bytes, content_type: str) -> RawTriple:
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValueError(f"body is not UTF-8: {exc}") from exc
        if "json" in (content_type or "").lower():
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ValueError(f"body is not valid JSON: {exc}") from exc
            if isinstance(data, str):
                return parse_llm_output(data)
            if isinstance(data, dict):
                missing = {"predecessor", "successor", "count"} - set(data)
                if missing:
                    raise ValueError(f"triple object missing keys {sorted(missing)}")
                if not isinstance(data["count"], int) or isinstance(data["count"], bool):
                    raise ValueError("triple count must be an integer")
                return RawTriple(str(data["predecessor"]), str(data["successor"]), data["count"])
            raise ValueError("JSON body must be a string or a triple object")
        return parse_llm_output(text)

    # -- reads -------------------------------------------------------------

    def scene_doc(self) -> dict:
        with self._lock:
            return {"revision": self.revision, "scene": self.session.scene.to_dict()}

    def scene_snapshot(self) -> str:
        with self._lock:
            return canonical_snapshot(self.session.scene)

    def steps_doc(self) -> dict:
        return {"steps": [s.to_dict() for s in self.session.steps]}

    def manifest_doc(self) -> dict:
        return self.db.to_dict()

    # -- event fan-out -------------------------------------------------------

    def _publish(self, event: dict) -> None:
        with self._sub_lock:
            self.log.append(event)
            for q in self._subscribers:
                try:
                    q.put_nowait(event)
                except queue.Full:
                    try:
                        q.put_nowait(_GAP)
                    except queue.Full:
                        setattr(q, "gapped", True)

    def subscribe(self, since: int) -> tuple[queue.Queue, list[dict]]:
        q: queue.Queue = queue.Queue(maxsize=_EVENT_QUEUE_SIZE)
        with self._sub_lock:
            backlog = [e for e in self.log if e["revision"] > since]
            self._subscribers.append(q)
        return q, backlog

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._sub_lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def event_lines(self, since: int) -> Iterator[str]:
        q, backlog = self.subscribe(since)
        last = since
        try:
            for event in backlog:
                yield json.dumps(event, separators=(",", ":")) + "\n"
                last = event["revision"]
            while not self.stopping.is_set():
                if getattr(q, "gapped", False):
                    yield json.dumps({"gap": True}) + "\n"
                    return
                try:
                    event = q.get(timeout=0.25)
                except queue.Empty:
                    continue
                if event is _GAP:
                    yield json.dumps({"gap": True}) + "\n"
                    return
                if event["revision"] <= last:
                    continue
                yield json.dumps(event, separators=(",", ":")) + "\n"
                last = event["revision"]
        finally:
            self.unsubscribe(q)


_STATUS_BY_ERROR = [
    (QueueFull, 409),
    (EndOfSteps, 409),
    (AtBeginning, 409),
    (ExtractorTimeout, 502),
    (TransportError, 502),
    (ExtractionError, 400),
    (EngineError, 400),
    (ValueError, 400),
]


def _error_response(exc: Exception) -> JSONResponse:
    status = 500
    for err_type, code in _STATUS_BY_ERROR:
        if isinstance(exc, err_type):
            status = code
            break
    body: dict[str, Any] = {"code": type(exc).__name__, "message": str(exc)}
    raw = getattr(exc, "raw", None)
    if raw is not None:
        body["raw"] = raw
    step_index = getattr(exc, "step_index", None)
    if step_index is not None:
        body["step_index"] = step_index
    return JSONResponse({"error": body}, status_code=status)


def create_app(state: GatewayState) -> FastAPI:
    @asynccontextmanager
    async def lifespan(_: FastAPI):
        state.ready.set()
        yield
        state.stopping.set()

    app = FastAPI(title="instructgen gateway", lifespan=lifespan)
    app.state.gateway = state
    # the trainer UI is served as static files from another origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def _not_ready() -> JSONResponse:
        return JSONResponse(
            {"error": {"code": "NotReady", "message": "gateway is still initializing"}},
            status_code=503,
        )

    async def _mutation(op: Callable[..., dict], *args) -> JSONResponse:
        if not state.ready.is_set():
            return _not_ready()
        try:
            payload = await run_in_threadpool(op, *args)
        except (PipelineError, ValueError) as exc:
            return _error_response(exc)
        return JSONResponse({"status": "ok", **payload})

    @app.post("/extraction")
    async def post_extraction(request: Request):
        body = await request.body()
        return await _mutation(
            state.apply_extraction, body, request.headers.get("content-type", "")
        )

    @app.post("/session/next")
    async def post_next():
        return await _mutation(state.apply_next)

    @app.post("/session/previous")
    async def post_previous():
        return await _mutation(state.apply_previous)

    @app.get("/scene")
    def get_scene():
        if not state.ready.is_set():
            return _not_ready()
        return JSONResponse(state.scene_doc())

    @app.get("/scene/snapshot")
    def get_scene_snapshot():
        if not state.ready.is_set():
            return _not_ready()
        return PlainTextResponse(state.scene_snapshot())

    @app.get("/steps")
    def get_steps():
        if not state.ready.is_set():
            return _not_ready()
        return JSONResponse(state.steps_doc())

    @app.get("/manifest")
    def get_manifest():
        if not state.ready.is_set():
            return _not_ready()
        return JSONResponse(state.manifest_doc())

    @app.get("/events")
    def get_events(since: int = 0):
        if not state.ready.is_set():
            return _not_ready()
        return StreamingResponse(state.event_lines(since), media_type="application/x-ndjson")

    return app


@dataclass
class ServerHandle:
    """A uvicorn server running in a daemon thread, for tests and tooling."""

    server: uvicorn.Server
    thread: threading.Thread
    host: str
    port: int
    state: GatewayState | None = None

    @property
    def base_url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def stop(self, timeout: float = 5.0) -> None:
        # stop event streams first; open connections would otherwise keep
        # the graceful shutdown waiting
        if self.state is not None:
            self.state.stopping.set()
        self.server.should_exit = True
        self.thread.join(timeout=timeout)


def bind_socket(host: str, port: int) -> socket.socket:
    """Bind the listening socket up front so the port is known (0 = ephemeral)."""
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((host, port))
    return sock


def serve_in_thread(app: FastAPI, host: str = "127.0.0.1", port: int = 0) -> ServerHandle:
    """Start the gateway on a background thread and wait until it accepts connections."""
    sock = bind_socket(host, port)
    bound_port = sock.getsockname()[1]
    config = uvicorn.Config(
        app,
        host=host,
        port=bound_port,
        log_level="warning",
        access_log=False,
        timeout_graceful_shutdown=3,
    )
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, kwargs={"sockets": [sock]}, daemon=True)
    thread.start()
    while not server.started:
        if not thread.is_alive():
            raise RuntimeError("gateway server failed to start")
        threading.Event().wait(0.01)
    return ServerHandle(
        server=server,
        thread=thread,
        host=host,
        port=bound_port,
        state=getattr(app.state, "gateway", None),
    )
