"""HTTP service over the session pipeline for the web UI and automation.

Mutating calls that hit a chat backend run in a background thread; the
response carries the in-progress record and clients poll the session
resource until the status settles (backend latency is tens of seconds on a
live model). Per-session locking guarantees one writer at a time: a second
mutation while one is in flight gets 409.

Errors are JSON with a machine-readable code:

    {"error": {"code": "ITERATION_LIMIT", "message": "..."}}
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .agents import BackendError, ContextInput, GenerationFailed, ImagePayload, UnparsableAnalysis
from .config import AppConfig
from .kinematics import chain_frames
from .library import DEMO_SPECS, builtin_gestures, find_gesture
from .session import (
    IterationLimitExceeded,
    InvalidSessionState,
    NoFeasibleIteration,
    SessionNotFound,
    SessionRecord,
    SessionStatus,
    SessionStore,
    finalize,
    new_session_id,
    start_session,
    submit_feedback,
)
from .trajectory import compute_metrics, interpolate, sweep_samples


class CreateSessionRequest(BaseModel):
    gesture: str | None = None
    instruction: str | None = None
    image_b64: str | None = None
    image_media_type: str = "image/png"
    backend: str = "openai"


class FeedbackRequest(BaseModel):
    text: str
    backend: str | None = None


class FinalizeRequest(BaseModel):
    rate: float | None = None


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"error": {"code": code, "message": message}}, status_code=status)


def _summary(record: SessionRecord) -> dict:
    return {
        "id": record.id,
        "status": record.status.value,
        "gesture": record.gesture.name if record.gesture else None,
        "iterations": len(record.iterations),
        "refinements_used": record.refinements,
        "i_max": record.i_max,
        "created_at": record.created_at,
    }


def _record_payload(record: SessionRecord) -> dict:
    data = record.to_dict()
    data.pop("input", None)  # image bytes stay server-side
    data["refinements_used"] = record.refinements
    return data


def create_app(config: AppConfig, backend_factory=None, ui_dir=None) -> FastAPI:
    """Application factory; `backend_factory(selector)` is injectable for tests."""
    store = SessionStore(config.sessions_dir)
    session_config = config.session_config()
    make_backend = backend_factory or config.make_backend

    app = FastAPI(title="gesturelab", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    registry_lock = threading.Lock()
    session_locks: dict[str, threading.Lock] = {}
    session_backends: dict[str, str] = {}

    def lock_for(session_id: str) -> threading.Lock:
        with registry_lock:
            return session_locks.setdefault(session_id, threading.Lock())

    @app.exception_handler(SessionNotFound)
    async def _not_found(_: Request, err: SessionNotFound):
        return _error(404, "SESSION_NOT_FOUND", str(err))

    @app.get("/api/gestures")
    def list_gestures():
        return {
            "gestures": [s.to_dict() for s in builtin_gestures()],
            "demonstrations": [s.to_dict() for s in DEMO_SPECS],
        }

    @app.get("/api/sessions")
    def list_sessions():
        return {"sessions": [_summary(store.load(sid)) for sid in store.list_ids()]}

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return _record_payload(store.load(session_id))

    @app.post("/api/sessions", status_code=201)
    def create_session(request: CreateSessionRequest):
        if request.gesture:
            spec = find_gesture(request.gesture)
            if spec is None:
                return _error(422, "UNKNOWN_GESTURE", f"no gesture named {request.gesture!r}")
            source = spec
        elif request.instruction or request.image_b64:
            image = None
            if request.image_b64:
                import base64

                image = ImagePayload(
                    base64.b64decode(request.image_b64), request.image_media_type
                )
            source = ContextInput(instruction=request.instruction, image=image)
        else:
            return _error(422, "EMPTY_REQUEST", "provide a gesture or an instruction/image")

        try:
            backend = make_backend(request.backend)
        except ValueError as err:
            return _error(422, "BAD_BACKEND", str(err))

        session_id = new_session_id()
        lock = lock_for(session_id)
        lock.acquire()
        session_backends[session_id] = request.backend

        # Visible immediately; the worker thread overwrites it with progress.
        stub = SessionRecord(
            id=session_id,
            created_at="",
            status=SessionStatus.ANALYZING,
            input=source if isinstance(source, ContextInput) else None,
            gesture=source if not isinstance(source, ContextInput) else None,
            analysis=None,
            i_max=session_config.i_max,
        )
        store.save(stub)

        def work():
            try:
                start_session(
                    source, backend, session_config, store=store, session_id=session_id
                )
            except (BackendError, GenerationFailed, UnparsableAnalysis):
                pass  # start_session already persisted the Failed record
            finally:
                lock.release()

        threading.Thread(target=work, daemon=True).start()
        return _summary(stub)

    @app.post("/api/sessions/{session_id}/feedback", status_code=202)
    def post_feedback(session_id: str, request: FeedbackRequest):
        record = store.load(session_id)
        if record.status is SessionStatus.REFINING:
            return _error(409, "SESSION_REFINING", "a refinement is already in flight")
        if record.status is not SessionStatus.AWAITING_FEEDBACK:
            return _error(
                409, "WRONG_STATE", f"session is {record.status.value}, not awaiting feedback"
            )
        if not request.text.strip():
            return _error(422, "EMPTY_FEEDBACK", "feedback text must be nonempty")
        if record.refinements >= record.i_max:
            return _error(
                422, "ITERATION_LIMIT", f"refinement limit reached: i_max={record.i_max}"
            )
        selector = request.backend or session_backends.get(session_id, "openai")
        try:
            backend = make_backend(selector)
        except ValueError as err:
            return _error(422, "BAD_BACKEND", str(err))

        lock = lock_for(session_id)
        if not lock.acquire(blocking=False):
            return _error(409, "SESSION_BUSY", "another mutation is in flight")

        def work():
            try:
                submit_feedback(record, request.text, backend, session_config, store=store)
            except (BackendError, GenerationFailed, InvalidSessionState, IterationLimitExceeded):
                pass  # persisted or pre-checked
            finally:
                lock.release()

        threading.Thread(target=work, daemon=True).start()
        payload = _record_payload(record)
        payload["status"] = SessionStatus.REFINING.value
        return payload

    @app.post("/api/sessions/{session_id}/finalize")
    def post_finalize(session_id: str, request: FinalizeRequest):
        lock = lock_for(session_id)
        if not lock.acquire(blocking=False):
            return _error(409, "SESSION_BUSY", "another mutation is in flight")
        try:
            record = store.load(session_id)
            record, traj = finalize(record, request.rate, session_config, store=store)
        except NoFeasibleIteration as err:
            return _error(409, "NO_FEASIBLE_ITERATION", str(err))
        finally:
            lock.release()
        return {
            "id": record.id,
            "status": record.status.value,
            "rate": traj.rate,
            "duration": traj.duration,
            "samples": len(traj.samples),
            "artifacts": list(record.artifacts),
        }

    @app.get("/api/sessions/{session_id}/trajectory")
    def get_trajectory(session_id: str, rate: float = 50.0, iteration: int | None = None):
        record = store.load(session_id)
        if iteration is not None:
            chosen = next((it for it in record.iterations if it.index == iteration), None)
            if chosen is None:
                return _error(404, "NO_SUCH_ITERATION", f"iteration {iteration} not found")
        else:
            chosen = record.latest_feasible() or record.current
            if chosen is None:
                return _error(409, "NO_ITERATIONS", "session has no iterations yet")
        if rate < 10.0:
            return _error(422, "BAD_RATE", "rate must be >= 10 Hz")

        traj = interpolate(chosen.sequence, rate, session_config.bounds)
        flags, failures, solutions = sweep_samples(
            traj, session_config.body, session_config.collision_margin
        )
        joints = {"left": [], "right": []}
        for q_left, q_right in solutions:
            for side, q in (("left", q_left), ("right", q_right)):
                model = session_config.body.left if side == "left" else session_config.body.right
                if q is None:
                    joints[side].append(None)
                else:
                    joints[side].append(chain_frames(model, q).points().tolist())
        return {
            "id": record.id,
            "iteration": chosen.index,
            "rate": traj.rate,
            "duration": traj.duration,
            "sample_count": len(traj.samples),
            "samples": [list(s.flatten()) for s in traj.samples],
            "collision_flags": list(flags),
            "ik_failures": failures,
            "joints": joints,
            "metrics": compute_metrics(traj).to_dict(),
        }

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
