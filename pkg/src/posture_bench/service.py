"""HTTP face of the simulated bench.

A single background loop owns the Session and advances it at the configured
tick rate; handlers and stream subscribers only ever touch the state under
the loop's lock, so command ingress is serialised and reads see consistent
snapshots. Telemetry is decimated to the stream rate and pushed to every
subscriber as newline-delimited JSON.
"""

from __future__ import annotations

import json
import queue
import threading
import time
from contextlib import asynccontextmanager
from pathlib import Path
from typing import IO

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import StreamingResponse

from .config import BenchConfig
from .errors import CommandRejected, InputError, PlanningError, RangeError
from .planner import VIEW_ALIASES, plan_per_view, plan_posture
from .session import EStop, Release, Session, command_from_dict


class ControlLoop:
    """Owns the session; ticks it on a thread or manually in tests."""

    def __init__(self, session: Session):
        self.session = session
        self._lock = threading.Lock()
        self._subscribers: list[queue.SimpleQueue] = []
        cfg = session.config.session
        self._stream_every = max(1, round(cfg.tick_hz / cfg.stream_hz))
        self.stream_poll_s = 1.0    # idle streams re-check shutdown this often
        self._thread: threading.Thread | None = None
        self.running = False

    # -- state access -------------------------------------------------
    def command(self, cmd) -> dict:
        with self._lock:
            return self.session.command(cmd)

    def snapshot(self) -> dict:
        with self._lock:
            return self.session.snapshot()

    def step(self, n: int = 1) -> dict | None:
        """Advance n ticks synchronously (the test-side clock)."""
        frame = None
        for _ in range(n):
            with self._lock:
                frame = self.session.tick()
                if self.session.tick_index % self._stream_every == 0:
                    self._broadcast(frame)
        return frame

    # -- streaming ----------------------------------------------------
    def subscribe(self) -> queue.SimpleQueue:
        """Register a frame queue, primed so consumers start with current state."""
        q: queue.SimpleQueue = queue.SimpleQueue()
        with self._lock:
            self._subscribers.append(q)
            q.put(self.session.frame())
        return q

    def unsubscribe(self, q: queue.SimpleQueue):
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def _broadcast(self, frame: dict):
        for q in self._subscribers:
            q.put(frame)

    # -- wall-clock drive ----------------------------------------------
    def start(self):
        if self.running:
            return
        self.running = True
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def stop(self):
        self.running = False
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None
        for q in list(self._subscribers):
            q.put(None)

    def _run(self):
        period = self.session.tick_period_s
        next_due = time.monotonic()
        while self.running:
            self.step(1)
            next_due += period
            delay = next_due - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            else:
                next_due = time.monotonic()   # fell behind; do not spiral


def create_app(
    config: BenchConfig | None = None,
    log: IO[str] | str | Path | None = None,
    real_time: bool = True,
    console_dir: str | Path | None = None,
) -> FastAPI:
    config = config or BenchConfig()
    session = Session(config, log=log)
    loop = ControlLoop(session)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if real_time:
            loop.start()
        try:
            yield
        finally:
            loop.stop()
            session.close()

    app = FastAPI(title="posture-bench", lifespan=lifespan)
    app.state.loop = loop

    def run_command(cmd):
        try:
            return loop.command(cmd)
        except CommandRejected as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        except (RangeError, InputError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None

    @app.get("/state")
    def state():
        return loop.snapshot()

    @app.post("/target")
    async def target(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=422, detail="body must be JSON") from None
        if not isinstance(body, dict) or "roll_deg" not in body or "pitch_deg" not in body:
            raise HTTPException(status_code=422, detail="body needs roll_deg and pitch_deg")
        try:
            cmd = command_from_dict({"cmd": "set_target", **body})
        except (InputError, ValueError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return run_command(cmd)

    @app.post("/estop")
    def estop():
        return run_command(EStop())

    @app.post("/release")
    def release():
        return run_command(Release())

    @app.get("/regions")
    def regions():
        mech = config.mechanism
        catalog = config.views
        return {
            "limits": {
                "roll_deg": list(mech.roll_limits_deg),
                "pitch_deg": list(mech.pitch_limits_deg),
            },
            "views": {
                name: {"roll_deg": list(r.roll_deg), "pitch_deg": list(r.pitch_deg)}
                for name, r in catalog.views.items()
            },
            "aliases": dict(VIEW_ALIASES),
            "subjects": {
                subject: {
                    name: {"roll_deg": list(r.roll_deg), "pitch_deg": list(r.pitch_deg)}
                    for name, r in per_view.items()
                }
                for subject, per_view in catalog.subject_views.items()
            },
        }

    def plan_payload(result) -> dict:
        return {
            "views": list(result.views),
            "region": {
                "roll_deg": list(result.region.roll_deg),
                "pitch_deg": list(result.region.pitch_deg),
            },
            "posture": {
                "roll_deg": result.posture.roll_deg,
                "pitch_deg": result.posture.pitch_deg,
            },
            "split": {
                "lat_deg": result.split.lateral_deg,
                "thor_deg": result.split.thoracic_deg,
            },
            "load": {"legs": result.load.legs, "abdomen": result.load.abdomen},
            "objective": result.objective,
        }

    @app.get("/plan")
    def plan(views: str, subject: str | None = None, per_view: bool = False):
        names = [v for v in (s.strip() for s in views.split(",")) if v]
        if not names:
            raise HTTPException(status_code=422, detail="views query parameter is empty")
        kwargs = dict(
            params=config.load,
            weights=config.weights,
            pendulum=config.session.pendulum,
            subject=subject,
            catalog=config.views,
            config=config.mechanism,
            pitch_weight=config.pitch_weight,
        )
        try:
            if per_view:
                return {
                    "per_view": {
                        name: plan_payload(result)
                        for name, result in plan_per_view(names, **kwargs).items()
                    }
                }
            return plan_payload(plan_posture(names, **kwargs))
        except InputError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        except PlanningError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None

    @app.get("/stream")
    def stream():
        q = loop.subscribe()

        def gen():
            try:
                while True:
                    try:
                        frame = q.get(timeout=loop.stream_poll_s)
                    except queue.Empty:
                        if not loop.running:
                            break
                        continue
                    if frame is None:
                        break
                    yield json.dumps(frame, sort_keys=True) + "\n"
            finally:
                loop.unsubscribe(q)

        return StreamingResponse(gen(), media_type="application/x-ndjson")

    if console_dir is not None and Path(console_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(console_dir), html=True), name="console")

    return app
