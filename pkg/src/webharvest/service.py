"""Administration service: target CRUD, run control, search, stats.

The HTTP surface is a small JSON API consumed by the bundled single-page
admin UI and by scripts. All mutations funnel through one orchestrator
whose lock serializes state changes; harvest runs execute on a bounded
worker pool, at most one per target at a time.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, JSONResponse

from .clock import Clock, SystemClock
from .fetch import FetchPolicy, Fetcher, Transport
from .frontier import Frontier
from .runner import StopReason, harvest_target
from .schedule import Schedule, UnknownTarget
from .store import IndexStore
from .targets import (
    ConfigError,
    HarvestTarget,
    serialize_config,
    target_from_dict,
    target_to_dict,
    validate_target,
)

__all__ = ["JobState", "JobStatus", "Orchestrator", "create_app", "serve"]

logger = logging.getLogger(__name__)


class JobState(Enum):
    IDLE = "idle"
    QUEUED = "queued"
    RUNNING = "running"
    FAILED = "failed"


@dataclass
class JobStatus:
    target_id: str
    state: JobState
    next_run: float
    last_report: dict | None = None

    def to_dict(self) -> dict:
        return {
            "target_id": self.target_id,
            "state": self.state.value,
            "next_run": self.next_run,
            "last_report": self.last_report,
        }


class OrchestratorError(Exception):
    pass


class UnknownTargetError(OrchestratorError):
    pass


class DisabledTargetError(OrchestratorError):
    pass


class ValidationFailed(OrchestratorError):
    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = violations


class Orchestrator:
    """Owns the targets, the schedule, the store, and the workers.

    The scheduler loop wakes periodically, dispatches due targets to the
    pool, and the per-target job state machine (idle, queued, running,
    failed) guards against overlapping runs.
    """

    def __init__(
        self,
        targets: list[HarvestTarget] | None = None,
        store: IndexStore | None = None,
        policy: FetchPolicy | None = None,
        clock: Clock | None = None,
        transport: Transport | None = None,
        workers: int = 4,
        config_path: str | None = None,
        tick_interval: float = 0.5,
    ) -> None:
        self.clock = clock or SystemClock()
        self.store = store or IndexStore()
        self.policy = policy or FetchPolicy()
        # One fetcher for all runs: concurrent targets share the per-host
        # politeness gate, so two jobs on one site still space requests.
        self.fetcher = Fetcher(
            policy=self.policy, clock=self.clock, transport=transport
        )
        self.schedule = Schedule()
        self.config_path = config_path
        self._targets: dict[str, HarvestTarget] = {}
        self._states: dict[str, JobState] = {}
        self._reports: dict[str, dict] = {}
        self._lock = threading.RLock()
        self._pool = ThreadPoolExecutor(max_workers=workers)
        self._tick_interval = tick_interval
        self._shutdown = threading.Event()
        self._loop_thread: threading.Thread | None = None
        for target in targets or []:
            self._admit(target)

    # -- target CRUD

    def _admit(self, target: HarvestTarget) -> None:
        self._targets[target.id] = target
        self._states.setdefault(target.id, JobState.IDLE)
        self.schedule.register(target, self.clock.now())

    def list_targets(self) -> list[HarvestTarget]:
        with self._lock:
            return sorted(self._targets.values(), key=lambda t: t.id)

    def get_target(self, target_id: str) -> HarvestTarget:
        with self._lock:
            try:
                return self._targets[target_id]
            except KeyError:
                raise UnknownTargetError(target_id) from None

    def create_target(self, target: HarvestTarget) -> None:
        violations = validate_target(target)
        with self._lock:
            if target.id in self._targets:
                violations = violations + [f"duplicate id {target.id!r}"]
            if violations:
                raise ValidationFailed(violations)
            self._admit(target)
            self._persist_config()

    def update_target(self, target_id: str, target: HarvestTarget) -> None:
        violations = validate_target(target)
        if target.id != target_id:
            violations = violations + ["id must match the resource path"]
        if violations:
            raise ValidationFailed(violations)
        with self._lock:
            if target_id not in self._targets:
                raise UnknownTargetError(target_id)
            self._targets[target_id] = target
            self.schedule.register(target, self.clock.now())
            self._persist_config()

    def delete_target(self, target_id: str) -> None:
        with self._lock:
            if target_id not in self._targets:
                raise UnknownTargetError(target_id)
            del self._targets[target_id]
            self.schedule.remove(target_id)
            self._states.pop(target_id, None)
            self.store.delete_target(target_id)
            self._persist_config()

    def _persist_config(self) -> None:
        if self.config_path is None:
            return
        data = serialize_config(sorted(self._targets.values(), key=lambda t: t.id))
        with open(self.config_path, "wb") as fh:
            fh.write(data)

    # -- job control

    def status(self, target_id: str) -> JobStatus:
        with self._lock:
            if target_id not in self._targets:
                raise UnknownTargetError(target_id)
            try:
                next_run = self.schedule.get(target_id).next_run
            except UnknownTarget:
                next_run = 0.0
            return JobStatus(
                target_id=target_id,
                state=self._states.get(target_id, JobState.IDLE),
                next_run=next_run,
                last_report=self._reports.get(target_id),
            )

    def trigger_harvest(self, target_id: str) -> JobStatus:
        """Queue a manual run; no-op when one is already queued/running."""
        with self._lock:
            target = self._targets.get(target_id)
            if target is None:
                raise UnknownTargetError(target_id)
            if not target.enabled:
                raise DisabledTargetError(target_id)
            state = self._states.get(target_id, JobState.IDLE)
            if state in (JobState.QUEUED, JobState.RUNNING):
                return self.status(target_id)
            self._dispatch(target)
            return self.status(target_id)

    def _dispatch(self, target: HarvestTarget) -> None:
        self._states[target.id] = JobState.QUEUED
        self.schedule.mark_run(target.id, self.clock.now())
        self._pool.submit(self._run_job, target)

    def _run_job(self, target: HarvestTarget) -> None:
        with self._lock:
            self._states[target.id] = JobState.RUNNING
        try:
            report = harvest_target(
                target,
                fetcher=self.fetcher,
                frontier=Frontier(),
                record_sink=lambda record: self.store.upsert(
                    record, now=int(self.clock.now()), content_type=target.content_type
                ),
                clock=self.clock,
            )
            failed = report.stopped_reason is StopReason.ABORTED
        except Exception as exc:  # noqa: BLE001 - job boundary
            logger.exception("harvest run for %s crashed", target.id)
            report = None
            failed = True
            crash_detail = str(exc)
        with self._lock:
            if report is not None:
                self._reports[target.id] = report.to_dict()
            else:
                self._reports[target.id] = {
                    "target_id": target.id,
                    "error": crash_detail,
                }
            if target.id in self._states:
                self._states[target.id] = (
                    JobState.FAILED if failed else JobState.IDLE
                )
            try:
                self.schedule.mark_finished(
                    target.id, self._reports.get(target.id)
                )
            except UnknownTarget:
                pass

    # -- scheduler loop

    def tick(self) -> list[str]:
        """Dispatch every due target once; returns dispatched ids."""
        with self._lock:
            dispatched = []
            for target_id in self.schedule.due(self.clock.now()):
                state = self._states.get(target_id, JobState.IDLE)
                if state in (JobState.QUEUED, JobState.RUNNING):
                    continue
                target = self._targets.get(target_id)
                if target is None or not target.enabled:
                    continue
                self._dispatch(target)
                dispatched.append(target_id)
            return dispatched

    def start(self) -> None:
        if self._loop_thread is not None:
            return
        self._shutdown.clear()
        self._loop_thread = threading.Thread(
            target=self._loop, name="harvest-scheduler", daemon=True
        )
        self._loop_thread.start()

    def _loop(self) -> None:
        while not self._shutdown.wait(self._tick_interval):
            try:
                self.tick()
            except Exception:  # noqa: BLE001 - keep the loop alive
                logger.exception("scheduler tick failed")

    def stop(self) -> None:
        self._shutdown.set()
        if self._loop_thread is not None:
            self._loop_thread.join(timeout=5)
            self._loop_thread = None
        self._pool.shutdown(wait=True)


_PLACEHOLDER_PAGE = """<!DOCTYPE html>
<html><head><title>webharvest</title></head>
<body><h1>webharvest</h1>
<p>The admin API lives under <code>/api</code>. Build the frontend bundle
to serve the admin UI here.</p></body></html>
"""


def create_app(orchestrator: Orchestrator, ui_dir: str | None = None) -> FastAPI:
    """Wire the JSON API (and the static admin UI when built)."""
    app = FastAPI(title="webharvest admin API")

    def _not_found(target_id: str) -> JSONResponse:
        return JSONResponse({"error": f"unknown target {target_id!r}"}, status_code=404)

    @app.get("/api/targets")
    def list_targets() -> list[dict]:
        return [target_to_dict(t) for t in orchestrator.list_targets()]

    @app.post("/api/targets")
    async def create_target(request: Request):
        try:
            target = target_from_dict(await request.json())
        except ConfigError as exc:
            return JSONResponse({"violations": [str(exc)]}, status_code=422)
        try:
            orchestrator.create_target(target)
        except ValidationFailed as exc:
            return JSONResponse({"violations": exc.violations}, status_code=422)
        return JSONResponse(target_to_dict(target), status_code=201)

    @app.get("/api/targets/{target_id}")
    def get_target(target_id: str):
        try:
            return target_to_dict(orchestrator.get_target(target_id))
        except UnknownTargetError:
            return _not_found(target_id)

    @app.put("/api/targets/{target_id}")
    async def update_target(target_id: str, request: Request):
        try:
            target = target_from_dict(await request.json())
        except ConfigError as exc:
            return JSONResponse({"violations": [str(exc)]}, status_code=422)
        try:
            orchestrator.update_target(target_id, target)
        except ValidationFailed as exc:
            return JSONResponse({"violations": exc.violations}, status_code=422)
        except UnknownTargetError:
            return _not_found(target_id)
        return target_to_dict(target)

    @app.delete("/api/targets/{target_id}", status_code=204)
    def delete_target(target_id: str):
        try:
            orchestrator.delete_target(target_id)
        except UnknownTargetError:
            return _not_found(target_id)

    @app.post("/api/targets/{target_id}/harvest")
    def trigger(target_id: str):
        try:
            return orchestrator.trigger_harvest(target_id).to_dict()
        except UnknownTargetError:
            return _not_found(target_id)
        except DisabledTargetError:
            return JSONResponse(
                {"error": f"target {target_id!r} is disabled"}, status_code=409
            )

    @app.get("/api/targets/{target_id}/status")
    def status(target_id: str):
        try:
            return orchestrator.status(target_id).to_dict()
        except UnknownTargetError:
            return _not_found(target_id)

    @app.get("/api/search")
    def search(q: str = "", limit: int = 20):
        hits = orchestrator.store.search(q, limit=limit)
        return {
            "query": q,
            "hits": [
                {
                    "source_url": h.source_url,
                    "target_id": h.target_id,
                    "content_type": h.content_type,
                    "score": h.score,
                    "snippet": h.snippet,
                }
                for h in hits
            ],
        }

    @app.get("/api/stats")
    def stats():
        return orchestrator.store.stats()

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index() -> str:
            return _PLACEHOLDER_PAGE

    return app


def serve(
    orchestrator: Orchestrator, bind: str = "127.0.0.1:8080", ui_dir: str | None = None
) -> None:
    """Run the service until interrupted."""
    import uvicorn

    host, _, port = bind.rpartition(":")
    if not host:
        raise ValueError(f"bind address must be host:port, got {bind!r}")
    app = create_app(orchestrator, ui_dir=ui_dir)
    orchestrator.start()
    try:
        uvicorn.run(app, host=host, port=int(port), log_level="info")
    finally:
        orchestrator.stop()
