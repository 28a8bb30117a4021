"""HTTP facade for the editor: plan CRUD, GA jobs with streamed progress,
simulation runs, and field sampling.

One mutable workspace plan per server instance.  Optimization runs on a
background thread — one job at a time — publishing per-generation progress
to any number of server-sent-event subscribers; late subscribers first get
a replay of the history so far, so the chart never misses points.
"""

from __future__ import annotations

import json
import math
import threading
import uuid
from dataclasses import dataclass, field as dataclass_field
from queue import SimpleQueue

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from .errors import Busy, DribbleForgeError, ValidationFailed
from .evolution import (
    FitnessConfig,
    GaConfig,
    evolution_report,
    evolve,
    fitness_config_from_document,
    fitness_config_to_document,
    ga_config_from_document,
    ga_config_to_document,
)
from .geometry import Point2
from .plan import TrajectoryPlan, plan_from_document, plan_to_document
from .simulation import SimConfig, sample_field, simulate, trace_document, trace_metrics

_TERMINAL = ("done", "cancelled", "failed")


@dataclass
class OptimizeJob:
    id: str
    ga: GaConfig
    fitness: FitnessConfig
    status: str = "pending"
    history: list[tuple[float, float, float]] = dataclass_field(default_factory=list)
    report: dict | None = None
    error: str | None = None
    cancel_event: threading.Event = dataclass_field(default_factory=threading.Event)
    lock: threading.Lock = dataclass_field(default_factory=threading.Lock)
    subscribers: list[SimpleQueue] = dataclass_field(default_factory=list)


def _sse(event: str, payload: dict) -> str:
    return f"event: {event}\ndata: {json.dumps(payload)}\n\n"


def _generation_payload(generation: int, best: float, mean: float,
                        worst: float) -> dict:
    return {"generation": generation, "best": best, "mean": mean,
            "worst": worst}


class JobManager:
    """Registry running at most one optimization at a time."""

    def __init__(self):
        self._jobs: dict[str, OptimizeJob] = {}
        self._lock = threading.Lock()
        self._active: OptimizeJob | None = None

    def get(self, job_id: str) -> OptimizeJob:
        try:
            return self._jobs[job_id]
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"no job {job_id!r}") from None

    def start(self, plan: TrajectoryPlan, ga: GaConfig,
              fit: FitnessConfig) -> OptimizeJob:
        with self._lock:
            if self._active is not None:
                with self._active.lock:
                    if self._active.status not in _TERMINAL:
                        raise Busy("an optimization job is already running")
            job = OptimizeJob(id=uuid.uuid4().hex[:12], ga=ga, fitness=fit)
            self._jobs[job.id] = job
            self._active = job
        thread = threading.Thread(target=self._run, args=(job, plan),
                                  daemon=True)
        thread.start()
        return job

    def cancel(self, job_id: str) -> OptimizeJob:
        job = self.get(job_id)
        job.cancel_event.set()
        return job

    def _run(self, job: OptimizeJob, plan: TrajectoryPlan) -> None:
        with job.lock:
            job.status = "running"

        def on_generation(gen, best, mean, worst):
            payload = _generation_payload(gen, best, mean, worst)
            with job.lock:
                job.history.append((best, mean, worst))
                queues = list(job.subscribers)
            for q in queues:
                q.put(("generation", payload))

        try:
            result = evolve(plan, job.ga, job.fitness,
                            on_generation=on_generation,
                            cancel=job.cancel_event)
            report = evolution_report(result, job.ga, job.fitness)
            status = "cancelled" if result.cancelled else "done"
            with job.lock:
                job.report = report
                job.status = status
        except Exception as exc:  # surfaced through the job document
            with job.lock:
                job.error = str(exc)
                job.status = "failed"
        finally:
            with job.lock:
                terminal = (job.status, {"status": job.status})
                queues = list(job.subscribers)
            for q in queues:
                q.put(terminal)

    def subscribe(self, job: OptimizeJob):
        """Replay events so far plus a live queue (None once terminal)."""
        q: SimpleQueue | None = SimpleQueue()
        with job.lock:
            replay = [
                ("generation", _generation_payload(g, b, m, w))
                for g, (b, m, w) in enumerate(job.history)
            ]
            if job.status in _TERMINAL:
                replay.append((job.status, {"status": job.status}))
                q = None
            else:
                job.subscribers.append(q)
        return replay, q

    def unsubscribe(self, job: OptimizeJob, q: SimpleQueue) -> None:
        with job.lock:
            if q in job.subscribers:
                job.subscribers.remove(q)


def job_document(job: OptimizeJob) -> dict:
    with job.lock:
        return {
            "id": job.id,
            "status": job.status,
            "ga": ga_config_to_document(job.ga),
            "fitness": fitness_config_to_document(job.fitness),
            "generations_completed": max(len(job.history) - 1, 0),
            "history": [
                {"generation": g, "best": b, "mean": m, "worst": w}
                for g, (b, m, w) in enumerate(job.history)
            ],
            "result": job.report,
            "error": job.error,
        }


def _number(value, label: str) -> float:
    if (isinstance(value, bool) or not isinstance(value, (int, float))
            or not math.isfinite(value)):
        raise ValidationFailed([{"node": None, "field": label,
                                 "message": f"{label} must be a finite number"}])
    return float(value)


def _pair(value, label: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValidationFailed([{"node": None, "field": label,
                                 "message": f"{label} must be a [x, y] pair"}])
    return (_number(value[0], label), _number(value[1], label))


def _sim_config_from(doc: dict | None) -> SimConfig:
    if doc is None:
        return SimConfig()
    if not isinstance(doc, dict):
        raise ValidationFailed([{"node": None, "field": "sim_config",
                                 "message": "sim_config must be an object"}])
    allowed = {"dt", "max_steps", "max_speed", "kickable_radius", "finish_x"}
    kwargs = {}
    for key, value in doc.items():
        if key not in allowed:
            raise ValidationFailed([{"node": None, "field": key,
                                     "message": f"unknown sim_config field {key!r}"}])
        if key == "max_steps":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValidationFailed([{"node": None, "field": key,
                                         "message": "max_steps must be an integer"}])
            kwargs[key] = value
        else:
            kwargs[key] = _number(value, key)
    try:
        return SimConfig(**kwargs)
    except ValueError as exc:
        raise ValidationFailed([{"node": None, "field": "sim_config",
                                 "message": str(exc)}]) from exc


def create_app(initial_plan: TrajectoryPlan | None = None,
               static_dir: str | None = None) -> FastAPI:
    if initial_plan is None:
        from .fixtures import seed_plan
        initial_plan = seed_plan()

    app = FastAPI(title="dribbleforge", docs_url=None, redoc_url=None)
    workspace = {"plan": initial_plan}
    workspace_lock = threading.Lock()
    jobs = JobManager()
    app.state.jobs = jobs

    @app.exception_handler(DribbleForgeError)
    async def domain_error(request, exc: DribbleForgeError):
        if isinstance(exc, Busy):
            return JSONResponse(status_code=409, content={
                "detail": [{"node": None, "field": None, "message": str(exc)}]
            })
        if isinstance(exc, ValidationFailed):
            details = exc.details
        else:
            details = [{"node": getattr(exc, "node_index", None),
                        "field": getattr(exc, "field", None),
                        "message": str(exc)}]
        return JSONResponse(status_code=422, content={"detail": details})

    def current_plan() -> TrajectoryPlan:
        with workspace_lock:
            return workspace["plan"]

    @app.get("/api/plan")
    def get_plan():
        return plan_to_document(current_plan())

    @app.put("/api/plan")
    def put_plan(doc: dict = Body(...)):
        plan = plan_from_document(doc)
        with workspace_lock:
            workspace["plan"] = plan
        return plan_to_document(plan)

    @app.get("/api/plan/triangulation")
    def get_triangulation():
        tri = current_plan().triangulation
        return {"triangles": [list(t) for t in tri.triangles]}

    @app.post("/api/optimize")
    def post_optimize(body: dict = Body(default={})):
        if not isinstance(body, dict):
            raise ValidationFailed([{"node": None, "field": None,
                                     "message": "body must be an object"}])
        unknown = set(body) - {"ga", "fitness"}
        if unknown:
            raise ValidationFailed([
                {"node": None, "field": k,
                 "message": f"unknown optimize field {k!r}"}
                for k in sorted(unknown)
            ])
        ga = ga_config_from_document(body.get("ga", {}))
        fit = fitness_config_from_document(body.get("fitness", {}))
        job = jobs.start(current_plan(), ga, fit)
        return {"job_id": job.id}

    @app.get("/api/optimize/{job_id}")
    def get_job(job_id: str):
        return job_document(jobs.get(job_id))

    @app.delete("/api/optimize/{job_id}")
    def cancel_job(job_id: str):
        return job_document(jobs.cancel(job_id))

    @app.get("/api/optimize/{job_id}/events")
    def job_events(job_id: str):
        job = jobs.get(job_id)

        def stream():
            replay, queue = jobs.subscribe(job)
            try:
                for event, payload in replay:
                    yield _sse(event, payload)
                if queue is None:
                    return
                while True:
                    event, payload = queue.get()
                    yield _sse(event, payload)
                    if event != "generation":
                        return
            finally:
                if queue is not None:
                    jobs.unsubscribe(job, queue)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.post("/api/simulate")
    def post_simulate(body: dict = Body(...)):
        if not isinstance(body, dict):
            raise ValidationFailed([{"node": None, "field": None,
                                     "message": "body must be an object"}])
        unknown = set(body) - {"start", "v0", "sim_config"}
        if unknown:
            raise ValidationFailed([
                {"node": None, "field": k,
                 "message": f"unknown simulate field {k!r}"}
                for k in sorted(unknown)
            ])
        start = _pair(body.get("start", [-12.0, 0.0]), "start")
        v0 = _pair(body.get("v0", [4.0, 0.0]), "v0")
        cfg = _sim_config_from(body.get("sim_config"))
        trace = simulate(current_plan(), Point2(*start), v0, cfg)
        metrics = trace_metrics(trace, Point2(0.0, 0.0))
        return trace_document(trace, metrics)

    @app.get("/api/field")
    def get_field(nx: int = 40, ny: int = 30):
        if not (1 <= nx <= 500 and 1 <= ny <= 500):
            raise ValidationFailed([{"node": None, "field": "nx",
                                     "message": "grid must be between 1x1 and 500x500"}])
        return {"nx": nx, "ny": ny, "cells": sample_field(current_plan(), nx, ny)}

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="editor")

    return app
