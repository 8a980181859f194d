"""FastAPI application: pipeline endpoints plus the teleoperation bridge."""
from __future__ import annotations

import asyncio
import contextlib

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .. import pipeline
from ..documents import load_scene, scene_to_document
from ..errors import DemonstrationError, FitError, TeleskillError
from ..insertion_sim import SceneConfig
from . import schemas
from .sessions import TeleopSession


def _error_detail(exc: Exception) -> dict:
    if isinstance(exc, DemonstrationError):
        kind = "demonstrator"
    elif isinstance(exc, FitError):
        kind = "fit"
    else:
        kind = "input"
    return schemas.ErrorDetail(kind=kind, message=str(exc)).model_dump()


def create_app(scene_path: str | None = None,
               recordings_dir: str = "recordings") -> FastAPI:
    if scene_path is not None:
        scene = load_scene(scene_path)
    else:
        scene = SceneConfig()
        scene.validate()

    app = FastAPI(title="teleskill service", version="0.1.0")
    app.state.scene = scene
    app.state.recordings_dir = recordings_dir

    def run(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (TeleskillError, FileNotFoundError, OSError) as exc:
            raise HTTPException(status_code=400, detail=_error_detail(exc)) from exc

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/scene")
    def get_scene() -> dict:
        return scene_to_document(app.state.scene)

    @app.post("/pipeline/demo-gen", response_model=schemas.DemoGenResponse)
    def demo_gen(req: schemas.DemoGenRequest):
        return run(pipeline.run_demo_gen, req.scene_path, req.out_path)

    @app.post("/pipeline/fit", response_model=schemas.FitResponse)
    def fit(req: schemas.FitRequest):
        return run(pipeline.run_fit, req.archive_path, req.out_path,
                   n_basis=req.n_basis, k=req.k, bic=req.bic)

    @app.post("/pipeline/reproduce", response_model=schemas.ReproduceResponse)
    def reproduce(req: schemas.ReproduceRequest):
        return run(pipeline.run_reproduce, req.skill_path, req.scene_path,
                   req.out_path, dx=req.dx, dy=req.dy, dyaw=req.dyaw,
                   tau_scale=req.tau_scale)

    @app.post("/pipeline/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(req: schemas.EvaluateRequest):
        return run(pipeline.run_evaluate, req.skill_path, req.scene_path,
                   req.conditions_path, req.out_path, tau_scale=req.tau_scale)

    @app.post("/pipeline/export-profiles", response_model=schemas.ExportProfilesResponse)
    def export_profiles(req: schemas.ExportProfilesRequest):
        return run(pipeline.run_export_profiles, req.skill_path,
                   req.result_path, req.out_path)

    @app.websocket("/ws")
    async def teleop(ws: WebSocket):
        await ws.accept()
        session = TeleopSession(app.state.scene, app.state.recordings_dir)
        stop = asyncio.Event()

        async def ticker():
            loop = asyncio.get_running_loop()
            next_tick = loop.time()
            while not stop.is_set():
                frame = session.tick()
                await ws.send_json(frame)
                next_tick += session.cadence
                delay = next_tick - loop.time()
                if delay > 0:
                    await asyncio.sleep(delay)
                else:  # missed a deadline; resynchronize instead of bursting
                    next_tick = loop.time()

        task = asyncio.create_task(ticker())
        try:
            while True:
                text = await ws.receive_text()
                reply = session.handle(text)
                if reply is not None:
                    await ws.send_json(reply)
        except WebSocketDisconnect:
            pass
        finally:
            stop.set()
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    return app
