"""JSON document formats for skills, episodes, reports, scenes, conditions.

All numeric fields round-trip losslessly (Python's json emits shortest
round-trip float text). Loaders re-check the model invariants so a
tampered or hand-written document fails loudly.
"""
from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .dmp import DmpConfig, DmpModel, OrientationDmp
from .errors import DocumentError
from .executor import DemoSummary, EpisodeResult, SkillModel
from .insertion_sim import EpisodeSummary, EvalReport, InitialCondition, SceneConfig
from .wrench_gmm import GmmModel

SKILL_VERSION = "1"
EPISODE_VERSION = "1"
REPORT_VERSION = "1"


def _load_json(path: str | Path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise DocumentError(f"{p}: no such document")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{p}: malformed JSON: {exc}") from exc


def _dump_json(doc: dict, path: str | Path) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


# --- skill documents ----------------------------------------------------------

def skill_to_document(model: SkillModel) -> dict:
    dmp = model.dmp
    doc = {
        "version": SKILL_VERSION,
        "dmp": {
            "n_basis": dmp.config.n_basis,
            "alpha_z": dmp.config.alpha_z,
            "beta_z": dmp.config.beta_z,
            "alpha_x": dmp.config.alpha_x,
            "amplitude_floor": dmp.config.amplitude_floor,
            "tau": dmp.tau,
            "dims": dmp.dims,
            "y0": dmp.y0.tolist(),
            "goal": dmp.goal.tolist(),
            "centers": dmp.centers.tolist(),
            "widths": dmp.widths.tolist(),
            "weights": dmp.weights.tolist(),
        },
        "orientation": None,
        "gmm": {
            "k": model.wrench.k,
            "input_dim": model.wrench.input_dim,
            "priors": model.wrench.priors.tolist(),
            "means": model.wrench.means.tolist(),
            "covariances": model.wrench.covariances.tolist(),
        },
        "demo_summary": {
            "peak_force": model.demo_summary.peak_force,
            "tau": model.demo_summary.tau,
            "phases": model.demo_summary.phases.tolist(),
            "wrench_profile": model.demo_summary.wrench_profile.tolist(),
        },
    }
    if model.orientation is not None:
        o = model.orientation
        doc["orientation"] = {
            "n_basis": o.config.n_basis,
            "alpha_z": o.config.alpha_z,
            "beta_z": o.config.beta_z,
            "alpha_x": o.config.alpha_x,
            "amplitude_floor": o.config.amplitude_floor,
            "tau": o.tau,
            "q0": o.q0.tolist(),
            "q_goal": o.q_goal.tolist(),
            "centers": o.centers.tolist(),
            "widths": o.widths.tolist(),
            "weights": o.weights.tolist(),
        }
    return doc


def _check_dmp_block(dmp: DmpModel) -> None:
    c = dmp.centers
    if c[0] != 1.0 or np.any(np.diff(c) >= 0.0):
        raise DocumentError("dmp centers must be strictly decreasing with c[0] = 1")
    if np.any(dmp.widths <= 0.0):
        raise DocumentError("dmp widths must be positive")
    if not np.isfinite(dmp.weights).all():
        raise DocumentError("dmp weights must be finite")
    if dmp.weights.shape != (dmp.dims, dmp.config.n_basis):
        raise DocumentError("dmp weight matrix shape mismatch")
    if dmp.tau <= 0.0:
        raise DocumentError("dmp tau must be positive")


def _check_gmm_block(gmm: GmmModel) -> None:
    if abs(float(gmm.priors.sum()) - 1.0) > 1e-12 or np.any(gmm.priors < 0.0):
        raise DocumentError("gmm priors must be a probability vector")
    for j in range(gmm.k):
        cov = gmm.covariances[j]
        if np.max(np.abs(cov - cov.T)) > 1e-12:
            raise DocumentError(f"gmm covariance {j} not symmetric")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise DocumentError(f"gmm covariance {j} not positive definite") from exc


def document_to_skill(doc: dict) -> SkillModel:
    if doc.get("version") != SKILL_VERSION:
        raise DocumentError(f"unsupported skill document version {doc.get('version')!r}")
    try:
        d = doc["dmp"]
        cfg = DmpConfig(n_basis=int(d["n_basis"]), alpha_z=float(d["alpha_z"]),
                        beta_z=float(d["beta_z"]), alpha_x=float(d["alpha_x"]),
                        amplitude_floor=float(d["amplitude_floor"]))
        dmp = DmpModel(
            config=cfg, tau=float(d["tau"]), dims=int(d["dims"]),
            y0=np.array(d["y0"], dtype=np.float64),
            goal=np.array(d["goal"], dtype=np.float64),
            centers=np.array(d["centers"], dtype=np.float64),
            widths=np.array(d["widths"], dtype=np.float64),
            weights=np.array(d["weights"], dtype=np.float64),
        )
        g = doc["gmm"]
        gmm = GmmModel(
            priors=np.array(g["priors"], dtype=np.float64),
            means=np.array(g["means"], dtype=np.float64),
            covariances=np.array(g["covariances"], dtype=np.float64),
            input_dim=int(g["input_dim"]),
        )
        s = doc["demo_summary"]
        summary = DemoSummary(
            peak_force=float(s["peak_force"]), tau=float(s["tau"]),
            phases=np.array(s["phases"], dtype=np.float64),
            wrench_profile=np.array(s["wrench_profile"], dtype=np.float64),
        )
        orientation = None
        if doc.get("orientation") is not None:
            o = doc["orientation"]
            ocfg = DmpConfig(n_basis=int(o["n_basis"]), alpha_z=float(o["alpha_z"]),
                             beta_z=float(o["beta_z"]), alpha_x=float(o["alpha_x"]),
                             amplitude_floor=float(o["amplitude_floor"]))
            orientation = OrientationDmp(
                config=ocfg, tau=float(o["tau"]),
                q0=np.array(o["q0"], dtype=np.float64),
                q_goal=np.array(o["q_goal"], dtype=np.float64),
                centers=np.array(o["centers"], dtype=np.float64),
                widths=np.array(o["widths"], dtype=np.float64),
                weights=np.array(o["weights"], dtype=np.float64),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"skill document missing or malformed field: {exc}") from exc

    _check_dmp_block(dmp)
    _check_gmm_block(gmm)
    if summary.tau <= 0.0:
        raise DocumentError("demo_summary tau must be positive")
    if orientation is not None:
        for q in (orientation.q0, orientation.q_goal):
            if abs(float(np.linalg.norm(q)) - 1.0) > 1e-9:
                raise DocumentError("orientation quaternions must be unit norm")
    return SkillModel(dmp=dmp, wrench=gmm, demo_summary=summary, orientation=orientation)


def save_skill(model: SkillModel, path: str | Path) -> None:
    _dump_json(skill_to_document(model), path)


def load_skill(path: str | Path) -> SkillModel:
    return document_to_skill(_load_json(path))


# --- episode / report documents -----------------------------------------------

def episode_to_document(result: EpisodeResult, condition: dict | None = None) -> dict:
    return {
        "version": EPISODE_VERSION,
        "condition": condition or {},
        "success": result.success,
        "failure_reason": result.failure_reason,
        "duration": result.duration,
        "peak_force": result.peak_force,
        "wrench_rmse_vs_demo": result.wrench_rmse_vs_demo,
        "log": {
            "t": result.times.tolist(),
            "phase": result.phases.tolist(),
            "commanded": result.commanded.tolist(),
            "actual": result.actual.tolist(),
            "wrench": result.wrench.tolist(),
            "depth": result.depth.tolist(),
        },
    }


def document_to_episode(doc: dict) -> EpisodeResult:
    if doc.get("version") != EPISODE_VERSION:
        raise DocumentError(f"unsupported episode document version {doc.get('version')!r}")
    try:
        log = doc["log"]
        return EpisodeResult(
            success=bool(doc["success"]),
            failure_reason=doc["failure_reason"],
            duration=float(doc["duration"]),
            peak_force=float(doc["peak_force"]),
            wrench_rmse_vs_demo=(None if doc["wrench_rmse_vs_demo"] is None
                                 else float(doc["wrench_rmse_vs_demo"])),
            times=np.array(log["t"], dtype=np.float64),
            phases=np.array(log["phase"], dtype=np.float64),
            commanded=np.array(log["commanded"], dtype=np.float64),
            actual=np.array(log["actual"], dtype=np.float64),
            wrench=np.array(log["wrench"], dtype=np.float64),
            depth=np.array(log["depth"], dtype=np.float64),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"episode document missing or malformed field: {exc}") from exc


def save_episode(result: EpisodeResult, path: str | Path,
                 condition: dict | None = None) -> None:
    _dump_json(episode_to_document(result, condition), path)


def load_episode(path: str | Path) -> EpisodeResult:
    return document_to_episode(_load_json(path))


def report_to_document(report: EvalReport) -> dict:
    return {
        "version": REPORT_VERSION,
        "episodes": [
            {
                "id": e.id,
                "success": e.success,
                "failure_reason": e.failure_reason,
                "duration": e.duration,
                "peak_force": e.peak_force,
                "wrench_rmse_vs_demo": e.wrench_rmse_vs_demo,
            }
            for e in report.episodes
        ],
        "successes": report.successes,
        "episodes_total": len(report.episodes),
        "success_rate": report.success_rate,
    }


def document_to_report(doc: dict) -> EvalReport:
    if doc.get("version") != REPORT_VERSION:
        raise DocumentError(f"unsupported report document version {doc.get('version')!r}")
    try:
        episodes = tuple(
            EpisodeSummary(
                id=e["id"], success=bool(e["success"]),
                failure_reason=e["failure_reason"], duration=float(e["duration"]),
                peak_force=float(e["peak_force"]),
                wrench_rmse_vs_demo=(None if e.get("wrench_rmse_vs_demo") is None
                                     else float(e["wrench_rmse_vs_demo"])),
            )
            for e in doc["episodes"]
        )
        report = EvalReport(episodes=episodes, successes=int(doc["successes"]),
                            success_rate=float(doc["success_rate"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"report document missing or malformed field: {exc}") from exc
    if report.episodes and report.success_rate != report.successes / len(report.episodes):
        raise DocumentError("report success_rate inconsistent with episode count")
    return report


def save_report(report: EvalReport, path: str | Path) -> None:
    _dump_json(report_to_document(report), path)


def load_report(path: str | Path) -> EvalReport:
    return document_to_report(_load_json(path))


# --- scene / conditions -------------------------------------------------------

_SCENE_FIELDS = {f.name for f in dataclasses.fields(SceneConfig)}


def scene_to_document(scene: SceneConfig) -> dict:
    return {name: getattr(scene, name) for name in sorted(_SCENE_FIELDS)}


def document_to_scene(doc: dict) -> SceneConfig:
    unknown = set(doc) - _SCENE_FIELDS
    if unknown:
        raise DocumentError(f"unknown scene fields: {sorted(unknown)}")
    try:
        scene = SceneConfig(**{k: float(v) for k, v in doc.items()})
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"malformed scene document: {exc}") from exc
    scene.validate()
    return scene


def save_scene(scene: SceneConfig, path: str | Path) -> None:
    _dump_json(scene_to_document(scene), path)


def load_scene(path: str | Path) -> SceneConfig:
    return document_to_scene(_load_json(path))


def conditions_to_document(conditions) -> dict:
    return {
        "conditions": [
            {"id": c.id, "dx": c.dx, "dy": c.dy, "dyaw": c.dyaw,
             "expected_regime": c.expected_regime}
            for c in conditions
        ]
    }


def document_to_conditions(doc: dict) -> list[InitialCondition]:
    try:
        entries = doc["conditions"]
        return [
            InitialCondition(
                id=str(e["id"]), dx=float(e.get("dx", 0.0)), dy=float(e.get("dy", 0.0)),
                dyaw=float(e.get("dyaw", 0.0)),
                expected_regime=str(e.get("expected_regime", "nominal")),
            )
            for e in entries
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed conditions document: {exc}") from exc


def save_conditions(conditions, path: str | Path) -> None:
    _dump_json(conditions_to_document(conditions), path)


def load_conditions(path: str | Path) -> list[InitialCondition]:
    return document_to_conditions(_load_json(path))
