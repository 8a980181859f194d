"""End-to-end pipeline operations behind the service endpoints.

Each function takes filesystem paths, performs one stage (demonstrate,
fit, reproduce, evaluate, export), and returns a small summary dict for
the API response. Errors are raised as the typed exceptions from
errors.py; the service and CLI map them to HTTP payloads / exit codes.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from . import documents
from .dmp import DmpConfig, fit_dmp, phase
from .errors import ArchiveError, InputError
from .executor import DemoSummary, SkillModel
from .insertion_sim import SceneConfig, evaluate, run_episode, scripted_demonstrate
from .recording import read_archive, validate, write_archive
from .wrench_gmm import GmmConfig, build_dataset, fit_gmm, gmr, select_k_bic

POSE_STREAM = "pose"
WRENCH_STREAM = "wrench"
DEFAULT_TAU_SCALE = 1.5
CONTROL_DT = 0.01


def _load_scene(scene_path: str | None) -> SceneConfig:
    if scene_path is None:
        scene = SceneConfig()
        scene.validate()
        return scene
    return documents.load_scene(scene_path)


def run_demo_gen(scene_path: str | None, out_path: str) -> dict:
    scene = _load_scene(scene_path)
    rec = scripted_demonstrate(scene)
    write_archive(rec, out_path)
    return {"path": str(out_path), "frames": rec.frames, "duration": rec.duration}


def fit_skill(rec, n_basis: int = 30, k: int = 5, bic: bool = False) -> SkillModel:
    """Fit the trajectory and wrench models from one recording."""
    problems = validate(rec)
    if problems:
        raise ArchiveError("recording invalid: " + "; ".join(p.message for p in problems))

    cfg = DmpConfig(n_basis=n_basis)
    dmp_model = fit_dmp(rec, POSE_STREAM, cfg)

    times = np.arange(rec.frames, dtype=np.float64) * rec.dt
    phases = phase(times, dmp_model.tau, cfg.alpha_x)
    dataset = build_dataset(rec, phases, WRENCH_STREAM)
    if bic:
        k = select_k_bic(dataset, range(1, max(k, 1) + 1))
    gmm_model = fit_gmm(dataset, GmmConfig(k=k))

    wrench = rec.streams[WRENCH_STREAM].samples
    peak = float(np.max(np.hypot(wrench[:, 0], wrench[:, 1])))
    summary = DemoSummary(peak_force=peak, tau=dmp_model.tau,
                          phases=phases, wrench_profile=wrench.copy())
    return SkillModel(dmp=dmp_model, wrench=gmm_model, demo_summary=summary)


def run_fit(archive_path: str, out_path: str, n_basis: int = 30,
            k: int = 5, bic: bool = False) -> dict:
    rec = read_archive(archive_path)
    model = fit_skill(rec, n_basis=n_basis, k=k, bic=bic)
    documents.save_skill(model, out_path)
    return {"path": str(out_path), "k": model.wrench.k,
            "n_basis": model.dmp.config.n_basis, "tau": model.dmp.tau}


def run_reproduce(skill_path: str, scene_path: str | None, out_path: str,
                  dx: float = 0.0, dy: float = 0.0, dyaw: float = 0.0,
                  tau_scale: float = DEFAULT_TAU_SCALE) -> dict:
    if tau_scale <= 0:
        raise InputError("tau-scale must be positive")
    model = documents.load_skill(skill_path)
    scene = _load_scene(scene_path)
    result = run_episode(model, scene, dx=dx, dy=dy, dyaw=dyaw,
                         control_dt=CONTROL_DT, tau_scale=tau_scale)
    documents.save_episode(result, out_path,
                           condition={"dx": dx, "dy": dy, "dyaw": dyaw})
    return {
        "path": str(out_path),
        "success": result.success,
        "failure_reason": result.failure_reason,
        "duration": result.duration,
        "peak_force": result.peak_force,
        "wrench_rmse_vs_demo": result.wrench_rmse_vs_demo,
    }


def run_evaluate(skill_path: str, scene_path: str | None, conditions_path: str,
                 out_path: str, tau_scale: float = DEFAULT_TAU_SCALE) -> dict:
    model = documents.load_skill(skill_path)
    scene = _load_scene(scene_path)
    conditions = documents.load_conditions(conditions_path)
    if not conditions:
        raise InputError(f"{conditions_path}: conditions file has zero entries")
    report = evaluate(model, conditions, scene,
                      control_dt=CONTROL_DT, tau_scale=tau_scale)
    documents.save_report(report, out_path)
    return {
        "path": str(out_path),
        "successes": report.successes,
        "episodes": len(report.episodes),
        "success_rate": report.success_rate,
        "failures": [
            {"id": e.id, "failure_reason": e.failure_reason}
            for e in report.episodes if not e.success
        ],
    }


def export_profiles_csv(model: SkillModel, result, out_path: str | Path) -> int:
    """CSV with per-step demo / reference / measured wrench for plotting.

    Columns: t, phase, demo_*, ref_* (GMR at the step phase), meas_*.
    The demo columns are the demo profile linearly resampled at the
    episode's phases, so the stored RMSE is recomputable from this file.
    """
    m = result.wrench.shape[1]
    labels = ["fx", "fy", "mz"][:m] if m <= 3 else [f"w{i}" for i in range(m)]
    xp = model.demo_summary.phases[::-1]
    demo_cols = np.column_stack([
        np.interp(result.phases, xp, model.demo_summary.wrench_profile[::-1, j])
        for j in range(m)
    ])
    ref_cols = np.array([gmr(model.wrench, float(x)).mean for x in result.phases])

    header = (["t", "phase"] + [f"demo_{s}" for s in labels]
              + [f"ref_{s}" for s in labels] + [f"meas_{s}" for s in labels])
    lines = [",".join(header)]
    for i in range(result.times.size):
        row = [result.times[i], result.phases[i], *demo_cols[i], *ref_cols[i],
               *result.wrench[i]]
        lines.append(",".join(repr(float(v)) for v in row))
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return result.times.size


def run_export_profiles(skill_path: str, result_path: str, out_path: str) -> dict:
    model = documents.load_skill(skill_path)
    result = documents.load_episode(result_path)
    rows = export_profiles_csv(model, result, out_path)
    return {"path": str(out_path), "rows": rows}
