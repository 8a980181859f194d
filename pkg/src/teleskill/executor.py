"""Autonomous reproduction: planned trajectory + wrench tracking.

A SkillModel bundles the trajectory model and the wrench mixture. plan()
rolls the trajectory out for new start/goal/duration and attaches the GMR
wrench reference at each step's phase. execute() replays the plan against
a simulator, displacing the commanded pose with a leaky-integrator
admittance law so the measured wrench tracks the reference:

    offset' = clamp(offset + dt * (A*(F_meas - F_ref) - leak*offset), +-cap)

Failure checks (body collision / force limit / timeout) run every control
step; the success criterion (depth + lateral tolerance) is evaluated once
the planned trajectory has completed and the command is being held, so the
logged wrench covers the whole insertion press.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dmp import DmpModel, OrientationDmp, QuaternionTrajectory, rollout_dmp, rollout_orientation_dmp
from .errors import InputError
from .wrench_gmm import GmmModel, gmr


@dataclass(frozen=True)
class DemoSummary:
    """Phase-indexed reference profile of the demonstration, for reporting."""

    peak_force: float
    tau: float
    phases: np.ndarray        # descending, one per demo frame
    wrench_profile: np.ndarray  # (frames, m)


@dataclass(frozen=True)
class SkillModel:
    dmp: DmpModel
    wrench: GmmModel
    demo_summary: DemoSummary
    orientation: OrientationDmp | None = None


@dataclass(frozen=True)
class AdmittanceConfig:
    gain_translation: float = 1e-3   # m/(N*s)
    gain_rotation: float = 5e-3      # rad/(N*m*s)
    leak: float = 2.0                # 1/s
    cap_translation: float = 0.02    # m
    cap_rotation: float = 0.2        # rad

    def __post_init__(self):
        if self.gain_translation < 0 or self.gain_rotation < 0:
            raise InputError("admittance gains must be >= 0")
        if self.leak <= 0:
            raise InputError("leak must be positive")
        if self.cap_translation <= 0 or self.cap_rotation <= 0:
            raise InputError("offset caps must be positive")

    def gains(self) -> np.ndarray:
        return np.array([self.gain_translation, self.gain_translation, self.gain_rotation])

    def caps(self) -> np.ndarray:
        return np.array([self.cap_translation, self.cap_translation, self.cap_rotation])


@dataclass(frozen=True)
class ExecutionLimits:
    timeout: float = 30.0
    max_force: float = 80.0
    success_depth: float = 0.027
    lateral_tolerance: float = 1e-3

    def __post_init__(self):
        for name in ("timeout", "max_force", "success_depth", "lateral_tolerance"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")


@dataclass(frozen=True)
class ExecutionPlan:
    times: np.ndarray
    phases: np.ndarray
    poses: np.ndarray
    velocities: np.ndarray
    wrench_means: np.ndarray
    wrench_covs: np.ndarray
    dt: float
    tau: float
    alpha_x: float
    demo_phases: np.ndarray
    demo_wrench: np.ndarray
    orientation: QuaternionTrajectory | None = None


@dataclass
class EpisodeResult:
    success: bool
    failure_reason: str | None
    duration: float
    peak_force: float
    wrench_rmse_vs_demo: float | None
    times: np.ndarray
    phases: np.ndarray
    commanded: np.ndarray
    actual: np.ndarray
    wrench: np.ndarray
    depth: np.ndarray


def plan(model: SkillModel, start_pose, goal_pose, tau: float, dt: float) -> ExecutionPlan:
    """Open-loop pose trajectory plus per-step phase and wrench reference."""
    if dt > tau / 10.0 * (1.0 + 1e-12):
        raise InputError(f"dt={dt:g} too coarse for tau={tau:g} (need dt <= tau/10)")
    traj = rollout_dmp(model.dmp, start_pose, goal_pose, tau, dt)
    orientation = None
    if model.orientation is not None:
        orientation = rollout_orientation_dmp(
            model.orientation, model.orientation.q0, model.orientation.q_goal, tau, dt
        )

    m = model.wrench.dim - 1
    n = traj.phases.size
    means = np.empty((n, m))
    covs = np.empty((n, m, m))
    for i, x in enumerate(traj.phases):
        ref = gmr(model.wrench, float(x))
        means[i] = ref.mean
        covs[i] = ref.covariance

    return ExecutionPlan(
        times=traj.times, phases=traj.phases, poses=traj.positions,
        velocities=traj.velocities, wrench_means=means, wrench_covs=covs,
        dt=dt, tau=tau, alpha_x=model.dmp.config.alpha_x,
        demo_phases=model.demo_summary.phases,
        demo_wrench=model.demo_summary.wrench_profile,
        orientation=orientation,
    )


def admittance_step(offset: np.ndarray, f_meas: np.ndarray, f_ref: np.ndarray,
                    cfg: AdmittanceConfig, dt: float) -> np.ndarray:
    """One leaky-integrator update, clamped per component."""
    if dt <= 0.0:
        raise InputError("dt must be positive")
    offset = np.asarray(offset, dtype=np.float64)
    raw = offset + dt * (cfg.gains() * (np.asarray(f_meas) - np.asarray(f_ref))
                         - cfg.leak * offset)
    caps = cfg.caps()
    return np.clip(raw, -caps, caps)


def downward_force_rmse(phases: np.ndarray, measured_fy: np.ndarray,
                        demo_phases: np.ndarray, demo_wrench: np.ndarray,
                        window_fraction: float = 0.1):
    """RMSE of the measured vs demonstrated downward-force channel.

    The demo profile is resampled at the executed phases; the insertion
    window is where that resampled |Fy| reaches window_fraction of its own
    peak. Returns (rmse, demo_peak, window_mask); rmse is None when the
    window is empty.
    """
    xp = demo_phases[::-1]
    fp = demo_wrench[::-1, 1]
    demo_fy = np.interp(phases, xp, fp)
    peak = float(np.max(np.abs(demo_fy))) if demo_fy.size else 0.0
    if peak <= 0.0:
        return None, peak, np.zeros(phases.shape, dtype=bool)
    window = np.abs(demo_fy) >= window_fraction * peak
    if not np.any(window):
        return None, peak, window
    err = measured_fy[window] - demo_fy[window]
    return float(np.sqrt(np.mean(err**2))), peak, window


def execute(plan_: ExecutionPlan, sim, cfg: AdmittanceConfig,
            limits: ExecutionLimits) -> EpisodeResult:
    """Run one episode against a simulator handle.

    The handle must expose .scene.dt, .state, .step(cmd), .plug_depth(),
    .lateral_error() and .body_collision_seen. The simulator is substepped
    at its own dt within each control period; after the plan is exhausted
    the final pose is held (admittance still active) until success or a
    limit fires.
    """
    control_dt = plan_.dt
    substeps = round(control_dt / sim.scene.dt)
    if substeps < 1 or abs(substeps * sim.scene.dt - control_dt) > 1e-9:
        raise InputError(
            f"control dt {control_dt:g} is not a multiple of simulator dt {sim.scene.dt:g}"
        )

    n_plan = plan_.poses.shape[0]
    offset = np.zeros(3)
    times, phases, commanded, actual, wrench, depth = [], [], [], [], [], []
    success = False
    failure: str | None = None

    step = 0
    while True:
        if step < n_plan:
            base = plan_.poses[step]
            ref = plan_.wrench_means[step]
            x = float(plan_.phases[step])
        else:
            base = plan_.poses[-1]
            ref = plan_.wrench_means[-1]
            x = math.exp(-plan_.alpha_x * (step * control_dt) / plan_.tau)

        f_meas = sim.state.wrench
        offset = admittance_step(offset, f_meas, ref, cfg, control_dt)
        cmd = base + offset
        for _ in range(substeps):
            state = sim.step(cmd)

        times.append(state.time)
        phases.append(x)
        commanded.append(cmd.copy())
        actual.append(np.array(state.pose))
        wrench.append(np.array(state.wrench))
        depth.append(sim.plug_depth())

        if sim.body_collision_seen:
            failure = "approach_collision"
            break
        if math.hypot(state.wrench[0], state.wrench[1]) > limits.max_force:
            failure = "force_limit"
            break
        if step + 1 >= n_plan and (
            sim.plug_depth() >= limits.success_depth
            and sim.lateral_error() <= limits.lateral_tolerance
        ):
            success = True
            break
        if state.time >= limits.timeout:
            failure = "timeout"
            break
        step += 1

    times = np.array(times)
    phases = np.array(phases)
    commanded = np.array(commanded)
    actual = np.array(actual)
    wrench = np.array(wrench)
    depth = np.array(depth)

    rmse, _, _ = downward_force_rmse(phases, wrench[:, 1],
                                     plan_.demo_phases, plan_.demo_wrench)
    peak_force = float(np.max(np.hypot(wrench[:, 0], wrench[:, 1])))

    return EpisodeResult(
        success=success, failure_reason=failure, duration=float(times[-1]),
        peak_force=peak_force, wrench_rmse_vs_demo=rmse,
        times=times, phases=phases, commanded=commanded, actual=actual,
        wrench=wrench, depth=depth,
    )
