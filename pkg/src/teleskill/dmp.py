"""Discrete dynamic movement primitives for positions and orientations.

Governing equations, per dimension, with phase x and temporal scale tau:

    canonical:       tau * dx/dt = -alpha_x * x,            x(0) = 1
    transformation:  tau * dz/dt = alpha_z*(beta_z*(g - y) - z) + f(x)
                     tau * dy/dt = z
    forcing:         f(x) = [sum_i psi_i(x) w_i / sum_i psi_i(x)] * x * (g - y0)
                     psi_i(x) = exp(-h_i (x - c_i)^2)

Weights come from locally weighted regression against the demonstrated
forcing f* = tau^2*ydd - alpha_z*(beta_z*(g - y) - tau*yd). Rollouts use
fixed-step classical RK4 so results are deterministic and can be checked
against the critically damped closed form when all weights are zero.

The quaternion variant drives the half-rotation-vector error
e = 2*log(q_goal * conj(q)) through the same second-order dynamics,
stepping q by the exponential map and renormalizing each step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quaternions as quat
from .errors import FitError, InputError, RolloutError
from .recording import Recording

_LWR_RIDGE = 1e-12


@dataclass(frozen=True)
class DmpConfig:
    """Dynamical-system constants; beta_z / alpha_x default to the
    critically damped choices alpha_z/4 and alpha_z/3."""

    n_basis: int = 30
    alpha_z: float = 25.0
    beta_z: float | None = None
    alpha_x: float | None = None
    amplitude_floor: float = 1e-8

    def __post_init__(self):
        if self.beta_z is None:
            object.__setattr__(self, "beta_z", self.alpha_z / 4.0)
        if self.alpha_x is None:
            object.__setattr__(self, "alpha_x", self.alpha_z / 3.0)
        if self.n_basis < 2:
            raise InputError("n_basis must be >= 2")
        if self.alpha_z <= 0 or self.beta_z <= 0 or self.alpha_x <= 0:
            raise InputError("alpha_z, beta_z, alpha_x must be positive")


def basis_centers(cfg: DmpConfig) -> tuple[np.ndarray, np.ndarray]:
    """Centers uniform in time (c_i = exp(-alpha_x * i/(N-1))) and widths
    from squared inverse gaps, last width repeated."""
    i = np.arange(cfg.n_basis, dtype=np.float64)
    c = np.exp(-cfg.alpha_x * i / (cfg.n_basis - 1))
    gaps = np.diff(c)
    h = np.empty(cfg.n_basis)
    h[:-1] = 1.0 / gaps**2
    h[-1] = h[-2]
    return c, h


def phase(t, tau: float, alpha_x: float):
    """Canonical clock x = exp(-alpha_x * t / tau), valid for t >= 0."""
    if tau <= 0.0:
        raise InputError("tau must be positive")
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0):
        raise InputError("phase is defined for t >= 0")
    out = np.exp(-alpha_x * t / tau)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DmpModel:
    config: DmpConfig
    tau: float
    dims: int
    y0: np.ndarray
    goal: np.ndarray
    centers: np.ndarray
    widths: np.ndarray
    weights: np.ndarray  # (dims, n_basis)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    phases: np.ndarray


def fit_dmp(rec: Recording, stream: str, cfg: DmpConfig | None = None) -> DmpModel:
    """Fit forcing-term weights from one demonstrated stream.

    Start/goal come from the first/last frame, tau = (frames-1)*dt, and
    derivatives from central differences (one-sided at the ends). A
    dimension whose amplitude |g - y0| is under cfg.amplitude_floor gets
    all-zero weights.
    """
    cfg = cfg or DmpConfig()
    if stream not in rec.streams:
        raise FitError(f"stream {stream!r} not present in recording")
    if rec.frames < 3:
        raise FitError(f"need at least 3 frames to fit, got {rec.frames}")
    y = rec.streams[stream].samples
    if not np.isfinite(y).all():
        raise FitError(f"stream {stream!r} contains non-finite samples")

    dt = rec.dt
    tau = (rec.frames - 1) * dt
    t = np.arange(rec.frames, dtype=np.float64) * dt
    x = np.exp(-cfg.alpha_x * t / tau)
    c, h = basis_centers(cfg)
    psi = np.exp(-h * (x[:, None] - c) ** 2)  # (frames, n_basis)
    psi_sums = psi.sum(axis=0)

    y0 = y[0].copy()
    g = y[-1].copy()
    yd = np.gradient(y, dt, axis=0)
    ydd = np.gradient(yd, dt, axis=0)

    dims = y.shape[1]
    weights = np.zeros((dims, cfg.n_basis))
    for d in range(dims):
        amp = g[d] - y0[d]
        if abs(amp) < cfg.amplitude_floor:
            continue
        f_target = tau**2 * ydd[:, d] - cfg.alpha_z * (
            cfg.beta_z * (g[d] - y[:, d]) - tau * yd[:, d]
        )
        xi = x * amp
        num = psi.T @ (xi * f_target)
        den = psi.T @ (xi * xi) + _LWR_RIDGE * psi_sums
        weights[d] = num / den

    return DmpModel(config=cfg, tau=tau, dims=dims, y0=y0, goal=g,
                    centers=c, widths=h, weights=weights)


def _step_count(tau: float, dt: float) -> int:
    ratio = tau / dt
    r = round(ratio)
    if abs(ratio - r) <= 1e-9 * max(1.0, abs(r)):
        return max(int(r), 1)
    return max(int(math.ceil(ratio)), 1)


def rollout_dmp(model: DmpModel, y0, goal, tau: float, dt: float) -> Trajectory:
    """Integrate the coupled canonical/transformation systems with RK4 from
    t=0 to t=tau inclusive, forcing scaled by the new amplitude goal - y0."""
    if tau <= 0.0 or dt <= 0.0:
        raise InputError("tau and dt must be positive")
    if dt > tau / 10.0 * (1.0 + 1e-12):
        raise InputError(f"dt={dt:g} too coarse for tau={tau:g} (need dt <= tau/10)")
    y0 = np.asarray(y0, dtype=np.float64)
    goal = np.asarray(goal, dtype=np.float64)
    if y0.shape != (model.dims,) or goal.shape != (model.dims,):
        raise InputError(f"start/goal must have {model.dims} dimensions")

    n = _step_count(tau, dt)
    amp = goal - y0
    c, h, w = model.centers, model.widths, model.weights
    alpha_z, beta_z, alpha_x = model.config.alpha_z, model.config.beta_z, model.config.alpha_x

    def deriv(y, z, x):
        psi = np.exp(-h * (x - c) ** 2)
        den = psi.sum()
        if den > 0.0:
            f = (w @ psi) * (x / den) * amp
        else:
            f = np.zeros_like(amp)
        dy = z / tau
        dz = (alpha_z * (beta_z * (goal - y) - z) + f) / tau
        dx = -alpha_x * x / tau
        return dy, dz, dx

    positions = np.empty((n + 1, model.dims))
    velocities = np.empty((n + 1, model.dims))
    phases = np.empty(n + 1)
    y = y0.copy()
    z = np.zeros(model.dims)
    x = 1.0
    positions[0], velocities[0], phases[0] = y, z / tau, x

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n + 1):
            k1y, k1z, k1x = deriv(y, z, x)
            k2y, k2z, k2x = deriv(y + 0.5 * dt * k1y, z + 0.5 * dt * k1z, x + 0.5 * dt * k1x)
            k3y, k3z, k3x = deriv(y + 0.5 * dt * k2y, z + 0.5 * dt * k2z, x + 0.5 * dt * k2x)
            k4y, k4z, k4x = deriv(y + dt * k3y, z + dt * k3z, x + dt * k3x)
            y = y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            z = z + (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
            x = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            if not (np.isfinite(y).all() and np.isfinite(z).all() and math.isfinite(x)):
                raise RolloutError(f"non-finite state at step {k}")
            positions[k], velocities[k], phases[k] = y, z / tau, x

    times = np.arange(n + 1, dtype=np.float64) * dt
    return Trajectory(times=times, positions=positions, velocities=velocities, phases=phases)


# --- quaternion orientation variant -----------------------------------------

@dataclass(frozen=True)
class OrientationDmp:
    config: DmpConfig
    tau: float
    q0: np.ndarray
    q_goal: np.ndarray
    centers: np.ndarray
    widths: np.ndarray
    weights: np.ndarray  # (3, n_basis)


@dataclass(frozen=True)
class QuaternionTrajectory:
    times: np.ndarray
    quaternions: np.ndarray
    omegas: np.ndarray
    phases: np.ndarray


def _rotation_error(q_goal: np.ndarray, q: np.ndarray) -> np.ndarray:
    return 2.0 * quat.log(quat.multiply(q_goal, quat.conjugate(q)))


def fit_orientation_dmp(rec: Recording, stream: str,
                        cfg: DmpConfig | None = None) -> OrientationDmp:
    """Fit on the rotation-vector error toward the final orientation."""
    cfg = cfg or DmpConfig()
    if stream not in rec.streams:
        raise FitError(f"stream {stream!r} not present in recording")
    if rec.frames < 3:
        raise FitError(f"need at least 3 frames to fit, got {rec.frames}")
    s = rec.streams[stream]
    if s.dims != 4:
        raise FitError(f"stream {stream!r} is not a quaternion stream")
    q = s.samples
    if not np.isfinite(q).all():
        raise FitError(f"stream {stream!r} contains non-finite samples")
    norms = np.linalg.norm(q, axis=1)
    if np.any(norms == 0.0):
        raise FitError(f"stream {stream!r} contains a zero-norm quaternion")
    if np.any(np.abs(norms - 1.0) > 1e-6):
        raise FitError(f"stream {stream!r} is not unit-norm")
    q = quat.align_signs(q / norms[:, None])

    dt = rec.dt
    tau = (rec.frames - 1) * dt
    n = rec.frames
    q_goal = q[-1].copy()

    e = np.empty((n, 3))
    for k in range(n):
        e[k] = _rotation_error(q_goal, q[k])

    # scaled angular velocity v = tau * Omega, central differences inside
    omega = np.empty((n, 3))
    omega[0] = 2.0 * quat.log(quat.multiply(q[1], quat.conjugate(q[0]))) / dt
    omega[-1] = 2.0 * quat.log(quat.multiply(q[-1], quat.conjugate(q[-2]))) / dt
    for k in range(1, n - 1):
        omega[k] = 2.0 * quat.log(quat.multiply(q[k + 1], quat.conjugate(q[k - 1]))) / (2.0 * dt)
    v = tau * omega
    vdot = np.gradient(v, dt, axis=0)

    t = np.arange(n, dtype=np.float64) * dt
    x = np.exp(-cfg.alpha_x * t / tau)
    c, h = basis_centers(cfg)
    psi = np.exp(-h * (x[:, None] - c) ** 2)
    psi_sums = psi.sum(axis=0)

    e0 = e[0]
    weights = np.zeros((3, cfg.n_basis))
    for a in range(3):
        if abs(e0[a]) < cfg.amplitude_floor:
            continue
        f_target = tau * vdot[:, a] - cfg.alpha_z * (cfg.beta_z * e[:, a] - v[:, a])
        xi = x * e0[a]
        num = psi.T @ (xi * f_target)
        den = psi.T @ (xi * xi) + _LWR_RIDGE * psi_sums
        weights[a] = num / den

    return OrientationDmp(config=cfg, tau=tau, q0=q[0].copy(), q_goal=q_goal,
                          centers=c, widths=h, weights=weights)


def rollout_orientation_dmp(model: OrientationDmp, q0, q_goal,
                            tau: float, dt: float) -> QuaternionTrajectory:
    """Integrate the rotational system, stepping q by the exponential map
    and renormalizing each step."""
    if tau <= 0.0 or dt <= 0.0:
        raise InputError("tau and dt must be positive")
    if dt > tau / 10.0 * (1.0 + 1e-12):
        raise InputError(f"dt={dt:g} too coarse for tau={tau:g} (need dt <= tau/10)")
    q = quat.normalize(np.asarray(q0, dtype=np.float64))
    qg = quat.normalize(np.asarray(q_goal, dtype=np.float64))

    n = _step_count(tau, dt)
    c, h, w = model.centers, model.widths, model.weights
    alpha_z, beta_z, alpha_x = model.config.alpha_z, model.config.beta_z, model.config.alpha_x
    e0 = _rotation_error(qg, q)

    quats = np.empty((n + 1, 4))
    omegas = np.empty((n + 1, 3))
    phases = np.exp(-alpha_x * (np.arange(n + 1, dtype=np.float64) * dt) / tau)
    v = np.zeros(3)
    quats[0], omegas[0] = q, v

    for k in range(1, n + 1):
        x = phases[k - 1]
        psi = np.exp(-h * (x - c) ** 2)
        den = psi.sum()
        f = (w @ psi) * (x / den) * e0 if den > 0.0 else np.zeros(3)
        e = _rotation_error(qg, q)
        vdot = (alpha_z * (beta_z * e - v) + f) / tau
        v = v + dt * vdot
        q = quat.multiply(quat.exp((dt / (2.0 * tau)) * v), q)
        q = q / np.linalg.norm(q)
        if not (np.isfinite(q).all() and np.isfinite(v).all()):
            raise RolloutError(f"non-finite state at step {k}")
        quats[k], omegas[k] = q, v

    times = np.arange(n + 1, dtype=np.float64) * dt
    return QuaternionTrajectory(times=times, quaternions=quats, omegas=omegas, phases=phases)
