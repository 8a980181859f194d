"""Deterministic planar (x, y, yaw) compliant plug-insertion simulator.

World frame: the socket slot is centered on x = 0 with its top opening in
the plane y = 0 and its floor at y = -socket_depth. Chamfer faces widen
the opening from slot_width/2 to slot_width/2 + chamfer_width at the top.
The strip's flat top face extends wall_extent to each side of the chamfer.
The plug is a rectangle hanging below the end-effector point (its top
center); contact is penalty-based at the four plug corners with a
regularized Coulomb friction law. The end-effector follows the commanded
pose through a spring-damper virtual coupling on unit mass/inertia,
integrated by semi-implicit Euler at a fixed dt, so identical command
streams give bit-identical state trajectories.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DemonstrationError, InputError, SimulationError
from .executor import (AdmittanceConfig, EpisodeResult, ExecutionLimits,
                       SkillModel, execute, plan)
from .recording import Recording, Stream

_STATE_LIMIT = 1e6


@dataclass(frozen=True)
class SceneConfig:
    slot_width: float = 0.020
    socket_depth: float = 0.030
    chamfer_width: float = 0.003
    chamfer_angle: float = math.pi / 4
    plug_width: float = 0.018
    plug_length: float = 0.030
    wall_extent: float = 0.040
    contact_stiffness: float = 5.0e4   # N/m
    contact_damping: float = 50.0      # N*s/m
    friction_coeff: float = 0.3
    # regularization floor: mu*F_n/v_eps*dt must stay < 2 for the explicit
    # friction force to be stable under semi-implicit Euler at the forces
    # this task reaches (~10-30 N)
    friction_v_eps: float = 1.0e-2     # m/s
    coupling_stiffness: float = 2000.0     # N/m per translational axis
    coupling_stiffness_rot: float = 20.0   # N*m/rad
    coupling_damping: float | None = None      # default: critical
    coupling_damping_rot: float | None = None  # default: critical
    dt: float = 1.0e-3

    def __post_init__(self):
        if self.coupling_damping is None:
            object.__setattr__(self, "coupling_damping",
                               2.0 * math.sqrt(self.coupling_stiffness))
        if self.coupling_damping_rot is None:
            object.__setattr__(self, "coupling_damping_rot",
                               2.0 * math.sqrt(self.coupling_stiffness_rot))

    def validate(self) -> None:
        if self.plug_width >= self.slot_width:
            raise InputError(
                f"plug width {self.plug_width:g} must be smaller than slot width "
                f"{self.slot_width:g}"
            )
        positive = ("slot_width", "socket_depth", "chamfer_width", "plug_width",
                    "plug_length", "wall_extent", "contact_stiffness",
                    "coupling_stiffness", "coupling_stiffness_rot", "dt")
        for name in positive:
            if getattr(self, name) <= 0:
                raise InputError(f"scene field {name} must be positive")
        if not 0 < self.chamfer_angle < math.pi / 2:
            raise InputError("chamfer_angle must be in (0, pi/2)")
        if self.friction_coeff < 0 or self.friction_v_eps <= 0:
            raise InputError("friction parameters invalid")

    @property
    def slot_half(self) -> float:
        return self.slot_width / 2.0

    @property
    def opening_half(self) -> float:
        return self.slot_width / 2.0 + self.chamfer_width

    @property
    def chamfer_depth(self) -> float:
        return self.chamfer_width * math.tan(self.chamfer_angle)

    @property
    def floor_y(self) -> float:
        return -self.socket_depth


@dataclass(frozen=True)
class SimState:
    time: float
    cmd: tuple[float, float, float]
    pose: tuple[float, float, float]
    vel: tuple[float, float, float]
    wrench: tuple[float, float, float]
    corner_contacts: tuple[bool, bool, bool, bool]
    body_collision: bool


@dataclass(frozen=True)
class InitialCondition:
    id: str
    dx: float = 0.0
    dy: float = 0.0
    dyaw: float = 0.0
    expected_regime: str = "nominal"

    def __post_init__(self):
        for v in (self.dx, self.dy, self.dyaw):
            if not math.isfinite(v):
                raise InputError("initial condition offsets must be finite")


@dataclass(frozen=True)
class EpisodeSummary:
    id: str
    success: bool
    failure_reason: str | None
    duration: float
    peak_force: float
    wrench_rmse_vs_demo: float | None


@dataclass(frozen=True)
class EvalReport:
    episodes: tuple[EpisodeSummary, ...]
    successes: int
    success_rate: float
    results: tuple[EpisodeResult, ...] = field(default=(), compare=False)


def plug_corners(pose, scene: SceneConfig) -> list[tuple[float, float]]:
    """World positions of the four plug corners: top-left, top-right,
    bottom-right, bottom-left (the end-effector is the top center)."""
    px, py, yaw = float(pose[0]), float(pose[1]), float(pose[2])
    cy, sy = math.cos(yaw), math.sin(yaw)
    w2, length = scene.plug_width / 2.0, scene.plug_length
    out = []
    for bx, by in ((-w2, 0.0), (w2, 0.0), (w2, -length), (-w2, -length)):
        out.append((px + cy * bx - sy * by, py + sy * bx + cy * by))
    return out


def contact_details(pose, vel, scene: SceneConfig):
    """Per-contact breakdown: list of (corner index, point, normal force
    magnitude, tangential force magnitude, force vector), plus the per-corner
    contact flags and the body-collision flag."""
    px, py = float(pose[0]), float(pose[1])
    vx, vy, om = float(vel[0]), float(vel[1]), float(vel[2])
    k_c, d_c = scene.contact_stiffness, scene.contact_damping
    mu, v_eps = scene.friction_coeff, scene.friction_v_eps
    sh, oh = scene.slot_half, scene.opening_half
    floor_y, ch_depth, cw = scene.floor_y, scene.chamfer_depth, scene.chamfer_width
    ch_len = math.hypot(cw, ch_depth)

    contacts = []
    flags = [False, False, False, False]
    body = False

    for ci, (cx_, cy_) in enumerate(plug_corners(pose, scene)):
        # corner velocity = v + omega x r
        rx, ry = cx_ - px, cy_ - py
        cvx = vx - om * ry
        cvy = vy + om * rx

        surfaces = []
        # slot floor
        if abs(cx_) <= sh and cy_ < floor_y:
            surfaces.append((floor_y - cy_, 0.0, 1.0))
        # slot walls (between chamfer bottom and floor)
        if floor_y <= cy_ <= -ch_depth:
            if cx_ < -sh:
                surfaces.append((-sh - cx_, 1.0, 0.0))
            elif cx_ > sh:
                surfaces.append((cx_ - sh, -1.0, 0.0))
        # chamfer faces
        for sign in (-1.0, 1.0):
            ax, ay = sign * oh, 0.0
            dx_, dy_ = (sign * sh - ax) / ch_len, (-ch_depth - ay) / ch_len
            nx, ny = -sign * ch_depth / ch_len, cw / ch_len
            s = (cx_ - ax) * dx_ + (cy_ - ay) * dy_
            if 0.0 <= s <= ch_len:
                pen = -((cx_ - ax) * nx + (cy_ - ay) * ny)
                if pen > 0.0:
                    surfaces.append((pen, nx, ny))
        # strip top face outside the opening: contact and body-collision flag
        if cy_ < 0.0 and oh < abs(cx_) <= oh + scene.wall_extent:
            surfaces.append((-cy_, 0.0, 1.0))
            body = True

        for pen, nx, ny in surfaces:
            flags[ci] = True
            pen_rate = -(cvx * nx + cvy * ny)
            fn = k_c * pen + d_c * pen_rate
            fn = fn if fn > 0.0 else 0.0
            tx, ty = -ny, nx
            vt = cvx * tx + cvy * ty
            ft = -mu * fn * math.tanh(vt / v_eps)
            fx = fn * nx + ft * tx
            fy = fn * ny + ft * ty
            contacts.append((ci, (cx_, cy_), fn, ft, (fx, fy)))

    return contacts, tuple(flags), body


def contact_wrench(pose, vel, scene: SceneConfig):
    """Total contact wrench (Fx, Fy, Mz) reduced to the end-effector point,
    with per-corner contact flags and the body-collision flag."""
    if not all(math.isfinite(float(v)) for v in pose):
        raise InputError("pose must be finite")
    contacts, flags, body = contact_details(pose, vel, scene)
    fx = fy = mz = 0.0
    px, py = float(pose[0]), float(pose[1])
    for _, (cx_, cy_), _, _, (cfx, cfy) in contacts:
        fx += cfx
        fy += cfy
        mz += (cx_ - px) * cfy - (cy_ - py) * cfx
    return np.array([fx, fy, mz]), flags, body


class PlanarPlugSim:
    """Single-owner simulator instance; step() advances exactly one dt."""

    def __init__(self, scene: SceneConfig, start_pose):
        scene.validate()
        self.scene = scene
        self._pose = [float(v) for v in start_pose]
        self._vel = [0.0, 0.0, 0.0]
        self._cmd = list(self._pose)
        self._steps = 0
        wrench, flags, body = contact_wrench(self._pose, self._vel, scene)
        self._wrench = (float(wrench[0]), float(wrench[1]), float(wrench[2]))
        self._contacts = flags
        self._body = body
        self.body_collision_seen = body

    @property
    def state(self) -> SimState:
        return SimState(
            time=self._steps * self.scene.dt,
            cmd=tuple(self._cmd),
            pose=tuple(self._pose),
            vel=tuple(self._vel),
            wrench=self._wrench,
            corner_contacts=self._contacts,
            body_collision=self._body,
        )

    def step(self, cmd) -> SimState:
        cx, cy, cw = float(cmd[0]), float(cmd[1]), float(cmd[2])
        if not (math.isfinite(cx) and math.isfinite(cy) and math.isfinite(cw)):
            raise InputError("commanded pose must be finite")
        sc = self.scene
        wrench, flags, body = contact_wrench(self._pose, self._vel, sc)

        kt, kr = sc.coupling_stiffness, sc.coupling_stiffness_rot
        dt_, dr = sc.coupling_damping, sc.coupling_damping_rot
        px, py, pw = self._pose
        vx, vy, vw = self._vel
        # unit effective mass/inertia: acceleration = coupling + contact
        ax = kt * (cx - px) - dt_ * vx + wrench[0]
        ay = kt * (cy - py) - dt_ * vy + wrench[1]
        aw = kr * (cw - pw) - dr * vw + wrench[2]

        h = sc.dt
        vx += h * ax
        vy += h * ay
        vw += h * aw
        px += h * vx
        py += h * vy
        pw += h * vw

        self._steps += 1
        self._pose = [px, py, pw]
        self._vel = [vx, vy, vw]
        self._cmd = [cx, cy, cw]
        self._wrench = (float(wrench[0]), float(wrench[1]), float(wrench[2]))
        self._contacts = flags
        self._body = body
        self.body_collision_seen = self.body_collision_seen or body

        for v in (px, py, pw, vx, vy, vw):
            if not math.isfinite(v) or abs(v) > _STATE_LIMIT:
                raise SimulationError(
                    f"state diverged at step {self._steps} (t={self._steps * h:.4f}s): "
                    f"pose={self._pose}, vel={self._vel}"
                )
        return self.state

    def plug_depth(self) -> float:
        lowest = min(cy for _, cy in plug_corners(self._pose, self.scene))
        return max(0.0, -lowest)

    def lateral_error(self) -> float:
        return abs(self._pose[0])


# --- scripted expert demonstrator --------------------------------------------

APPROACH_OFFSET_X = -0.020   # demo starts left of the slot, giving the
                             # lateral dimension a learnable amplitude
TIP_CLEARANCE = 0.006        # hover height of the plug tip above the strip
CENTER_TIME = 0.35           # s, lateral smoothstep to the slot center
DESCENT_SPEED = 0.040        # m/s
PUSH_FORCE = 10.0            # N target seating force
PUSH_GAIN = 2e-3             # m/(N*s) force-servo gain
LATERAL_GAIN = 1e-3          # m/(N*s) compliance against Fx
CONTACT_THRESHOLD = 1.0      # N, descent->push transition
DEMO_DURATION = 4.0          # s
RECORD_DT = 0.01             # s


def nominal_start_pose(scene: SceneConfig) -> np.ndarray:
    return np.array([APPROACH_OFFSET_X, scene.plug_length + TIP_CLEARANCE, 0.0])


def _smoothstep(u: float) -> float:
    u = min(1.0, max(0.0, u))
    return u * u * (3.0 - 2.0 * u)


def scripted_demonstrate(scene: SceneConfig, start_pose=None) -> Recording:
    """Three-stage expert policy standing in for a human teleoperator.

    (1) center above the slot, (2) descend until contact, (3) push to seat
    with a target downward force, complying laterally against Fx. The
    recorded "pose" stream is the commanded (operator-side) pose; the
    simulator's measured pose goes to "pose_actual".
    """
    start = np.array(start_pose if start_pose is not None else nominal_start_pose(scene),
                     dtype=np.float64)
    sim = PlanarPlugSim(scene, start)
    substeps = round(RECORD_DT / scene.dt)
    if substeps < 1 or abs(substeps * scene.dt - RECORD_DT) > 1e-9:
        raise InputError("recording dt is not a multiple of simulator dt")
    frames = round(DEMO_DURATION / RECORD_DT) + 1

    cmd = start.copy()
    stage = "center"
    cmd_log = np.empty((frames, 3))
    actual_log = np.empty((frames, 3))
    wrench_log = np.empty((frames, 3))

    for k in range(frames):
        state = sim.state
        cmd_log[k] = cmd
        actual_log[k] = state.pose
        wrench_log[k] = state.wrench
        if k == frames - 1:
            break

        t_next = (k + 1) * RECORD_DT
        fy = state.wrench[1]
        if stage == "center":
            cmd[0] = start[0] * (1.0 - _smoothstep(t_next / CENTER_TIME))
            if t_next >= CENTER_TIME:
                stage = "descend"
        elif stage == "descend":
            cmd[1] -= DESCENT_SPEED * RECORD_DT
            if fy > CONTACT_THRESHOLD:
                stage = "push"
        else:
            cmd[1] -= PUSH_GAIN * (PUSH_FORCE - fy) * RECORD_DT
            cmd[0] += LATERAL_GAIN * state.wrench[0] * RECORD_DT

        for _ in range(substeps):
            sim.step(cmd)

    if sim.plug_depth() < 0.9 * scene.socket_depth:
        raise DemonstrationError(
            f"demonstrator never seated the plug (final depth "
            f"{sim.plug_depth() * 1e3:.2f} mm of {scene.socket_depth * 1e3:.1f} mm)"
        )

    grip = np.ones((frames, 1))
    return Recording(
        dt=RECORD_DT, t0=0.0, frames=frames,
        streams={
            "pose": Stream(cmd_log, "m,m,rad"),
            "pose_actual": Stream(actual_log, "m,m,rad"),
            "wrench": Stream(wrench_log, "N,N,N*m"),
            "grip": Stream(grip, ""),
        },
        metadata={"task": "plug_insertion", "source": "scripted", "tool": "teleskill"},
    )


# --- evaluation harness -------------------------------------------------------

def canonical_conditions() -> list[InitialCondition]:
    """Ten-condition evaluation set: nine nominal lateral/height offsets and
    one extreme offset engineered to strike the strip during the approach."""
    conds = []
    i = 1
    for dy in (0.0, 0.010):
        for dx in (0.0, 0.005, -0.005, 0.010, -0.010):
            if dy == 0.010 and dx == 0.010:
                continue
            conds.append(InitialCondition(id=f"c{i:02d}", dx=dx, dy=dy))
            i += 1
    conds.append(InitialCondition(id="c10", dx=-0.035, dyaw=-0.35,
                                  expected_regime="extreme"))
    return conds


def run_episode(model: SkillModel, scene: SceneConfig, dx=0.0, dy=0.0, dyaw=0.0,
                admittance: AdmittanceConfig | None = None,
                limits: ExecutionLimits | None = None,
                control_dt: float = 0.01, tau_scale: float = 1.5) -> EpisodeResult:
    """One reproduction episode from an offset start pose."""
    admittance = admittance or AdmittanceConfig()
    if limits is None:
        limits = ExecutionLimits(success_depth=0.9 * scene.socket_depth)
    start = model.dmp.y0 + np.array([dx, dy, dyaw])
    tau = model.demo_summary.tau * tau_scale
    plan_ = plan(model, start, model.dmp.goal, tau, control_dt)
    sim = PlanarPlugSim(scene, start)
    return execute(plan_, sim, admittance, limits)


def evaluate(model: SkillModel, conditions, scene: SceneConfig,
             admittance: AdmittanceConfig | None = None,
             limits: ExecutionLimits | None = None,
             control_dt: float = 0.01, tau_scale: float = 1.5) -> EvalReport:
    """Run every initial condition and aggregate success statistics."""
    conditions = list(conditions)
    if not conditions:
        raise InputError("no initial conditions to evaluate")
    summaries = []
    results = []
    for cond in conditions:
        res = run_episode(model, scene, cond.dx, cond.dy, cond.dyaw,
                          admittance, limits, control_dt, tau_scale)
        results.append(res)
        summaries.append(EpisodeSummary(
            id=cond.id, success=res.success, failure_reason=res.failure_reason,
            duration=res.duration, peak_force=res.peak_force,
            wrench_rmse_vs_demo=res.wrench_rmse_vs_demo,
        ))
    successes = sum(1 for s in summaries if s.success)
    return EvalReport(
        episodes=tuple(summaries), successes=successes,
        success_rate=successes / len(summaries), results=tuple(results),
    )
