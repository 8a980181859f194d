"""Per-connection teleoperation sessions.

Each websocket session owns an isolated simulator. The server loop calls
tick() at a fixed wall-clock cadence: the latest commanded pose is latched
and held, the simulator is substepped to cover one control period, and the
resulting state frame is returned for streaming. While a recording is
active every tick appends one row to the raw stream buffers (commanded
pose, measured pose, wrench, grip); stop_recording synchronizes them onto
the uniform grid and writes a demonstration archive.
"""
from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from ..errors import TeleskillError
from ..insertion_sim import PlanarPlugSim, SceneConfig, nominal_start_pose
from ..recording import RawStream, synchronize, write_archive
from . import schemas

_session_ids = itertools.count(1)


class TeleopSession:
    def __init__(self, scene: SceneConfig, recordings_dir: str | Path,
                 cadence: float = 0.01):
        self.id = next(_session_ids)
        self.scene = scene
        self.recordings_dir = Path(recordings_dir)
        self.cadence = cadence
        self.substeps = round(cadence / scene.dt)
        self.sim = PlanarPlugSim(scene, nominal_start_pose(scene))
        self.cmd = np.array(self.sim.state.cmd)
        self.grip = 1.0
        self.recording = False
        self._buffers: dict[str, list] | None = None

    # -- message handling (serialized with tick() on the event loop) ----------

    def handle(self, text: str) -> dict | None:
        """Apply one client frame; returns an error/ack frame dict or None."""
        try:
            msg = schemas.client_message_adapter.validate_json(text)
        except ValidationError as exc:
            return schemas.ErrorFrame(reason=f"malformed message: {exc.errors()[0]['msg']}").model_dump()

        if isinstance(msg, schemas.PoseMessage):
            self.cmd = np.array([msg.x, msg.y, msg.yaw])
            self.grip = msg.grip
            return None
        if isinstance(msg, schemas.StartRecordingMessage):
            if self.recording:
                return schemas.ErrorFrame(reason="recording already active").model_dump()
            self.recording = True
            self._buffers = {"t": [], "pose": [], "pose_actual": [], "wrench": [], "grip": []}
            return None
        if isinstance(msg, schemas.StopRecordingMessage):
            return self._stop_recording(msg.save_as)
        if isinstance(msg, schemas.ResetMessage):
            if self.recording:
                return schemas.ErrorFrame(
                    reason="cannot reset while a recording is active"
                ).model_dump()
            start = nominal_start_pose(self.scene) + np.array([msg.dx, msg.dy, msg.dyaw])
            self.sim = PlanarPlugSim(self.scene, start)
            self.cmd = start.copy()
            return None
        return schemas.ErrorFrame(reason="unsupported message type").model_dump()

    def _stop_recording(self, save_as: str) -> dict:
        if not self.recording:
            return schemas.ErrorFrame(reason="no recording in progress").model_dump()
        buffers = self._buffers or {"t": []}
        self.recording = False
        self._buffers = None
        if len(buffers["t"]) < 3:
            return schemas.ErrorFrame(reason="recording too short to save").model_dump()

        name = Path(save_as).name
        if not name:
            return schemas.ErrorFrame(reason="save_as must be a file name").model_dump()
        try:
            ts = np.array(buffers["t"])
            raw = [
                RawStream("pose", ts, np.array(buffers["pose"]), "m,m,rad"),
                RawStream("pose_actual", ts, np.array(buffers["pose_actual"]), "m,m,rad"),
                RawStream("wrench", ts, np.array(buffers["wrench"]), "N,N,N*m"),
                RawStream("grip", ts, np.array(buffers["grip"]), ""),
            ]
            rec = synchronize(raw, self.cadence, metadata={
                "task": "plug_insertion", "source": "teleop", "tool": "teleskill",
            })
            path = self.recordings_dir / name
            write_archive(rec, path)
        except (TeleskillError, OSError) as exc:
            return schemas.ErrorFrame(reason=f"archive write failed: {exc}").model_dump()
        return schemas.SavedFrame(path=str(path)).model_dump()

    # -- simulator cadence ------------------------------------------------------

    def tick(self) -> dict:
        """Advance one control period with the latched command; return the
        state frame to stream."""
        cmd = self.cmd
        for _ in range(self.substeps):
            state = self.sim.step(cmd)
        if self.recording and self._buffers is not None:
            self._buffers["t"].append(state.time)
            self._buffers["pose"].append([cmd[0], cmd[1], cmd[2]])
            self._buffers["pose_actual"].append(list(state.pose))
            self._buffers["wrench"].append(list(state.wrench))
            self._buffers["grip"].append([self.grip])
        return schemas.StateFrame(
            t=state.time,
            cmd=[float(v) for v in cmd],
            actual=list(state.pose),
            wrench=list(state.wrench),
            contacts=list(state.corner_contacts) + [state.body_collision],
            recording=self.recording,
        ).model_dump()
