"""Demonstration data model: raw streams, time synchronization, archives.

A demonstration is a set of named channels sampled on one uniform grid
t0 + k*dt (always computed in that order: k*dt first, then + t0). Raw
teleoperation streams arrive on their own clocks and are resampled onto
the grid by linear interpolation; quaternion channels (units == "quat")
use normalized linear interpolation instead. The on-disk archive is a
directory or zip with a JSON manifest and one CSV per stream, floats
serialized with shortest round-trip text so read(write(rec)) == rec.
"""
from __future__ import annotations

import json
import math
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import quaternions as quat
from .errors import ArchiveError, InputError

ARCHIVE_VERSION = "1"
QUAT_UNITS = "quat"
DEFAULT_DT = 0.01

_QUAT_NORM_TOL = 1e-9


def grid_times(t0: float, dt: float, frames: int) -> np.ndarray:
    """Uniform grid t0 + k*dt, k*dt computed first."""
    return np.arange(frames, dtype=np.float64) * dt + t0


@dataclass(frozen=True)
class RawStream:
    """One raw channel: strictly increasing timestamps, fixed-width samples."""

    name: str
    timestamps: np.ndarray
    samples: np.ndarray
    units: str = ""

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.float64)
        xs = np.asarray(self.samples, dtype=np.float64)
        if xs.ndim == 1:
            xs = xs[:, None]
        if ts.ndim != 1 or ts.size < 2:
            raise InputError(f"stream {self.name!r}: need at least 2 timestamps")
        if xs.shape[0] != ts.size:
            raise InputError(
                f"stream {self.name!r}: {xs.shape[0]} samples for {ts.size} timestamps"
            )
        if not np.all(np.diff(ts) > 0.0):
            raise InputError(f"stream {self.name!r}: timestamps not strictly increasing")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "samples", xs)

    @property
    def dims(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class Stream:
    """A uniform-rate channel inside a Recording."""

    samples: np.ndarray
    units: str = ""

    def __post_init__(self):
        xs = np.asarray(self.samples, dtype=np.float64)
        if xs.ndim == 1:
            xs = xs[:, None]
        object.__setattr__(self, "samples", xs)

    @property
    def dims(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class Recording:
    """Time-synchronized demonstration channels on a common grid."""

    dt: float
    t0: float
    frames: int
    streams: dict[str, Stream]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dt <= 0.0:
            raise InputError("recording dt must be positive")
        if self.frames < 2:
            raise InputError("recording needs at least 2 frames")

    @property
    def times(self) -> np.ndarray:
        return grid_times(self.t0, self.dt, self.frames)

    @property
    def duration(self) -> float:
        return (self.frames - 1) * self.dt


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; frame is -1 for stream-level rules."""

    stream: str
    frame: int
    rule: str
    message: str


def synchronize(
    raw: Sequence[RawStream], dt: float, *, metadata: dict | None = None
) -> Recording:
    """Resample raw streams onto the common grid over their overlap.

    The grid origin is the latest stream start; data outside the overlap is
    discarded. Linear interpolation per component, NLERP for quaternion
    streams. Interpolation at grid points that coincide with source samples
    is exact.
    """
    if not raw:
        raise InputError("synchronize: no input streams")
    if dt <= 0.0:
        raise InputError("synchronize: dt must be positive")
    names = [s.name for s in raw]
    if len(set(names)) != len(names):
        raise InputError("synchronize: duplicate stream names")

    t0 = max(float(s.timestamps[0]) for s in raw)
    t_end = min(float(s.timestamps[-1]) for s in raw)
    if t_end <= t0:
        raise InputError("synchronize: no temporal overlap between streams")
    if t_end - t0 < 2.0 * dt:
        raise InputError(
            f"synchronize: overlap {t_end - t0:.6g}s shorter than 2*dt = {2 * dt:.6g}s"
        )

    frames = int(math.floor((t_end - t0) / dt + 1e-9)) + 1
    times = grid_times(t0, dt, frames)

    streams: dict[str, Stream] = {}
    for s in raw:
        if s.units == QUAT_UNITS:
            samples = _resample_quaternions(s.timestamps, s.samples, times)
        else:
            samples = np.empty((frames, s.dims))
            for d in range(s.dims):
                samples[:, d] = np.interp(times, s.timestamps, s.samples[:, d])
        streams[s.name] = Stream(samples, s.units)

    return Recording(dt=dt, t0=t0, frames=frames, streams=streams,
                     metadata=dict(metadata or {}))


def _resample_quaternions(ts: np.ndarray, qs: np.ndarray, times: np.ndarray) -> np.ndarray:
    if qs.shape[1] != 4:
        raise InputError("quaternion stream must have 4 components")
    out = np.empty((times.size, 4))
    idx = np.clip(np.searchsorted(ts, times, side="right") - 1, 0, ts.size - 2)
    for k, t in enumerate(times):
        i = int(idx[k])
        span = ts[i + 1] - ts[i]
        u = (t - ts[i]) / span
        out[k] = quat.nlerp(qs[i], qs[i + 1], float(u))
    return out


def validate(rec: Recording) -> list[Diagnostic]:
    """Check Recording invariants; empty list means all hold."""
    out: list[Diagnostic] = []
    for name, stream in rec.streams.items():
        n = stream.samples.shape[0]
        if n != rec.frames:
            out.append(Diagnostic(
                stream=name, frame=-1, rule="frame-count",
                message=f"stream {name!r} has {n} frames, recording declares {rec.frames}",
            ))
        bad = np.where(~np.isfinite(stream.samples).all(axis=1))[0]
        for k in bad:
            out.append(Diagnostic(
                stream=name, frame=int(k), rule="finite",
                message=f"stream {name!r} frame {int(k)}: non-finite sample",
            ))
        if stream.units == QUAT_UNITS:
            norms = np.linalg.norm(stream.samples, axis=1)
            for k in np.where(np.abs(norms - 1.0) > _QUAT_NORM_TOL)[0]:
                out.append(Diagnostic(
                    stream=name, frame=int(k), rule="unit-quaternion",
                    message=(f"stream {name!r} frame {int(k)}: quaternion norm "
                             f"{norms[k]:.12g} not within {_QUAT_NORM_TOL} of 1"),
                ))
    return out


# --- archive I/O -------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _stream_csv(times: np.ndarray, samples: np.ndarray) -> str:
    header = "t," + ",".join(f"c{i}" for i in range(samples.shape[1]))
    lines = [header]
    for t, row in zip(times, samples):
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in row]))
    return "\n".join(lines) + "\n"


def _parse_stream_csv(name: str, text: str, dims: int, frames: int) -> np.ndarray:
    lines = text.splitlines()
    if not lines:
        raise ArchiveError(f"stream {name!r}: empty csv")
    header = lines[0].split(",")
    if len(header) != dims + 1:
        raise ArchiveError(
            f"stream {name!r}: csv has {len(header) - 1} components, manifest declares {dims}"
        )
    rows = [ln for ln in lines[1:] if ln]
    if len(rows) != frames:
        raise ArchiveError(
            f"stream {name!r}: csv has {len(rows)} rows, manifest declares {frames} frames"
        )
    out = np.empty((frames, dims))
    for k, ln in enumerate(rows):
        parts = ln.split(",")
        if len(parts) != dims + 1:
            raise ArchiveError(f"stream {name!r}: row {k} has {len(parts) - 1} components")
        out[k] = [float(p) for p in parts[1:]]
    return out


def _manifest(rec: Recording) -> dict:
    return {
        "version": ARCHIVE_VERSION,
        "dt": rec.dt,
        "frames": rec.frames,
        "t0": rec.t0,
        "streams": [
            {"name": name, "dims": stream.dims, "units": stream.units}
            for name, stream in rec.streams.items()
        ],
        "metadata": rec.metadata,
    }


def write_archive(rec: Recording, path: str | Path) -> None:
    """Write a Recording as a directory archive, or zip if path ends in .zip."""
    path = Path(path)
    files = {"manifest.json": json.dumps(_manifest(rec), indent=2) + "\n"}
    times = rec.times
    for name, stream in rec.streams.items():
        files[f"streams/{name}.csv"] = _stream_csv(times, stream.samples)

    if path.suffix == ".zip":
        path.parent.mkdir(parents=True, exist_ok=True)
        with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as zf:
            for rel, text in files.items():
                zf.writestr(rel, text)
    else:
        (path / "streams").mkdir(parents=True, exist_ok=True)
        for rel, text in files.items():
            (path / rel).write_text(text, encoding="utf-8", newline="\n")


def read_archive(path: str | Path) -> Recording:
    """Read an archive written by write_archive; exact float round trip."""
    path = Path(path)
    if path.is_file():
        if not zipfile.is_zipfile(path):
            raise ArchiveError(f"{path}: not a zip archive or archive directory")
        with zipfile.ZipFile(path) as zf:
            names = set(zf.namelist())

            def load(rel: str) -> str:
                if rel not in names:
                    raise ArchiveError(f"{path}: missing {rel}")
                return zf.read(rel).decode("utf-8")

            return _read_archive_files(path, load)
    if not path.is_dir():
        raise ArchiveError(f"{path}: no such archive")

    def load(rel: str) -> str:
        fp = path / rel
        if not fp.is_file():
            raise ArchiveError(f"{path}: missing {rel}")
        return fp.read_text(encoding="utf-8")

    return _read_archive_files(path, load)


def _read_archive_files(path: Path, load) -> Recording:
    try:
        manifest = json.loads(load("manifest.json"))
    except json.JSONDecodeError as exc:
        raise ArchiveError(f"{path}: malformed manifest.json: {exc}") from exc

    version = manifest.get("version")
    if version != ARCHIVE_VERSION:
        raise ArchiveError(f"{path}: unsupported archive version {version!r}")
    try:
        dt = float(manifest["dt"])
        frames = int(manifest["frames"])
        t0 = float(manifest["t0"])
        declared = manifest["streams"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ArchiveError(f"{path}: manifest missing or malformed field: {exc}") from exc

    streams: dict[str, Stream] = {}
    for entry in declared:
        name, dims, units = entry["name"], int(entry["dims"]), entry.get("units", "")
        text = load(f"streams/{name}.csv")
        streams[name] = Stream(_parse_stream_csv(name, text, dims, frames), units)

    return Recording(dt=dt, t0=t0, frames=frames, streams=streams,
                     metadata=manifest.get("metadata", {}))


def recordings_equal(a: Recording, b: Recording) -> bool:
    """Exact field-by-field equality (bit-level on all samples)."""
    if (a.dt != b.dt or a.t0 != b.t0 or a.frames != b.frames
            or a.metadata != b.metadata or set(a.streams) != set(b.streams)):
        return False
    for name, sa in a.streams.items():
        sb = b.streams[name]
        if sa.units != sb.units or sa.samples.shape != sb.samples.shape:
            return False
        if not np.array_equal(sa.samples, sb.samples):
            return False
    return True
