"""Minimal unit-quaternion helpers, scalar-first convention (w, x, y, z)."""
from __future__ import annotations

import numpy as np

from .errors import InputError

_SMALL = 1e-12


def normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    n = float(np.linalg.norm(q))
    if n == 0.0:
        raise InputError("zero-norm quaternion")
    return q / n


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a * b."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def log(q: np.ndarray) -> np.ndarray:
    """Logarithmic map to a half-rotation vector (rotation vector = 2*log)."""
    w, v = q[0], np.asarray(q[1:], dtype=np.float64)
    if w < 0.0:  # q and -q are the same rotation; keep the principal branch
        w, v = -w, -v
    s = float(np.linalg.norm(v))
    if s < _SMALL:
        return v.copy()
    return (np.arctan2(s, w) / s) * v


def exp(r: np.ndarray) -> np.ndarray:
    """Exponential map of a half-rotation vector."""
    r = np.asarray(r, dtype=np.float64)
    a = float(np.linalg.norm(r))
    if a < _SMALL:
        return normalize(np.array([1.0, r[0], r[1], r[2]]))
    scale = np.sin(a) / a
    return np.array([np.cos(a), scale * r[0], scale * r[1], scale * r[2]])


def geodesic_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Angle of the relative rotation between two unit quaternions, in rad."""
    d = abs(float(np.dot(a, b)))
    return 2.0 * float(np.arccos(min(1.0, d)))


def nlerp(a: np.ndarray, b: np.ndarray, u: float) -> np.ndarray:
    """Normalized linear interpolation; exact at the endpoints."""
    if u <= 0.0:
        return np.asarray(a, dtype=np.float64).copy()
    if u >= 1.0:
        return np.asarray(b, dtype=np.float64).copy()
    b = np.asarray(b, dtype=np.float64)
    if float(np.dot(a, b)) < 0.0:
        b = -b
    return normalize((1.0 - u) * np.asarray(a, dtype=np.float64) + u * b)


def align_signs(qs: np.ndarray) -> np.ndarray:
    """Flip signs along a quaternion series so consecutive dots are >= 0."""
    out = np.array(qs, dtype=np.float64, copy=True)
    for i in range(1, out.shape[0]):
        if float(np.dot(out[i - 1], out[i])) < 0.0:
            out[i] = -out[i]
    return out
