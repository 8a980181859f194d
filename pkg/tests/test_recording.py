import math

import numpy as np
import pytest

from teleskill.errors import ArchiveError, InputError
from teleskill.quaternions import normalize
from teleskill.recording import (QUAT_UNITS, RawStream, Recording, Stream,
                                 grid_times, read_archive, recordings_equal,
                                 synchronize, validate, write_archive)


def _pose_stream(name="pose", t0=0.0, t1=1.0, dt=0.01):
    ts = np.arange(round((t1 - t0) / dt) + 1) * dt + t0
    xs = np.column_stack([np.sin(ts), np.cos(ts), 0.1 * ts])
    return RawStream(name, ts, xs, "m,m,rad")


def test_rawstream_rejects_non_increasing_timestamps():
    with pytest.raises(InputError):
        RawStream("s", [0.0, 0.0, 0.1], np.zeros((3, 1)))
    with pytest.raises(InputError):
        RawStream("s", [0.0, 0.2, 0.1], np.zeros((3, 1)))


def test_rawstream_rejects_count_mismatch():
    with pytest.raises(InputError):
        RawStream("s", [0.0, 0.1], np.zeros((3, 2)))


def test_synchronize_identity_on_common_grid():
    # streams already on a common grid: interpolation at nodes is exact
    a = _pose_stream("a")
    b = RawStream("b", a.timestamps, np.tanh(a.timestamps)[:, None], "N")
    rec = synchronize([a, b], 0.01)
    assert rec.frames == a.timestamps.size
    assert np.array_equal(rec.streams["a"].samples, a.samples)
    assert np.array_equal(rec.streams["b"].samples, b.samples)
    assert np.array_equal(rec.times, a.timestamps)


def test_synchronize_identity_preserves_quaternions():
    ts = np.arange(51) * 0.01
    qs = np.array([normalize([np.cos(0.3 * t), 0.0, 0.0, np.sin(0.3 * t)]) for t in ts])
    rec = synchronize([RawStream("q", ts, qs, QUAT_UNITS)], 0.01)
    assert np.array_equal(rec.streams["q"].samples, qs)


def test_synchronize_against_piecewise_linear_oracle():
    # stream A on a 10 ms grid over [0, 1], stream B on a 7 ms grid covering
    # [0.1, 0.9]; expected values from an independent pointwise lerp
    ts_a = np.arange(101) * 0.01
    a = RawStream("a", ts_a, (2.0 * ts_a - 0.5)[:, None])
    ts_b = 0.1 + np.arange(115) * 0.007  # last node 0.898 -> extend to cover 0.9
    ts_b = np.append(ts_b, 0.9)
    vals_b = np.sin(3.0 * ts_b)
    b = RawStream("b", ts_b, vals_b[:, None])

    rec = synchronize([a, b], 0.01)
    assert rec.t0 == 0.1
    assert rec.frames == 81

    def lerp_oracle(t):
        for i in range(ts_b.size - 1):
            if ts_b[i] <= t <= ts_b[i + 1]:
                u = (t - ts_b[i]) / (ts_b[i + 1] - ts_b[i])
                return (1 - u) * vals_b[i] + u * vals_b[i + 1]
        raise AssertionError("query outside range")

    for k, t in enumerate(rec.times):
        expected = lerp_oracle(min(t, ts_b[-1]))
        assert abs(rec.streams["b"].samples[k, 0] - expected) < 1e-12


def test_synchronize_disjoint_ranges_error():
    a = RawStream("a", [0.0, 0.1, 0.2], np.zeros((3, 1)))
    b = RawStream("b", [1.0, 1.1, 1.2], np.zeros((3, 1)))
    with pytest.raises(InputError, match="overlap"):
        synchronize([a, b], 0.01)


def test_synchronize_empty_list_error():
    with pytest.raises(InputError):
        synchronize([], 0.01)


def test_synchronize_idempotent(rng):
    streams = []
    for name in ("u", "v"):
        ts = np.arange(64) * 0.01
        streams.append(RawStream(name, ts, rng.normal(size=(64, 2))))
    once = synchronize(streams, 0.01)
    again = synchronize(
        [RawStream(n, once.times, s.samples, s.units) for n, s in once.streams.items()],
        0.01,
    )
    assert recordings_equal(once, again)


def test_grid_times_fixed_evaluation_order():
    times = grid_times(0.1, 0.01, 50)
    k = np.arange(50, dtype=np.float64)
    assert np.array_equal(times, k * 0.01 + 0.1)


@pytest.mark.parametrize("as_zip", [False, True])
def test_archive_round_trip(tmp_path, as_zip):
    rec = Recording(
        dt=0.01, t0=0.125, frames=3,
        streams={
            "pose": Stream(np.array([[0.1, 0.2, 0.3], [0.4, 1 / 3, 0.6], [0.7, 0.8, 0.9]]),
                           "m,m,rad"),
            "grip": Stream(np.array([[1.0], [0.5], [math.pi]]), ""),
        },
        metadata={"task": "t", "source": "scripted"},
    )
    path = tmp_path / ("arc.zip" if as_zip else "arc")
    write_archive(rec, path)
    back = read_archive(path)
    assert recordings_equal(rec, back)


def test_archive_round_trip_real_demo(tmp_path, demo_recording):
    path = tmp_path / "demo"
    write_archive(demo_recording, path)
    assert recordings_equal(demo_recording, read_archive(path))


def test_archive_missing_manifest(tmp_path):
    (tmp_path / "empty").mkdir()
    with pytest.raises(ArchiveError, match="manifest"):
        read_archive(tmp_path / "empty")


def test_archive_frame_mismatch(tmp_path):
    rec = Recording(dt=0.01, t0=0.0, frames=100,
                    streams={"w": Stream(np.zeros((100, 2)), "N")})
    path = tmp_path / "arc"
    write_archive(rec, path)
    csv = path / "streams" / "w.csv"
    lines = csv.read_text().splitlines()
    csv.write_text("\n".join(lines[:-1]) + "\n")  # drop one row: 99 rows vs 100
    with pytest.raises(ArchiveError, match="99"):
        read_archive(path)


def test_archive_unsupported_version(tmp_path):
    rec = Recording(dt=0.01, t0=0.0, frames=2,
                    streams={"w": Stream(np.zeros((2, 1)))})
    path = tmp_path / "arc"
    write_archive(rec, path)
    manifest = path / "manifest.json"
    manifest.write_text(manifest.read_text().replace('"version": "1"', '"version": "2"'))
    with pytest.raises(ArchiveError, match="2"):
        read_archive(path)


def test_validate_clean_recording(demo_recording):
    assert validate(demo_recording) == []


def test_validate_flags_bad_quaternion_norm():
    qs = np.tile([1.0, 0.0, 0.0, 0.0], (10, 1))
    qs[5] *= 1.01
    rec = Recording(dt=0.01, t0=0.0, frames=10,
                    streams={"orientation": Stream(qs, QUAT_UNITS)})
    findings = validate(rec)
    assert len(findings) == 1
    assert findings[0].stream == "orientation"
    assert findings[0].frame == 5
    assert findings[0].rule == "unit-quaternion"


def test_validate_flags_frame_count():
    rec = Recording(
        dt=0.01, t0=0.0, frames=10,
        streams={"pose": Stream(np.zeros((10, 3))), "wrench": Stream(np.zeros((9, 3)))},
    )
    findings = validate(rec)
    assert [f.rule for f in findings] == ["frame-count"]
    assert findings[0].stream == "wrench"
