import time

import pytest
from fastapi.testclient import TestClient

from teleskill import documents
from teleskill.insertion_sim import SceneConfig, nominal_start_pose
from teleskill.pipeline import run_fit, run_reproduce
from teleskill.recording import read_archive
from teleskill.service.app import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(recordings_dir=str(tmp_path / "recordings"))
    with TestClient(app) as c:
        yield c


def test_healthz(client):
    resp = client.get("/healthz")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_scene_endpoint_matches_defaults(client):
    resp = client.get("/scene")
    assert resp.status_code == 200
    assert resp.json() == documents.scene_to_document(SceneConfig())


def test_pipeline_endpoints_end_to_end(client, tmp_path):
    archive = tmp_path / "demo"
    resp = client.post("/pipeline/demo-gen", json={"out_path": str(archive)})
    assert resp.status_code == 200
    assert resp.json()["frames"] == 401

    skill = tmp_path / "skill.json"
    resp = client.post("/pipeline/fit",
                       json={"archive_path": str(archive), "out_path": str(skill)})
    assert resp.status_code == 200
    assert resp.json()["k"] == 5

    episode = tmp_path / "episode.json"
    resp = client.post("/pipeline/reproduce",
                       json={"skill_path": str(skill), "out_path": str(episode)})
    assert resp.status_code == 200
    assert resp.json()["success"] is True


def test_error_mapping_kinds(client, tmp_path):
    resp = client.post("/pipeline/fit",
                       json={"archive_path": str(tmp_path / "missing"),
                             "out_path": str(tmp_path / "skill.json")})
    assert resp.status_code == 400
    assert resp.json()["detail"]["kind"] == "input"


def _drain_until(ws, predicate, max_frames=500):
    for _ in range(max_frames):
        frame = ws.receive_json()
        if predicate(frame):
            return frame
    raise AssertionError("expected frame never arrived")


def test_ws_state_stream_and_loopback_recording(client, tmp_path):
    scene = SceneConfig()
    start = nominal_start_pose(scene)
    with client.websocket_connect("/ws") as ws:
        first = ws.receive_json()
        assert first["type"] == "state"
        assert len(first["cmd"]) == 3 and len(first["wrench"]) == 3
        assert len(first["contacts"]) == 5
        assert not first["recording"]

        ws.send_json({"type": "start_recording"})
        frame = _drain_until(ws, lambda f: f.get("recording") is True)

        # hold the pose at the state for ~1.2 s of wall clock
        cmd = {"type": "pose", "x": float(start[0]), "y": float(start[1]),
               "yaw": 0.0, "grip": 1.0}
        deadline = time.monotonic() + 1.2
        while time.monotonic() < deadline:
            ws.send_json(cmd)
            frame = ws.receive_json()
        ws.send_json({"type": "stop_recording", "save_as": "loopback"})
        saved = _drain_until(ws, lambda f: f["type"] in ("saved", "error"))
        assert saved["type"] == "saved", saved

    rec = read_archive(saved["path"])
    assert set(rec.streams) == {"pose", "pose_actual", "wrench", "grip"}
    assert 80 <= rec.frames <= 140  # ~100 frames per second of recording
    assert rec.dt == 0.01


def test_ws_two_sessions_are_isolated(client):
    with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
        a.send_json({"type": "pose", "x": 0.5, "y": 0.5, "yaw": 0.0, "grip": 1.0})
        deadline = time.monotonic() + 0.3
        last_a = last_b = None
        while time.monotonic() < deadline:
            last_a = a.receive_json()
            last_b = b.receive_json()
        assert last_a["cmd"][0] == 0.5
        assert last_b["cmd"][0] != 0.5  # untouched session keeps its start pose


def test_ws_stop_without_start_is_error(client):
    with client.websocket_connect("/ws") as ws:
        ws.receive_json()
        ws.send_json({"type": "stop_recording", "save_as": "x"})
        frame = _drain_until(ws, lambda f: f["type"] == "error")
        assert "no recording" in frame["reason"]


def test_ws_at_most_one_recording_per_session(client):
    with client.websocket_connect("/ws") as ws:
        ws.receive_json()
        ws.send_json({"type": "start_recording"})
        ws.send_json({"type": "start_recording"})
        frame = _drain_until(ws, lambda f: f["type"] == "error")
        assert "already active" in frame["reason"]


def test_ws_malformed_message_keeps_session(client):
    with client.websocket_connect("/ws") as ws:
        ws.receive_json()
        ws.send_text("this is not json")
        frame = _drain_until(ws, lambda f: f["type"] == "error")
        assert "malformed" in frame["reason"]
        # session still alive: state frames keep flowing
        assert _drain_until(ws, lambda f: f["type"] == "state")


def test_ws_reset_applies_offsets(client):
    with client.websocket_connect("/ws") as ws:
        ws.receive_json()
        ws.send_json({"type": "reset", "dx": 0.01, "dy": 0.02, "dyaw": 0.1})
        scene = SceneConfig()
        start = nominal_start_pose(scene)
        frame = _drain_until(
            ws, lambda f: f["type"] == "state"
            and abs(f["actual"][0] - (start[0] + 0.01)) < 1e-12
        )
        assert abs(frame["actual"][1] - (start[1] + 0.02)) < 1e-12
        assert abs(frame["actual"][2] - 0.1) < 1e-12


def test_ws_recorded_teleop_session_feeds_fit_pipeline(client, tmp_path):
    """A synthetic operator reproduces the expert profile over the socket;
    the resulting archive must fit and reproduce successfully."""
    from teleskill.insertion_sim import scripted_demonstrate

    scene = SceneConfig()
    demo = scripted_demonstrate(scene)
    poses = demo.streams["pose"].samples  # commanded trajectory to replay

    with client.websocket_connect("/ws") as ws:
        ws.receive_json()
        ws.send_json({"type": "start_recording"})
        # paced by the 100 Hz state stream: one command per frame replays the
        # 4 s demonstration in about real time
        for k in range(poses.shape[0]):
            ws.send_json({"type": "pose", "x": float(poses[k, 0]),
                          "y": float(poses[k, 1]), "yaw": float(poses[k, 2]),
                          "grip": 1.0})
            ws.receive_json()
        ws.send_json({"type": "stop_recording", "save_as": "teleop_demo"})
        saved = _drain_until(ws, lambda f: f["type"] in ("saved", "error"))
        assert saved["type"] == "saved", saved

    skill_path = tmp_path / "skill.json"
    run_fit(saved["path"], str(skill_path))
    summary = run_reproduce(str(skill_path), None, str(tmp_path / "episode.json"))
    assert summary["success"] is True
