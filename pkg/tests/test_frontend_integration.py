"""End-to-end check of the browser client's logic modules against the live
service: a synthetic operator session drives the compiled UI networking code
over a real websocket, the saved archive feeds the fit pipeline, and the
learned skill reproduces the insertion. Skipped when the frontend build or a
websocket-capable node is unavailable.
"""
import json
import shutil
import socket
import subprocess
import time
from pathlib import Path

import pytest

from teleskill.pipeline import run_fit, run_reproduce

FRONTEND = Path(__file__).resolve().parent.parent / "frontend"


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def _node_supports_websocket() -> bool:
    if shutil.which("node") is None:
        return False
    probe = subprocess.run(
        ["node", "--experimental-websocket", "-e", "console.log(typeof WebSocket)"],
        capture_output=True, text=True,
    )
    return probe.stdout.strip() == "function"


@pytest.mark.skipif(not _node_supports_websocket(), reason="node WebSocket unavailable")
def test_ui_session_archive_fits_and_reproduces(tmp_path, demo_recording):
    if not (FRONTEND / "dist" / "net.js").is_file():
        build = subprocess.run(["npm", "run", "build"], cwd=FRONTEND,
                               capture_output=True, text=True)
        if build.returncode != 0:
            pytest.skip(f"frontend build unavailable: {build.stderr[-300:]}")

    port = _free_port()
    server = subprocess.Popen(
        ["python3", "-m", "uvicorn", "--factory", "teleskill.service.app:create_app",
         "--host", "127.0.0.1", "--port", str(port), "--log-level", "warning"],
        cwd=tmp_path, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )
    try:
        deadline = time.monotonic() + 15.0
        while time.monotonic() < deadline:
            try:
                with socket.create_connection(("127.0.0.1", port), timeout=0.2):
                    break
            except OSError:
                time.sleep(0.1)
        else:
            pytest.fail("service did not come up")

        poses = demo_recording.streams["pose"].samples
        payload = {
            "address": f"ws://127.0.0.1:{port}/ws",
            "poses": poses.tolist(),
            "save_as": "ui_session",
        }
        driver = subprocess.run(
            ["node", "--experimental-websocket", "--no-warnings",
             str(FRONTEND / "tests" / "session_driver.mjs")],
            input=json.dumps(payload), capture_output=True, text=True, timeout=120,
        )
        assert driver.returncode == 0, driver.stderr
        saved = json.loads(driver.stdout)
        archive = tmp_path / saved["path"]
        assert archive.exists()
    finally:
        server.terminate()
        server.wait(timeout=10)

    skill_path = tmp_path / "skill.json"
    run_fit(str(archive), str(skill_path))
    summary = run_reproduce(str(skill_path), None, str(tmp_path / "episode.json"))
    assert summary["success"] is True
