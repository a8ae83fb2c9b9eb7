"""HTTP API: lifecycle, polling, error codes, concurrency, persistence."""

import threading
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from gesturelab.agents import load_script
from gesturelab.config import AppConfig
from gesturelab.server import create_app

FIXTURES = Path(__file__).parent / "fixtures"


class SlowBackend:
    def __init__(self, inner, delay: float):
        self.inner = inner
        self.delay = delay
        self.model = "slow-scripted"
        self.supports_images = True

    def complete(self, messages):
        time.sleep(self.delay)
        return self.inner.complete(messages)


def fixture_factory(selector: str):
    if selector.startswith("slow:"):
        return SlowBackend(load_script(FIXTURES / selector[5:]), 0.4)
    return load_script(FIXTURES / selector)


@pytest.fixture
def client(tmp_path):
    config = AppConfig()
    config.sessions_dir = tmp_path / "sessions"
    app = create_app(config, backend_factory=fixture_factory)
    return TestClient(app)


def wait_status(client, sid, wanted, timeout=15.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        record = client.get(f"/api/sessions/{sid}").json()
        if record["status"] in wanted:
            return record
        time.sleep(0.02)
    raise AssertionError(f"session {sid} never reached {wanted}")


def create_session(client, gesture="thumbs-up"):
    response = client.post(
        "/api/sessions",
        json={"gesture": gesture, "backend": f"gen_{gesture}.txt"},
    )
    assert response.status_code == 201, response.text
    sid = response.json()["id"]
    return wait_status(client, sid, {"awaiting_feedback", "failed"})


def test_create_session_and_poll(client):
    record = create_session(client)
    assert record["status"] == "awaiting_feedback"
    assert len(record["iterations"]) == 1
    assert record["iterations"][0]["feasibility"]["feasible"] is True
    assert record["refinements_used"] == 0


def test_list_sessions(client):
    record = create_session(client)
    listing = client.get("/api/sessions").json()["sessions"]
    assert [s["id"] for s in listing] == [record["id"]]
    assert listing[0]["i_max"] == 5


def test_unknown_session_404(client):
    response = client.get("/api/sessions/nope")
    assert response.status_code == 404
    assert response.json()["error"]["code"] == "SESSION_NOT_FOUND"


def test_unknown_gesture_422(client):
    response = client.post("/api/sessions", json={"gesture": "macarena"})
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "UNKNOWN_GESTURE"


def test_feedback_flow(client):
    record = create_session(client)
    sid = record["id"]
    response = client.post(
        f"/api/sessions/{sid}/feedback",
        json={"text": "put your hands higher", "backend": "refine_thumbs-up_higher.txt"},
    )
    assert response.status_code == 202
    assert response.json()["status"] == "refining"
    record = wait_status(client, sid, {"awaiting_feedback"})
    assert len(record["iterations"]) == 2
    assert record["iterations"][0]["feedback"] == "put your hands higher"
    h1 = record["iterations"][0]["metrics"]["mean_hand_height"]
    h2 = record["iterations"][1]["metrics"]["mean_hand_height"]
    assert h2["left"] > h1["left"] and h2["right"] > h1["right"]


def test_sixth_feedback_rejected_with_iteration_limit(client):
    record = create_session(client)
    sid = record["id"]
    for i in range(5):
        fixture = "refine_thumbs-up_higher.txt" if i % 2 == 0 else "refine_thumbs-up_lower.txt"
        response = client.post(
            f"/api/sessions/{sid}/feedback",
            json={"text": f"tweak {i}", "backend": fixture},
        )
        assert response.status_code == 202, response.text
        wait_status(client, sid, {"awaiting_feedback"})
    response = client.post(
        f"/api/sessions/{sid}/feedback",
        json={"text": "again", "backend": "refine_thumbs-up_higher.txt"},
    )
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "ITERATION_LIMIT"


def test_empty_feedback_422(client):
    record = create_session(client)
    response = client.post(
        f"/api/sessions/{record['id']}/feedback", json={"text": "   "}
    )
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "EMPTY_FEEDBACK"


def test_concurrent_feedback_exactly_one_wins(client):
    record = create_session(client)
    sid = record["id"]
    codes = []

    def post():
        response = client.post(
            f"/api/sessions/{sid}/feedback",
            json={"text": "higher please", "backend": "slow:refine_thumbs-up_higher.txt"},
        )
        codes.append(response.status_code)

    first = threading.Thread(target=post)
    first.start()
    time.sleep(0.15)  # inside the slow backend's window
    post()
    first.join()
    assert sorted(codes) == [202, 409]
    record = wait_status(client, sid, {"awaiting_feedback"})
    assert len(record["iterations"]) == 2  # only one refinement landed


def test_finalize_and_trajectory(client):
    record = create_session(client)
    sid = record["id"]
    response = client.post(f"/api/sessions/{sid}/finalize", json={"rate": 50.0})
    assert response.status_code == 200, response.text
    body = response.json()
    assert body["samples"] == 226
    assert body["duration"] == pytest.approx(4.5)
    assert body["artifacts"]

    response = client.get(f"/api/sessions/{sid}/trajectory", params={"rate": 50.0})
    assert response.status_code == 200
    payload = response.json()
    assert payload["sample_count"] == 226
    assert len(payload["samples"]) == 226
    assert len(payload["samples"][0]) == 22
    assert len(payload["collision_flags"]) == 226
    assert not any(payload["collision_flags"])
    assert len(payload["joints"]["left"]) == 226
    assert len(payload["joints"]["left"][0]) == 4  # shoulder, elbow, wrist, hand
    assert payload["metrics"]["path_length"]["right"] > 0


def test_trajectory_unknown_iteration_404(client):
    record = create_session(client)
    response = client.get(
        f"/api/sessions/{record['id']}/trajectory", params={"iteration": 7}
    )
    assert response.status_code == 404


def test_gestures_endpoint(client):
    payload = client.get("/api/gestures").json()
    assert len(payload["gestures"]) == 10
    assert {d["name"] for d in payload["demonstrations"]} == {"idle", "right-hand-wave"}


def test_finalized_data_survives_restart(tmp_path):
    config = AppConfig()
    config.sessions_dir = tmp_path / "sessions"
    client1 = TestClient(create_app(config, backend_factory=fixture_factory))
    record = create_session(client1)
    sid = record["id"]
    client1.post(f"/api/sessions/{sid}/finalize", json={})

    client2 = TestClient(create_app(config, backend_factory=fixture_factory))
    reloaded = client2.get(f"/api/sessions/{sid}").json()
    assert reloaded["status"] == "finalized"
    assert reloaded["artifacts"]
