#!/usr/bin/env python3
"""Capture real API responses into frontend/fixtures/ for offline UI tests.

Runs the actual FastAPI app against scripted backends in a temp directory and
snapshots: the gesture library, a session list, a healthy two-iteration
session with its finalized trajectory, a feedback-exhausted session, a failed
session, and a hands-crossing trajectory whose interior samples flag
self-collision.
"""

import json
import sys
import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from gesturelab.agents import dump_script
from gesturelab.config import AppConfig
from gesturelab.kinematics import BodyModel, reach_hand, HandPose
from gesturelab.library import load_bundled
from gesturelab.motion import MotionSequence, MotionState, serialize_sequence
from gesturelab.server import create_app
from gesturelab.trajectory import check_sequence

FIXTURES = Path(__file__).parent.parent / "fixtures"
PKG_FIXTURES = Path(__file__).parent.parent.parent / "tests" / "fixtures"
BODY = BodyModel.default()


def crossing_sequence() -> MotionSequence:
    """Hands sweep through each other: feasible keyframes, colliding samples."""

    def hand_state(model, y):
        pose = HandPose((0.30, y, 0.10), (0.0, 1.2, 0.0))
        check = reach_hand(model, pose, None)
        assert check.feasible, f"crossing pose y={y} unreachable"
        from gesturelab.kinematics import chain_frames, matrix_to_euler

        frames = chain_frames(model, check.config)
        return tuple(frames.hand), matrix_to_euler(frames.rotation)

    ys = [0.18, 0.18, 0.12, 0.05, -0.02, -0.09, -0.15, -0.18, -0.18, -0.18]
    states = []
    for y in ys:
        (lp, lo) = hand_state(BODY.left, y)
        (rp, ro) = hand_state(BODY.right, -y)
        states.append(
            MotionState.from_flat(
                list(lp) + list(lo) + [0.5] * 5 + list(rp) + list(ro) + [0.5] * 5
            )
        )
    seq = MotionSequence(tuple(states), 0.5)
    feas = check_sequence(seq, BODY)
    assert all(c.reach.feasible for c in feas.checks), feas.describe()
    return seq


def wait(client, sid, wanted={"awaiting_feedback", "failed"}):
    for _ in range(600):
        record = client.get(f"/api/sessions/{sid}").json()
        if record["status"] in wanted:
            return record
        time.sleep(0.02)
    raise RuntimeError(f"session {sid} stuck")


def main() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp())
    scripts = tmp / "scripts"
    scripts.mkdir()

    config = AppConfig()
    config.sessions_dir = tmp / "sessions"
    client = TestClient(create_app(config))

    def scripted(name: str, responses: list[str]) -> str:
        path = scripts / f"{name}.txt"
        path.write_text(dump_script(responses))
        return f"scripted:{path}"

    def create(gesture: str, backend: str):
        response = client.post(
            "/api/sessions", json={"gesture": gesture, "backend": backend}
        )
        assert response.status_code == 201, response.text
        return wait(client, response.json()["id"])

    def feedback(sid: str, text: str, backend: str):
        response = client.post(
            f"/api/sessions/{sid}/feedback", json={"text": text, "backend": backend}
        )
        assert response.status_code == 202, response.text
        return wait(client, sid)

    # healthy session: jazz-hands, one "higher" refinement, finalized
    gen = (PKG_FIXTURES / "gen_jazz-hands.txt").read_text()
    ok = create("jazz-hands", f"scripted:{PKG_FIXTURES / 'gen_jazz-hands.txt'}")
    ok = feedback(
        ok["id"],
        "put your hands higher",
        f"scripted:{PKG_FIXTURES / 'refine_jazz-hands_higher.txt'}",
    )
    client.post(f"/api/sessions/{ok['id']}/finalize", json={})
    ok = client.get(f"/api/sessions/{ok['id']}").json()
    (FIXTURES / "session_ok.json").write_text(json.dumps(ok, indent=1))
    trajectory = client.get(
        f"/api/sessions/{ok['id']}/trajectory", params={"rate": 50, "iteration": 2}
    ).json()
    (FIXTURES / "trajectory_ok.json").write_text(json.dumps(trajectory, indent=1))

    # exhausted session: five refinements used
    exhausted = create("thumbs-up", f"scripted:{PKG_FIXTURES / 'gen_thumbs-up.txt'}")
    for i in range(5):
        name = "refine_thumbs-up_higher.txt" if i % 2 == 0 else "refine_thumbs-up_lower.txt"
        exhausted = feedback(exhausted["id"], f"tweak {i}", f"scripted:{PKG_FIXTURES / name}")
    (FIXTURES / "session_exhausted.json").write_text(json.dumps(exhausted, indent=1))

    # failed session: backend never produces a sequence
    bad = scripted("prose", ["I cannot help with that."] * 3)
    failed = create("okay", bad)
    assert failed["status"] == "failed"
    (FIXTURES / "session_failed.json").write_text(json.dumps(failed, indent=1))

    # crossing trajectory with collision-flagged interior samples; the session
    # auto-regenerates once on infeasibility, so the script carries two copies
    crossing_text = "Crossing the hands.\n" + serialize_sequence(crossing_sequence())
    crossing = scripted("crossing", [crossing_text, crossing_text])
    cross = create("spread-hands", crossing)
    payload = client.get(
        f"/api/sessions/{cross['id']}/trajectory", params={"rate": 50, "iteration": 1}
    ).json()
    flagged = sum(payload["collision_flags"])
    assert flagged > 0, "expected collision flags on the crossing trajectory"
    (FIXTURES / "trajectory_collision.json").write_text(json.dumps(payload, indent=1))

    listing = client.get("/api/sessions").json()
    (FIXTURES / "sessions_list.json").write_text(json.dumps(listing, indent=1))
    gestures = client.get("/api/gestures").json()
    (FIXTURES / "gestures.json").write_text(json.dumps(gestures, indent=1))

    print(f"captured fixtures into {FIXTURES} ({flagged} collision samples)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
