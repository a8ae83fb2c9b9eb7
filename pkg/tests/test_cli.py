"""Command-line surface: exit codes, offline scripted runs, JSON output."""

import json
from pathlib import Path

import pytest

from gesturelab.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def gen_session(capsys, tmp_path, gesture="thumbs-up") -> str:
    code, out, err = run(
        capsys,
        "generate",
        "--gesture",
        gesture,
        "--backend",
        f"scripted:{FIXTURES / f'gen_{gesture}.txt'}",
        "--sessions-dir",
        str(tmp_path),
        "--json",
    )
    assert code == 0, err
    return json.loads(out)["id"]


def test_generate_with_gesture(capsys, tmp_path):
    code, out, err = run(
        capsys,
        "generate",
        "--gesture",
        "thumbs-up",
        "--backend",
        f"scripted:{FIXTURES / 'gen_thumbs-up.txt'}",
        "--sessions-dir",
        str(tmp_path),
    )
    assert code == 0
    assert "session " in out
    assert "feasible" in out
    assert "latency generate" in out  # per-call latency is recorded
    assert list(tmp_path.glob("*.json"))


def test_generate_with_instruction_runs_both_agents(capsys, tmp_path):
    code, out, _ = run(
        capsys,
        "generate",
        "--instruction",
        "Express confusion with only gestures",
        "--backend",
        f"scripted:{FIXTURES / 'analyze_and_generate_confusion.txt'}",
        "--sessions-dir",
        str(tmp_path),
        "--json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["gesture"]["name"] == "spread-hands"
    assert data["analysis"] is not None


def test_generate_unknown_gesture(capsys, tmp_path):
    code, _, err = run(
        capsys,
        "generate",
        "--gesture",
        "macarena",
        "--backend",
        f"scripted:{FIXTURES / 'gen_thumbs-up.txt'}",
        "--sessions-dir",
        str(tmp_path),
    )
    assert code == 1
    assert "unknown gesture" in err


def test_missing_api_key_is_actionable(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("OPENAI_API_KEY", raising=False)
    code, _, err = run(
        capsys,
        "generate",
        "--gesture",
        "thumbs-up",
        "--sessions-dir",
        str(tmp_path),
    )
    assert code == 1
    assert "OPENAI_API_KEY" in err


def test_refine_adds_iteration(capsys, tmp_path):
    sid = gen_session(capsys, tmp_path)
    code, out, err = run(
        capsys,
        "refine",
        sid,
        "put your hands higher",
        "--backend",
        f"scripted:{FIXTURES / 'refine_thumbs-up_higher.txt'}",
        "--sessions-dir",
        str(tmp_path),
        "--json",
    )
    assert code == 0, err
    data = json.loads(out)
    assert len(data["iterations"]) == 2
    assert data["iterations"][0]["feedback"] == "put your hands higher"


def test_sixth_refinement_rejected(capsys, tmp_path):
    sid = gen_session(capsys, tmp_path)
    fixture = f"scripted:{FIXTURES / 'refine_thumbs-up_higher.txt'}"
    lower = f"scripted:{FIXTURES / 'refine_thumbs-up_lower.txt'}"
    for i in range(5):
        script = fixture if i % 2 == 0 else lower
        code, _, err = run(
            capsys, "refine", sid, f"tweak {i}", "--backend", script,
            "--sessions-dir", str(tmp_path),
        )
        assert code == 0, err
    code, _, err = run(
        capsys, "refine", sid, "again", "--backend", fixture,
        "--sessions-dir", str(tmp_path),
    )
    assert code == 1
    assert "i_max=5" in err


def test_finalize_writes_artifacts(capsys, tmp_path):
    sid = gen_session(capsys, tmp_path)
    code, out, err = run(
        capsys, "finalize", sid, "--sessions-dir", str(tmp_path), "--json"
    )
    assert code == 0, err
    data = json.loads(out)
    assert data["samples"] == 226
    assert data["feasible"] is True
    for artifact in data["artifacts"]:
        assert (tmp_path / artifact).exists()


def test_validate_bundled_asset(capsys, tmp_path):
    code, out, _ = run(capsys, "export-gestures", str(tmp_path / "g"))
    assert code == 0
    code, out, _ = run(capsys, "validate", str(tmp_path / "g" / "idle.gesture"))
    assert code == 0
    assert "ok" in out


def test_validate_rejects_unreachable(capsys, tmp_path):
    import sys

    sys.path.insert(0, str(Path(__file__).parent))
    from conftest import asset_sequence, infeasible_sequence

    from gesturelab.library import GestureSpec, Category, save_gesture

    bad = infeasible_sequence(asset_sequence("thumbs-up"))
    path = tmp_path / "bad.gesture"
    save_gesture(path, GestureSpec("bad", Category.EMBLEM, ""), bad)
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 1
    assert "unreachable" in out


def test_metrics_from_trajectory_file(capsys, tmp_path):
    sid = gen_session(capsys, tmp_path)
    run(capsys, "finalize", sid, "--sessions-dir", str(tmp_path))
    traj_file = tmp_path / sid / "trajectory.txt"
    code, out, _ = run(capsys, "metrics", "--trajectory-file", str(traj_file), "--json")
    assert code == 0
    data = json.loads(out)
    assert set(data) == {
        "mean_hand_height", "path_length", "jerk_rms", "peak_speed", "bilateral_symmetry",
    }


def test_metrics_plot_data(capsys, tmp_path):
    sid = gen_session(capsys, tmp_path)
    out_file = tmp_path / "plot.txt"
    code, _, _ = run(
        capsys, "metrics", "--session", sid, "--sessions-dir", str(tmp_path),
        "--plot-data", str(out_file),
    )
    assert code == 0
    header = out_file.read_text().splitlines()[0]
    assert header.startswith("# t ")


def test_gestures_listing(capsys, tmp_path):
    code, out, _ = run(capsys, "gestures", "--json")
    assert code == 0
    data = json.loads(out)
    assert len(data) == 10


def test_sessions_and_show_and_stats(capsys, tmp_path):
    sid = gen_session(capsys, tmp_path)
    run(
        capsys, "refine", sid, "add some random motion",
        "--backend", f"scripted:{FIXTURES / 'refine_thumbs-up_higher.txt'}",
        "--sessions-dir", str(tmp_path),
    )
    code, out, _ = run(capsys, "sessions", "--sessions-dir", str(tmp_path))
    assert code == 0 and sid in out
    code, out, _ = run(capsys, "show", sid, "--sessions-dir", str(tmp_path))
    assert code == 0 and "iterations: 2" in out
    code, out, _ = run(capsys, "stats", "--sessions-dir", str(tmp_path), "--json")
    assert code == 0
    stats = json.loads(out)
    assert stats["total_feedback"] == 1
    assert stats["high_level"] == 1


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as err:
        main(["generate"])  # neither --gesture nor --instruction
    assert err.value.code == 2


def test_unknown_session_domain_failure(capsys, tmp_path):
    code, _, err = run(capsys, "show", "nope", "--sessions-dir", str(tmp_path))
    assert code == 1
    assert "no session" in err


def test_finalize_with_speed_cap(capsys, tmp_path):
    sid = gen_session(capsys, tmp_path, gesture="fist-pump")
    code, out, err = run(
        capsys, "finalize", sid, "--max-speed", "0.5",
        "--sessions-dir", str(tmp_path), "--json",
    )
    assert code == 0, err
    data = json.loads(out)
    assert data["duration"] > 4.5  # fast pump segments were stretched in time
