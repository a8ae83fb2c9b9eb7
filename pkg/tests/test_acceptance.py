"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Everything here is offline and deterministic; the scripted fixtures
under tests/fixtures/ stand in for the chat backend.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from gesturelab.agents import ScriptedBackend, load_script
from gesturelab.kinematics import (
    ArmModel,
    BodyModel,
    JointConfig,
    Side,
    chain_frames,
    forward_kinematics,
    geodesic_angle,
    solve_ik,
)
from gesturelab.library import (
    Category,
    builtin_demonstrations,
    builtin_gestures,
    load_bundled,
)
from gesturelab.motion import (
    MotionSequence,
    MotionState,
    parse_sequence,
    serialize_sequence,
    validate_state,
)
from gesturelab.session import (
    IterationLimitExceeded,
    SessionConfig,
    start_session,
    submit_feedback,
)
from gesturelab.trajectory import (
    check_sequence,
    compute_metrics,
    interpolate,
    retime,
)

from conftest import random_sequence, random_state, shifted_sequence
from test_kinematics import fk_oracle

FIXTURES = Path(__file__).parent / "fixtures"
BODY = BodyModel.default()
CONFIG = SessionConfig()


def ok(n: int, message: str) -> None:
    print(f"\nACCEPTANCE {n} PASS: {message}", flush=True)


def test_criterion_1_representation_fidelity():
    rng = np.random.default_rng(1)
    for _ in range(100):
        assert len(random_state(rng).flatten()) == 22
    worst = 0.0
    for _ in range(1000):
        seq = random_sequence(rng)
        parsed = parse_sequence(serialize_sequence(seq))
        err = np.max(np.abs(np.array(parsed.rows()) - np.array(seq.rows())))
        worst = max(worst, float(err))
    assert worst < 1e-6
    ok(1, f"22-real states; 1000 serialize/parse round trips, max error {worst:.2e} < 1e-6")


def test_criterion_2_fk_oracle_equivalence():
    rng = np.random.default_rng(2)
    worst = 0.0
    for model in (BODY.left, BODY.right):
        for _ in range(100):
            q = JointConfig(tuple(rng.uniform(lo, hi) for lo, hi in model.joint_limits))
            pos, rot = fk_oracle(model, q.angles)
            frames = chain_frames(model, q)
            worst = max(worst, float(np.max(np.abs(frames.hand - pos))))
            worst = max(worst, float(np.max(np.abs(frames.rotation - rot))))
    assert worst <= 1e-9
    ok(2, f"100 random configs per arm match the transform oracle, max dev {worst:.2e} <= 1e-9")


def test_criterion_3_ik_round_trip():
    rng = np.random.default_rng(3)
    model = BODY.right
    start = time.perf_counter()
    worst_pos, worst_ori = 0.0, 0.0
    for _ in range(100):
        q0 = JointConfig(tuple(rng.uniform(lo, hi) for lo, hi in model.joint_limits))
        target = forward_kinematics(model, q0)
        seed = JointConfig(tuple(model.clamp(q0.as_array() + rng.uniform(-0.2, 0.2, 7))))
        q = solve_ik(model, target, seed)
        frames = chain_frames(model, q)
        worst_pos = max(
            worst_pos, float(np.linalg.norm(np.array(target.position) - frames.hand))
        )
        worst_ori = max(
            worst_ori, geodesic_angle(target.rotation_matrix(), frames.rotation)
        )
    elapsed = time.perf_counter() - start
    assert worst_pos <= 1e-3 and worst_ori <= 1e-2
    assert elapsed < 10.0

    # determinism: bit-identical repeated solves
    q0 = JointConfig(tuple(rng.uniform(lo, hi) for lo, hi in model.joint_limits))
    target = forward_kinematics(model, q0)
    seed = JointConfig(tuple(model.clamp(q0.as_array() + 0.1)))
    solutions = {solve_ik(model, target, seed).angles for _ in range(5)}
    assert len(solutions) == 1
    ok(
        3,
        f"100 IK round trips: pos <= {worst_pos:.2e} m, ori <= {worst_ori:.2e} rad, "
        f"{elapsed:.2f} s total, deterministic",
    )


def test_criterion_4_interpolation_exactness():
    rng = np.random.default_rng(4)
    seq = random_sequence(rng)
    traj = interpolate(seq, rate=50.0)
    stride = round(seq.keyframe_dt * 50.0)
    worst = 0.0
    for k, state in enumerate(seq.states):
        dev = np.max(
            np.abs(np.array(traj.samples[k * stride].flatten()) - np.array(state.flatten()))
        )
        worst = max(worst, float(dev))
    assert worst <= 1e-9

    for s in traj.samples:
        assert all(0.0 <= v <= 1.0 for v in s.left.fingers + s.right.fingers)

    # slerp midpoint of a 90 degree yaw pair
    from test_trajectory import two_hand_state

    pair = MotionSequence(
        (two_hand_state(rpy=(0, 0, 0)), two_hand_state(rpy=(0, 0, math.pi / 2))),
        keyframe_dt=1.0,
    )
    mid = interpolate(pair, rate=50.0).samples[25]
    assert mid.left.orientation[2] == pytest.approx(math.pi / 4, abs=1e-6)

    # retime preserves path length
    p0 = compute_metrics(traj).path_length
    p1 = compute_metrics(retime(traj, 3.0)).path_length
    assert p1.left == pytest.approx(p0.left, abs=1e-9)
    assert p1.right == pytest.approx(p0.right, abs=1e-9)
    ok(
        4,
        f"keyframes reproduced to {worst:.1e}; fingers in range; slerp midpoint 45 deg; "
        f"retime keeps path length to 1e-9",
    )


def test_criterion_5_pipeline_end_to_end_all_gestures():
    start = time.perf_counter()
    gestures = builtin_gestures()
    assert len(gestures) == 10
    for spec in gestures:
        backend = load_script(FIXTURES / f"gen_{spec.name}.txt")
        record = start_session(spec, backend, CONFIG)
        assert record.status.value == "awaiting_feedback", spec.name
        assert record.iterations[0].feasibility.feasible, spec.name
        for state in record.iterations[0].sequence.states:
            assert validate_state(state).ok

        refine_backend = load_script(FIXTURES / f"refine_{spec.name}_higher.txt")
        refined = submit_feedback(record, "put your hands higher", refine_backend, CONFIG)
        before = record.iterations[0].metrics.combined_mean_height
        after = refined.iterations[1].metrics.combined_mean_height
        assert after > before, f"{spec.name}: {after} !> {before}"

    # the sixth refinement is rejected citing i_max = 5
    backend = load_script(FIXTURES / "gen_thumbs-up.txt")
    record = start_session(gestures[0], backend, CONFIG)
    for i in range(5):
        name = "refine_thumbs-up_higher.txt" if i % 2 == 0 else "refine_thumbs-up_lower.txt"
        record = submit_feedback(
            record, f"tweak {i}", load_script(FIXTURES / name), CONFIG
        )
    with pytest.raises(IterationLimitExceeded) as err:
        submit_feedback(record, "once more", load_script(FIXTURES / "refine_thumbs-up_higher.txt"), CONFIG)
    assert "i_max=5" in str(err.value)

    # determinism: the same fixtures give bit-identical sequences
    a = start_session(gestures[0], load_script(FIXTURES / "gen_thumbs-up.txt"), CONFIG)
    b = start_session(gestures[0], load_script(FIXTURES / "gen_thumbs-up.txt"), CONFIG)
    assert a.iterations[0].sequence == b.iterations[0].sequence

    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    ok(
        5,
        f"10 gestures generated + refined offline, height strictly raised, 6th "
        f"refinement rejected (i_max=5), deterministic, {elapsed:.1f} s < 30 s",
    )


def test_criterion_6_failure_mode_single_regeneration():
    backend = load_script(FIXTURES / "infeasible_then_good_thumbs-up.txt")
    spec = builtin_gestures()[0]
    record = start_session(spec, backend, CONFIG)
    assert backend.calls == 2  # initial + exactly one automatic regeneration
    assert len(record.iterations) == 1
    assert record.iterations[0].feasibility.feasible
    assert any("regeneration 1" in note for note in record.notes)
    ok(6, "out-of-reach keyframe consumed exactly one regeneration response")


def test_criterion_7_asset_validation():
    demos = builtin_demonstrations()
    assert len(demos) == 2
    names = []
    for name in sorted(
        [d.gesture.name for d in demos] + [g.name for g in builtin_gestures()]
    ):
        spec, seq = load_bundled(name)
        for state in seq.states:
            assert validate_state(state).ok, name
        feas = check_sequence(seq, BODY)
        assert feas.feasible, f"{name}: {feas.describe()}"
        for check in feas.checks:
            assert check.collision is not None and not check.collision.collision
        names.append(name)
    assert len(names) == 12

    counts = {}
    for spec in builtin_gestures():
        counts[spec.category] = counts.get(spec.category, 0) + 1
    assert counts == {
        Category.EMBLEM: 3,
        Category.ILLUSTRATOR: 2,
        Category.AFFECT_DISPLAY: 3,
        Category.REGULATOR: 2,
    }
    ok(7, "12 bundled assets pass validation/feasibility/collision; taxonomy 3/2/3/2")


def test_criterion_8_non_reproducible_results_stated():
    # Wall-clock latencies (paper: 26.8 s initial / 21.2 s refinement averages)
    # depend on remote API conditions and are NOT gated; the pipeline records
    # per-call latency so operators can compare observationally.
    backend = load_script(FIXTURES / "gen_thumbs-up.txt")
    record = start_session(builtin_gestures()[0], backend, CONFIG)
    assert any(l.stage == "generate" and l.seconds >= 0 for l in record.latencies)

    # Feedback statistics (paper: 1.9 iterations mean, 21% high-level) depend
    # on operator behavior and are reported by the batch tool, not gated.
    from gesturelab.session import feedback_statistics

    refined = submit_feedback(
        record,
        "add some random motion",
        load_script(FIXTURES / "refine_thumbs-up_higher.txt"),
        CONFIG,
    )
    stats = feedback_statistics([refined])
    assert stats.mean_feedback_per_session == 1.0
    assert stats.high_level_fraction == 1.0
    ok(
        8,
        "latencies recorded per call and feedback statistics reported "
        "observationally; paper wall-clock times and study ratings are not gated",
    )
