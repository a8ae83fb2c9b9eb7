#!/usr/bin/env python3
"""Regenerate the scripted-backend fixture files under tests/fixtures/.

Fixtures are derived from the bundled gesture assets so they stay in sync:
one generation response per gesture, one "raise the hands" refinement per
gesture, plus the analysis flow and the infeasible-then-good pair used by
the failure-policy tests. Every generated response is validated for
feasibility before it is written (except the deliberately infeasible one).
"""

from pathlib import Path

from gesturelab.agents import dump_script
from gesturelab.kinematics import BodyModel
from gesturelab.library import BUILTIN_SPECS, load_bundled
from gesturelab.motion import DEFAULT_BOUNDS, MotionSequence, MotionState, serialize_sequence
from gesturelab.trajectory import check_sequence

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"
BODY = BodyModel.default()


def response(seq: MotionSequence, preamble: str) -> str:
    return preamble + "\n" + serialize_sequence(seq)


def shifted(seq: MotionSequence, dz: float) -> MotionSequence:
    lo, hi = DEFAULT_BOUNDS.z
    states = []
    for state in seq.states:
        flat = list(state.flatten())
        flat[2] = min(max(flat[2] + dz, lo), hi)
        flat[13] = min(max(flat[13] + dz, lo), hi)
        states.append(MotionState.from_flat(flat))
    return MotionSequence(tuple(states), seq.keyframe_dt)


def infeasible(seq: MotionSequence, keyframe: int = 4) -> MotionSequence:
    states = list(seq.states)
    flat = list(states[keyframe].flatten())
    flat[11:14] = [0.65, -0.75, 0.60]  # inside the box, beyond the reach sphere
    states[keyframe] = MotionState.from_flat(flat)
    return MotionSequence(tuple(states), seq.keyframe_dt)


def require_feasible(seq: MotionSequence, label: str) -> MotionSequence:
    report = check_sequence(seq, BODY)
    if not report.feasible:
        raise SystemExit(f"fixture {label} is not feasible: {report.describe()}")
    return seq


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for spec in BUILTIN_SPECS:
        _, seq = load_bundled(spec.name)
        gen = response(
            require_feasible(seq, spec.name),
            f"Planning the <{spec.name}> gesture: start at rest, reach the "
            f"peak shape, then settle back down.",
        )
        (FIXTURES / f"gen_{spec.name}.txt").write_text(dump_script([gen]))

        higher = response(
            require_feasible(shifted(seq, 0.04), f"{spec.name}+0.04"),
            "Raising both hands as requested while keeping the motion shape.",
        )
        (FIXTURES / f"refine_{spec.name}_higher.txt").write_text(dump_script([higher]))

    _, thumbs = load_bundled("thumbs-up")
    lower = response(
        require_feasible(shifted(thumbs, -0.04), "thumbs-up-0.04"),
        "Lowering both hands as requested.",
    )
    (FIXTURES / "refine_thumbs-up_lower.txt").write_text(dump_script([lower]))

    _, spread = load_bundled("spread-hands")
    analysis = (
        "The operator asks the robot to express confusion without words. "
        "Opening both arms with palms up reads as 'I do not know'.\n"
        "<gesture>spread-hands</gesture>"
    )
    (FIXTURES / "analyze_and_generate_confusion.txt").write_text(
        dump_script([analysis, response(spread, "Generating the spread-hands motion.")])
    )

    bad = response(infeasible(thumbs), "Here is the thumbs-up motion.")
    good = response(thumbs, "Corrected: keeping the right hand within reach.")
    (FIXTURES / "infeasible_then_good_thumbs-up.txt").write_text(
        dump_script([bad, good])
    )
    print(f"wrote fixtures to {FIXTURES}")


if __name__ == "__main__":
    main()
