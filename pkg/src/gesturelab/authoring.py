"""Hand-authored keyframes for the bundled gestures and demonstrations.

Each asset is written in joint space (seven angles per arm plus five finger
apertures per hand) and pushed through the arm chain, so every bundled
keyframe is reachable by construction. Run as a module to regenerate the
`.gesture` files under the package assets directory:

    python3 -m gesturelab.authoring [--out DIR]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from .kinematics import BodyModel, JointConfig, forward_kinematics
from .library import BUILTIN_SPECS, DEMO_SPECS, GestureSpec, save_gesture
from .motion import HandState, MotionSequence, MotionState

T = 10
DT = 0.5

# Arm poses: (shoulder pitch, shoulder roll, shoulder yaw, elbow, wrist r/p/y)
REST_L = (0.30, 0.10, 0.0, 0.80, 0.0, 0.0, 0.0)
REST_R = (0.30, -0.10, 0.0, 0.80, 0.0, 0.0, 0.0)

# Finger apertures, thumb -> pinky
RELAX = (0.5, 0.5, 0.5, 0.5, 0.5)
OPEN = (1.0, 1.0, 1.0, 1.0, 1.0)
FIST = (0.0, 0.0, 0.0, 0.0, 0.0)
THUMB_UP = (1.0, 0.0, 0.0, 0.0, 0.0)
V_SIGN = (0.0, 1.0, 1.0, 0.0, 0.0)
OKAY_RING = (0.15, 0.15, 1.0, 1.0, 1.0)
QUOTE_UP = (0.2, 0.95, 0.95, 0.2, 0.2)
QUOTE_DOWN = (0.2, 0.45, 0.45, 0.2, 0.2)
CUP = (0.6, 0.6, 0.6, 0.6, 0.6)


def _frame(q_left, q_right, f_left=RELAX, f_right=RELAX):
    return (tuple(q_left), tuple(q_right), tuple(f_left), tuple(f_right))


def _hold(frame, count):
    return [frame] * count


def _build(body: BodyModel, frames) -> MotionSequence:
    if len(frames) != T:
        raise ValueError(f"asset needs exactly {T} keyframes, got {len(frames)}")
    states = []
    for q_left, q_right, f_left, f_right in frames:
        pose_l = forward_kinematics(body.left, JointConfig(q_left))
        pose_r = forward_kinematics(body.right, JointConfig(q_right))
        states.append(
            MotionState(
                left=HandState(pose_l.position, pose_l.orientation, f_left),
                right=HandState(pose_r.position, pose_r.orientation, f_right),
            )
        )
    return MotionSequence(tuple(states), DT)


def _idle() -> list:
    return _hold(_frame(REST_L, REST_R), T)


def _wave() -> list:
    # Right arm raised, swinging laterally; three direction reversals.
    up = (1.20, -0.10, 0.0, 1.05, 0.0, 0.0, 0.0)
    sw_in = (1.20, 0.20, 0.0, 1.05, 0.0, 0.0, 0.0)
    sw_out = (1.20, -0.45, 0.0, 1.05, 0.0, 0.0, 0.0)
    return [
        _frame(REST_L, REST_R),
        _frame(REST_L, up, RELAX, OPEN),
        _frame(REST_L, sw_in, RELAX, OPEN),
        _frame(REST_L, sw_out, RELAX, OPEN),
        _frame(REST_L, sw_in, RELAX, OPEN),
        _frame(REST_L, sw_out, RELAX, OPEN),
        _frame(REST_L, sw_in, RELAX, OPEN),
        _frame(REST_L, up, RELAX, OPEN),
        _frame(REST_L, REST_R),
        _frame(REST_L, REST_R),
    ]


def _thumbs_up() -> list:
    half = (0.7, -0.10, 0.0, 0.9, 0.0, 0.0, 0.0)
    up = (1.15, -0.15, 0.0, 1.35, 0.0, -0.3, 0.0)
    bob = (1.25, -0.15, 0.0, 1.30, 0.0, -0.3, 0.0)
    return [
        _frame(REST_L, REST_R),
        _frame(REST_L, half, RELAX, FIST),
        _frame(REST_L, up, RELAX, THUMB_UP),
        _frame(REST_L, bob, RELAX, THUMB_UP),
        _frame(REST_L, up, RELAX, THUMB_UP),
        _frame(REST_L, bob, RELAX, THUMB_UP),
        _frame(REST_L, up, RELAX, THUMB_UP),
        _frame(REST_L, up, RELAX, THUMB_UP),
        _frame(REST_L, half, RELAX, FIST),
        _frame(REST_L, REST_R),
    ]


def _okay() -> list:
    half = (0.7, -0.10, 0.0, 0.9, 0.0, 0.0, 0.0)
    up = (1.2, -0.25, 0.0, 1.2, 0.3, 0.0, 0.0)
    show = (1.2, -0.25, 0.0, 1.2, 0.55, 0.0, 0.0)
    return [
        _frame(REST_L, REST_R),
        _frame(REST_L, half),
        _frame(REST_L, up, RELAX, OKAY_RING),
        _frame(REST_L, show, RELAX, OKAY_RING),
        _frame(REST_L, show, RELAX, OKAY_RING),
        _frame(REST_L, show, RELAX, OKAY_RING),
        _frame(REST_L, up, RELAX, OKAY_RING),
        _frame(REST_L, up, RELAX, OKAY_RING),
        _frame(REST_L, half),
        _frame(REST_L, REST_R),
    ]


def _v_sign() -> list:
    half = (0.8, -0.15, 0.0, 1.0, 0.0, 0.0, 0.0)
    high = (1.12, -0.25, 0.0, 1.65, 0.0, 0.2, 0.0)
    return [
        _frame(REST_L, REST_R),
        _frame(REST_L, half),
        _frame(REST_L, high, RELAX, V_SIGN),
        _frame(REST_L, high, RELAX, V_SIGN),
        _frame(REST_L, high, RELAX, V_SIGN),
        _frame(REST_L, high, RELAX, V_SIGN),
        _frame(REST_L, high, RELAX, V_SIGN),
        _frame(REST_L, high, RELAX, V_SIGN),
        _frame(REST_L, half),
        _frame(REST_L, REST_R),
    ]


def _air_quotes() -> list:
    up_l = (1.1, 0.35, 0.0, 1.45, 0.0, 0.0, 0.0)
    up_r = (1.1, -0.35, 0.0, 1.45, 0.0, 0.0, 0.0)
    return [
        _frame(REST_L, REST_R),
        _frame(up_l, up_r, QUOTE_UP, QUOTE_UP),
        _frame(up_l, up_r, QUOTE_DOWN, QUOTE_DOWN),
        _frame(up_l, up_r, QUOTE_UP, QUOTE_UP),
        _frame(up_l, up_r, QUOTE_DOWN, QUOTE_DOWN),
        _frame(up_l, up_r, QUOTE_UP, QUOTE_UP),
        _frame(up_l, up_r, QUOTE_UP, QUOTE_UP),
        _frame(up_l, up_r, QUOTE_UP, QUOTE_UP),
        _frame(REST_L, REST_R),
        _frame(REST_L, REST_R),
    ]


def _come_closer() -> list:
    reach = (1.05, -0.15, 0.0, 0.45, -1.4, 0.0, 0.0)  # palm rolled upward
    pull = (1.0, -0.15, 0.0, 0.95, -1.4, 0.0, 0.0)
    return [
        _frame(REST_L, REST_R),
        _frame(REST_L, reach, RELAX, OPEN),
        _frame(REST_L, pull, RELAX, FIST),
        _frame(REST_L, reach, RELAX, OPEN),
        _frame(REST_L, pull, RELAX, FIST),
        _frame(REST_L, reach, RELAX, OPEN),
        _frame(REST_L, pull, RELAX, FIST),
        _frame(REST_L, reach, RELAX, OPEN),
        _frame(REST_L, REST_R),
        _frame(REST_L, REST_R),
    ]


def _fist_pump() -> list:
    coil = (0.85, -0.20, 0.0, 1.9, 0.0, 0.0, 0.0)
    punch = (1.25, -0.20, 0.0, 1.30, 0.0, 0.0, 0.0)
    return [
        _frame(REST_L, REST_R),
        _frame(REST_L, coil, RELAX, FIST),
        _frame(REST_L, punch, RELAX, FIST),
        _frame(REST_L, coil, RELAX, FIST),
        _frame(REST_L, punch, RELAX, FIST),
        _frame(REST_L, coil, RELAX, FIST),
        _frame(REST_L, punch, RELAX, FIST),
        _frame(REST_L, punch, RELAX, FIST),
        _frame(REST_L, coil, RELAX, FIST),
        _frame(REST_L, REST_R),
    ]


def _jazz_hands() -> list:
    base_l = (1.1, 0.5, 0.0, 1.25, 0.0, 0.0, 0.0)
    base_r = (1.1, -0.5, 0.0, 1.25, 0.0, 0.0, 0.0)
    tilt_l = (1.1, 0.5, 0.0, 1.25, 0.45, 0.0, 0.0)
    tilt_r = (1.1, -0.5, 0.0, 1.25, -0.45, 0.0, 0.0)
    back_l = (1.1, 0.5, 0.0, 1.25, -0.45, 0.0, 0.0)
    back_r = (1.1, -0.5, 0.0, 1.25, 0.45, 0.0, 0.0)
    return [
        _frame(REST_L, REST_R),
        _frame(base_l, base_r, OPEN, OPEN),
        _frame(tilt_l, tilt_r, OPEN, OPEN),
        _frame(back_l, back_r, OPEN, OPEN),
        _frame(tilt_l, tilt_r, OPEN, OPEN),
        _frame(back_l, back_r, OPEN, OPEN),
        _frame(tilt_l, tilt_r, OPEN, OPEN),
        _frame(base_l, base_r, OPEN, OPEN),
        _frame(REST_L, REST_R),
        _frame(REST_L, REST_R),
    ]


def _spread_hands() -> list:
    narrow_l = (0.55, 0.35, 0.0, 0.55, -1.3, 0.0, 0.0)
    narrow_r = (0.55, -0.35, 0.0, 0.55, 1.3, 0.0, 0.0)
    wide_l = (0.45, 0.85, 0.0, 0.40, -1.3, 0.0, 0.0)
    wide_r = (0.45, -0.85, 0.0, 0.40, 1.3, 0.0, 0.0)
    return [
        _frame(REST_L, REST_R),
        _frame(narrow_l, narrow_r, RELAX, RELAX),
        _frame(wide_l, wide_r, OPEN, OPEN),
        _frame(wide_l, wide_r, OPEN, OPEN),
        _frame(wide_l, wide_r, OPEN, OPEN),
        _frame(wide_l, wide_r, OPEN, OPEN),
        _frame(wide_l, wide_r, OPEN, OPEN),
        _frame(narrow_l, narrow_r, OPEN, OPEN),
        _frame(REST_L, REST_R),
        _frame(REST_L, REST_R),
    ]


def _stop() -> list:
    raise_half = (0.9, -0.10, 0.0, 0.6, 0.0, -0.8, 0.0)
    out = (1.5, -0.10, 0.0, 0.55, 0.0, -1.1, 0.0)  # palm presented forward
    push = (1.62, -0.10, 0.0, 0.42, 0.0, -1.2, 0.0)
    return [
        _frame(REST_L, REST_R),
        _frame(REST_L, raise_half, RELAX, OPEN),
        _frame(REST_L, out, RELAX, OPEN),
        _frame(REST_L, out, RELAX, OPEN),
        _frame(REST_L, out, RELAX, OPEN),
        _frame(REST_L, out, RELAX, OPEN),
        _frame(REST_L, push, RELAX, OPEN),
        _frame(REST_L, push, RELAX, OPEN),
        _frame(REST_L, out, RELAX, OPEN),
        _frame(REST_L, REST_R),
    ]


def _listening() -> list:
    half = (0.6, -0.20, 0.0, 1.3, 0.0, 0.0, 0.0)
    ear = (0.55, -0.35, 0.0, 2.25, 0.0, 0.0, 0.0)  # hand beside the head
    lean = (0.62, -0.35, 0.0, 2.3, 0.0, 0.0, 0.0)
    return [
        _frame(REST_L, REST_R),
        _frame(REST_L, half, RELAX, CUP),
        _frame(REST_L, ear, RELAX, CUP),
        _frame(REST_L, ear, RELAX, CUP),
        _frame(REST_L, lean, RELAX, CUP),
        _frame(REST_L, lean, RELAX, CUP),
        _frame(REST_L, ear, RELAX, CUP),
        _frame(REST_L, ear, RELAX, CUP),
        _frame(REST_L, half, RELAX, CUP),
        _frame(REST_L, REST_R),
    ]


_BUILDERS = {
    "idle": _idle,
    "right-hand-wave": _wave,
    "thumbs-up": _thumbs_up,
    "okay": _okay,
    "v-sign": _v_sign,
    "air-quotes": _air_quotes,
    "come-closer": _come_closer,
    "fist-pump": _fist_pump,
    "jazz-hands": _jazz_hands,
    "spread-hands": _spread_hands,
    "stop": _stop,
    "listening": _listening,
}


def authored_assets(body: BodyModel | None = None) -> list[tuple[GestureSpec, MotionSequence]]:
    """All bundled assets (two demonstrations + ten gestures) built from source."""
    body = body or BodyModel.default()
    specs = {spec.name: spec for spec in BUILTIN_SPECS + DEMO_SPECS}
    return [(specs[name], _build(body, builder())) for name, builder in _BUILDERS.items()]


def default_assets_dir() -> Path:
    return Path(__file__).parent / "assets" / "gestures"


def write_assets(directory=None) -> list[Path]:
    directory = Path(directory) if directory else default_assets_dir()
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for spec, seq in authored_assets():
        path = directory / f"{spec.name}.gesture"
        save_gesture(path, spec, seq)
        written.append(path)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Regenerate bundled gesture assets.")
    parser.add_argument("--out", default=None, help="target directory (default: package assets)")
    args = parser.parse_args(argv)
    for path in write_assets(args.out):
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
