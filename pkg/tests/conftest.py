"""Shared test helpers: random-but-valid motion states, sequences, fixtures."""

import numpy as np
import pytest

from gesturelab.library import load_bundled
from gesturelab.motion import (
    DEFAULT_BOUNDS,
    HandState,
    MotionSequence,
    MotionState,
    serialize_sequence,
)

# Margins keep random values strictly interior so that 6-decimal wire rounding
# can never push them across a bound (which would trigger clamping on parse).
POS_MARGIN = 1e-3
ANGLE_LIMIT = 3.1410


def random_hand(rng: np.random.Generator, bounds=DEFAULT_BOUNDS) -> HandState:
    position = tuple(
        float(rng.uniform(lo + POS_MARGIN, hi - POS_MARGIN))
        for lo, hi in (bounds.x, bounds.y, bounds.z)
    )
    orientation = tuple(float(v) for v in rng.uniform(-ANGLE_LIMIT, ANGLE_LIMIT, 3))
    fingers = tuple(float(v) for v in rng.uniform(0.001, 0.999, 5))
    return HandState(position, orientation, fingers)


def random_state(rng: np.random.Generator, bounds=DEFAULT_BOUNDS) -> MotionState:
    return MotionState(left=random_hand(rng, bounds), right=random_hand(rng, bounds))


def random_sequence(rng: np.random.Generator, t: int = 10, dt: float = 0.5) -> MotionSequence:
    return MotionSequence(tuple(random_state(rng) for _ in range(t)), dt)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240513)


# --- fixture-response builders for scripted backends -------------------------


def asset_sequence(name: str) -> MotionSequence:
    _, seq = load_bundled(name)
    return seq


def generation_response(seq: MotionSequence, preamble: str = "") -> str:
    preamble = preamble or (
        "Let me plan the motion: both hands start at rest, the gesture builds "
        "to its peak shape, then settles back down.\n"
    )
    return preamble + "\n" + serialize_sequence(seq)


def shifted_sequence(seq: MotionSequence, dz: float) -> MotionSequence:
    """Raise/lower every hand position by dz, clamped to the workspace box."""
    states = []
    lo, hi = DEFAULT_BOUNDS.z
    for state in seq.states:
        flat = list(state.flatten())
        flat[2] = min(max(flat[2] + dz, lo), hi)
        flat[13] = min(max(flat[13] + dz, lo), hi)
        states.append(MotionState.from_flat(flat))
    return MotionSequence(tuple(states), seq.keyframe_dt)


def infeasible_sequence(seq: MotionSequence, keyframe: int = 4) -> MotionSequence:
    """Plant one right-hand keyframe inside the box but beyond the reach sphere."""
    states = list(seq.states)
    flat = list(states[keyframe].flatten())
    flat[11:14] = [0.65, -0.75, 0.60]
    states[keyframe] = MotionState.from_flat(flat)
    return MotionSequence(tuple(states), seq.keyframe_dt)
