"""Keyframe motion representation: 22-value hand states, validation, clamping, wire format.

A keyframe describes both hands in the torso frame (origin at the sternum
midpoint, x forward, y to the robot's left, z up, meters). Each hand carries
a Cartesian position (3), an orientation as roll/pitch/yaw Euler angles (3,
intrinsic Z-Y-X, radians), and five finger apertures in [0, 1] ordered thumb
to pinky (0 = fully closed, 1 = fully open). Flattening left then right gives
exactly 22 reals per keyframe.

Sequences travel between agents as a plain text block:

    SEQUENCE v1 T=<int> DT=<float>
    t=<k>: <22 comma-separated floats, 6 decimal places>     (k = 1..T)
    END

`parse_sequence` is deliberately forgiving about what surrounds that block
(prose, code fences, relabeled rows) because model output is never clean.
Out-of-range values are clamped, not rejected, and every clamp is recorded
in the returned sequence's notes.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

TAU = 2.0 * math.pi
STATE_WIDTH = 22
DEFAULT_T = 10
DEFAULT_KEYFRAME_DT = 0.5

FINGER_NAMES = ("thumb", "index", "middle", "ring", "pinky")

# Flattened column order of one keyframe (left hand then right hand).
COLUMN_NAMES = tuple(
    f"{side}{ch}"
    for side in ("L", "R")
    for ch in ("x", "y", "z", "roll", "pitch", "yaw", "f1", "f2", "f3", "f4", "f5")
)


class SequenceParseError(ValueError):
    """Base class for failures while extracting a sequence from text."""


class NoSequenceFound(SequenceParseError):
    def __init__(self) -> None:
        super().__init__("no block of numeric keyframe rows found in text")


class DimensionMismatch(SequenceParseError):
    def __init__(self, row_index: int, width: int) -> None:
        self.row_index = row_index
        self.width = width
        super().__init__(
            f"row {row_index} has {width} numeric fields, expected {STATE_WIDTH}"
        )


class LengthMismatch(SequenceParseError):
    def __init__(self, expected: int, found: int) -> None:
        self.expected = expected
        self.found = found
        super().__init__(f"sequence has {found} keyframe rows, expected T={expected}")


def wrap_angle(value: float) -> float:
    """Wrap an angle into [-pi, pi]. Values already in range pass through exactly."""
    if -math.pi <= value <= math.pi:
        return value
    return value - TAU * math.floor((value + math.pi) / TAU)


@dataclass(frozen=True)
class WorkspaceBounds:
    """Axis-aligned box the hands are allowed to occupy, torso frame, meters."""

    x: tuple[float, float] = (-0.10, 0.65)
    y: tuple[float, float] = (-0.75, 0.75)
    z: tuple[float, float] = (-0.70, 0.60)

    def contains(self, position: tuple[float, float, float]) -> bool:
        return all(
            lo <= v <= hi for v, (lo, hi) in zip(position, (self.x, self.y, self.z))
        )

    def clamp(self, position: tuple[float, float, float]) -> tuple[float, float, float]:
        return tuple(
            min(max(v, lo), hi)
            for v, (lo, hi) in zip(position, (self.x, self.y, self.z))
        )

    def to_dict(self) -> dict:
        return {"x": list(self.x), "y": list(self.y), "z": list(self.z)}

    @classmethod
    def from_dict(cls, data: dict) -> "WorkspaceBounds":
        return cls(
            x=tuple(data["x"]), y=tuple(data["y"]), z=tuple(data["z"])
        )


DEFAULT_BOUNDS = WorkspaceBounds()


@dataclass(frozen=True)
class HandState:
    """One hand: position (m), roll/pitch/yaw orientation (rad), finger apertures."""

    position: tuple[float, float, float]
    orientation: tuple[float, float, float]
    fingers: tuple[float, float, float, float, float]

    def flatten(self) -> tuple[float, ...]:
        return self.position + self.orientation + self.fingers

    @classmethod
    def from_flat(cls, values) -> "HandState":
        values = tuple(float(v) for v in values)
        if len(values) != 11:
            raise ValueError(f"hand state needs 11 values, got {len(values)}")
        return cls(position=values[0:3], orientation=values[3:6], fingers=values[6:11])

    @classmethod
    def rest(cls) -> "HandState":
        return cls((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.5,) * 5)


@dataclass(frozen=True)
class MotionState:
    """Both hands at one keyframe; flattens to exactly 22 reals (left then right)."""

    left: HandState
    right: HandState

    def flatten(self) -> tuple[float, ...]:
        flat = self.left.flatten() + self.right.flatten()
        assert len(flat) == STATE_WIDTH
        return flat

    @classmethod
    def from_flat(cls, values) -> "MotionState":
        values = tuple(float(v) for v in values)
        if len(values) != STATE_WIDTH:
            raise ValueError(f"state needs {STATE_WIDTH} values, got {len(values)}")
        return cls(
            left=HandState.from_flat(values[:11]),
            right=HandState.from_flat(values[11:]),
        )


@dataclass(frozen=True)
class MotionSequence:
    """Ordered keyframes at a fixed spacing. `notes` carries parse/clamp provenance."""

    states: tuple[MotionState, ...]
    keyframe_dt: float = DEFAULT_KEYFRAME_DT
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.keyframe_dt <= 0:
            raise ValueError(f"keyframe_dt must be positive, got {self.keyframe_dt}")
        object.__setattr__(self, "states", tuple(self.states))

    def __len__(self) -> int:
        return len(self.states)

    @property
    def duration(self) -> float:
        return (len(self.states) - 1) * self.keyframe_dt

    def rows(self) -> list[tuple[float, ...]]:
        return [s.flatten() for s in self.states]

    def to_dict(self) -> dict:
        return {
            "keyframe_dt": self.keyframe_dt,
            "states": [list(r) for r in self.rows()],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MotionSequence":
        return cls(
            states=tuple(MotionState.from_flat(r) for r in data["states"]),
            keyframe_dt=float(data["keyframe_dt"]),
            notes=tuple(data.get("notes", ())),
        )


@dataclass(frozen=True)
class Violation:
    path: str
    value: float
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def paths(self) -> list[str]:
        return [v.path for v in self.violations]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"path": v.path, "value": v.value, "message": v.message}
                for v in self.violations
            ],
        }


def _check_hand(hand: HandState, side: str, bounds: WorkspaceBounds) -> list[Violation]:
    found = []
    for axis, v, (lo, hi) in zip("xyz", hand.position, (bounds.x, bounds.y, bounds.z)):
        if not lo <= v <= hi:
            found.append(
                Violation(
                    f"{side}.position.{axis}",
                    v,
                    f"outside workspace bound [{lo}, {hi}]",
                )
            )
    for i, v in enumerate(hand.orientation):
        if not -math.pi <= v <= math.pi:
            found.append(
                Violation(f"{side}.orientation[{i}]", v, "outside [-pi, pi]")
            )
    for i, v in enumerate(hand.fingers):
        if not 0.0 <= v <= 1.0:
            found.append(Violation(f"{side}.fingers[{i}]", v, "outside [0, 1]"))
    return found


def validate_state(
    state: MotionState, bounds: WorkspaceBounds = DEFAULT_BOUNDS
) -> ValidationReport:
    """Report every violated range invariant. Never raises; an empty report is valid."""
    found = _check_hand(state.left, "left", bounds)
    found += _check_hand(state.right, "right", bounds)
    return ValidationReport(tuple(found))


def _clamp_hand(hand: HandState, bounds: WorkspaceBounds) -> HandState:
    return HandState(
        position=bounds.clamp(hand.position),
        orientation=tuple(wrap_angle(v) for v in hand.orientation),
        fingers=tuple(min(max(v, 0.0), 1.0) for v in hand.fingers),
    )


def clamp_state(
    state: MotionState, bounds: WorkspaceBounds = DEFAULT_BOUNDS
) -> MotionState:
    """Force a state into range: positions box-clamped, angles wrapped, fingers saturated.

    Idempotent, and an exact no-op on values already in range.
    """
    return MotionState(
        left=_clamp_hand(state.left, bounds), right=_clamp_hand(state.right, bounds)
    )


def clamp_sequence(
    seq: MotionSequence, bounds: WorkspaceBounds = DEFAULT_BOUNDS
) -> MotionSequence:
    """Clamp every keyframe, appending a note per changed field."""
    states = []
    notes = list(seq.notes)
    for k, state in enumerate(seq.states, start=1):
        clamped = clamp_state(state, bounds)
        if clamped != state:
            before = state.flatten()
            after = clamped.flatten()
            for col, b, a in zip(COLUMN_NAMES, before, after):
                if a != b:
                    notes.append(f"clamped t={k} {col}: {b:.6f} -> {a:.6f}")
        states.append(clamped)
    return MotionSequence(tuple(states), seq.keyframe_dt, tuple(notes))


# --- wire format ---------------------------------------------------------

_HEADER_RE = re.compile(
    r"SEQUENCE\s+v(?P<version>\d+)\s+T\s*=\s*(?P<T>\d+)\s+DT\s*=\s*(?P<DT>[0-9.eE+-]+)"
)
# Optional row label: "t=3:", "3:", "3)", "keyframe 3:". A bare "3." is never
# treated as a label -- it would swallow the integer part of a leading float.
_ROW_LABEL_RE = re.compile(r"^\s*(?:[A-Za-z]+\s*)?(?:t\s*=\s*)?\d+\s*[:)]\s*", re.I)
_FENCE_RE = re.compile(r"^\s*```")

# A line must yield at least this many leading floats to count as a data row.
_MIN_ROW_FIELDS = 12


def serialize_sequence(seq: MotionSequence) -> str:
    """Emit the canonical text block for a valid sequence."""
    lines = [f"SEQUENCE v1 T={len(seq)} DT={seq.keyframe_dt:.6f}"]
    for k, row in enumerate(seq.rows(), start=1):
        lines.append(f"t={k}: " + ", ".join(f"{v:.6f}" for v in row))
    lines.append("END")
    return "\n".join(lines) + "\n"


def _row_fields(line: str) -> list[float] | None:
    """Leading run of numeric fields on a line, or None if too few to be a row."""
    body = _ROW_LABEL_RE.sub("", line, count=1)
    fields: list[float] = []
    for token in re.split(r"[,\s]+", body.strip()):
        if not token:
            continue
        try:
            fields.append(float(token))
        except ValueError:
            break
    if len(fields) < _MIN_ROW_FIELDS:
        return None
    return fields


def parse_sequence(
    text: str,
    expected_t: int | None = None,
    default_dt: float = DEFAULT_KEYFRAME_DT,
    bounds: WorkspaceBounds = DEFAULT_BOUNDS,
) -> MotionSequence:
    """Extract the first keyframe block from arbitrary text.

    Surrounding prose, code fences, and row labels are ignored. Each row is
    clamped into range; clamp events land in the sequence notes. Raises
    NoSequenceFound, DimensionMismatch, or LengthMismatch.
    """
    header = _HEADER_RE.search(text)
    rows: list[tuple[int, list[float]]] = []  # (line number, fields)
    for lineno, line in enumerate(text.splitlines()):
        if _FENCE_RE.match(line) or _HEADER_RE.search(line):
            continue
        fields = _row_fields(line)
        if fields is not None:
            rows.append((lineno, fields))

    if not rows:
        raise NoSequenceFound()

    # First block = leading run of rows separated by at most one non-row line.
    block = [rows[0]]
    for prev, cur in zip(rows, rows[1:]):
        if cur[0] - prev[0] > 2:
            break
        block.append(cur)

    for index, (_, fields) in enumerate(block, start=1):
        if len(fields) != STATE_WIDTH:
            raise DimensionMismatch(index, len(fields))

    expected = expected_t if expected_t is not None else (
        int(header.group("T")) if header else None
    )
    if expected is not None and len(block) != expected:
        raise LengthMismatch(expected, len(block))

    dt = float(header.group("DT")) if header else default_dt
    if dt <= 0:
        raise SequenceParseError(f"non-positive DT in header: {dt}")

    states = tuple(MotionState.from_flat(fields) for _, fields in block)
    return clamp_sequence(MotionSequence(states, dt), bounds)
