"""Gesture taxonomy, the builtin gesture set, in-context demonstrations, gesture files.

Gestures are organized by the classic four-way non-verbal taxonomy: emblems
(translate directly into words), illustrators (accompany and reinforce
speech), affect displays (carry emotional meaning), and regulators (control
the flow of conversation).

Two demonstrations ship with the package - "idle" and "right-hand-wave" -
and are the only motion examples the sequence-generating agent ever sees.
Their keyframes are authored content (see `authoring.py`), bundled as
`.gesture` files and validated on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .motion import MotionSequence, validate_state


class Category(Enum):
    EMBLEM = "emblem"
    ILLUSTRATOR = "illustrator"
    AFFECT_DISPLAY = "affect_display"
    REGULATOR = "regulator"


@dataclass(frozen=True)
class GestureSpec:
    name: str
    category: Category
    description: str = ""

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("gesture name must be nonempty")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "category": self.category.value,
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GestureSpec":
        return cls(
            name=data["name"],
            category=Category(data["category"]),
            description=data.get("description", ""),
        )


@dataclass(frozen=True)
class Demonstration:
    gesture: GestureSpec
    sequence: MotionSequence


class GestureFileError(ValueError):
    """A gesture file failed to parse; message carries the offending detail."""


class CorruptBundle(RuntimeError):
    """A bundled asset failed validation."""


FILE_FORMAT = "gesture/1"

BUILTIN_SPECS = (
    GestureSpec(
        "thumbs-up",
        Category.EMBLEM,
        "Raise the right fist to chest height with the thumb extended upward.",
    ),
    GestureSpec(
        "okay",
        Category.EMBLEM,
        "Lift the right hand and pinch thumb and index into a ring, other fingers open.",
    ),
    GestureSpec(
        "v-sign",
        Category.EMBLEM,
        "Raise the right hand high with index and middle fingers spread in a V.",
    ),
    GestureSpec(
        "air-quotes",
        Category.ILLUSTRATOR,
        "Hold both hands at shoulder height and flex index and middle fingers twice.",
    ),
    GestureSpec(
        "come-closer",
        Category.ILLUSTRATOR,
        "Extend the right arm forward palm-up and curl the fingers in repeatedly.",
    ),
    GestureSpec(
        "fist-pump",
        Category.AFFECT_DISPLAY,
        "Punch the right fist upward twice with an energetic bounce.",
    ),
    GestureSpec(
        "jazz-hands",
        Category.AFFECT_DISPLAY,
        "Raise both open hands beside the shoulders and shake them quickly.",
    ),
    GestureSpec(
        "spread-hands",
        Category.AFFECT_DISPLAY,
        "Open both arms outward and down with palms turned upward.",
    ),
    GestureSpec(
        "stop",
        Category.REGULATOR,
        "Extend the right arm forward with the palm facing out, fingers up.",
    ),
    GestureSpec(
        "listening",
        Category.REGULATOR,
        "Cup the right hand beside the ear and hold it there attentively.",
    ),
)

DEMO_SPECS = (
    GestureSpec(
        "idle",
        Category.REGULATOR,
        "Both hands rest naturally at the sides with relaxed fingers.",
    ),
    GestureSpec(
        "right-hand-wave",
        Category.EMBLEM,
        "The right hand raises to head height and sweeps side to side while the left hand stays at rest.",
    ),
)


def builtin_gestures() -> list[GestureSpec]:
    """The ten target gestures, three/two/three/two across the four categories."""
    return list(BUILTIN_SPECS)


def find_gesture(name: str) -> GestureSpec | None:
    normalized = canonical_name(name)
    for spec in BUILTIN_SPECS + DEMO_SPECS:
        if canonical_name(spec.name) == normalized:
            return spec
    return None


def canonical_name(name: str) -> str:
    """Case/punctuation-insensitive key: 'Thumbs Up!' == 'thumbs-up'."""
    return "".join(ch for ch in name.lower() if ch.isalnum())


# --- gesture files ---------------------------------------------------------


def save_gesture(path, spec: GestureSpec, seq: MotionSequence) -> None:
    path = Path(path)
    payload = {
        "format": FILE_FORMAT,
        "name": spec.name,
        "category": spec.category.value,
        "description": spec.description,
        "sequence": seq.to_dict(),
    }
    path.write_text(json.dumps(payload, indent=1) + "\n")


def _parse_gesture_json(raw: str, origin: str) -> tuple[GestureSpec, MotionSequence]:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as err:
        raise GestureFileError(f"{origin}: invalid JSON at line {err.lineno}: {err.msg}")
    if data.get("format") != FILE_FORMAT:
        raise GestureFileError(f"{origin}: unsupported format {data.get('format')!r}")
    for field in ("name", "category", "sequence"):
        if field not in data:
            raise GestureFileError(f"{origin}: missing field {field!r}")
    try:
        category = Category(data["category"])
    except ValueError:
        raise GestureFileError(f"{origin}: unknown category {data['category']!r}")
    spec = GestureSpec(data["name"], category, data.get("description", ""))
    try:
        seq = MotionSequence.from_dict(data["sequence"])
    except (KeyError, ValueError, TypeError) as err:
        raise GestureFileError(f"{origin}: bad sequence: {err}")
    return spec, seq


def load_gesture(path) -> tuple[GestureSpec, MotionSequence]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"gesture file not found: {path}")
    return _parse_gesture_json(path.read_text(), str(path))


# --- bundled assets --------------------------------------------------------


def _bundle_root():
    return resources.files("gesturelab").joinpath("assets/gestures")


def bundled_names() -> list[str]:
    return sorted(
        p.name.removesuffix(".gesture")
        for p in _bundle_root().iterdir()
        if p.name.endswith(".gesture")
    )


def load_bundled(name: str) -> tuple[GestureSpec, MotionSequence]:
    entry = _bundle_root().joinpath(f"{name}.gesture")
    if not entry.is_file():
        raise FileNotFoundError(f"no bundled gesture named {name!r}")
    return _parse_gesture_json(entry.read_text(), f"bundled:{name}")


def builtin_demonstrations() -> list[Demonstration]:
    """The two in-context demonstrations, validated against the state invariants."""
    demos = []
    for spec in DEMO_SPECS:
        try:
            loaded_spec, seq = load_bundled(spec.name)
        except (FileNotFoundError, GestureFileError) as err:
            raise CorruptBundle(f"demonstration {spec.name!r} unavailable: {err}")
        for k, state in enumerate(seq.states):
            report = validate_state(state)
            if not report.ok:
                raise CorruptBundle(
                    f"demonstration {spec.name!r} keyframe {k} invalid: {report.paths()}"
                )
        demos.append(Demonstration(loaded_spec, seq))
    return demos


def export_bundled(directory) -> list[Path]:
    """Copy every bundled gesture file into a directory; returns written paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in bundled_names():
        spec, seq = load_bundled(name)
        target = directory / f"{name}.gesture"
        save_gesture(target, spec, seq)
        written.append(target)
    return written
