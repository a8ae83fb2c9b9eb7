"""The three chat agents: context analysis, sequence generation, feedback refinement.

Each agent is a prompt builder plus a response interpreter over a pluggable
`ChatBackend`. The only implementation that touches the network is
`OpenAIBackend` (chat-completions protocol); `ScriptedBackend` replays canned
responses and records every prompt it was shown, which is what all tests run
against.

Prompt construction is pure: identical inputs produce byte-identical message
lists. When a response cannot be parsed, the parser diagnostic is quoted back
to the model and the call is retried, up to a configured attempt budget.
"""

from __future__ import annotations

import base64
import os
import re
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from string import Template
from typing import Protocol, Sequence

import httpx

from .library import Demonstration, GestureSpec, builtin_gestures, canonical_name, find_gesture
from .motion import (
    DEFAULT_BOUNDS,
    DEFAULT_KEYFRAME_DT,
    DEFAULT_T,
    MotionSequence,
    SequenceParseError,
    WorkspaceBounds,
    parse_sequence,
    serialize_sequence,
)

DEFAULT_MODEL = "gpt-4o-2024-05-13"
DEFAULT_TEMPERATURE = 0.7
DEFAULT_ATTEMPTS = 3

SCRIPT_SENTINEL = "====="


class BackendError(RuntimeError):
    """Transport, auth, or protocol failure talking to a chat backend."""


class ScriptExhausted(BackendError):
    def __init__(self, calls: int) -> None:
        super().__init__(f"scripted backend exhausted after {calls} responses")


class UnparsableAnalysis(RuntimeError):
    """No gesture tag could be extracted within the attempt budget."""


class GenerationFailed(RuntimeError):
    """No parsable sequence within the attempt budget; carries the last parse error."""

    def __init__(self, attempts: int, last_error: Exception) -> None:
        self.attempts = attempts
        self.last_error = last_error
        super().__init__(f"no usable sequence after {attempts} attempts: {last_error}")


@dataclass(frozen=True)
class ImagePayload:
    data: bytes
    media_type: str = "image/png"

    def b64(self) -> str:
        return base64.b64encode(self.data).decode("ascii")

    @classmethod
    def from_file(cls, path) -> "ImagePayload":
        path = Path(path)
        suffix = path.suffix.lower().lstrip(".")
        media = {"jpg": "image/jpeg", "jpeg": "image/jpeg", "png": "image/png"}.get(
            suffix, "image/png"
        )
        return cls(data=path.read_bytes(), media_type=media)


@dataclass(frozen=True)
class ChatMessage:
    role: str
    text: str
    image: ImagePayload | None = None


@dataclass(frozen=True)
class ContextInput:
    instruction: str | None = None
    image: ImagePayload | None = None

    def __post_init__(self) -> None:
        if self.instruction is None and self.image is None:
            raise ValueError("context input needs an instruction, an image, or both")


@dataclass(frozen=True)
class ContextAnalysis:
    narrative: str
    gesture: str
    novel: bool = False

    def to_dict(self) -> dict:
        return {"narrative": self.narrative, "gesture": self.gesture, "novel": self.novel}

    @classmethod
    def from_dict(cls, data: dict) -> "ContextAnalysis":
        return cls(data["narrative"], data["gesture"], bool(data.get("novel", False)))


class ChatBackend(Protocol):
    model: str
    supports_images: bool

    def complete(self, messages: Sequence[ChatMessage]) -> str: ...


class ScriptedBackend:
    """Deterministic test double: replays responses in order, records prompts."""

    def __init__(self, responses: Sequence[str], supports_images: bool = True):
        self.model = "scripted"
        self.supports_images = supports_images
        self._responses = list(responses)
        self.history: list[tuple[ChatMessage, ...]] = []

    @property
    def calls(self) -> int:
        return len(self.history)

    @property
    def remaining(self) -> int:
        return len(self._responses) - len(self.history)

    def complete(self, messages: Sequence[ChatMessage]) -> str:
        self.history.append(tuple(messages))
        index = len(self.history) - 1
        if index >= len(self._responses):
            raise ScriptExhausted(len(self._responses))
        return self._responses[index]


def dump_script(responses: Sequence[str]) -> str:
    """Fixture file format: responses separated by a bare sentinel line."""
    return f"\n{SCRIPT_SENTINEL}\n".join(r.rstrip("\n") for r in responses) + "\n"


def load_script(path) -> ScriptedBackend:
    text = Path(path).read_text()
    responses = [part.strip("\n") for part in text.split(f"\n{SCRIPT_SENTINEL}\n")]
    return ScriptedBackend(responses)


class OpenAIBackend:
    """Chat-completions client for any OpenAI-compatible endpoint.

    The API key comes from the environment (`OPENAI_API_KEY` by default) so it
    never lands in config files or session records.
    """

    def __init__(
        self,
        model: str = DEFAULT_MODEL,
        base_url: str = "https://api.openai.com/v1",
        api_key_env: str = "OPENAI_API_KEY",
        temperature: float = DEFAULT_TEMPERATURE,
        timeout: float = 120.0,
        transport_retries: int = 3,
        retry_backoff: float = 1.0,
        client: httpx.Client | None = None,
    ):
        self.model = model
        self.supports_images = True
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.temperature = temperature
        self.timeout = timeout
        self.transport_retries = transport_retries
        self.retry_backoff = retry_backoff
        self._client = client  # injectable for tests; None = one-shot httpx.post

    def _payload_messages(self, messages: Sequence[ChatMessage]) -> list[dict]:
        out = []
        for m in messages:
            if m.image is None:
                out.append({"role": m.role, "content": m.text})
            else:
                out.append(
                    {
                        "role": m.role,
                        "content": [
                            {"type": "text", "text": m.text},
                            {
                                "type": "image_url",
                                "image_url": {
                                    "url": f"data:{m.image.media_type};base64,{m.image.b64()}"
                                },
                            },
                        ],
                    }
                )
        return out

    def complete(self, messages: Sequence[ChatMessage]) -> str:
        api_key = os.environ.get(self.api_key_env)
        if not api_key:
            raise BackendError(
                f"no API key: set the {self.api_key_env} environment variable"
            )
        payload = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": self._payload_messages(messages),
        }
        headers = {"Authorization": f"Bearer {api_key}"}
        url = f"{self.base_url}/chat/completions"
        backoff = self.retry_backoff
        post = self._client.post if self._client is not None else httpx.post
        for attempt in range(self.transport_retries + 1):
            try:
                response = post(url, json=payload, headers=headers, timeout=self.timeout)
            except httpx.HTTPError as err:
                if attempt == self.transport_retries:
                    raise BackendError(f"transport failure: {err}") from err
                time.sleep(backoff)
                backoff *= 2
                continue
            if response.status_code == 429 or response.status_code >= 500:
                if attempt == self.transport_retries:
                    raise BackendError(
                        f"backend returned {response.status_code}: {response.text[:200]}"
                    )
                time.sleep(backoff)
                backoff *= 2
                continue
            if response.status_code != 200:
                raise BackendError(
                    f"backend returned {response.status_code}: {response.text[:200]}"
                )
            try:
                return response.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, ValueError) as err:
                raise BackendError(f"malformed completion response: {err}") from err
        raise BackendError("unreachable")


# --- prompt construction -----------------------------------------------------


def _default_prompt_dir():
    return resources.files("gesturelab").joinpath("prompts")


def load_template(name: str, prompt_dir=None) -> Template:
    if prompt_dir is not None:
        return Template(Path(prompt_dir).joinpath(f"{name}.txt").read_text())
    return Template(_default_prompt_dir().joinpath(f"{name}.txt").read_text())


def frame_definition(bounds: WorkspaceBounds = DEFAULT_BOUNDS) -> str:
    return (
        "Coordinate frame (torso frame): origin at the robot's sternum midpoint; "
        "x points forward out of the chest, y points to the robot's left, z points "
        "up; all positions are in meters. Keep every hand position inside the "
        f"workspace box x in [{bounds.x[0]:g}, {bounds.x[1]:g}], "
        f"y in [{bounds.y[0]:g}, {bounds.y[1]:g}], "
        f"z in [{bounds.z[0]:g}, {bounds.z[1]:g}]."
    )


REPRESENTATION = (
    "Each keyframe is one row of exactly 22 numbers: first the left hand, then "
    "the right hand. Per hand: x, y, z position (meters); roll, pitch, yaw "
    "orientation (radians, intrinsic Z-Y-X, each in [-3.14159, 3.14159]); then "
    "five finger apertures in [0, 1] ordered thumb, index, middle, ring, pinky "
    "(0 = fully closed, 1 = fully open)."
)


def grammar_block(t: int, dt: float) -> str:
    return (
        "Output the sequence in exactly this plain-text block format:\n\n"
        f"SEQUENCE v1 T={t} DT={dt:.6f}\n"
        "t=1: <22 comma-separated values with 6 decimal places>\n"
        "...\n"
        f"t={t}: <22 comma-separated values>\n"
        "END"
    )


def render_gesture_menu(gestures: Sequence[GestureSpec]) -> str:
    return "\n".join(f"- <{g.name}>: {g.description}" for g in gestures)


def render_demos(demos: Sequence[Demonstration]) -> str:
    parts = []
    for demo in demos:
        parts.append(
            f"Gesture <{demo.gesture.name}>: {demo.gesture.description}\n"
            + serialize_sequence(demo.sequence)
        )
    return "\n".join(parts)


def render_history(history: Sequence[tuple[MotionSequence, str]]) -> str:
    parts = []
    for i, (seq, feedback) in enumerate(history, start=1):
        parts.append(f"Sequence version {i}:\n{serialize_sequence(seq)}")
        parts.append(f"Operator feedback on version {i}: {feedback}\n")
    return "\n".join(parts)


def build_analyze_messages(
    context: ContextInput,
    gestures: Sequence[GestureSpec],
    prompt_dir=None,
) -> tuple[ChatMessage, ...]:
    system = load_template("analyze", prompt_dir).substitute(
        gesture_menu=render_gesture_menu(gestures)
    )
    user_text = context.instruction or "Decide how to respond to what you see."
    return (
        ChatMessage("system", system),
        ChatMessage("user", user_text, image=context.image),
    )


def build_generate_messages(
    gesture: GestureSpec,
    demos: Sequence[Demonstration],
    t: int,
    dt: float,
    bounds: WorkspaceBounds = DEFAULT_BOUNDS,
    prompt_dir=None,
    extra_context: str | None = None,
) -> tuple[ChatMessage, ...]:
    body = load_template("generate", prompt_dir).substitute(
        frame_definition=frame_definition(bounds),
        representation=REPRESENTATION,
        grammar=grammar_block(t, dt),
        demos=render_demos(demos),
        gesture=gesture.name,
        description=gesture.description or "(no description)",
        T=t,
        dt=f"{dt:.6f}",
    )
    messages = [ChatMessage("user", body)]
    if extra_context:
        messages.append(ChatMessage("user", extra_context))
    return tuple(messages)


def build_refine_messages(
    history: Sequence[tuple[MotionSequence, str]],
    t: int,
    dt: float,
    bounds: WorkspaceBounds = DEFAULT_BOUNDS,
    prompt_dir=None,
    extra_context: str | None = None,
) -> tuple[ChatMessage, ...]:
    body = load_template("refine", prompt_dir).substitute(
        frame_definition=frame_definition(bounds),
        representation=REPRESENTATION,
        grammar=grammar_block(t, dt),
        history=render_history(history),
        T=t,
        dt=f"{dt:.6f}",
    )
    messages = [ChatMessage("user", body)]
    if extra_context:
        messages.append(ChatMessage("user", extra_context))
    return tuple(messages)


# --- response interpretation ---------------------------------------------------

_TAG_RE = re.compile(r"<gesture>\s*(.+?)\s*</gesture>", re.IGNORECASE | re.DOTALL)
_ANGLE_RE = re.compile(r"[⟨<]([a-z0-9][a-z0-9 _-]{0,60})[⟩>]", re.IGNORECASE)


def extract_gesture_tag(text: str) -> str | None:
    match = _TAG_RE.search(text)
    if match:
        return match.group(1).strip()
    for match in _ANGLE_RE.finditer(text):
        candidate = match.group(1).strip()
        if candidate.lower() not in ("gesture", "/gesture"):
            return candidate
    return None


# --- the three agents -------------------------------------------------------------


def analyze_context(
    context: ContextInput,
    backend: ChatBackend,
    gestures: Sequence[GestureSpec] | None = None,
    attempts: int = DEFAULT_ATTEMPTS,
    prompt_dir=None,
) -> ContextAnalysis:
    """Agent one: narrative social-context analysis plus a gesture choice."""
    if context.image is not None and not backend.supports_images:
        raise ValueError("backend does not support images but an image was provided")
    gestures = list(gestures) if gestures is not None else builtin_gestures()
    messages = list(build_analyze_messages(context, gestures, prompt_dir))
    last_text = ""
    for _ in range(attempts):
        text = backend.complete(messages)
        last_text = text
        tag = extract_gesture_tag(text)
        if tag:
            known = find_gesture(tag)
            if known is not None:
                return ContextAnalysis(narrative=text, gesture=known.name, novel=False)
            normalized = "-".join(canonical_words(tag))
            return ContextAnalysis(narrative=text, gesture=normalized, novel=True)
        messages.append(ChatMessage("assistant", text))
        messages.append(
            ChatMessage(
                "user",
                "Your answer is missing the gesture tag. Repeat your conclusion and "
                "finish with one line of the form <gesture>name</gesture>.",
            )
        )
    raise UnparsableAnalysis(
        f"no gesture tag after {attempts} attempts; last response began: {last_text[:120]!r}"
    )


def canonical_words(name: str) -> list[str]:
    words = re.split(r"[^a-z0-9]+", name.lower())
    return [w for w in words if w]


def _generate_with_retry(
    backend: ChatBackend,
    messages: list[ChatMessage],
    t: int,
    dt: float,
    bounds: WorkspaceBounds,
    attempts: int,
) -> tuple[MotionSequence, str]:
    last_error: Exception | None = None
    for _ in range(attempts):
        text = backend.complete(messages)
        try:
            seq = parse_sequence(text, expected_t=t, default_dt=dt, bounds=bounds)
            return seq, text
        except SequenceParseError as err:
            last_error = err
            messages.append(ChatMessage("assistant", text))
            messages.append(
                ChatMessage(
                    "user",
                    f"That response could not be used: {err}. Reply again with the "
                    f"complete block (SEQUENCE v1 T={t} DT={dt:.6f} ... END) and "
                    f"nothing missing.",
                )
            )
    raise GenerationFailed(attempts, last_error)


def generate_sequence(
    gesture: GestureSpec,
    demos: Sequence[Demonstration],
    backend: ChatBackend,
    t: int = DEFAULT_T,
    keyframe_dt: float = DEFAULT_KEYFRAME_DT,
    bounds: WorkspaceBounds = DEFAULT_BOUNDS,
    attempts: int = DEFAULT_ATTEMPTS,
    prompt_dir=None,
    extra_context: str | None = None,
) -> tuple[MotionSequence, str]:
    """Agent two: in-context generation of the initial sequence from demonstrations."""
    if not demos:
        raise ValueError("at least one demonstration is required")
    if t < 2:
        raise ValueError(f"sequence length must be >= 2, got {t}")
    messages = list(
        build_generate_messages(
            gesture, demos, t, keyframe_dt, bounds, prompt_dir, extra_context
        )
    )
    return _generate_with_retry(backend, messages, t, keyframe_dt, bounds, attempts)


def refine_sequence(
    history: Sequence[tuple[MotionSequence, str]],
    backend: ChatBackend,
    bounds: WorkspaceBounds = DEFAULT_BOUNDS,
    attempts: int = DEFAULT_ATTEMPTS,
    prompt_dir=None,
    extra_context: str | None = None,
) -> tuple[MotionSequence, str]:
    """Agent three: next sequence version from the full alternating history."""
    if not history:
        raise ValueError("refinement requires at least one (sequence, feedback) entry")
    if not history[-1][1] or not history[-1][1].strip():
        raise ValueError("the most recent history entry has no feedback text")
    last_seq = history[-1][0]
    t, dt = len(last_seq), last_seq.keyframe_dt
    messages = list(
        build_refine_messages(history, t, dt, bounds, prompt_dir, extra_context)
    )
    return _generate_with_retry(backend, messages, t, dt, bounds, attempts)
