"""Session orchestration: analyze, generate, refine on feedback, finalize, persist.

A session walks the state machine

    Analyzing -> AwaitingFeedback -> (Refining -> AwaitingFeedback)* -> Finalized

with Failed reachable from anywhere. Records are immutable; every operation
returns a new record, and the store writes snapshots atomically
(write-then-rename) so concurrent readers never see a torn file.

The refinement loop is bounded by `i_max` (default 5) counting only
operator-submitted feedback. When a generated sequence is kinematically
infeasible the session regenerates it once automatically, quoting the
feasibility diagnostic back to the model; if the retry is still infeasible
the sequence is surfaced to the operator, who can steer it with feedback.
"""

from __future__ import annotations

import json
import os
import time
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .agents import (
    BackendError,
    ChatBackend,
    ContextAnalysis,
    ContextInput,
    DEFAULT_ATTEMPTS,
    GenerationFailed,
    ImagePayload,
    UnparsableAnalysis,
    analyze_context,
    generate_sequence,
    refine_sequence,
)
from .kinematics import BodyModel, COLLISION_MARGIN
from .library import (
    Category,
    Demonstration,
    GestureSpec,
    builtin_demonstrations,
    find_gesture,
    save_gesture,
)
from .motion import (
    DEFAULT_BOUNDS,
    DEFAULT_KEYFRAME_DT,
    DEFAULT_T,
    MotionSequence,
    WorkspaceBounds,
)
from .trajectory import (
    DEFAULT_RATE,
    DenseTrajectory,
    MotionMetrics,
    SequenceFeasibility,
    check_sequence,
    check_trajectory,
    compute_metrics,
    interpolate,
    limit_speed,
    trajectory_to_text,
)

SCHEMA_VERSION = 1
DEFAULT_I_MAX = 5


class SessionStatus(Enum):
    ANALYZING = "analyzing"
    AWAITING_FEEDBACK = "awaiting_feedback"
    REFINING = "refining"
    FINALIZED = "finalized"
    FAILED = "failed"


class SessionError(RuntimeError):
    pass


class InvalidSessionState(SessionError):
    pass


class IterationLimitExceeded(SessionError):
    def __init__(self, i_max: int) -> None:
        self.i_max = i_max
        super().__init__(f"refinement limit reached: i_max={i_max}")


class NoFeasibleIteration(SessionError):
    pass


class SessionNotFound(SessionError):
    pass


class SchemaVersionMismatch(SessionError):
    def __init__(self, found: int) -> None:
        self.found = found
        super().__init__(
            f"session file has schema version {found}, this build reads {SCHEMA_VERSION}"
        )


@dataclass(frozen=True)
class SessionConfig:
    t: int = DEFAULT_T
    keyframe_dt: float = DEFAULT_KEYFRAME_DT
    rate: float = DEFAULT_RATE
    i_max: int = DEFAULT_I_MAX
    attempts: int = DEFAULT_ATTEMPTS
    regenerations: int = 1  # automatic retries for infeasible generations
    collision_margin: float = COLLISION_MARGIN
    bounds: WorkspaceBounds = DEFAULT_BOUNDS
    body: BodyModel = field(default_factory=BodyModel.default)
    prompt_dir: str | None = None


@dataclass(frozen=True)
class LatencyRecord:
    stage: str
    seconds: float

    def to_dict(self) -> dict:
        return {"stage": self.stage, "seconds": self.seconds}


@dataclass(frozen=True)
class IterationRecord:
    index: int
    sequence: MotionSequence
    reasoning: str
    feedback: str | None
    feasibility: SequenceFeasibility
    metrics: MotionMetrics

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "sequence": self.sequence.to_dict(),
            "reasoning": self.reasoning,
            "feedback": self.feedback,
            "feasibility": self.feasibility.to_dict(),
            "metrics": self.metrics.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IterationRecord":
        return cls(
            index=int(data["index"]),
            sequence=MotionSequence.from_dict(data["sequence"]),
            reasoning=data["reasoning"],
            feedback=data["feedback"],
            feasibility=SequenceFeasibility.from_dict(data["feasibility"]),
            metrics=MotionMetrics.from_dict(data["metrics"]),
        )


def _input_to_dict(context: ContextInput | None) -> dict | None:
    if context is None:
        return None
    return {
        "instruction": context.instruction,
        "image_b64": context.image.b64() if context.image else None,
        "image_media_type": context.image.media_type if context.image else None,
    }


def _input_from_dict(data: dict | None) -> ContextInput | None:
    if data is None:
        return None
    image = None
    if data.get("image_b64"):
        import base64

        image = ImagePayload(
            base64.b64decode(data["image_b64"]), data.get("image_media_type", "image/png")
        )
    return ContextInput(instruction=data.get("instruction"), image=image)


@dataclass(frozen=True)
class SessionRecord:
    id: str
    created_at: str
    status: SessionStatus
    input: ContextInput | None  # None when started from an explicit gesture
    gesture: GestureSpec | None  # resolved target gesture
    analysis: ContextAnalysis | None
    iterations: tuple[IterationRecord, ...] = ()
    i_max: int = DEFAULT_I_MAX
    notes: tuple[str, ...] = ()
    latencies: tuple[LatencyRecord, ...] = ()
    artifacts: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.iterations) > self.i_max + 1:
            raise ValueError(
                f"{len(self.iterations)} iterations exceeds i_max+1={self.i_max + 1}"
            )
        for expected, it in enumerate(self.iterations, start=1):
            if it.index != expected:
                raise ValueError("iteration indices must be contiguous from 1")

    @property
    def refinements(self) -> int:
        return max(0, len(self.iterations) - 1)

    @property
    def current(self) -> IterationRecord | None:
        return self.iterations[-1] if self.iterations else None

    def latest_feasible(self) -> IterationRecord | None:
        for it in reversed(self.iterations):
            if it.feasibility.feasible:
                return it
        return None

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "created_at": self.created_at,
            "status": self.status.value,
            "input": _input_to_dict(self.input),
            "gesture": self.gesture.to_dict() if self.gesture else None,
            "analysis": self.analysis.to_dict() if self.analysis else None,
            "iterations": [it.to_dict() for it in self.iterations],
            "i_max": self.i_max,
            "notes": list(self.notes),
            "latencies": [l.to_dict() for l in self.latencies],
            "artifacts": list(self.artifacts),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SessionRecord":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaVersionMismatch(version)
        return cls(
            id=data["id"],
            created_at=data["created_at"],
            status=SessionStatus(data["status"]),
            input=_input_from_dict(data.get("input")),
            gesture=GestureSpec.from_dict(data["gesture"]) if data.get("gesture") else None,
            analysis=(
                ContextAnalysis.from_dict(data["analysis"]) if data.get("analysis") else None
            ),
            iterations=tuple(IterationRecord.from_dict(d) for d in data["iterations"]),
            i_max=int(data["i_max"]),
            notes=tuple(data.get("notes", ())),
            latencies=tuple(
                LatencyRecord(l["stage"], float(l["seconds"]))
                for l in data.get("latencies", ())
            ),
            artifacts=tuple(data.get("artifacts", ())),
        )


def new_session_id() -> str:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%f")
    return f"{stamp}-{uuid.uuid4().hex[:6]}"


class SessionStore:
    """One JSON file per session under a directory; atomic writes."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.json"

    def bundle_dir(self, session_id: str) -> Path:
        return self.directory / session_id

    def save(self, record: SessionRecord) -> Path:
        target = self.path(record.id)
        tmp = target.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(record.to_dict(), indent=1) + "\n")
        os.replace(tmp, target)
        return target

    def load(self, session_id: str) -> SessionRecord:
        target = self.path(session_id)
        if not target.exists():
            raise SessionNotFound(f"no session {session_id!r} in {self.directory}")
        return SessionRecord.from_dict(json.loads(target.read_text()))

    def list_ids(self) -> list[str]:
        entries = []
        for path in self.directory.glob("*.json"):
            try:
                data = json.loads(path.read_text())
                entries.append((data.get("created_at", ""), path.stem))
            except (json.JSONDecodeError, OSError):
                continue
        return [sid for _, sid in sorted(entries)]


# --- pipeline steps ------------------------------------------------------------


def _timed(record: SessionRecord, stage: str, fn):
    start = time.perf_counter()
    result = fn()
    elapsed = time.perf_counter() - start
    return result, replace(
        record, latencies=record.latencies + (LatencyRecord(stage, elapsed),)
    )


def _evaluate(
    seq: MotionSequence, config: SessionConfig
) -> tuple[SequenceFeasibility, MotionMetrics]:
    feasibility = check_sequence(seq, config.body, config.collision_margin)
    metrics = compute_metrics(interpolate(seq, config.rate, config.bounds))
    return feasibility, metrics


def _generate_with_policy(
    record: SessionRecord,
    gesture: GestureSpec,
    demos: list[Demonstration],
    backend: ChatBackend,
    config: SessionConfig,
) -> tuple[MotionSequence, str, SequenceFeasibility, MotionMetrics, SessionRecord]:
    """Initial generation plus the regenerate-on-infeasible policy."""

    def call(extra=None, stage="generate"):
        return _timed(
            record,
            stage,
            lambda: generate_sequence(
                gesture,
                demos,
                backend,
                t=config.t,
                keyframe_dt=config.keyframe_dt,
                bounds=config.bounds,
                attempts=config.attempts,
                prompt_dir=config.prompt_dir,
                extra_context=extra,
            ),
        )

    (seq, reasoning), record = call()
    feasibility, metrics = _evaluate(seq, config)
    for attempt in range(config.regenerations):
        if feasibility.feasible:
            break
        diagnostic = feasibility.describe()
        record = replace(
            record,
            notes=record.notes
            + (f"regeneration {attempt + 1}: infeasible sequence ({diagnostic})",),
        )
        (seq, reasoning), record = call(
            extra=(
                "The sequence you produced is not executable on the robot: "
                f"{diagnostic}. Generate a corrected sequence that stays within "
                "comfortable reach of each shoulder and keeps the hands apart."
            ),
            stage="regenerate",
        )
        feasibility, metrics = _evaluate(seq, config)
    return seq, reasoning, feasibility, metrics, record


def _resolve_gesture(analysis: ContextAnalysis) -> GestureSpec:
    known = find_gesture(analysis.gesture)
    if known is not None:
        return known
    # Novel gesture named by the analyzer: carry the name through with the
    # narrative as its description.
    return GestureSpec(
        analysis.gesture, Category.ILLUSTRATOR, analysis.narrative.splitlines()[0][:200]
    )


def start_session(
    source: ContextInput | GestureSpec,
    backend: ChatBackend,
    config: SessionConfig | None = None,
    store: SessionStore | None = None,
    session_id: str | None = None,
) -> SessionRecord:
    """Run context analysis (unless given an explicit gesture) and the initial
    generation; returns the session awaiting operator feedback.

    On agent failure the session is persisted in the Failed state with
    diagnostics and the original exception propagates.
    """
    config = config or SessionConfig()
    record = SessionRecord(
        id=session_id or new_session_id(),
        created_at=datetime.now(timezone.utc).isoformat(),
        status=SessionStatus.ANALYZING,
        input=source if isinstance(source, ContextInput) else None,
        gesture=source if isinstance(source, GestureSpec) else None,
        analysis=None,
        i_max=config.i_max,
    )
    if store:
        store.save(record)

    try:
        if record.gesture is None:
            analysis, record = _timed(
                record,
                "analyze",
                lambda: analyze_context(
                    record.input,
                    backend,
                    attempts=config.attempts,
                    prompt_dir=config.prompt_dir,
                ),
            )
            record = replace(record, analysis=analysis, gesture=_resolve_gesture(analysis))

        demos = builtin_demonstrations()
        seq, reasoning, feasibility, metrics, record = _generate_with_policy(
            record, record.gesture, demos, backend, config
        )
        iteration = IterationRecord(1, seq, reasoning, None, feasibility, metrics)
        if not feasibility.feasible:
            record = replace(
                record,
                notes=record.notes
                + (
                    "sequence still infeasible after automatic regeneration; "
                    "surface to operator for feedback",
                ),
            )
        record = replace(
            record,
            iterations=(iteration,),
            status=SessionStatus.AWAITING_FEEDBACK,
        )
        if store:
            store.save(record)
        return record
    except (BackendError, GenerationFailed, UnparsableAnalysis) as err:
        failed = replace(
            record,
            status=SessionStatus.FAILED,
            notes=record.notes + (f"{type(err).__name__}: {err}",),
        )
        if store:
            store.save(failed)
        err.session = failed  # let callers reach the failed record
        raise


def submit_feedback(
    record: SessionRecord,
    feedback: str,
    backend: ChatBackend,
    config: SessionConfig | None = None,
    store: SessionStore | None = None,
) -> SessionRecord:
    """Attach feedback to the current iteration and produce the next one."""
    config = config or SessionConfig()
    if record.status is not SessionStatus.AWAITING_FEEDBACK:
        raise InvalidSessionState(
            f"cannot accept feedback while session is {record.status.value}"
        )
    if not feedback or not feedback.strip():
        raise InvalidSessionState("feedback text must be nonempty")
    if record.refinements >= record.i_max:
        raise IterationLimitExceeded(record.i_max)

    iterations = list(record.iterations)
    iterations[-1] = replace(iterations[-1], feedback=feedback.strip())
    record = replace(
        record, iterations=tuple(iterations), status=SessionStatus.REFINING
    )
    if store:
        store.save(record)

    history = [(it.sequence, it.feedback) for it in record.iterations]
    try:
        (seq, reasoning), record = _timed(
            record,
            "refine",
            lambda: refine_sequence(
                history,
                backend,
                bounds=config.bounds,
                attempts=config.attempts,
                prompt_dir=config.prompt_dir,
            ),
        )
        feasibility, metrics = _evaluate(seq, config)
        for attempt in range(config.regenerations):
            if feasibility.feasible:
                break
            diagnostic = feasibility.describe()
            record = replace(
                record,
                notes=record.notes
                + (f"refinement regeneration {attempt + 1}: {diagnostic}",),
            )
            (seq, reasoning), record = _timed(
                record,
                "regenerate",
                lambda: refine_sequence(
                    history,
                    backend,
                    bounds=config.bounds,
                    attempts=config.attempts,
                    prompt_dir=config.prompt_dir,
                    extra_context=(
                        "The sequence you produced is not executable on the robot: "
                        f"{diagnostic}. Produce a corrected version."
                    ),
                ),
            )
            feasibility, metrics = _evaluate(seq, config)
        iteration = IterationRecord(
            len(record.iterations) + 1, seq, reasoning, None, feasibility, metrics
        )
        record = replace(
            record,
            iterations=record.iterations + (iteration,),
            status=SessionStatus.AWAITING_FEEDBACK,
        )
        if store:
            store.save(record)
        return record
    except (BackendError, GenerationFailed) as err:
        failed = replace(
            record,
            status=SessionStatus.FAILED,
            notes=record.notes + (f"{type(err).__name__}: {err}",),
        )
        if store:
            store.save(failed)
        err.session = failed
        raise


def finalize(
    record: SessionRecord,
    rate: float | None = None,
    config: SessionConfig | None = None,
    store: SessionStore | None = None,
    max_speed: float | None = None,
) -> tuple[SessionRecord, DenseTrajectory]:
    """Interpolate the latest feasible iteration and write the export bundle.

    Idempotent: finalizing twice re-derives the same artifact. `max_speed`
    optionally caps per-hand speed by local retiming before export.
    """
    config = config or SessionConfig()
    rate = rate if rate is not None else config.rate
    chosen = record.latest_feasible()
    if chosen is None:
        raise NoFeasibleIteration(
            f"session {record.id} has no feasible iteration to execute"
        )
    traj = interpolate(chosen.sequence, rate, config.bounds)
    if max_speed is not None:
        traj = limit_speed(traj, max_speed)
    traj = traj.with_feasibility(
        check_trajectory(traj, config.body, config.collision_margin)
    )

    artifacts: tuple[str, ...] = ()
    if store:
        bundle = store.bundle_dir(record.id)
        bundle.mkdir(parents=True, exist_ok=True)
        gesture = record.gesture or GestureSpec(
            "unnamed-gesture", Category.ILLUSTRATOR, ""
        )
        gesture_path = bundle / "final.gesture"
        save_gesture(gesture_path, gesture, chosen.sequence)
        traj_path = bundle / "trajectory.txt"
        traj_path.write_text(trajectory_to_text(traj))
        metrics_path = bundle / "metrics.json"
        metrics_path.write_text(json.dumps(chosen.metrics.to_dict(), indent=1) + "\n")
        artifacts = tuple(
            str(p.relative_to(store.directory))
            for p in (gesture_path, traj_path, metrics_path)
        )

    record = replace(record, status=SessionStatus.FINALIZED, artifacts=artifacts)
    if store:
        store.save(record)
    return record, traj


# --- batch feedback statistics ----------------------------------------------------

# Cues that a feedback line asks for a qualitative/stylistic change rather
# than a concrete positional one.
HIGH_LEVEL_CUES = (
    "random",
    "nuanc",
    "subtle",
    "exaggerat",
    "natural",
    "smooth",
    "energ",
    "expressive",
    "dynamic",
    "dramatic",
    "lively",
    "emphas",
)


def classify_feedback(text: str) -> str:
    lowered = text.lower()
    if any(cue in lowered for cue in HIGH_LEVEL_CUES):
        return "high_level"
    return "positional"


@dataclass(frozen=True)
class FeedbackStats:
    sessions: int
    total_feedback: int
    mean_feedback_per_session: float
    high_level: int
    positional: int

    @property
    def high_level_fraction(self) -> float:
        return self.high_level / self.total_feedback if self.total_feedback else 0.0

    def to_dict(self) -> dict:
        return {
            "sessions": self.sessions,
            "total_feedback": self.total_feedback,
            "mean_feedback_per_session": self.mean_feedback_per_session,
            "high_level": self.high_level,
            "positional": self.positional,
            "high_level_fraction": self.high_level_fraction,
        }


def feedback_statistics(records) -> FeedbackStats:
    """Observational comparison point for operator behavior across sessions."""
    records = list(records)
    texts = [
        it.feedback
        for record in records
        for it in record.iterations
        if it.feedback
    ]
    high = sum(1 for t in texts if classify_feedback(t) == "high_level")
    return FeedbackStats(
        sessions=len(records),
        total_feedback=len(texts),
        mean_feedback_per_session=(len(texts) / len(records)) if records else 0.0,
        high_level=high,
        positional=len(texts) - high,
    )
