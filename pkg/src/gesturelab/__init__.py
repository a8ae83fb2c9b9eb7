"""Expressive humanoid gesture generation with chained LLM agents.

The pipeline: a context analyzer picks a gesture from an image and/or an
instruction, an in-context generator writes a 10-keyframe motion sequence
for both hands (22 values per keyframe), and a refiner improves it from
natural-language operator feedback, bounded at five rounds. Sequences are
executed through damped-least-squares IK, capsule self-collision checks,
and cubic-Hermite/slerp interpolation into a dense trajectory.
"""

from .agents import (
    ChatBackend,
    ContextAnalysis,
    ContextInput,
    OpenAIBackend,
    ScriptedBackend,
    analyze_context,
    generate_sequence,
    refine_sequence,
)
from .config import AppConfig
from .kinematics import (
    ArmModel,
    BodyModel,
    HandPose,
    JointConfig,
    Side,
    check_reachability,
    check_self_collision,
    forward_kinematics,
    solve_ik,
)
from .library import (
    Category,
    Demonstration,
    GestureSpec,
    builtin_demonstrations,
    builtin_gestures,
    load_gesture,
    save_gesture,
)
from .motion import (
    HandState,
    MotionSequence,
    MotionState,
    WorkspaceBounds,
    clamp_state,
    parse_sequence,
    serialize_sequence,
    validate_state,
)
from .session import (
    SessionConfig,
    SessionRecord,
    SessionStatus,
    SessionStore,
    feedback_statistics,
    finalize,
    start_session,
    submit_feedback,
)
from .trajectory import (
    DenseTrajectory,
    MotionMetrics,
    check_sequence,
    check_trajectory,
    compute_metrics,
    interpolate,
    limit_speed,
    retime,
)

__version__ = "0.1.0"
