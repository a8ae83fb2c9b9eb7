"""Upper-body kinematics: 7-DoF arm chains, damped-least-squares IK, capsule collision.

Chain convention (torso frame: x forward, y robot-left, z up):

  * at all-zero angles the arm hangs straight down (-z), fingers pointing down,
    back of the hand facing forward;
  * joint order: shoulder-pitch, shoulder-roll, shoulder-yaw, elbow,
    wrist-roll, wrist-pitch, wrist-yaw;
  * positive shoulder-pitch and elbow swing the limb forward (+x), positive
    shoulder-roll swings it toward the robot's left (+y) for both arms.

The hand frame has x along the fingers and z out of the back of the palm,
so the mount rotation from the last link is a fixed +90 deg pitch.

Finger apertures are kinematically decoupled from the chain: they map to
actuated open/close scalars and never enter IK.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.spatial.transform import Rotation

from .motion import MotionState

JOINT_NAMES = (
    "shoulder_pitch",
    "shoulder_roll",
    "shoulder_yaw",
    "elbow",
    "wrist_roll",
    "wrist_pitch",
    "wrist_yaw",
)

# Rotation axis of each joint in its local frame (signs fold the "positive =
# forward / robot-left" convention into the axes).
_JOINT_AXES = np.array(
    [
        [0.0, -1.0, 0.0],  # shoulder pitch
        [1.0, 0.0, 0.0],  # shoulder roll
        [0.0, 0.0, 1.0],  # shoulder yaw (upper-arm twist)
        [0.0, -1.0, 0.0],  # elbow
        [0.0, 0.0, 1.0],  # wrist roll (forearm twist)
        [0.0, -1.0, 0.0],  # wrist pitch
        [1.0, 0.0, 0.0],  # wrist yaw
    ]
)

# Hand mount: fingers (+x hand) along the link -z, palm back (+z hand) forward.
_R_MOUNT = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])

DEFAULT_JOINT_LIMITS = (
    (-2.967, 2.967),  # shoulder pitch
    (-2.094, 2.094),  # shoulder roll
    (-2.094, 2.094),  # shoulder yaw
    (0.0, 2.618),  # elbow (0 = straight)
    (-1.571, 1.571),  # wrist roll
    (-1.571, 1.571),  # wrist pitch
    (-1.047, 1.047),  # wrist yaw
)


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


class JointLimitViolation(ValueError):
    pass


class Unreachable(RuntimeError):
    """IK did not meet tolerance; carries the best configuration found."""

    def __init__(self, best: "JointConfig", position_error: float, orientation_error: float):
        self.best = best
        self.position_error = position_error
        self.orientation_error = orientation_error
        super().__init__(
            f"IK residual above tolerance: pos {position_error:.4g} m, "
            f"ori {orientation_error:.4g} rad"
        )


@dataclass(frozen=True)
class JointConfig:
    angles: tuple[float, float, float, float, float, float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if len(self.angles) != 7:
            raise ValueError(f"expected 7 joint angles, got {len(self.angles)}")

    def as_array(self) -> np.ndarray:
        return np.array(self.angles)


@dataclass(frozen=True)
class HandPose:
    """Hand frame in the torso frame: position (m) and roll/pitch/yaw (rad)."""

    position: tuple[float, float, float]
    orientation: tuple[float, float, float]

    def rotation_matrix(self) -> np.ndarray:
        return euler_to_matrix(self.orientation)


def euler_to_matrix(rpy) -> np.ndarray:
    """Intrinsic Z-Y-X rotation from (roll, pitch, yaw)."""
    roll, pitch, yaw = rpy
    return Rotation.from_euler("ZYX", [yaw, pitch, roll]).as_matrix()


def matrix_to_euler(matrix: np.ndarray) -> tuple[float, float, float]:
    """(roll, pitch, yaw) of a rotation matrix; picks roll = 0 at gimbal lock."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # scipy warns at the pitch = +-pi/2 branch
        yaw, pitch, roll = Rotation.from_matrix(matrix).as_euler("ZYX")
    return (float(roll), float(pitch), float(yaw))


def geodesic_angle(r_a: np.ndarray, r_b: np.ndarray) -> float:
    """Rotation angle taking one frame onto the other (symmetric in arguments)."""
    return float(Rotation.from_matrix(r_a @ r_b.T).magnitude())


@dataclass(frozen=True)
class ArmModel:
    """Geometry, limits, and collision radii of one 7-DoF arm."""

    side: Side
    shoulder_offset: tuple[float, float, float]
    upper_arm_length: float = 0.30
    forearm_length: float = 0.25
    hand_length: float = 0.08
    joint_limits: tuple[tuple[float, float], ...] = DEFAULT_JOINT_LIMITS
    capsule_radii: tuple[float, float, float] = (0.050, 0.045, 0.035)
    rest_config: JointConfig | None = None

    def __post_init__(self) -> None:
        for name, value in (
            ("upper_arm_length", self.upper_arm_length),
            ("forearm_length", self.forearm_length),
            ("hand_length", self.hand_length),
        ):
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        for name, (lo, hi) in zip(JOINT_NAMES, self.joint_limits):
            if lo >= hi:
                raise ValueError(f"joint limit for {name} must satisfy lo < hi")
        if self.rest_config is None:
            out = 0.10 if self.side is Side.LEFT else -0.10
            object.__setattr__(
                self, "rest_config", JointConfig((0.30, out, 0.0, 0.80, 0.0, 0.0, 0.0))
            )

    @classmethod
    def default(cls, side: Side) -> "ArmModel":
        y = 0.20 if side is Side.LEFT else -0.20
        return cls(side=side, shoulder_offset=(0.0, y, 0.40))

    @property
    def max_reach(self) -> float:
        return self.upper_arm_length + self.forearm_length + self.hand_length

    def within_limits(self, q: JointConfig, tol: float = 1e-9) -> bool:
        return all(
            lo - tol <= a <= hi + tol for a, (lo, hi) in zip(q.angles, self.joint_limits)
        )

    def clamp(self, angles: np.ndarray) -> np.ndarray:
        lo = np.array([l for l, _ in self.joint_limits])
        hi = np.array([h for _, h in self.joint_limits])
        return np.clip(angles, lo, hi)

    def to_dict(self) -> dict:
        return {
            "side": self.side.value,
            "shoulder_offset": list(self.shoulder_offset),
            "upper_arm_length": self.upper_arm_length,
            "forearm_length": self.forearm_length,
            "hand_length": self.hand_length,
            "joint_limits": [list(pair) for pair in self.joint_limits],
            "capsule_radii": list(self.capsule_radii),
            "rest_config": list(self.rest_config.angles),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ArmModel":
        return cls(
            side=Side(data["side"]),
            shoulder_offset=tuple(data["shoulder_offset"]),
            upper_arm_length=float(data["upper_arm_length"]),
            forearm_length=float(data["forearm_length"]),
            hand_length=float(data["hand_length"]),
            joint_limits=tuple(tuple(p) for p in data["joint_limits"]),
            capsule_radii=tuple(data["capsule_radii"]),
            rest_config=JointConfig(tuple(data["rest_config"])),
        )


@dataclass(frozen=True)
class Capsule:
    """Swept sphere between two axis endpoints."""

    a: tuple[float, float, float]
    b: tuple[float, float, float]
    radius: float


@dataclass(frozen=True)
class BodyModel:
    """Both arms plus a torso capsule; the full collision/reachability substrate."""

    left: ArmModel
    right: ArmModel
    torso: Capsule = Capsule((0.0, 0.0, -0.55), (0.0, 0.0, 0.30), 0.10)

    @classmethod
    def default(cls) -> "BodyModel":
        return cls(left=ArmModel.default(Side.LEFT), right=ArmModel.default(Side.RIGHT))

    def arm(self, side: Side) -> ArmModel:
        return self.left if side is Side.LEFT else self.right

    def to_dict(self) -> dict:
        return {
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
            "torso": {
                "a": list(self.torso.a),
                "b": list(self.torso.b),
                "radius": self.torso.radius,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BodyModel":
        torso = data.get("torso")
        kwargs = {}
        if torso:
            kwargs["torso"] = Capsule(
                tuple(torso["a"]), tuple(torso["b"]), float(torso["radius"])
            )
        return cls(
            left=ArmModel.from_dict(data["left"]),
            right=ArmModel.from_dict(data["right"]),
            **kwargs,
        )


def _axis_rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    c, s = math.cos(angle), math.sin(angle)
    x, y, z = axis
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


@dataclass(frozen=True)
class ChainFrames:
    """Intermediate FK results used by the Jacobian, collision capsules, rendering."""

    shoulder: np.ndarray
    elbow: np.ndarray
    wrist: np.ndarray
    hand: np.ndarray
    rotation: np.ndarray  # hand frame orientation (mount applied)
    joint_origins: np.ndarray  # (7, 3) origin of each joint axis
    joint_axes: np.ndarray  # (7, 3) world direction of each joint axis

    def points(self) -> np.ndarray:
        return np.stack([self.shoulder, self.elbow, self.wrist, self.hand])


def chain_frames(model: ArmModel, q: JointConfig) -> ChainFrames:
    angles = q.angles
    r = np.eye(3)
    p = np.array(model.shoulder_offset, dtype=float)
    shoulder = p.copy()
    origins = np.zeros((7, 3))
    axes = np.zeros((7, 3))

    def rotate(i: int) -> None:
        nonlocal r
        origins[i] = p
        axes[i] = r @ _JOINT_AXES[i]
        r = r @ _axis_rotation(_JOINT_AXES[i], angles[i])

    rotate(0)
    rotate(1)
    rotate(2)
    p = p + r @ np.array([0.0, 0.0, -model.upper_arm_length])
    elbow = p.copy()
    rotate(3)
    p = p + r @ np.array([0.0, 0.0, -model.forearm_length])
    wrist = p.copy()
    rotate(4)
    rotate(5)
    rotate(6)
    hand = p + r @ np.array([0.0, 0.0, -model.hand_length])
    return ChainFrames(
        shoulder=shoulder,
        elbow=elbow,
        wrist=wrist,
        hand=hand,
        rotation=r @ _R_MOUNT,
        joint_origins=origins,
        joint_axes=axes,
    )


def forward_kinematics(model: ArmModel, q: JointConfig) -> HandPose:
    """Pose of the hand frame in the torso frame. Raises on out-of-limit angles."""
    if not model.within_limits(q):
        raise JointLimitViolation(
            f"{model.side.value} arm config outside joint limits: {q.angles}"
        )
    frames = chain_frames(model, q)
    return HandPose(
        position=tuple(float(v) for v in frames.hand),
        orientation=matrix_to_euler(frames.rotation),
    )


# --- inverse kinematics ----------------------------------------------------

IK_POS_TOL = 1e-3  # m
IK_ORI_TOL = 1e-2  # rad
IK_DAMPING = 0.05
IK_MAX_ITERS = 200
_MAX_POS_STEP = 0.10  # clamp per-iteration position error (m) for stability far out


def solve_ik(
    model: ArmModel,
    target: HandPose,
    seed: JointConfig | None = None,
    pos_tol: float = IK_POS_TOL,
    ori_tol: float = IK_ORI_TOL,
    max_iters: int = IK_MAX_ITERS,
    damping: float = IK_DAMPING,
) -> JointConfig:
    """Damped-least-squares IK with per-iteration joint-limit clamping.

    Deterministic in (model, target, seed). Raises Unreachable with the
    best-effort configuration when the residual stays above tolerance.
    """
    if seed is None:
        seed = model.rest_config
    if not model.within_limits(seed):
        raise JointLimitViolation(f"IK seed outside joint limits: {seed.angles}")

    target_p = np.array(target.position, dtype=float)
    target_r = target.rotation_matrix()
    q = model.clamp(seed.as_array())
    lam2 = damping * damping

    best_q = q.copy()
    best_cost = math.inf
    best_err = (math.inf, math.inf)

    for iteration in range(max_iters + 1):
        frames = chain_frames(model, JointConfig(tuple(q)))
        e_pos = target_p - frames.hand
        e_rot = Rotation.from_matrix(target_r @ frames.rotation.T).as_rotvec()
        pos_err = float(np.linalg.norm(e_pos))
        ori_err = float(np.linalg.norm(e_rot))

        if pos_err <= pos_tol and ori_err <= ori_tol:
            return JointConfig(tuple(q))

        cost = pos_err + 0.1 * ori_err
        if cost < best_cost:
            best_cost = cost
            best_q = q.copy()
            best_err = (pos_err, ori_err)
        if iteration == max_iters:
            break

        if pos_err > _MAX_POS_STEP:
            e_pos = e_pos * (_MAX_POS_STEP / pos_err)
        jac = np.zeros((6, 7))
        for i in range(7):
            axis = frames.joint_axes[i]
            jac[:3, i] = np.cross(axis, frames.hand - frames.joint_origins[i])
            jac[3:, i] = axis
        e = np.concatenate([e_pos, e_rot])
        delta = jac.T @ np.linalg.solve(jac @ jac.T + lam2 * np.eye(6), e)
        q = model.clamp(q + delta)

    raise Unreachable(JointConfig(tuple(best_q)), best_err[0], best_err[1])


# --- reachability ------------------------------------------------------------


@dataclass(frozen=True)
class HandCheck:
    feasible: bool
    position_error: float
    orientation_error: float
    config: JointConfig

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "position_error": self.position_error,
            "orientation_error": self.orientation_error,
            "config": list(self.config.angles),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HandCheck":
        return cls(
            feasible=bool(data["feasible"]),
            position_error=float(data["position_error"]),
            orientation_error=float(data["orientation_error"]),
            config=JointConfig(tuple(data["config"])),
        )


@dataclass(frozen=True)
class FeasibilityReport:
    """Per-hand reachability result for one keyframe state."""

    left: HandCheck
    right: HandCheck

    @property
    def feasible(self) -> bool:
        return self.left.feasible and self.right.feasible

    def hand(self, side: Side) -> HandCheck:
        return self.left if side is Side.LEFT else self.right

    def to_dict(self) -> dict:
        return {"left": self.left.to_dict(), "right": self.right.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "FeasibilityReport":
        return cls(
            left=HandCheck.from_dict(data["left"]),
            right=HandCheck.from_dict(data["right"]),
        )


def _fallback_seeds(model: ArmModel) -> list[JointConfig]:
    """Fixed ladder of restart seeds: rest, forward, side, raised, tucked."""
    out = 1.0 if model.side is Side.LEFT else -1.0
    raw = [
        model.rest_config.angles,
        (0.9, out * 0.3, 0.0, 1.0, 0.0, 0.0, 0.0),
        (0.2, out * 0.9, 0.0, 0.6, 0.0, 0.0, 0.0),
        (1.6, out * 0.2, 0.0, 1.6, 0.0, 0.0, 0.0),
        (0.5, out * 0.1, 0.0, 2.2, 0.0, 0.0, 0.0),
    ]
    return [JointConfig(tuple(model.clamp(np.array(a)))) for a in raw]


def _position_seed(
    model: ArmModel, target_p: np.ndarray, seed: JointConfig, iters: int = 60
) -> JointConfig:
    """Position-only DLS warm-up; leaves orientation to the full solve."""
    q = model.clamp(seed.as_array())
    lam2 = IK_DAMPING * IK_DAMPING
    for _ in range(iters):
        frames = chain_frames(model, JointConfig(tuple(q)))
        e = target_p - frames.hand
        if np.linalg.norm(e) <= IK_POS_TOL:
            break
        norm = np.linalg.norm(e)
        if norm > _MAX_POS_STEP:
            e = e * (_MAX_POS_STEP / norm)
        jac = np.cross(frames.joint_axes, frames.hand - frames.joint_origins).T
        delta = jac.T @ np.linalg.solve(jac @ jac.T + lam2 * np.eye(3), e)
        q = model.clamp(q + delta)
    return JointConfig(tuple(q))


def reach_hand(
    model: ArmModel, hand_pose: HandPose, seed: JointConfig | None
) -> HandCheck:
    target_p = np.array(hand_pose.position, dtype=float)
    seeds = ([seed] if seed is not None else []) + _fallback_seeds(model)
    if np.linalg.norm(target_p - np.array(model.shoulder_offset)) > model.max_reach + IK_POS_TOL:
        seeds = seeds[:1]  # beyond the sphere of reach: one best-effort solve only
    failure: Unreachable | None = None
    for candidate in seeds:
        for attempt in (candidate, _position_seed(model, target_p, candidate)):
            try:
                q = solve_ik(model, hand_pose, seed=attempt)
            except Unreachable as err:
                if failure is None or err.position_error < failure.position_error:
                    failure = err
                continue
            frames = chain_frames(model, q)
            pos_err = float(np.linalg.norm(target_p - frames.hand))
            ori_err = geodesic_angle(hand_pose.rotation_matrix(), frames.rotation)
            return HandCheck(True, pos_err, ori_err, q)
    return HandCheck(
        False, failure.position_error, failure.orientation_error, failure.best
    )


def check_reachability(
    body: BodyModel,
    state: MotionState,
    seeds: tuple[JointConfig | None, JointConfig | None] = (None, None),
) -> FeasibilityReport:
    """Solve IK for both hands of a keyframe. Infeasibility is data, not an error."""
    left_pose = HandPose(state.left.position, state.left.orientation)
    right_pose = HandPose(state.right.position, state.right.orientation)
    return FeasibilityReport(
        left=reach_hand(body.left, left_pose, seeds[0]),
        right=reach_hand(body.right, right_pose, seeds[1]),
    )


# --- self collision ----------------------------------------------------------


def segment_distance(p0, p1, q0, q1) -> float:
    """Closest distance between segments [p0,p1] and [q0,q1]."""
    p0, p1, q0, q1 = (np.asarray(v, dtype=float) for v in (p0, p1, q0, q1))
    u = p1 - p0
    v = q1 - q0
    w0 = p0 - q0
    a, b, c = u @ u, u @ v, v @ v
    d, e = u @ w0, v @ w0
    denom = a * c - b * b

    if denom > 1e-12:
        s = (b * e - c * d) / denom
        t = (a * e - b * d) / denom
    else:  # near-parallel: fix s, optimize t below
        s, t = 0.0, e / c if c > 1e-12 else 0.0
    s = min(max(s, 0.0), 1.0)
    # re-optimize t for clamped s, then s for clamped t
    t = ((p0 + s * u - q0) @ v) / c if c > 1e-12 else 0.0
    t = min(max(t, 0.0), 1.0)
    s = ((q0 + t * v - p0) @ u) / a if a > 1e-12 else 0.0
    s = min(max(s, 0.0), 1.0)
    return float(np.linalg.norm((p0 + s * u) - (q0 + t * v)))


def capsule_clearance(a: Capsule, b: Capsule) -> float:
    """Surface-to-surface clearance; negative means interpenetration."""
    return segment_distance(a.a, a.b, b.a, b.b) - a.radius - b.radius


def arm_capsules(model: ArmModel, q: JointConfig) -> dict[str, Capsule]:
    frames = chain_frames(model, q)
    r_upper, r_fore, r_hand = model.capsule_radii
    side = model.side.value
    return {
        f"{side}_upper_arm": Capsule(tuple(frames.shoulder), tuple(frames.elbow), r_upper),
        f"{side}_forearm": Capsule(tuple(frames.elbow), tuple(frames.wrist), r_fore),
        f"{side}_hand": Capsule(tuple(frames.wrist), tuple(frames.hand), r_hand),
    }


@dataclass(frozen=True)
class PairCheck:
    first: str
    second: str
    clearance: float
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "first": self.first,
            "second": self.second,
            "clearance": self.clearance,
            "flagged": self.flagged,
        }


@dataclass(frozen=True)
class CollisionReport:
    pairs: tuple[PairCheck, ...]
    margin: float

    @property
    def collision(self) -> bool:
        return any(p.flagged for p in self.pairs)

    def flagged_pairs(self) -> list[tuple[str, str]]:
        return [(p.first, p.second) for p in self.pairs if p.flagged]

    def to_dict(self) -> dict:
        return {
            "collision": self.collision,
            "margin": self.margin,
            "pairs": [p.to_dict() for p in self.pairs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CollisionReport":
        return cls(
            pairs=tuple(
                PairCheck(p["first"], p["second"], float(p["clearance"]), bool(p["flagged"]))
                for p in data["pairs"]
            ),
            margin=float(data["margin"]),
        )


# Capsule pairs worth checking: cross-arm forearm/hand pairs and hands vs torso.
_CHECKED_PAIRS = (
    ("left_forearm", "right_forearm"),
    ("left_forearm", "right_hand"),
    ("left_hand", "right_forearm"),
    ("left_hand", "right_hand"),
    ("left_hand", "torso"),
    ("right_hand", "torso"),
)

COLLISION_MARGIN = 0.02  # m


def check_self_collision(
    body: BodyModel,
    q_left: JointConfig,
    q_right: JointConfig,
    margin: float = COLLISION_MARGIN,
) -> CollisionReport:
    """Flag capsule pairs with surface clearance below the margin."""
    for model, q in ((body.left, q_left), (body.right, q_right)):
        if not model.within_limits(q):
            raise JointLimitViolation(
                f"{model.side.value} arm config outside joint limits: {q.angles}"
            )
    capsules = arm_capsules(body.left, q_left)
    capsules.update(arm_capsules(body.right, q_right))
    capsules["torso"] = body.torso
    checks = []
    for first, second in _CHECKED_PAIRS:
        clearance = capsule_clearance(capsules[first], capsules[second])
        checks.append(PairCheck(first, second, clearance, clearance < margin))
    return CollisionReport(tuple(checks), margin)
