"""Message types exchanged between the robot controller and the client."""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import Pose, Twist, Vec3, Vec4

# Parallel-plate gripper span limit, meters.
GRIPPER_MAX = 0.08

# Largest UDP payload that fits one unfragmented datagram.
MAX_DATAGRAM = 65_507

KIND_BLOCK = 0


@dataclass(frozen=True)
class ObjectSpec:
    """Immutable description of a tracked object."""

    kind: int = KIND_BLOCK  # 0 = block; other values reserved
    half_extents: Vec3 = (0.02, 0.02, 0.02)
    color: Vec4 = (0.8, 0.8, 0.8, 1.0)  # RGBA, each in [0, 1]


@dataclass(frozen=True)
class ObjectUpdate:
    key: int
    pose: Pose
    twist: Twist


@dataclass(frozen=True)
class ObjectCreate:
    key: int
    spec: ObjectSpec
    pose: Pose
    twist: Twist


@dataclass(frozen=True)
class SceneUpdateMessage:
    """Controller -> client: end-effector state plus object lifecycle."""

    seq: int = 0
    ee_pose: Pose = Pose()
    gripper_width: float = 0.0
    updates: tuple[ObjectUpdate, ...] = ()
    creates: tuple[ObjectCreate, ...] = ()
    deletes: tuple[int, ...] = ()


@dataclass(frozen=True)
class GoalCommandMessage:
    """Client -> controller: gripper goal plus registry reconciliation info."""

    seq: int = 0
    paused: bool = False
    goal_pose: Pose = Pose()
    goal_gripper_width: float = 0.0
    known_keys: tuple[int, ...] = ()
    unknown_keys: tuple[int, ...] = ()


Message = SceneUpdateMessage | GoalCommandMessage
