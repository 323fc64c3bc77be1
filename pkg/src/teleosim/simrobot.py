"""Kinematic desk robot: rate-limited goal tracking plus toy object physics.

The world is the controller-side ground truth. Each `step()` advances one
fixed tick:

1. The end effector moves straight toward its goal, capped at `v_max * dt`,
   and rotates along the geodesic, capped at `omega_max * dt`. The gripper
   width slews at `gripper_rate`, floored by contact with a held object.
2. Grasp resolution. An object is grabbed when its center is within
   `grasp_radius` of the gripper midpoint and the commanded width undercuts
   the object's grasp width by `grip_margin`; it is released when the
   commanded width exceeds grasp width plus the margin. Held objects follow
   the hand rigidly and report the hand's instantaneous twist.
3. Free objects integrate their constant twist, reflecting the velocity
   component at containment walls and re-clamping inside.
4. A scene update message is emitted: creates and deletes queued since the
   last step, updates for everything else alive.

An object's grasp width is twice its smallest half extent (the fingers close
on the smallest dimension). Everything is deterministic given the seed and
the command trace; no wall clock is read anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import SpawnRanges
from .geometry import (
    Pose,
    Twist,
    integrate_orientation,
    quat_angle_between,
    quat_normalize,
    quat_slerp,
    rotation_vector_between,
    vec_add,
    vec_norm,
    vec_scale,
    vec_sub,
)
from .guard import WallSet, default_walls
from .messages import (
    GRIPPER_MAX,
    GoalCommandMessage,
    ObjectCreate,
    ObjectSpec,
    ObjectUpdate,
    SceneUpdateMessage,
)

DEFAULT_TICK_DT = 1.0 / 120.0
DEFAULT_HOME = Pose(position=(0.40, 0.0, 0.30))


class RejectedNonFinite(ValueError):
    """Command contained NaN or infinity and was ignored."""


@dataclass
class RobotState:
    ee_pose: Pose
    gripper_width: float
    goal_pose: Pose
    goal_width: float
    grip_engaged: bool = False


@dataclass
class WorldObject:
    record_spec: ObjectSpec
    pose: Pose
    twist: Twist
    grasped: bool = False
    grip_rel: Pose | None = None  # hand-frame pose captured at grasp time

    def grasp_width(self) -> float:
        return 2.0 * min(self.record_spec.half_extents)


@dataclass
class SimStats:
    steps: int = 0
    clamped_width_commands: int = 0
    spawned: int = 0


class SimWorld:
    def __init__(
        self,
        *,
        home_pose: Pose = DEFAULT_HOME,
        bounds: WallSet | None = None,
        spawn: SpawnRanges | None = None,
        tick_dt: float = DEFAULT_TICK_DT,
        v_max: float = 1.0,
        omega_max: float = 2.0,
        gripper_rate: float = 0.1,
        grasp_radius: float = 0.03,
        grip_margin: float = 0.002,
        seed: int = 0,
    ):
        self.robot = RobotState(
            ee_pose=home_pose,
            gripper_width=GRIPPER_MAX,
            goal_pose=home_pose,
            goal_width=GRIPPER_MAX,
        )
        self.bounds = bounds if bounds is not None else default_walls()
        self.spawn_ranges = spawn if spawn is not None else SpawnRanges()
        self.tick_dt = tick_dt
        self.v_max = v_max
        self.omega_max = omega_max
        self.gripper_rate = gripper_rate
        self.grasp_radius = grasp_radius
        self.grip_margin = grip_margin
        self.stats = SimStats()
        self._objects: dict[int, WorldObject] = {}
        self._next_key = 0
        self._pending_creates: set[int] = set()
        self._pending_deletes: set[int] = set()
        self._rng = np.random.default_rng(seed)
        # Plain-float copies of the containment walls for the per-object loop.
        self._wall_list = [
            ((float(w.normal[0]), float(w.normal[1]), float(w.normal[2])), float(w.offset))
            for w in self.bounds.walls
        ]

    # -- queries ---------------------------------------------------------

    def get_pose(self) -> Pose:
        return self.robot.ee_pose

    def get_gripper_width(self) -> float:
        return self.robot.gripper_width

    def live_keys(self) -> list[int]:
        return sorted(self._objects)

    def object(self, key: int) -> WorldObject | None:
        return self._objects.get(key)

    def object_count(self) -> int:
        return len(self._objects)

    # -- commands --------------------------------------------------------

    def go_to_pose(self, goal: Pose) -> None:
        if not goal.is_finite():
            raise RejectedNonFinite("goal pose has a non-finite component")
        try:
            orientation = quat_normalize(goal.orientation)
        except ValueError as exc:
            raise RejectedNonFinite(str(exc)) from exc
        self.robot.goal_pose = Pose(position=goal.position, orientation=orientation)

    def go_to_gripper(self, width: float) -> None:
        if not math.isfinite(width):
            raise RejectedNonFinite("goal width is not finite")
        clamped = min(max(width, 0.0), GRIPPER_MAX)
        if clamped != width:
            self.stats.clamped_width_commands += 1
        self.robot.goal_width = clamped

    def spawn_block(
        self,
        spec: ObjectSpec | None = None,
        pose: Pose | None = None,
        twist: Twist | None = None,
    ) -> int:
        """Add a block; absent arguments are drawn from the spawn ranges."""
        rng = self._rng
        ranges = self.spawn_ranges
        if spec is None:
            color = tuple(float(c) for c in rng.uniform(0.1, 1.0, size=3)) + (1.0,)
            spec = ObjectSpec(kind=0, half_extents=ranges.half_extents, color=color)
        if pose is None:
            position = self._sample_contained_position()
            raw = rng.standard_normal(4)
            orientation = quat_normalize(tuple(float(c) for c in raw))
            pose = Pose(position=position, orientation=orientation)
        if twist is None:
            lin = rng.uniform(-ranges.speed_max, ranges.speed_max, size=3)
            ang = rng.uniform(-ranges.angular_speed_max, ranges.angular_speed_max, 3)
            twist = Twist(
                linear=tuple(float(v) for v in lin),
                angular=tuple(float(v) for v in ang),
            )
        key = self._next_key
        self._next_key += 1
        self._objects[key] = WorldObject(record_spec=spec, pose=pose, twist=twist)
        self._pending_creates.add(key)
        self.stats.spawned += 1
        return key

    def _sample_contained_position(self) -> tuple[float, float, float]:
        lo = np.asarray(self.spawn_ranges.position_low)
        hi = np.asarray(self.spawn_ranges.position_high)
        for _ in range(100):
            p = self._rng.uniform(lo, hi)
            point = (float(p[0]), float(p[1]), float(p[2]))
            if self.bounds.contains_point(point):
                return point
        # Spawn box barely intersects the bounds; fall back to its center.
        mid = (lo + hi) * 0.5
        return (float(mid[0]), float(mid[1]), float(mid[2]))

    def despawn(self, key: int) -> bool:
        if key not in self._objects:
            return False
        del self._objects[key]
        self._pending_creates.discard(key)
        self._pending_deletes.add(key)
        return True

    def recover_unknown(self, unknown_keys) -> None:
        """Re-announce live keys the peer missed; bury dead ones."""
        for key in unknown_keys:
            if key in self._objects:
                self._pending_creates.add(key)
            else:
                self._pending_deletes.add(key)

    def apply_goal_command(self, msg: GoalCommandMessage) -> None:
        """Track the goal and reconcile the peer's view of the key set."""
        self.go_to_pose(msg.goal_pose)
        self.go_to_gripper(msg.goal_gripper_width)
        known = set(msg.known_keys)
        for key in self._objects:
            if key not in known:
                self._pending_creates.add(key)
        for key in known:
            if key not in self._objects:
                self._pending_deletes.add(key)
        if msg.unknown_keys:
            self.recover_unknown(msg.unknown_keys)

    # -- dynamics --------------------------------------------------------

    def step(self) -> SceneUpdateMessage:
        dt = self.tick_dt
        robot = self.robot
        old_pose = robot.ee_pose

        # 1. End effector toward goal, rate-limited.
        delta = vec_sub(robot.goal_pose.position, old_pose.position)
        dist = vec_norm(delta)
        max_step = self.v_max * dt
        if dist <= max_step:
            new_pos = robot.goal_pose.position
        else:
            new_pos = vec_add(old_pose.position, vec_scale(delta, max_step / dist))

        angle = quat_angle_between(old_pose.orientation, robot.goal_pose.orientation)
        max_turn = self.omega_max * dt
        if angle <= max_turn:
            new_quat = robot.goal_pose.orientation
        else:
            new_quat = quat_slerp(
                old_pose.orientation, robot.goal_pose.orientation, max_turn / angle
            )
        robot.ee_pose = Pose(position=new_pos, orientation=new_quat)

        ee_twist = Twist(
            linear=vec_scale(vec_sub(new_pos, old_pose.position), 1.0 / dt),
            angular=vec_scale(
                rotation_vector_between(old_pose.orientation, new_quat), 1.0 / dt
            ),
        )

        # Gripper slew with contact floor from whatever is currently held.
        width = robot.gripper_width
        slew = self.gripper_rate * dt
        width += min(max(robot.goal_width - width, -slew), slew)
        floor = 0.0
        for obj in self._objects.values():
            if obj.grasped:
                floor = max(floor, obj.grasp_width())
        if floor > 0.0:
            width = max(width, floor)
        robot.gripper_width = width

        # 2. Grasp resolution against the new hand state.
        engaged = False
        for obj in self._objects.values():
            if obj.grasped:
                if robot.goal_width > obj.grasp_width() + self.grip_margin:
                    obj.grasped = False
                    obj.grip_rel = None
            elif (
                robot.goal_width <= obj.grasp_width() - self.grip_margin
                and vec_norm(vec_sub(obj.pose.position, new_pos)) <= self.grasp_radius
            ):
                obj.grasped = True
                obj.grip_rel = robot.ee_pose.inverse().compose(obj.pose)
            if obj.grasped:
                obj.pose = robot.ee_pose.compose(obj.grip_rel)
                obj.twist = ee_twist
                if robot.goal_width < obj.grasp_width():
                    engaged = True
        robot.grip_engaged = engaged

        # 3. Free objects drift and bounce off the containment walls.
        for obj in self._objects.values():
            if obj.grasped:
                continue
            pos = vec_add(obj.pose.position, vec_scale(obj.twist.linear, dt))
            quat = integrate_orientation(
                obj.pose.orientation, obj.twist.angular, dt
            )
            vel = obj.twist.linear
            for n, offset in self._wall_list:
                margin = (
                    n[0] * pos[0] + n[1] * pos[1] + n[2] * pos[2] - offset
                )
                if margin > 0.0:
                    pos = (
                        pos[0] - n[0] * margin,
                        pos[1] - n[1] * margin,
                        pos[2] - n[2] * margin,
                    )
                    outward = n[0] * vel[0] + n[1] * vel[1] + n[2] * vel[2]
                    if outward > 0.0:
                        vel = (
                            vel[0] - 2.0 * outward * n[0],
                            vel[1] - 2.0 * outward * n[1],
                            vel[2] - 2.0 * outward * n[2],
                        )
            obj.pose = Pose(position=pos, orientation=quat)
            if vel is not obj.twist.linear:
                obj.twist = Twist(linear=vel, angular=obj.twist.angular)

        # 4. Emit the scene: queued creates/deletes, updates for the rest.
        creates = sorted(k for k in self._pending_creates if k in self._objects)
        deletes = sorted(k for k in self._pending_deletes if k not in self._objects)
        create_set = set(creates)
        updates = tuple(
            ObjectUpdate(key=key, pose=obj.pose, twist=obj.twist)
            for key, obj in sorted(self._objects.items())
            if key not in create_set
        )
        msg = SceneUpdateMessage(
            seq=0,  # stamped by the transport on send
            ee_pose=robot.ee_pose,
            gripper_width=robot.gripper_width,
            updates=updates,
            creates=tuple(
                ObjectCreate(
                    key=key,
                    spec=self._objects[key].record_spec,
                    pose=self._objects[key].pose,
                    twist=self._objects[key].twist,
                )
                for key in creates
            ),
            deletes=tuple(deletes),
        )
        self._pending_creates.clear()
        self._pending_deletes.clear()
        self.stats.steps += 1
        return msg
