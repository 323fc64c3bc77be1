"""Operator-side session: pause gating, width jog, guard, feedback state.

A tick consumes at most one fresh scene message and exactly one operator
input, then emits one goal command. Ticks use the configured nominal dt, not
the wall clock, so a scripted input trace replays bit-identically.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from .geometry import Pose, Vec3, Vec4, vec_norm, vec_sub
from .guard import BoundingPolytope, WallSet, default_polytope, default_walls, gate_goal, pose_allowed
from .messages import (
    GRIPPER_MAX,
    GoalCommandMessage,
    SceneUpdateMessage,
)
from .registry import SceneRegistry
from .simrobot import DEFAULT_HOME

DEFAULT_RATE_HZ = 72.0
WIDTH_RATE = 0.08  # m/s of gripper span per unit of axis deflection
OPACITY_FULL_DISTANCE = 0.10  # hand-to-ee distance where the cursor saturates

# Display-only guess at "held": grasp state never crosses the wire.
HELD_HINT_RADIUS = 0.03
HELD_HINT_MARGIN = 0.002


@dataclass(frozen=True)
class OperatorInput:
    hand_pose: Pose
    gripper_axis: float = 0.0
    pause_pressed: bool = False


@dataclass(frozen=True)
class ObjectView:
    key: int
    kind: int
    pose: Pose
    color: Vec4
    half_extents: Vec3
    held: bool


@dataclass(frozen=True)
class SessionSnapshot:
    tick_seq: int
    ee_pose: Pose
    gripper_width: float
    goal_width: float
    paused: bool
    opacity: float
    objects: tuple[ObjectView, ...]
    guard_violation: tuple[int, int] | None
    avg_hz: float
    low1_hz: float


class OperatorSession:
    def __init__(
        self,
        *,
        home_pose: Pose = DEFAULT_HOME,
        polytope: BoundingPolytope | None = None,
        walls: WallSet | None = None,
        rate_hz: float = DEFAULT_RATE_HZ,
        width_rate: float = WIDTH_RATE,
        opacity_distance: float = OPACITY_FULL_DISTANCE,
    ):
        self.polytope = polytope if polytope is not None else default_polytope()
        self.walls = walls if walls is not None else default_walls()
        ok, violation = pose_allowed(self.polytope, self.walls, home_pose)
        if not ok:
            raise ValueError(f"home pose violates workspace wall {violation}")
        self.rate_hz = rate_hz
        self.dt = 1.0 / rate_hz
        self.width_rate = width_rate
        self.opacity_distance = opacity_distance

        self.registry = SceneRegistry()
        self.paused = False
        self.last_emitted_goal = home_pose
        self.goal_width = GRIPPER_MAX
        self.opacity = 0.0
        self.last_violation: tuple[int, int] | None = None
        self.last_ee_pose = home_pose
        self.last_gripper_width = GRIPPER_MAX
        self.tick_seq = 0
        self._tick_times: deque[float] = deque(maxlen=256)

    def toggle_pause(self) -> bool:
        self.paused = not self.paused
        return self.paused

    def update_goal_width(self, axis: float, dt: float) -> float:
        axis = min(max(axis, -1.0), 1.0)
        width = self.goal_width + axis * self.width_rate * dt
        self.goal_width = min(max(width, 0.0), GRIPPER_MAX)
        return self.goal_width

    def compute_opacity(self, hand_pose: Pose, ee_pose: Pose) -> float:
        if self.paused:
            return 1.0
        dist = vec_norm(vec_sub(hand_pose.position, ee_pose.position))
        return min(max(dist / self.opacity_distance, 0.0), 1.0)

    def tick(
        self,
        operator_input: OperatorInput,
        incoming: SceneUpdateMessage | None = None,
    ) -> GoalCommandMessage:
        if incoming is not None:
            self.registry.apply_scene_update(incoming)
            self.last_ee_pose = incoming.ee_pose
            self.last_gripper_width = incoming.gripper_width

        if operator_input.pause_pressed:
            self.toggle_pause()

        if not self.paused:
            self.update_goal_width(operator_input.gripper_axis, self.dt)
            gated, violation = gate_goal(
                self.last_emitted_goal,
                operator_input.hand_pose,
                self.polytope,
                self.walls,
            )
            self.last_emitted_goal = gated
            self.last_violation = violation

        self.opacity = self.compute_opacity(operator_input.hand_pose, self.last_ee_pose)

        msg = GoalCommandMessage(
            seq=0,  # stamped by the transport on send
            paused=self.paused,
            goal_pose=self.last_emitted_goal,
            goal_gripper_width=self.goal_width,
            known_keys=tuple(self.registry.known_keys()),
            unknown_keys=tuple(self.registry.drain_unknown()),
        )
        self.tick_seq += 1
        self._tick_times.append(time.perf_counter())
        return msg

    def _rates(self) -> tuple[float, float]:
        times = list(self._tick_times)
        if len(times) < 2:
            return 0.0, 0.0
        deltas = np.diff(np.asarray(times))
        deltas = deltas[deltas > 0.0]
        if deltas.size == 0:
            return 0.0, 0.0
        freqs = 1.0 / deltas
        return float(freqs.mean()), float(np.percentile(freqs, 1.0))

    def snapshot(self) -> SessionSnapshot:
        """Everything the console renders, mirrored from this tick's state."""
        avg_hz, low1_hz = self._rates()
        ee = self.last_ee_pose
        width = self.last_gripper_width
        views = []
        for rec in self.registry.snapshot():
            held = (
                vec_norm(vec_sub(rec.pose.position, ee.position)) <= HELD_HINT_RADIUS
                and width <= 2.0 * min(rec.spec.half_extents) + HELD_HINT_MARGIN
            )
            views.append(
                ObjectView(
                    key=rec.key,
                    kind=rec.spec.kind,
                    pose=rec.pose,
                    color=rec.spec.color,
                    half_extents=rec.spec.half_extents,
                    held=held,
                )
            )
        return SessionSnapshot(
            tick_seq=self.tick_seq,
            ee_pose=ee,
            gripper_width=width,
            goal_width=self.goal_width,
            paused=self.paused,
            opacity=self.opacity,
            objects=tuple(views),
            guard_violation=self.last_violation if not self.paused else None,
            avg_hz=avg_hz,
            low1_hz=low1_hz,
        )
