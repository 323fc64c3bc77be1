"""Workspace guard: convex safety cage checks for candidate gripper poses.

The gripper's collision volume is a convex polytope given by its vertices in
the body frame. The workspace is the intersection of half-spaces
``normal . x <= offset``. A pose is allowed when every transformed vertex
satisfies every half-space, with 1e-9 of slack so boundary contact counts as
inside.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .geometry import Pose, Vec3, quat_to_matrix, vec_is_finite, vec_norm

BOUNDARY_SLACK = 1e-9
NORMAL_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class Wall:
    """Half-space normal . x <= offset with a unit normal."""

    normal: Vec3
    offset: float


class BadGeometry(ValueError):
    """Polytope or wall set fails a structural invariant."""


@dataclass(frozen=True)
class BoundingPolytope:
    """Body-frame vertices of the guarded volume; needs a solid hull."""

    vertices: tuple[Vec3, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 4:
            raise BadGeometry("polytope needs at least 4 vertices")
        for i, v in enumerate(self.vertices):
            if len(v) != 3 or not vec_is_finite(v):
                raise BadGeometry(f"vertices[{i}] is not a finite 3-vector")
        arr = np.asarray(self.vertices, dtype=float)
        if np.linalg.matrix_rank(arr - arr[0]) < 3:
            raise BadGeometry("polytope vertices are coplanar, hull is not solid")
        object.__setattr__(self, "_arr", arr)

    def as_array(self) -> np.ndarray:
        return self._arr  # type: ignore[attr-defined]


@dataclass(frozen=True)
class WallSet:
    walls: tuple[Wall, ...]

    def __post_init__(self) -> None:
        if not self.walls:
            raise BadGeometry("wall set is empty")
        for i, wall in enumerate(self.walls):
            if not vec_is_finite(wall.normal) or not np.isfinite(wall.offset):
                raise BadGeometry(f"walls[{i}] has a non-finite component")
            if abs(vec_norm(wall.normal) - 1.0) > NORMAL_UNIT_TOL:
                raise BadGeometry(f"walls[{i}].normal is not unit length")
        object.__setattr__(
            self, "_normals", np.asarray([w.normal for w in self.walls], dtype=float)
        )
        object.__setattr__(
            self, "_offsets", np.asarray([w.offset for w in self.walls], dtype=float)
        )

    def normals_array(self) -> np.ndarray:
        return self._normals  # type: ignore[attr-defined]

    def offsets_array(self) -> np.ndarray:
        return self._offsets  # type: ignore[attr-defined]

    def contains_point(self, p: Vec3, slack: float = BOUNDARY_SLACK) -> bool:
        margins = self.normals_array() @ np.asarray(p, dtype=float)
        return bool(np.all(margins <= self.offsets_array() + slack))


def transform_vertices(polytope: BoundingPolytope, pose: Pose) -> np.ndarray:
    """World-frame vertex array (V, 3) for the polytope at the given pose."""
    rot = np.asarray(quat_to_matrix(pose.orientation), dtype=float)
    return polytope.as_array() @ rot.T + np.asarray(pose.position, dtype=float)


def pose_allowed(
    polytope: BoundingPolytope, walls: WallSet, pose: Pose
) -> tuple[bool, tuple[int, int] | None]:
    """Check every vertex against every wall.

    Returns (True, None) when allowed, else (False, (wall_index,
    vertex_index)) for the lexicographically first violating pair.
    """
    pts = transform_vertices(polytope, pose)
    margins = walls.normals_array() @ pts.T - walls.offsets_array()[:, None]
    bad = margins > BOUNDARY_SLACK
    if not bad.any():
        return True, None
    wall_idx, vert_idx = np.argwhere(bad)[0]
    return False, (int(wall_idx), int(vert_idx))


def gate_goal(
    last_goal: Pose,
    candidate: Pose,
    polytope: BoundingPolytope,
    walls: WallSet,
) -> tuple[Pose, tuple[int, int] | None]:
    """Pass an allowed candidate through; hold the last goal otherwise."""
    ok, violation = pose_allowed(polytope, walls, candidate)
    if ok:
        return candidate, None
    return last_goal, violation


def box_walls(low: Vec3, high: Vec3) -> WallSet:
    """Six axis-aligned half-spaces enclosing [low, high]."""
    walls = []
    for axis in range(3):
        n_hi = [0.0, 0.0, 0.0]
        n_hi[axis] = 1.0
        walls.append(Wall(normal=tuple(n_hi), offset=float(high[axis])))
        n_lo = [0.0, 0.0, 0.0]
        n_lo[axis] = -1.0
        walls.append(Wall(normal=tuple(n_lo), offset=-float(low[axis])))
    return WallSet(walls=tuple(walls))


def box_polytope(low: Vec3, high: Vec3) -> BoundingPolytope:
    """Eight corners of an axis-aligned box in the body frame."""
    corners = tuple(
        (x, y, z)
        for x, y, z in itertools.product(
            (low[0], high[0]), (low[1], high[1]), (low[2], high[2])
        )
    )
    return BoundingPolytope(vertices=corners)


def default_polytope() -> BoundingPolytope:
    """Hand volume: 20 cm square footprint, -6 cm to +12 cm vertically."""
    return box_polytope((-0.10, -0.10, -0.06), (0.10, 0.10, 0.12))


def default_walls() -> WallSet:
    """Desk workspace box: x in [0.10, 0.75], y in [-0.45, 0.45], z in [0.01, 0.70]."""
    return box_walls((0.10, -0.45, 0.01), (0.75, 0.45, 0.70))


DEFAULT_INTERIOR_POINT: Vec3 = (0.425, 0.0, 0.35)
