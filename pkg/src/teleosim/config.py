"""Workspace configuration loading (YAML, SI units)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import yaml

from .geometry import Vec3
from .guard import (
    DEFAULT_INTERIOR_POINT,
    BadGeometry,
    BoundingPolytope,
    Wall,
    WallSet,
    default_polytope,
    default_walls,
)


class WorkspaceConfigError(ValueError):
    """Config rejected; the message names the offending entry."""


@dataclass(frozen=True)
class SpawnRanges:
    """Uniform sampling ranges for spawned blocks."""

    position_low: Vec3 = (0.15, -0.40, 0.05)
    position_high: Vec3 = (0.70, 0.40, 0.60)
    speed_max: float = 0.15
    angular_speed_max: float = 1.0
    half_extents: Vec3 = (0.02, 0.02, 0.02)


@dataclass(frozen=True)
class WorkspaceConfig:
    walls: WallSet = field(default_factory=default_walls)
    polytope: BoundingPolytope = field(default_factory=default_polytope)
    bounds: WallSet = field(default_factory=default_walls)
    spawn: SpawnRanges = field(default_factory=SpawnRanges)
    interior_point: Vec3 = DEFAULT_INTERIOR_POINT


def _vec(raw, n: int, entry: str) -> tuple[float, ...]:
    if not isinstance(raw, (list, tuple)) or len(raw) != n:
        raise WorkspaceConfigError(f"{entry}: expected {n} numbers")
    out = []
    for i, v in enumerate(raw):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise WorkspaceConfigError(f"{entry}[{i}]: expected a number")
        v = float(v)
        if not math.isfinite(v):
            raise WorkspaceConfigError(f"{entry}[{i}]: must be finite")
        out.append(v)
    return tuple(out)


def _walls(raw, entry: str) -> WallSet:
    if not isinstance(raw, list) or not raw:
        raise WorkspaceConfigError(f"{entry}: expected a non-empty list")
    walls = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise WorkspaceConfigError(f"{entry}[{i}]: expected a mapping")
        normal = _vec(item.get("normal"), 3, f"{entry}[{i}].normal")
        if "offset" not in item:
            raise WorkspaceConfigError(f"{entry}[{i}].offset: missing")
        offset = item["offset"]
        if not isinstance(offset, (int, float)) or isinstance(offset, bool):
            raise WorkspaceConfigError(f"{entry}[{i}].offset: expected a number")
        offset = float(offset)
        if not math.isfinite(offset):
            raise WorkspaceConfigError(f"{entry}[{i}].offset: must be finite")
        # Normalize so hand-written normals like [1, 1, 0] are accepted.
        norm = math.sqrt(sum(c * c for c in normal))
        if norm == 0.0:
            raise WorkspaceConfigError(f"{entry}[{i}].normal: must be nonzero")
        walls.append(Wall(normal=tuple(c / norm for c in normal), offset=offset))
    try:
        return WallSet(walls=tuple(walls))
    except BadGeometry as exc:
        raise WorkspaceConfigError(f"{entry}: {exc}") from exc


def _probe(walls: WallSet, point: Vec3, entry: str) -> None:
    if not walls.contains_point(point):
        raise WorkspaceConfigError(
            f"{entry}: interior point {point} violates the wall set; "
            "the intersection may be empty"
        )


def load_workspace_config(path: str) -> WorkspaceConfig:
    """Parse a workspace YAML file, or raise WorkspaceConfigError."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise WorkspaceConfigError(f"not valid YAML: {exc}") from exc
    return parse_workspace_config(raw or {})


def parse_workspace_config(raw: dict) -> WorkspaceConfig:
    if not isinstance(raw, dict):
        raise WorkspaceConfigError("top level: expected a mapping")
    defaults = WorkspaceConfig()

    walls = defaults.walls
    if "walls" in raw:
        walls = _walls(raw["walls"], "walls")
    interior = defaults.interior_point
    if "interior_point" in raw:
        interior = _vec(raw["interior_point"], 3, "interior_point")
    _probe(walls, interior, "interior_point")

    polytope = defaults.polytope
    if "polytope" in raw:
        section = raw["polytope"]
        if not isinstance(section, dict) or "vertices" not in section:
            raise WorkspaceConfigError("polytope: expected a mapping with vertices")
        verts_raw = section["vertices"]
        if not isinstance(verts_raw, list):
            raise WorkspaceConfigError("polytope.vertices: expected a list")
        verts = tuple(
            _vec(v, 3, f"polytope.vertices[{i}]") for i, v in enumerate(verts_raw)
        )
        try:
            polytope = BoundingPolytope(vertices=verts)
        except BadGeometry as exc:
            raise WorkspaceConfigError(f"polytope.vertices: {exc}") from exc

    bounds = walls
    if "bounds" in raw:
        section = raw["bounds"]
        if not isinstance(section, dict):
            raise WorkspaceConfigError("bounds: expected a mapping")
        bounds = _walls(section.get("walls"), "bounds.walls")
        bounds_interior = interior
        if "interior_point" in section:
            bounds_interior = _vec(
                section["interior_point"], 3, "bounds.interior_point"
            )
        _probe(bounds, bounds_interior, "bounds.interior_point")

    spawn = defaults.spawn
    if "spawn" in raw:
        section = raw["spawn"]
        if not isinstance(section, dict):
            raise WorkspaceConfigError("spawn: expected a mapping")
        kwargs = {}
        if "position_low" in section:
            kwargs["position_low"] = _vec(
                section["position_low"], 3, "spawn.position_low"
            )
        if "position_high" in section:
            kwargs["position_high"] = _vec(
                section["position_high"], 3, "spawn.position_high"
            )
        for scalar in ("speed_max", "angular_speed_max"):
            if scalar in section:
                v = section[scalar]
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise WorkspaceConfigError(f"spawn.{scalar}: expected a number")
                v = float(v)
                if not math.isfinite(v) or v < 0.0:
                    raise WorkspaceConfigError(f"spawn.{scalar}: must be >= 0")
                kwargs[scalar] = v
        if "half_extents" in section:
            he = _vec(section["half_extents"], 3, "spawn.half_extents")
            if any(h <= 0.0 for h in he):
                raise WorkspaceConfigError("spawn.half_extents: must be positive")
            kwargs["half_extents"] = he
        spawn = SpawnRanges(**kwargs)
        lo, hi = spawn.position_low, spawn.position_high
        if any(lo[i] > hi[i] for i in range(3)):
            raise WorkspaceConfigError("spawn.position_low exceeds position_high")

    return WorkspaceConfig(
        walls=walls,
        polytope=polytope,
        bounds=bounds,
        spawn=spawn,
        interior_point=interior,
    )
