"""Rigid-body math shared by the codec, guard, and simulator.

Conventions: positions in meters, scalar-first unit quaternions (w, x, y, z),
right-handed world frame, angular velocities in rad/s expressed in the world
frame. Values are plain float tuples so message types stay hashable and keep
bit-exact equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Vec3 = tuple[float, float, float]
Vec4 = tuple[float, float, float, float]
Quat = tuple[float, float, float, float]  # (w, x, y, z)

ZERO_VEC: Vec3 = (0.0, 0.0, 0.0)
IDENTITY_QUAT: Quat = (1.0, 0.0, 0.0, 0.0)


def vec_add(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vec_sub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vec_scale(a: Vec3, s: float) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


def vec_dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def vec_cross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def vec_norm(a: Vec3) -> float:
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def vec_is_finite(a: Vec3) -> bool:
    return math.isfinite(a[0]) and math.isfinite(a[1]) and math.isfinite(a[2])


def quat_norm(q: Quat) -> float:
    return math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])


def quat_is_finite(q: Quat) -> bool:
    return all(math.isfinite(c) for c in q)


def quat_normalize(q: Quat) -> Quat:
    n = quat_norm(q)
    if not math.isfinite(n) or n == 0.0:
        raise ValueError("cannot normalize zero or non-finite quaternion")
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


def quat_conjugate(q: Quat) -> Quat:
    return (q[0], -q[1], -q[2], -q[3])


def quat_multiply(a: Quat, b: Quat) -> Quat:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def rotate_vector(q: Quat, v: Vec3) -> Vec3:
    # v' = v + w*t + qv x t with t = 2 qv x v; cheaper than the full sandwich.
    qv = (q[1], q[2], q[3])
    t = vec_scale(vec_cross(qv, v), 2.0)
    return vec_add(vec_add(v, vec_scale(t, q[0])), vec_cross(qv, t))


def quat_to_matrix(q: Quat) -> tuple[Vec3, Vec3, Vec3]:
    """Row-major rotation matrix for a unit quaternion."""
    w, x, y, z = q
    xx, yy, zz = x * x, y * y, z * z
    xy, xz, yz = x * y, x * z, y * z
    wx, wy, wz = w * x, w * y, w * z
    return (
        (1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy)),
        (2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx)),
        (2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy)),
    )


def quat_from_axis_angle(axis: Vec3, angle: float) -> Quat:
    n = vec_norm(axis)
    if n == 0.0:
        return IDENTITY_QUAT
    half = 0.5 * angle
    s = math.sin(half) / n
    return (math.cos(half), axis[0] * s, axis[1] * s, axis[2] * s)


def quat_angle_between(a: Quat, b: Quat) -> float:
    """Geodesic angle in [0, pi] between two unit quaternions."""
    d = abs(a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3])
    return 2.0 * math.acos(min(1.0, d))


def quat_slerp(a: Quat, b: Quat, t: float) -> Quat:
    """Shortest-path spherical interpolation from a (t=0) to b (t=1)."""
    d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
    if d < 0.0:
        b = (-b[0], -b[1], -b[2], -b[3])
        d = -d
    if d > 1.0 - 1e-12:
        # Nearly parallel: linear blend then renormalize.
        mixed = tuple(a[i] + t * (b[i] - a[i]) for i in range(4))
        return quat_normalize(mixed)  # type: ignore[arg-type]
    theta = math.acos(min(1.0, d))
    s = math.sin(theta)
    ka = math.sin((1.0 - t) * theta) / s
    kb = math.sin(t * theta) / s
    return (
        ka * a[0] + kb * b[0],
        ka * a[1] + kb * b[1],
        ka * a[2] + kb * b[2],
        ka * a[3] + kb * b[3],
    )


def integrate_orientation(q: Quat, omega: Vec3, dt: float) -> Quat:
    """Advance a unit quaternion by a world-frame angular velocity for dt."""
    speed = vec_norm(omega)
    if speed == 0.0 or dt == 0.0:
        return q
    step = quat_from_axis_angle(omega, speed * dt)  # axis scaled is fine
    return quat_normalize(quat_multiply(step, q))


def rotation_vector_between(a: Quat, b: Quat) -> Vec3:
    """World-frame rotation vector (axis * angle) taking orientation a to b."""
    d = quat_multiply(b, quat_conjugate(a))
    if d[0] < 0.0:
        d = (-d[0], -d[1], -d[2], -d[3])
    vec = (d[1], d[2], d[3])
    s = vec_norm(vec)
    if s < 1e-12:
        return ZERO_VEC
    angle = 2.0 * math.atan2(s, d[0])
    return vec_scale(vec, angle / s)


@dataclass(frozen=True)
class Pose:
    """Rigid transform: rotate by `orientation`, then translate by `position`."""

    position: Vec3 = ZERO_VEC
    orientation: Quat = IDENTITY_QUAT

    def is_finite(self) -> bool:
        return vec_is_finite(self.position) and quat_is_finite(self.orientation)

    def transform_point(self, p: Vec3) -> Vec3:
        return vec_add(rotate_vector(self.orientation, p), self.position)

    def compose(self, other: "Pose") -> "Pose":
        """self applied after other's frame: (self ∘ other)."""
        return Pose(
            position=self.transform_point(other.position),
            orientation=quat_normalize(
                quat_multiply(self.orientation, other.orientation)
            ),
        )

    def inverse(self) -> "Pose":
        inv_q = quat_conjugate(self.orientation)
        return Pose(
            position=vec_scale(rotate_vector(inv_q, self.position), -1.0),
            orientation=inv_q,
        )


@dataclass(frozen=True)
class Twist:
    """Linear (m/s) and angular (rad/s) velocity in the world frame."""

    linear: Vec3 = ZERO_VEC
    angular: Vec3 = ZERO_VEC

    def is_finite(self) -> bool:
        return vec_is_finite(self.linear) and vec_is_finite(self.angular)


IDENTITY_POSE = Pose()
