"""Binary codec for the UDP wire format.

Layout (all integers unsigned little-endian, all reals IEEE-754 float32
little-endian, quaternions serialized scalar-first as w, x, y, z):

    header    magic u16 = 0x5442 | version u8 = 0x01 | type u8 | seq u32
    pose      px py pz | qw qx qy qz                          (28 bytes)
    twist     vx vy vz | wx wy wz                             (24 bytes)
    spec      kind u32 | hx hy hz | r g b a                   (32 bytes)

    scene update (type 0x01):
        header | ee pose | gripper_width f32
        | count u16 | count * (key u32 | pose | twist)        (56 bytes each)
        | count u16 | count * (key u32 | spec | pose | twist) (88 bytes each)
        | count u16 | count * (key u32)                       ( 4 bytes each)

    goal command (type 0x02):
        header | paused u8 | goal pose | goal_gripper_width f32
        | count u16 | count * (key u32)
        | count u16 | count * (key u32)

Empty messages are therefore 46 bytes (scene) and 45 bytes (goal); a scene
update's total size is 46 + 56*updates + 88*creates + 4*deletes.

`decode` is total over arbitrary byte strings: every failure raises a typed
`DecodeError` naming the first offending condition, never anything else.
Decoded quaternions are kept bit-exact when their norm is within 1e-6 of 1,
renormalized when within 1e-3, and rejected beyond that.
"""

from __future__ import annotations

import math
import struct

from .geometry import Pose, Quat, Twist, quat_norm
from .messages import (
    GRIPPER_MAX,
    MAX_DATAGRAM,
    GoalCommandMessage,
    Message,
    ObjectCreate,
    ObjectSpec,
    ObjectUpdate,
    SceneUpdateMessage,
)

MAGIC = 0x5442
VERSION = 0x01
TYPE_SCENE_UPDATE = 0x01
TYPE_GOAL_COMMAND = 0x02

HEADER_SIZE = 8
POSE_SIZE = 28
TWIST_SIZE = 24
SPEC_SIZE = 32
UPDATE_ENTRY_SIZE = 4 + POSE_SIZE + TWIST_SIZE
CREATE_ENTRY_SIZE = 4 + SPEC_SIZE + POSE_SIZE + TWIST_SIZE
DELETE_ENTRY_SIZE = 4

SCENE_BASE_SIZE = HEADER_SIZE + POSE_SIZE + 4 + 2 + 2 + 2
GOAL_BASE_SIZE = HEADER_SIZE + 1 + POSE_SIZE + 4 + 2 + 2

# Encode-side quaternion norm tolerance; float32 rounding of a unit
# quaternion stays well inside it.
QUAT_UNIT_TOL = 1e-6
# Decode-side repair band: renormalize up to here, reject beyond.
QUAT_REPAIR_TOL = 1e-3
# Tolerance for float32 wobble when a width computed near the maximum is
# re-encoded after a wire round trip.
WIDTH_SLACK = 1e-7

_HEADER = struct.Struct("<HBBI")
_POSE = struct.Struct("<7f")
_F32 = struct.Struct("<f")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_UPDATE = struct.Struct("<I13f")
_CREATE = struct.Struct("<II7f13f")


class ProtocolError(Exception):
    """Base for every codec failure."""


class InvariantViolation(ProtocolError):
    """Encode input breaks a message-type invariant."""


class OversizeMessage(ProtocolError):
    """Encoded size would exceed the single-datagram cap."""


class DecodeError(ProtocolError):
    """Base for every decode rejection."""


class BadMagic(DecodeError):
    pass


class BadVersion(DecodeError):
    pass


class UnknownType(DecodeError):
    pass


class TruncatedMessage(DecodeError):
    pass


class TrailingBytes(DecodeError):
    pass


class NonFiniteField(DecodeError):
    pass


class BadQuaternion(DecodeError):
    pass


def scene_update_size(n_updates: int, n_creates: int, n_deletes: int) -> int:
    return (
        SCENE_BASE_SIZE
        + UPDATE_ENTRY_SIZE * n_updates
        + CREATE_ENTRY_SIZE * n_creates
        + DELETE_ENTRY_SIZE * n_deletes
    )


def goal_command_size(n_known: int, n_unknown: int) -> int:
    return GOAL_BASE_SIZE + DELETE_ENTRY_SIZE * (n_known + n_unknown)


def encoded_size(msg: Message) -> int:
    if isinstance(msg, SceneUpdateMessage):
        return scene_update_size(len(msg.updates), len(msg.creates), len(msg.deletes))
    return goal_command_size(len(msg.known_keys), len(msg.unknown_keys))


def _check_u32(value: int, what: str) -> None:
    if not isinstance(value, int) or value < 0 or value > 0xFFFFFFFF:
        raise InvariantViolation(f"{what} must be a u32, got {value!r}")


def _check_u16_count(value: int, what: str) -> None:
    if value > 0xFFFF:
        raise InvariantViolation(f"{what} exceeds the u16 list-count limit")


def _check_pose(pose: Pose, what: str) -> None:
    if not pose.is_finite():
        raise InvariantViolation(f"{what} has a non-finite component")
    if abs(quat_norm(pose.orientation) - 1.0) > QUAT_UNIT_TOL:
        raise InvariantViolation(f"{what} quaternion is not unit length")


def _check_twist(twist: Twist, what: str) -> None:
    if not twist.is_finite():
        raise InvariantViolation(f"{what} has a non-finite component")


def _check_width(width: float, what: str) -> None:
    if not math.isfinite(width):
        raise InvariantViolation(f"{what} is not finite")
    if width < 0.0 or width > GRIPPER_MAX + WIDTH_SLACK:
        raise InvariantViolation(f"{what} {width!r} outside [0, {GRIPPER_MAX}]")


def _check_spec(spec: ObjectSpec, what: str) -> None:
    _check_u32(spec.kind, f"{what}.kind")
    for i, h in enumerate(spec.half_extents):
        if not math.isfinite(h) or h <= 0.0:
            raise InvariantViolation(f"{what}.half_extents[{i}] must be positive")
    for i, c in enumerate(spec.color):
        if not math.isfinite(c) or c < -0.0 or c > 1.0:
            raise InvariantViolation(f"{what}.color[{i}] outside [0, 1]")


def validate_message(msg: Message) -> None:
    """Raise InvariantViolation unless msg satisfies its type invariants."""
    _check_u32(msg.seq, "seq")
    if isinstance(msg, SceneUpdateMessage):
        _check_pose(msg.ee_pose, "ee_pose")
        _check_width(msg.gripper_width, "gripper_width")
        _check_u16_count(len(msg.updates), "updates")
        _check_u16_count(len(msg.creates), "creates")
        _check_u16_count(len(msg.deletes), "deletes")
        seen: dict[int, str] = {}
        for i, upd in enumerate(msg.updates):
            _check_u32(upd.key, f"updates[{i}].key")
            _check_pose(upd.pose, f"updates[{i}].pose")
            _check_twist(upd.twist, f"updates[{i}].twist")
            seen[upd.key] = "updates"
        for i, cre in enumerate(msg.creates):
            _check_u32(cre.key, f"creates[{i}].key")
            if cre.key in seen:
                raise InvariantViolation(
                    f"key {cre.key} appears in both {seen[cre.key]} and creates"
                )
            _check_spec(cre.spec, f"creates[{i}].spec")
            _check_pose(cre.pose, f"creates[{i}].pose")
            _check_twist(cre.twist, f"creates[{i}].twist")
            seen[cre.key] = "creates"
        for i, key in enumerate(msg.deletes):
            _check_u32(key, f"deletes[{i}]")
            if key in seen:
                raise InvariantViolation(
                    f"key {key} appears in both {seen[key]} and deletes"
                )
    elif isinstance(msg, GoalCommandMessage):
        _check_pose(msg.goal_pose, "goal_pose")
        _check_width(msg.goal_gripper_width, "goal_gripper_width")
        _check_u16_count(len(msg.known_keys), "known_keys")
        _check_u16_count(len(msg.unknown_keys), "unknown_keys")
        for i, key in enumerate(msg.known_keys):
            _check_u32(key, f"known_keys[{i}]")
        for i, key in enumerate(msg.unknown_keys):
            _check_u32(key, f"unknown_keys[{i}]")
    else:
        raise InvariantViolation(f"unsupported message type {type(msg)!r}")


def encode(msg: Message) -> bytes:
    """Serialize a valid message; emits nothing when any check fails."""
    validate_message(msg)
    size = encoded_size(msg)
    if size > MAX_DATAGRAM:
        raise OversizeMessage(f"encoded size {size} exceeds {MAX_DATAGRAM}-byte cap")

    buf = bytearray(size)
    if isinstance(msg, SceneUpdateMessage):
        _HEADER.pack_into(buf, 0, MAGIC, VERSION, TYPE_SCENE_UPDATE, msg.seq)
        off = HEADER_SIZE
        _POSE.pack_into(buf, off, *msg.ee_pose.position, *msg.ee_pose.orientation)
        off += POSE_SIZE
        _F32.pack_into(buf, off, msg.gripper_width)
        off += 4
        _U16.pack_into(buf, off, len(msg.updates))
        off += 2
        for upd in msg.updates:
            _UPDATE.pack_into(
                buf,
                off,
                upd.key,
                *upd.pose.position,
                *upd.pose.orientation,
                *upd.twist.linear,
                *upd.twist.angular,
            )
            off += UPDATE_ENTRY_SIZE
        _U16.pack_into(buf, off, len(msg.creates))
        off += 2
        for cre in msg.creates:
            _CREATE.pack_into(
                buf,
                off,
                cre.key,
                cre.spec.kind,
                *cre.spec.half_extents,
                *cre.spec.color,
                *cre.pose.position,
                *cre.pose.orientation,
                *cre.twist.linear,
                *cre.twist.angular,
            )
            off += CREATE_ENTRY_SIZE
        _U16.pack_into(buf, off, len(msg.deletes))
        off += 2
        for key in msg.deletes:
            _U32.pack_into(buf, off, key)
            off += 4
    else:
        _HEADER.pack_into(buf, 0, MAGIC, VERSION, TYPE_GOAL_COMMAND, msg.seq)
        off = HEADER_SIZE
        buf[off] = 1 if msg.paused else 0
        off += 1
        _POSE.pack_into(buf, off, *msg.goal_pose.position, *msg.goal_pose.orientation)
        off += POSE_SIZE
        _F32.pack_into(buf, off, msg.goal_gripper_width)
        off += 4
        _U16.pack_into(buf, off, len(msg.known_keys))
        off += 2
        for key in msg.known_keys:
            _U32.pack_into(buf, off, key)
            off += 4
        _U16.pack_into(buf, off, len(msg.unknown_keys))
        off += 2
        for key in msg.unknown_keys:
            _U32.pack_into(buf, off, key)
            off += 4
    assert off == size
    return bytes(buf)


class _Reader:
    __slots__ = ("data", "off")

    def __init__(self, data: bytes):
        self.data = data
        self.off = 0

    def need(self, n: int, what: str) -> None:
        if self.off + n > len(self.data):
            raise TruncatedMessage(f"ran out of bytes reading {what}")

    def u16(self, what: str) -> int:
        self.need(2, what)
        (v,) = _U16.unpack_from(self.data, self.off)
        self.off += 2
        return v

    def u32(self, what: str) -> int:
        self.need(4, what)
        (v,) = _U32.unpack_from(self.data, self.off)
        self.off += 4
        return v

    def f32(self, what: str) -> float:
        self.need(4, what)
        (v,) = _F32.unpack_from(self.data, self.off)
        self.off += 4
        if not math.isfinite(v):
            raise NonFiniteField(f"{what} is not finite")
        return v

    def pose(self, what: str) -> Pose:
        self.need(POSE_SIZE, what)
        vals = _POSE.unpack_from(self.data, self.off)
        self.off += POSE_SIZE
        for v in vals:
            if not math.isfinite(v):
                raise NonFiniteField(f"{what} has a non-finite component")
        quat: Quat = vals[3:7]
        norm = quat_norm(quat)
        dev = abs(norm - 1.0)
        if dev > QUAT_REPAIR_TOL:
            raise BadQuaternion(f"{what} quaternion norm {norm:.6f} unrepairable")
        if dev > QUAT_UNIT_TOL:
            quat = (quat[0] / norm, quat[1] / norm, quat[2] / norm, quat[3] / norm)
        return Pose(position=vals[0:3], orientation=quat)

    def twist(self, what: str) -> Twist:
        self.need(TWIST_SIZE, what)
        vals = struct.unpack_from("<6f", self.data, self.off)
        self.off += TWIST_SIZE
        for v in vals:
            if not math.isfinite(v):
                raise NonFiniteField(f"{what} has a non-finite component")
        return Twist(linear=vals[0:3], angular=vals[3:6])


def decode(data: bytes) -> Message:
    """Parse one datagram; total over arbitrary bytes, raising DecodeError."""
    r = _Reader(data)
    r.need(2, "magic")
    (magic,) = _U16.unpack_from(data, 0)
    r.off = 2
    if magic != MAGIC:
        raise BadMagic(f"magic 0x{magic:04x}, want 0x{MAGIC:04x}")
    r.need(1, "version")
    version = data[r.off]
    r.off += 1
    if version != VERSION:
        raise BadVersion(f"version {version}, want {VERSION}")
    r.need(1, "type")
    mtype = data[r.off]
    r.off += 1
    if mtype not in (TYPE_SCENE_UPDATE, TYPE_GOAL_COMMAND):
        raise UnknownType(f"message type 0x{mtype:02x}")
    seq = r.u32("seq")

    msg: Message
    if mtype == TYPE_SCENE_UPDATE:
        ee_pose = r.pose("ee_pose")
        width = r.f32("gripper_width")
        updates = []
        for i in range(r.u16("update count")):
            key = r.u32(f"updates[{i}].key")
            pose = r.pose(f"updates[{i}].pose")
            twist = r.twist(f"updates[{i}].twist")
            updates.append(ObjectUpdate(key=key, pose=pose, twist=twist))
        creates = []
        for i in range(r.u16("create count")):
            key = r.u32(f"creates[{i}].key")
            kind = r.u32(f"creates[{i}].kind")
            hx = r.f32(f"creates[{i}].half_extents[0]")
            hy = r.f32(f"creates[{i}].half_extents[1]")
            hz = r.f32(f"creates[{i}].half_extents[2]")
            color = tuple(r.f32(f"creates[{i}].color[{j}]") for j in range(4))
            pose = r.pose(f"creates[{i}].pose")
            twist = r.twist(f"creates[{i}].twist")
            creates.append(
                ObjectCreate(
                    key=key,
                    spec=ObjectSpec(kind=kind, half_extents=(hx, hy, hz), color=color),
                    pose=pose,
                    twist=twist,
                )
            )
        deletes = tuple(
            r.u32(f"deletes[{i}]") for i in range(r.u16("delete count"))
        )
        msg = SceneUpdateMessage(
            seq=seq,
            ee_pose=ee_pose,
            gripper_width=width,
            updates=tuple(updates),
            creates=tuple(creates),
            deletes=deletes,
        )
    else:
        r.need(1, "paused")
        paused = data[r.off] != 0
        r.off += 1
        goal_pose = r.pose("goal_pose")
        width = r.f32("goal_gripper_width")
        known = tuple(r.u32(f"known_keys[{i}]") for i in range(r.u16("known count")))
        unknown = tuple(
            r.u32(f"unknown_keys[{i}]") for i in range(r.u16("unknown count"))
        )
        msg = GoalCommandMessage(
            seq=seq,
            paused=paused,
            goal_pose=goal_pose,
            goal_gripper_width=width,
            known_keys=known,
            unknown_keys=unknown,
        )

    if r.off != len(data):
        raise TrailingBytes(f"{len(data) - r.off} bytes after message end")
    return msg
