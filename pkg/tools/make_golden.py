"""Regenerate the committed wire-format fixture corpus.

Packs each fixture message with raw struct calls, on purpose sharing no code
with the production codec, so the corpus is an independent statement of the
byte layout. Run from the repository root:

    python3 tools/make_golden.py protocol/golden
"""

from __future__ import annotations

import struct
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from teleosim.geometry import Pose, Twist
from teleosim.messages import (
    GoalCommandMessage,
    ObjectCreate,
    ObjectSpec,
    ObjectUpdate,
    SceneUpdateMessage,
)


def f32(x: float) -> float:
    """Round to the nearest float32, returned as a Python float."""
    return struct.unpack("<f", struct.pack("<f", x))[0]


def f32v(*xs: float) -> tuple[float, ...]:
    return tuple(f32(x) for x in xs)


def _pose(pose: Pose) -> bytes:
    return struct.pack("<7f", *pose.position, *pose.orientation)


def _twist(twist: Twist) -> bytes:
    return struct.pack("<6f", *twist.linear, *twist.angular)


def _spec(spec: ObjectSpec) -> bytes:
    return struct.pack("<I7f", spec.kind, *spec.half_extents, *spec.color)


def pack_scene(msg: SceneUpdateMessage) -> bytes:
    out = bytearray()
    out += struct.pack("<HBBI", 0x5442, 0x01, 0x01, msg.seq)
    out += _pose(msg.ee_pose)
    out += struct.pack("<f", msg.gripper_width)
    out += struct.pack("<H", len(msg.updates))
    for upd in msg.updates:
        out += struct.pack("<I", upd.key) + _pose(upd.pose) + _twist(upd.twist)
    out += struct.pack("<H", len(msg.creates))
    for cre in msg.creates:
        out += (
            struct.pack("<I", cre.key)
            + _spec(cre.spec)
            + _pose(cre.pose)
            + _twist(cre.twist)
        )
    out += struct.pack("<H", len(msg.deletes))
    for key in msg.deletes:
        out += struct.pack("<I", key)
    return bytes(out)


def pack_goal(msg: GoalCommandMessage) -> bytes:
    out = bytearray()
    out += struct.pack("<HBBI", 0x5442, 0x01, 0x02, msg.seq)
    out += struct.pack("<B", 1 if msg.paused else 0)
    out += _pose(msg.goal_pose)
    out += struct.pack("<f", msg.goal_gripper_width)
    out += struct.pack("<H", len(msg.known_keys))
    for key in msg.known_keys:
        out += struct.pack("<I", key)
    out += struct.pack("<H", len(msg.unknown_keys))
    for key in msg.unknown_keys:
        out += struct.pack("<I", key)
    return bytes(out)


# Every real below is float32-canonical so encoded fixtures decode back to
# exactly these values.

HALF_SQRT2 = f32(0.7071067811865476)

GOAL_EMPTY = GoalCommandMessage()

GOAL_COMMAND = GoalCommandMessage(
    seq=7,
    paused=True,
    goal_pose=Pose(
        position=f32v(0.5, -0.25, 0.125),
        orientation=(HALF_SQRT2, 0.0, 0.0, HALF_SQRT2),
    ),
    goal_gripper_width=f32(0.04),
    known_keys=(1, 2, 5),
    unknown_keys=(9,),
)

SCENE_EMPTY = SceneUpdateMessage()

SCENE_ONE_UPDATE = SceneUpdateMessage(
    seq=3,
    ee_pose=Pose(position=f32v(0.4, 0.0, 0.3)),
    gripper_width=f32(0.08),
    updates=(
        ObjectUpdate(
            key=1,
            pose=Pose(position=f32v(0.25, -0.5, 0.75)),
            twist=Twist(linear=f32v(0.1, 0.0, 0.0), angular=f32v(0.0, 0.0, 0.5)),
        ),
    ),
)

SCENE_MIXED = SceneUpdateMessage(
    seq=42,
    ee_pose=Pose(
        position=f32v(0.4, 0.1, 0.3),
        orientation=(HALF_SQRT2, 0.0, HALF_SQRT2, 0.0),
    ),
    gripper_width=f32(0.02),
    updates=(
        ObjectUpdate(
            key=1,
            pose=Pose(position=f32v(0.2, 0.2, 0.05)),
            twist=Twist(),
        ),
        ObjectUpdate(
            key=2,
            pose=Pose(position=f32v(0.3, -0.1, 0.05), orientation=(0.0, 1.0, 0.0, 0.0)),
            twist=Twist(linear=f32v(0.0, 0.05, 0.0)),
        ),
    ),
    creates=(
        ObjectCreate(
            key=4,
            spec=ObjectSpec(
                kind=0,
                half_extents=f32v(0.02, 0.02, 0.02),
                color=f32v(0.8, 0.2, 0.2, 1.0),
            ),
            pose=Pose(position=f32v(0.5, 0.0, 0.05)),
            twist=Twist(),
        ),
    ),
    deletes=(3, 7),
)

CORPUS = [
    ("goal_empty", GOAL_EMPTY, pack_goal),
    ("goal_command", GOAL_COMMAND, pack_goal),
    ("scene_empty", SCENE_EMPTY, pack_scene),
    ("scene_one_update", SCENE_ONE_UPDATE, pack_scene),
    ("scene_mixed", SCENE_MIXED, pack_scene),
]


def build_corpus() -> list[tuple[str, object, bytes]]:
    return [(name, msg, packer(msg)) for name, msg, packer in CORPUS]


def _describe(name: str, msg, data: bytes) -> str:
    lines = [
        f"fixture: {name}",
        f"size: {len(data)} bytes",
        f"message: {msg!r}",
        "hex:",
    ]
    for off in range(0, len(data), 16):
        chunk = data[off : off + 16]
        lines.append(f"  {off:04x}  {chunk.hex(' ')}")
    return "\n".join(lines) + "\n"


def main(out_dir: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, msg, data in build_corpus():
        (out / f"{name}.bin").write_bytes(data)
        (out / f"{name}.txt").write_text(_describe(name, msg, data))
        print(f"{name}: {len(data)} bytes")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "protocol/golden")
