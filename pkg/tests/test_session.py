"""Operator session: pause gating, width jog, opacity, key echo, replay."""

import math

import pytest

from teleosim import codec
from teleosim.geometry import Pose
from teleosim.guard import box_walls
from teleosim.geometry import Twist
from teleosim.messages import (
    GRIPPER_MAX,
    ObjectCreate,
    ObjectSpec,
    ObjectUpdate,
    SceneUpdateMessage,
)
from teleosim.session import OperatorInput, OperatorSession
from teleosim.simrobot import DEFAULT_HOME

HOME_INPUT = OperatorInput(hand_pose=DEFAULT_HOME)


def scene(seq=1, updates=(), creates=(), deletes=(), ee=DEFAULT_HOME, width=GRIPPER_MAX):
    return SceneUpdateMessage(
        seq=seq,
        ee_pose=ee,
        gripper_width=width,
        updates=updates,
        creates=creates,
        deletes=deletes,
    )


def make_create(key, half=0.02):
    return ObjectCreate(
        key=key,
        spec=ObjectSpec(half_extents=(half, half, half)),
        pose=Pose(position=DEFAULT_HOME.position),
        twist=Twist(),
    )


# ----------------------------------------------------------------- pause

def test_pause_freezes_goal_bit_identical():
    session = OperatorSession()
    session.tick(HOME_INPUT)
    frozen = session.tick(
        OperatorInput(hand_pose=DEFAULT_HOME, pause_pressed=True)
    )
    assert frozen.paused
    wire = codec.encode(frozen)
    for i in range(30):
        moving = OperatorInput(
            hand_pose=Pose(position=(0.42 + 0.002 * i, 0.01 * i, 0.31)),
            gripper_axis=-1.0,
        )
        msg = session.tick(moving)
        assert codec.encode(msg) == wire, "paused goals must not drift"


def test_double_toggle_restores_live_tracking():
    session = OperatorSession()
    session.tick(OperatorInput(hand_pose=DEFAULT_HOME, pause_pressed=True))
    assert session.paused
    session.tick(OperatorInput(hand_pose=DEFAULT_HOME, pause_pressed=True))
    assert not session.paused
    target = Pose(position=(0.43, 0.02, 0.32))
    msg = session.tick(OperatorInput(hand_pose=target))
    assert msg.goal_pose.position == target.position


def test_resume_tracks_current_hand_not_stale_path():
    session = OperatorSession()
    session.tick(OperatorInput(hand_pose=DEFAULT_HOME, pause_pressed=True))
    for _ in range(10):
        session.tick(OperatorInput(hand_pose=Pose(position=(0.6, 0.3, 0.5))))
    resumed = session.tick(
        OperatorInput(
            hand_pose=Pose(position=(0.41, 0.0, 0.31)), pause_pressed=True
        )
    )
    assert not resumed.paused
    assert resumed.goal_pose.position == (0.41, 0.0, 0.31)


# ------------------------------------------------------------- width jog

def test_width_covers_full_range_in_one_second():
    session = OperatorSession(rate_hz=72.0)
    down = OperatorInput(hand_pose=DEFAULT_HOME, gripper_axis=-1.0)
    widths = [session.tick(down).goal_gripper_width for _ in range(73)]
    assert all(b < a for a, b in zip(widths, widths[1:73]) if a > 0.0)
    assert widths[-1] == 0.0
    up = OperatorInput(hand_pose=DEFAULT_HOME, gripper_axis=1.0)
    for _ in range(73):
        msg = session.tick(up)
    assert msg.goal_gripper_width == GRIPPER_MAX


def test_width_axis_clamped_to_unit():
    session = OperatorSession(rate_hz=72.0)
    wild = session.tick(
        OperatorInput(hand_pose=DEFAULT_HOME, gripper_axis=-50.0)
    ).goal_gripper_width
    session2 = OperatorSession(rate_hz=72.0)
    unit = session2.tick(
        OperatorInput(hand_pose=DEFAULT_HOME, gripper_axis=-1.0)
    ).goal_gripper_width
    assert wild == unit


def test_width_frozen_while_paused():
    session = OperatorSession()
    session.tick(OperatorInput(hand_pose=DEFAULT_HOME, pause_pressed=True))
    before = session.goal_width
    for _ in range(20):
        session.tick(OperatorInput(hand_pose=DEFAULT_HOME, gripper_axis=-1.0))
    assert session.goal_width == before


# --------------------------------------------------------------- opacity

def test_opacity_scales_with_hand_distance():
    session = OperatorSession()
    session.tick(OperatorInput(hand_pose=Pose(position=(0.40, 0.05, 0.30))))
    assert math.isclose(session.opacity, 0.5, abs_tol=1e-12)
    session.tick(OperatorInput(hand_pose=DEFAULT_HOME))
    assert session.opacity == 0.0
    session.tick(OperatorInput(hand_pose=Pose(position=(0.40, 0.0, 0.55))))
    assert session.opacity == 1.0


def test_opacity_saturates_while_paused():
    session = OperatorSession()
    session.tick(OperatorInput(hand_pose=DEFAULT_HOME, pause_pressed=True))
    assert session.opacity == 1.0


# ------------------------------------------------------------ guard gate

def test_goal_freezes_at_last_allowed_on_violation():
    session = OperatorSession()
    inside = Pose(position=(0.43, 0.02, 0.32))
    session.tick(OperatorInput(hand_pose=inside))
    escaped = session.tick(
        OperatorInput(hand_pose=Pose(position=(5.0, 0.0, 0.3)))
    )
    assert escaped.goal_pose.position == inside.position
    assert session.last_violation is not None
    recovered = session.tick(OperatorInput(hand_pose=inside))
    assert recovered.goal_pose.position == inside.position
    assert session.last_violation is None


def test_home_pose_must_be_allowed():
    far_walls = box_walls((10.0, 10.0, 10.0), (11.0, 11.0, 11.0))
    with pytest.raises(ValueError):
        OperatorSession(walls=far_walls)


# --------------------------------------------------------------- key echo

def test_known_keys_mirror_registry():
    session = OperatorSession()
    msg = session.tick(
        HOME_INPUT, scene(seq=1, creates=(make_create(4), make_create(2)))
    )
    assert msg.known_keys == (2, 4)


def test_unknown_keys_echoed_exactly_once():
    session = OperatorSession()
    orphan = ObjectUpdate(key=9, pose=Pose(), twist=Twist())
    first = session.tick(HOME_INPUT, scene(seq=1, updates=(orphan,)))
    assert first.unknown_keys == (9,)
    second = session.tick(HOME_INPUT, None)
    assert second.unknown_keys == (), "echo once per skip episode"
    third = session.tick(HOME_INPUT, scene(seq=2, updates=(orphan,)))
    assert third.unknown_keys == (9,), "skipping again starts a new episode"


def test_tick_without_scene_keeps_feedback_state():
    session = OperatorSession()
    session.tick(
        HOME_INPUT,
        scene(seq=1, ee=Pose(position=(0.5, 0.0, 0.4)), width=0.03),
    )
    session.tick(HOME_INPUT, None)
    assert session.last_ee_pose.position == (0.5, 0.0, 0.4)
    assert session.last_gripper_width == 0.03


# ---------------------------------------------------------------- replay

def test_scripted_inputs_replay_bit_identically():
    def run():
        session = OperatorSession()
        out = []
        for i in range(100):
            inp = OperatorInput(
                hand_pose=Pose(
                    position=(0.40 + 0.001 * i, 0.002 * (i % 7), 0.30)
                ),
                gripper_axis=math.sin(i / 9.0),
                pause_pressed=(i in (40, 55)),
            )
            inc = (
                scene(seq=i, creates=(make_create(i),)) if i % 10 == 0 else None
            )
            out.append(codec.encode(session.tick(inp, inc)))
        return out

    assert run() == run()


# -------------------------------------------------------------- snapshot

def test_snapshot_mirrors_scene_and_flags():
    session = OperatorSession()
    session.tick(
        HOME_INPUT,
        scene(
            seq=1,
            creates=(make_create(3),),
            ee=Pose(position=(0.45, 0.0, 0.35)),
            width=0.041,
        ),
    )
    snap = session.snapshot()
    assert snap.tick_seq == 1
    assert snap.ee_pose.position == (0.45, 0.0, 0.35)
    assert snap.gripper_width == 0.041
    assert not snap.paused
    assert [o.key for o in snap.objects] == [3]
    assert snap.objects[0].half_extents == (0.02, 0.02, 0.02)


def test_snapshot_held_hint():
    session = OperatorSession()
    near = make_create(7)  # sits at the reported ee position
    session.tick(HOME_INPUT, scene(seq=1, creates=(near,), width=0.041))
    assert session.snapshot().objects[0].held
    session.tick(HOME_INPUT, scene(seq=2, width=0.08))
    assert not session.snapshot().objects[0].held, "open gripper, not held"


def test_snapshot_hides_violation_while_paused():
    session = OperatorSession()
    session.tick(OperatorInput(hand_pose=Pose(position=(5.0, 0.0, 0.3))))
    assert session.snapshot().guard_violation is not None
    session.tick(OperatorInput(hand_pose=DEFAULT_HOME, pause_pressed=True))
    assert session.snapshot().guard_violation is None
