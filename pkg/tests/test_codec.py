"""Wire codec: golden fixtures, round trips, and the decode error taxonomy."""

import math
import random
import struct

import pytest

from teleosim import codec
from teleosim.codec import (
    BadMagic,
    BadQuaternion,
    BadVersion,
    DecodeError,
    InvariantViolation,
    NonFiniteField,
    OversizeMessage,
    TrailingBytes,
    TruncatedMessage,
    UnknownType,
)
from teleosim.geometry import Pose, Twist
from teleosim.messages import (
    GRIPPER_MAX,
    MAX_DATAGRAM,
    GoalCommandMessage,
    ObjectCreate,
    ObjectSpec,
    ObjectUpdate,
    SceneUpdateMessage,
)

from conftest import GOLDEN_DIR
import make_golden
import wiregen


# ---------------------------------------------------------------- golden

def test_golden_corpus_matches_committed_files():
    """The committed corpus is exactly what the independent packer builds."""
    corpus = make_golden.build_corpus()
    assert len(corpus) == 5
    for name, _msg, data in corpus:
        on_disk = (GOLDEN_DIR / f"{name}.bin").read_bytes()
        assert on_disk == data, f"stale fixture {name}.bin; rerun tools/make_golden.py"


def test_golden_corpus_encode_decode():
    for name, msg, data in make_golden.build_corpus():
        assert codec.encode(msg) == data, name
        assert codec.decode(data) == msg, name


def test_golden_sizes():
    sizes = {name: len(data) for name, _msg, data in make_golden.build_corpus()}
    assert sizes["goal_empty"] == 45
    assert sizes["scene_empty"] == 46
    assert sizes["scene_one_update"] == 102
    assert sizes["goal_command"] == 45 + 4 * 4
    assert sizes["scene_mixed"] == 46 + 2 * 56 + 1 * 88 + 2 * 4


def test_empty_goal_bytes_by_hand():
    """Header, pause byte, identity pose, width, two zero counts."""
    expected = struct.pack("<HBBI", 0x5442, 0x01, 0x02, 0)
    expected += b"\x00"
    expected += struct.pack("<7f", 0, 0, 0, 1, 0, 0, 0)
    expected += struct.pack("<f", 0.0)
    expected += struct.pack("<HH", 0, 0)
    assert len(expected) == 45
    assert codec.encode(GoalCommandMessage()) == expected


def test_empty_scene_bytes_by_hand():
    expected = struct.pack("<HBBI", 0x5442, 0x01, 0x01, 0)
    expected += struct.pack("<7f", 0, 0, 0, 1, 0, 0, 0)
    expected += struct.pack("<f", 0.0)
    expected += struct.pack("<H", 0) * 3
    assert len(expected) == 46
    assert codec.encode(SceneUpdateMessage()) == expected


# ------------------------------------------------------------ round trip

def test_round_trip_small_batch():
    r = random.Random(11)
    for _ in range(200):
        msg = wiregen.rand_message(r)
        assert codec.decode(codec.encode(msg)) == msg


def test_round_trip_scene_with_all_lists():
    r = random.Random(12)
    for _ in range(50):
        msg = wiregen.rand_scene(r, max_entries=4)
        again = codec.decode(codec.encode(msg))
        assert again.updates == msg.updates
        assert again.creates == msg.creates
        assert again.deletes == msg.deletes


def test_seq_extremes_round_trip():
    for seq in (0, 1, 0xFFFFFFFF):
        msg = GoalCommandMessage(seq=seq)
        assert codec.decode(codec.encode(msg)).seq == seq


def test_paused_flag_round_trip():
    for flag in (False, True):
        msg = GoalCommandMessage(paused=flag)
        assert codec.decode(codec.encode(msg)).paused is flag


def test_nonzero_paused_byte_decodes_true():
    data = bytearray(codec.encode(GoalCommandMessage(paused=True)))
    data[8] = 0x17
    assert codec.decode(bytes(data)).paused is True


# ------------------------------------------------------------ size math

def test_size_formulas_match_encoding():
    r = random.Random(13)
    for _ in range(100):
        msg = wiregen.rand_message(r)
        assert codec.encoded_size(msg) == len(codec.encode(msg))


def test_scene_size_formula():
    assert codec.scene_update_size(0, 0, 0) == 46
    assert codec.scene_update_size(1, 0, 0) == 102
    assert codec.scene_update_size(3, 2, 5) == 46 + 3 * 56 + 2 * 88 + 5 * 4


def test_goal_size_formula():
    assert codec.goal_command_size(0, 0) == 45
    assert codec.goal_command_size(3, 1) == 45 + 16


def test_update_capacity_limit():
    """1168 updates fit a datagram; 1169 do not."""
    assert codec.scene_update_size(1168, 0, 0) <= MAX_DATAGRAM
    assert codec.scene_update_size(1169, 0, 0) > MAX_DATAGRAM

    def scene_with(n):
        updates = tuple(
            ObjectUpdate(key=i, pose=Pose(), twist=Twist()) for i in range(n)
        )
        return SceneUpdateMessage(updates=updates)

    assert len(codec.encode(scene_with(1168))) == codec.scene_update_size(1168, 0, 0)
    with pytest.raises(OversizeMessage):
        codec.encode(scene_with(1169))


# --------------------------------------------------------- encode errors

def test_encode_rejects_bad_key():
    msg = SceneUpdateMessage(deletes=(2**32,))
    with pytest.raises(InvariantViolation):
        codec.encode(msg)
    with pytest.raises(InvariantViolation):
        codec.encode(SceneUpdateMessage(deletes=(-1,)))


def test_encode_rejects_nonunit_quaternion():
    bad = Pose(orientation=(0.9, 0.0, 0.0, 0.0))
    with pytest.raises(InvariantViolation):
        codec.encode(GoalCommandMessage(goal_pose=bad))


def test_encode_rejects_nonfinite():
    bad = Pose(position=(float("nan"), 0.0, 0.0))
    with pytest.raises(InvariantViolation):
        codec.encode(GoalCommandMessage(goal_pose=bad))
    with pytest.raises(InvariantViolation):
        codec.encode(SceneUpdateMessage(gripper_width=float("inf")))


def test_encode_rejects_width_out_of_range():
    with pytest.raises(InvariantViolation):
        codec.encode(GoalCommandMessage(goal_gripper_width=-0.001))
    with pytest.raises(InvariantViolation):
        codec.encode(GoalCommandMessage(goal_gripper_width=GRIPPER_MAX + 0.001))


def test_encode_accepts_float32_width_max():
    """Widths at or a float32 ulp around the max survive a wire round trip."""
    w32 = struct.unpack("<f", struct.pack("<f", GRIPPER_MAX))[0]
    assert w32 < GRIPPER_MAX
    msg = codec.decode(codec.encode(GoalCommandMessage(goal_gripper_width=w32)))
    assert msg.goal_gripper_width == w32
    # The exact float64 maximum is legal too and lands on w32 after the trip.
    msg = codec.decode(
        codec.encode(GoalCommandMessage(goal_gripper_width=GRIPPER_MAX))
    )
    assert msg.goal_gripper_width == w32
    # A hair above the maximum, inside the tolerance, still encodes.
    codec.encode(GoalCommandMessage(goal_gripper_width=GRIPPER_MAX + 5e-8))


def test_encode_rejects_duplicate_keys_across_lists():
    upd = ObjectUpdate(key=5, pose=Pose(), twist=Twist())
    cre = ObjectCreate(key=5, spec=ObjectSpec(), pose=Pose(), twist=Twist())
    with pytest.raises(InvariantViolation):
        codec.encode(SceneUpdateMessage(updates=(upd,), creates=(cre,)))
    with pytest.raises(InvariantViolation):
        codec.encode(SceneUpdateMessage(updates=(upd,), deletes=(5,)))


def test_encode_rejects_bad_spec():
    bad_extent = ObjectSpec(half_extents=(0.0, 0.02, 0.02))
    cre = ObjectCreate(key=1, spec=bad_extent, pose=Pose(), twist=Twist())
    with pytest.raises(InvariantViolation):
        codec.encode(SceneUpdateMessage(creates=(cre,)))
    bad_color = ObjectSpec(color=(1.5, 0.0, 0.0, 1.0))
    cre = ObjectCreate(key=1, spec=bad_color, pose=Pose(), twist=Twist())
    with pytest.raises(InvariantViolation):
        codec.encode(SceneUpdateMessage(creates=(cre,)))


# --------------------------------------------------------- decode errors

def test_decode_bad_magic():
    data = bytearray(codec.encode(GoalCommandMessage()))
    data[0] = 0xFF
    with pytest.raises(BadMagic):
        codec.decode(bytes(data))


def test_decode_bad_version():
    data = bytearray(codec.encode(GoalCommandMessage()))
    data[2] = 0x02
    with pytest.raises(BadVersion):
        codec.decode(bytes(data))


def test_decode_unknown_type():
    data = bytearray(codec.encode(GoalCommandMessage()))
    data[3] = 0x03
    with pytest.raises(UnknownType):
        codec.decode(bytes(data))


def test_decode_truncated_everywhere():
    """Every strict prefix of a valid message is truncated (or header-bad)."""
    data = codec.encode(make_golden.SCENE_MIXED)
    for cut in range(len(data)):
        with pytest.raises(DecodeError):
            codec.decode(data[:cut])
    for cut in range(8, len(data)):
        with pytest.raises(TruncatedMessage):
            codec.decode(data[:cut])


def test_decode_trailing_bytes():
    data = codec.encode(GoalCommandMessage())
    with pytest.raises(TrailingBytes):
        codec.decode(data + b"\x00")


def test_decode_nonfinite_field():
    data = bytearray(codec.encode(GoalCommandMessage()))
    data[9:13] = struct.pack("<f", float("nan"))
    with pytest.raises(NonFiniteField):
        codec.decode(bytes(data))


def test_decode_error_priority_magic_first():
    """A bad magic with a bad length reports the magic, not the length."""
    with pytest.raises(BadMagic):
        codec.decode(b"\xff\xff\x01\x02\x00\x00\x00\x00\x00")


def test_decode_quaternion_repair_band():
    """Norm within 1e-6: bits kept. Within 1e-3: renormalized. Beyond: error."""
    base = codec.encode(GoalCommandMessage())

    def with_quat(w, x, y, z):
        data = bytearray(base)
        data[21:37] = struct.pack("<4f", w, x, y, z)
        return bytes(data)

    exact = codec.decode(with_quat(1.0, 0.0, 0.0, 0.0))
    assert exact.goal_pose.orientation == (1.0, 0.0, 0.0, 0.0)

    slightly_off = 1.0 + 2e-4
    repaired = codec.decode(with_quat(slightly_off, 0.0, 0.0, 0.0))
    assert abs(repaired.goal_pose.orientation[0] - 1.0) < 1e-6
    n = math.sqrt(sum(c * c for c in repaired.goal_pose.orientation))
    assert abs(n - 1.0) <= 1e-9

    with pytest.raises(BadQuaternion):
        codec.decode(with_quat(1.01, 0.0, 0.0, 0.0))
    with pytest.raises(BadQuaternion):
        codec.decode(with_quat(0.0, 0.0, 0.0, 0.0))


def test_decode_empty_and_garbage():
    with pytest.raises(DecodeError):
        codec.decode(b"")
    with pytest.raises(DecodeError):
        codec.decode(b"\x00")
    r = random.Random(14)
    for _ in range(500):
        blob = bytes(r.randrange(256) for _ in range(r.randrange(0, 120)))
        try:
            codec.decode(blob)
        except DecodeError:
            pass


def test_decode_count_overruns_buffer():
    """A count field promising more entries than present is truncation."""
    msg = SceneUpdateMessage(
        updates=(ObjectUpdate(key=1, pose=Pose(), twist=Twist()),)
    )
    data = bytearray(codec.encode(msg))
    off = 8 + 28 + 4
    data[off : off + 2] = struct.pack("<H", 3)
    with pytest.raises(TruncatedMessage):
        codec.decode(bytes(data))
