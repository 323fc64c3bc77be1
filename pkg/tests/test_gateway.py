"""Console gateway: command parsing, input folding, frame fan-out, HTTP."""

import json
import math
import time

import pytest

from teleosim.gateway import (
    FALLBACK_PAGE,
    ChannelClosed,
    CommandParseError,
    ConsoleGateway,
    build_app,
    frame_payload,
    parse_command,
)
from teleosim.geometry import Pose
from teleosim.session import ObjectView, SessionSnapshot
from teleosim.simrobot import DEFAULT_HOME


def snapshot(seq=1, paused=False, violation=None, objects=()):
    return SessionSnapshot(
        tick_seq=seq,
        ee_pose=Pose(position=(0.45, 0.0, 0.35)),
        gripper_width=0.05,
        goal_width=0.03,
        paused=paused,
        opacity=0.25,
        objects=objects,
        guard_violation=violation,
        avg_hz=71.5,
        low1_hz=48.0,
    )


def gateway():
    return ConsoleGateway(initial_hand_pose=DEFAULT_HOME)


# -------------------------------------------------------- command parsing

def test_parse_hand_pose_normalizes_quat():
    kind, pose = parse_command(
        json.dumps(
            {
                "type": "hand_pose",
                "position": [0.4, 0.1, 0.3],
                "orientation": [2.0, 0.0, 0.0, 0.0],
            }
        )
    )
    assert kind == "hand_pose"
    assert pose.position == (0.4, 0.1, 0.3)
    assert pose.orientation == (1.0, 0.0, 0.0, 0.0)


def test_parse_gripper_axis_clamps():
    assert parse_command('{"type":"gripper_axis","value":-3.5}') == (
        "gripper_axis",
        -1.0,
    )
    assert parse_command('{"type":"gripper_axis","value":0.25}') == (
        "gripper_axis",
        0.25,
    )


def test_parse_pause_and_camera():
    assert parse_command('{"type":"pause_toggle"}') == ("pause_toggle", None)
    assert parse_command('{"type":"camera","yaw":0.2}') == ("camera", None)


@pytest.mark.parametrize(
    "text",
    [
        "not json at all",
        "[1,2,3]",
        '{"type":"warp_drive"}',
        '{"type":"hand_pose","position":[0,0],"orientation":[1,0,0,0]}',
        '{"type":"hand_pose","position":[0,0,0],"orientation":[1,0,0]}',
        '{"type":"hand_pose","position":[0,0,"x"],"orientation":[1,0,0,0]}',
        '{"type":"hand_pose","position":[0,0,0],"orientation":[0,0,0,0]}',
        '{"type":"hand_pose","position":[NaN,0,0],"orientation":[1,0,0,0]}',
        '{"type":"gripper_axis","value":"big"}',
        '{"type":"gripper_axis","value":true}',
        '{"type":"gripper_axis","value":NaN}',
    ],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(CommandParseError):
        parse_command(text)


# ---------------------------------------------------------- input folding

def test_poll_returns_none_until_dirty():
    gw = gateway()
    assert gw.poll_command() is None


def test_latest_pose_and_axis_win():
    gw = gateway()
    gw.submit_command(
        '{"type":"hand_pose","position":[0.1,0,0.3],"orientation":[1,0,0,0]}'
    )
    gw.submit_command(
        '{"type":"hand_pose","position":[0.2,0,0.3],"orientation":[1,0,0,0]}'
    )
    gw.submit_command('{"type":"gripper_axis","value":0.5}')
    gw.submit_command('{"type":"gripper_axis","value":-0.5}')
    folded = gw.poll_command()
    assert folded.hand_pose.position == (0.2, 0.0, 0.3)
    assert folded.gripper_axis == -0.5
    assert gw.poll_command() is None, "fold consumed"


def test_pause_edges_cancel_by_parity():
    gw = gateway()
    gw.submit_command('{"type":"pause_toggle"}')
    gw.submit_command('{"type":"pause_toggle"}')
    folded = gw.poll_command()
    assert folded is not None and not folded.pause_pressed
    gw.submit_command('{"type":"pause_toggle"}')
    gw.submit_command('{"type":"pause_toggle"}')
    gw.submit_command('{"type":"pause_toggle"}')
    assert gw.poll_command().pause_pressed
    gw.submit_command('{"type":"gripper_axis","value":0.0}')
    assert not gw.poll_command().pause_pressed, "edges reset after poll"


def test_axis_persists_across_polls():
    gw = gateway()
    gw.submit_command('{"type":"gripper_axis","value":-0.5}')
    assert gw.poll_command().gripper_axis == -0.5
    gw.submit_command('{"type":"pause_toggle"}')
    assert gw.poll_command().gripper_axis == -0.5, "axis is a held stick"


def test_camera_counted_but_not_folded():
    gw = gateway()
    gw.submit_command('{"type":"camera","yaw":1.0}')
    assert gw.stats.camera_commands == 1
    assert gw.poll_command() is None


def test_malformed_counted_not_raised():
    gw = gateway()
    gw.submit_command("not json")
    gw.submit_command('{"type":"nope"}')
    assert gw.stats.malformed_commands == 2
    assert gw.poll_command() is None


# ----------------------------------------------------------- frame fan-out

def test_publish_without_consumers_is_noop():
    gw = gateway()
    gw.publish_frame(snapshot(seq=1))
    assert gw.stats.frames_published == 0


def test_consumer_sees_newest_frame_only():
    gw = gateway()
    cursor = gw.register()
    for seq in range(1, 6):
        gw.publish_frame(snapshot(seq=seq))
    payload = gw.next_frame(cursor, timeout=0.1)
    assert json.loads(payload)["seq"] == 5
    assert gw.next_frame(cursor, timeout=0.05) is None, "nothing newer yet"


def test_ring_bounds_memory_and_seq_monotone():
    gw = gateway()
    cursor = gw.register()
    seen = []
    for seq in range(1, 31):
        gw.publish_frame(snapshot(seq=seq))
        if seq % 7 == 0:
            seen.append(json.loads(gw.next_frame(cursor, timeout=0.1))["seq"])
    assert len(gw._frames) <= 8
    assert seen == sorted(seen)
    assert seen[-1] == 28
    assert gw.stats.frames_published == 30


def test_two_consumers_track_independently():
    gw = gateway()
    a, b = gw.register(), gw.register()
    gw.publish_frame(snapshot(seq=1))
    assert json.loads(gw.next_frame(a, timeout=0.1))["seq"] == 1
    gw.publish_frame(snapshot(seq=2))
    assert json.loads(gw.next_frame(a, timeout=0.1))["seq"] == 2
    assert json.loads(gw.next_frame(b, timeout=0.1))["seq"] == 2
    gw.unregister(b)
    assert gw.consumer_count() == 1


def test_closed_gateway_raises():
    gw = gateway()
    cursor = gw.register()
    gw.close()
    with pytest.raises(ChannelClosed):
        gw.publish_frame(snapshot())
    with pytest.raises(ChannelClosed):
        gw.next_frame(cursor, timeout=0.1)
    with pytest.raises(ChannelClosed):
        gw.register()


# ------------------------------------------------------------ frame shape

def test_frame_payload_mirrors_snapshot():
    view = ObjectView(
        key=4,
        kind=1,
        pose=Pose(position=(0.5, -0.1, 0.2)),
        color=(0.9, 0.2, 0.1, 1.0),
        half_extents=(0.02, 0.02, 0.02),
        held=True,
    )
    snap = snapshot(seq=9, violation=(2, 0), objects=(view,))
    frame = frame_payload(snap)
    assert frame["type"] == "frame"
    assert frame["seq"] == 9
    assert frame["ee_pose"]["position"] == [0.45, 0.0, 0.35]
    assert frame["ee_pose"]["orientation"] == [1.0, 0.0, 0.0, 0.0]
    assert frame["gripper_width"] == 0.05
    assert frame["goal_width"] == 0.03
    assert frame["paused"] is False
    assert frame["opacity"] == 0.25
    assert frame["guard_violation"] == [2, 0]
    assert frame["stats"] == {"avg_hz": 71.5, "low1_hz": 48.0}
    obj = frame["objects"][0]
    assert obj == {
        "key": 4,
        "kind": 1,
        "pose": {
            "position": [0.5, -0.1, 0.2],
            "orientation": [1.0, 0.0, 0.0, 0.0],
        },
        "color": [0.9, 0.2, 0.1, 1.0],
        "half_extents": [0.02, 0.02, 0.02],
        "held": True,
    }
    json.dumps(frame)  # must be serializable as-is


def test_frame_payload_none_violation_stays_null():
    frame = frame_payload(snapshot(violation=None))
    assert frame["guard_violation"] is None


# -------------------------------------------------------------- HTTP layer

def test_websocket_round_trip():
    from starlette.testclient import TestClient

    gw = gateway()
    app = build_app(gw)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            deadline = time.monotonic() + 5.0
            while gw.consumer_count() == 0:
                assert time.monotonic() < deadline, "consumer never registered"
                time.sleep(0.01)
            gw.publish_frame(snapshot(seq=3))
            frame = json.loads(ws.receive_text())
            assert frame["type"] == "frame" and frame["seq"] == 3

            ws.send_text(
                '{"type":"hand_pose","position":[0.5,0.1,0.4],'
                '"orientation":[1,0,0,0]}'
            )
            folded = None
            deadline = time.monotonic() + 5.0
            while folded is None and time.monotonic() < deadline:
                folded = gw.poll_command()
                time.sleep(0.01)
            assert folded is not None
            assert folded.hand_pose.position == (0.5, 0.1, 0.4)
    assert gw.consumer_count() == 0, "disconnect unregisters"


def test_root_serves_fallback_page_without_bundle():
    from starlette.testclient import TestClient

    app = build_app(gateway(), static_dir=None)
    with TestClient(app) as client:
        page = client.get("/")
        assert page.status_code == 200
        assert "console bundle not built" in page.text
    assert "npm run build" in FALLBACK_PAGE


def test_root_serves_static_bundle_when_present(tmp_path):
    from starlette.testclient import TestClient

    (tmp_path / "index.html").write_text(
        "<!doctype html><title>console</title>ready", encoding="utf-8"
    )
    app = build_app(gateway(), static_dir=str(tmp_path))
    with TestClient(app) as client:
        page = client.get("/")
        assert page.status_code == 200
        assert "ready" in page.text
