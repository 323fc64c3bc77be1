"""Local console channel: session frames out, operator commands in.

The session thread publishes one JSON frame per tick; browser consoles
connect over a WebSocket and always see the newest frame (slow consumers
skip, never reorder). Incoming commands fold into a single operator input
consumed at the next session tick; pause presses are counted so back-to-back
edges cancel by parity instead of being lost.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import Pose, quat_normalize, vec_is_finite
from .session import OperatorInput, SessionSnapshot

OUTBOUND_RING = 8


class ChannelClosed(RuntimeError):
    """Publish or wait on a gateway after close()."""


class CommandParseError(ValueError):
    pass


@dataclass
class GatewayStats:
    frames_published: int = 0
    commands: int = 0
    malformed_commands: int = 0
    camera_commands: int = 0


@dataclass
class _Cursor:
    last_seq: int = -1


def frame_payload(snapshot: SessionSnapshot) -> dict:
    """Frame dict mirroring the session snapshot field for field."""
    return {
        "type": "frame",
        "seq": snapshot.tick_seq,
        "ee_pose": _pose_dict(snapshot.ee_pose),
        "gripper_width": snapshot.gripper_width,
        "goal_width": snapshot.goal_width,
        "paused": snapshot.paused,
        "opacity": snapshot.opacity,
        "objects": [
            {
                "key": view.key,
                "kind": view.kind,
                "pose": _pose_dict(view.pose),
                "color": list(view.color),
                "half_extents": list(view.half_extents),
                "held": view.held,
            }
            for view in snapshot.objects
        ],
        "guard_violation": (
            list(snapshot.guard_violation)
            if snapshot.guard_violation is not None
            else None
        ),
        "stats": {"avg_hz": snapshot.avg_hz, "low1_hz": snapshot.low1_hz},
    }


def _pose_dict(pose: Pose) -> dict:
    return {"position": list(pose.position), "orientation": list(pose.orientation)}


def parse_command(text: str) -> tuple[str, object]:
    """Decode one console command; raises CommandParseError when malformed."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CommandParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise CommandParseError("command must be an object")
    kind = raw.get("type")
    if kind == "hand_pose":
        position = raw.get("position")
        orientation = raw.get("orientation")
        if (
            not isinstance(position, list)
            or len(position) != 3
            or not isinstance(orientation, list)
            or len(orientation) != 4
        ):
            raise CommandParseError("hand_pose needs position[3], orientation[4]")
        try:
            pos = tuple(float(v) for v in position)
            quat = tuple(float(v) for v in orientation)
        except (TypeError, ValueError) as exc:
            raise CommandParseError(str(exc)) from exc
        if not vec_is_finite(pos) or not all(math.isfinite(c) for c in quat):
            raise CommandParseError("hand_pose has a non-finite component")
        try:
            quat = quat_normalize(quat)
        except ValueError as exc:
            raise CommandParseError(str(exc)) from exc
        return "hand_pose", Pose(position=pos, orientation=quat)
    if kind == "gripper_axis":
        value = raw.get("value")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise CommandParseError("gripper_axis needs a numeric value")
        value = float(value)
        if not math.isfinite(value):
            raise CommandParseError("gripper_axis must be finite")
        return "gripper_axis", min(max(value, -1.0), 1.0)
    if kind == "pause_toggle":
        return "pause_toggle", None
    if kind == "camera":
        return "camera", None
    raise CommandParseError(f"unknown command type {kind!r}")


class ConsoleGateway:
    """Thread-safe core; transport (WebSocket) is layered on top."""

    def __init__(self, *, initial_hand_pose: Pose, ring: int = OUTBOUND_RING):
        self._lock = threading.Lock()
        self._frames_available = threading.Condition(self._lock)
        self._ring = ring
        self._frames: list[tuple[int, str]] = []
        self._cursors: set[int] = set()
        self._next_cursor_id = 0
        self._cursor_seqs: dict[int, int] = {}
        self._closed = False
        self.stats = GatewayStats()
        # Inbound fold state.
        self._hand_pose = initial_hand_pose
        self._axis = 0.0
        self._pause_edges = 0
        self._dirty = False

    # -- outbound ---------------------------------------------------------

    def consumer_count(self) -> int:
        with self._lock:
            return len(self._cursors)

    def register(self) -> int:
        with self._lock:
            if self._closed:
                raise ChannelClosed("gateway is closed")
            cursor = self._next_cursor_id
            self._next_cursor_id += 1
            self._cursors.add(cursor)
            self._cursor_seqs[cursor] = -1
            return cursor

    def unregister(self, cursor: int) -> None:
        with self._lock:
            self._cursors.discard(cursor)
            self._cursor_seqs.pop(cursor, None)

    def publish_frame(self, snapshot: SessionSnapshot) -> None:
        """Non-blocking; a no-op beyond a flag check without consumers."""
        with self._frames_available:
            if self._closed:
                raise ChannelClosed("gateway is closed")
            if not self._cursors:
                return
            payload = json.dumps(frame_payload(snapshot), separators=(",", ":"))
            self._frames.append((snapshot.tick_seq, payload))
            if len(self._frames) > self._ring:
                del self._frames[0 : len(self._frames) - self._ring]
            self.stats.frames_published += 1
            self._frames_available.notify_all()

    def next_frame(self, cursor: int, timeout: float | None = None) -> str | None:
        """Newest frame this cursor has not seen; blocks up to timeout."""
        with self._frames_available:
            while True:
                if self._closed:
                    raise ChannelClosed("gateway is closed")
                if self._frames:
                    seq, payload = self._frames[-1]
                    if seq > self._cursor_seqs.get(cursor, -1):
                        self._cursor_seqs[cursor] = seq
                        return payload
                if not self._frames_available.wait(timeout=timeout):
                    return None

    # -- inbound ----------------------------------------------------------

    def submit_command(self, text: str) -> None:
        try:
            kind, value = parse_command(text)
        except CommandParseError:
            with self._lock:
                self.stats.malformed_commands += 1
            return
        with self._lock:
            self.stats.commands += 1
            if kind == "hand_pose":
                self._hand_pose = value
                self._dirty = True
            elif kind == "gripper_axis":
                self._axis = value
                self._dirty = True
            elif kind == "pause_toggle":
                self._pause_edges += 1
                self._dirty = True
            else:  # camera: the console's own business
                self.stats.camera_commands += 1

    def poll_command(self) -> OperatorInput | None:
        """Fold everything since the last poll into one input, or None."""
        with self._lock:
            if not self._dirty:
                return None
            operator_input = OperatorInput(
                hand_pose=self._hand_pose,
                gripper_axis=self._axis,
                pause_pressed=self._pause_edges % 2 == 1,
            )
            self._pause_edges = 0
            self._dirty = False
            return operator_input

    def close(self) -> None:
        with self._frames_available:
            self._closed = True
            self._frames_available.notify_all()


FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>operator console</title></head>
<body style="font-family: monospace; background: #111; color: #ddd">
<h3>operator console bundle not built</h3>
<p>Run <code>npm install &amp;&amp; npm run build</code> in <code>frontend/</code>,
then restart with <code>--console-dir frontend/dist</code>.</p>
<p>The WebSocket channel is live at <code>/ws</code>.</p>
</body></html>"""


def build_app(gateway: ConsoleGateway, static_dir: str | None = None):
    """FastAPI app exposing /ws plus the static console bundle."""
    import asyncio

    import anyio
    from fastapi import FastAPI
    from fastapi.responses import HTMLResponse
    from fastapi.staticfiles import StaticFiles
    from starlette.routing import WebSocketRoute
    from starlette.websockets import WebSocketDisconnect

    app = FastAPI()

    # Registered through starlette directly: the endpoint receives the
    # socket positionally, with no parameter introspection involved.
    async def ws_channel(ws):
        await ws.accept()
        cursor = gateway.register()

        async def pump_frames():
            try:
                while True:
                    payload = await anyio.to_thread.run_sync(
                        gateway.next_frame, cursor, 0.25
                    )
                    if payload is not None:
                        await ws.send_text(payload)
            except ChannelClosed:
                await ws.close()

        sender = asyncio.ensure_future(pump_frames())
        try:
            while True:
                text = await ws.receive_text()
                gateway.submit_command(text)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            gateway.unregister(cursor)

    app.router.routes.append(WebSocketRoute("/ws", ws_channel))

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")
    else:

        @app.get("/")
        async def placeholder() -> HTMLResponse:
            return HTMLResponse(FALLBACK_PAGE)

    return app


class GatewayServer:
    """uvicorn in a daemon thread; ignore it entirely and nothing runs."""

    def __init__(
        self,
        gateway: ConsoleGateway,
        *,
        host: str = "127.0.0.1",
        port: int = 8765,
        static_dir: str | None = None,
    ):
        import uvicorn

        self.gateway = gateway
        self.host = host
        self.port = port
        app = build_app(gateway, static_dir)
        config = uvicorn.Config(app, host=host, port=port, log_level="warning")
        self._server = uvicorn.Server(config)
        self._thread = threading.Thread(
            target=self._server.run, name="console-gateway", daemon=True
        )

    @property
    def url(self) -> str:
        return f"http://{self.host}:{self.port}/"

    def start(self, ready_timeout: float = 10.0) -> None:
        import time

        self._thread.start()
        deadline = time.monotonic() + ready_timeout
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("gateway server failed to start")
            if not self._thread.is_alive():
                raise RuntimeError("gateway server thread exited during startup")
            time.sleep(0.01)

    def stop(self) -> None:
        self.gateway.close()
        self._server.should_exit = True
        self._thread.join(timeout=5.0)
