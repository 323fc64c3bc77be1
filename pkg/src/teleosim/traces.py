"""Line-delimited operator input traces and controller scenario scripts.

Input trace, one tick per line, `#` comments and blank lines skipped:

    t  px py pz  qw qx qy qz  axis  pause

`t` is seconds, monotone non-decreasing (informational; each line is one
session tick). `axis` is the gripper jog in [-1, 1]; `pause` is 1 on the tick
where the pause button went down, else 0.

Scenario script, executed against the controller's virtual clock:

    wait <seconds>
    spawn [count]
    delete <key>
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Pose
from .session import OperatorInput


class TraceError(ValueError):
    """Malformed trace or scenario line; message names line number."""


@dataclass(frozen=True)
class TraceStep:
    time: float
    operator_input: OperatorInput


def parse_input_trace(text: str) -> list[TraceStep]:
    steps: list[TraceStep] = []
    last_t = -math.inf
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 10:
            raise TraceError(f"line {lineno}: expected 10 fields, got {len(parts)}")
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise TraceError(f"line {lineno}: {exc}") from exc
        if not all(math.isfinite(v) for v in vals):
            raise TraceError(f"line {lineno}: non-finite value")
        t = vals[0]
        if t < last_t:
            raise TraceError(f"line {lineno}: time goes backwards")
        last_t = t
        if vals[9] not in (0.0, 1.0):
            raise TraceError(f"line {lineno}: pause flag must be 0 or 1")
        steps.append(
            TraceStep(
                time=t,
                operator_input=OperatorInput(
                    hand_pose=Pose(
                        position=(vals[1], vals[2], vals[3]),
                        orientation=(vals[4], vals[5], vals[6], vals[7]),
                    ),
                    gripper_axis=vals[8],
                    pause_pressed=vals[9] == 1.0,
                ),
            )
        )
    return steps


def load_input_trace(path: str) -> list[TraceStep]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_input_trace(fh.read())


@dataclass(frozen=True)
class ScenarioEvent:
    time: float
    action: str  # "spawn" | "delete"
    arg: int


def parse_scenario(text: str) -> list[ScenarioEvent]:
    events: list[ScenarioEvent] = []
    clock = 0.0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        cmd = parts[0].lower()
        if cmd == "wait":
            if len(parts) != 2:
                raise TraceError(f"line {lineno}: wait takes one duration")
            try:
                seconds = float(parts[1])
            except ValueError as exc:
                raise TraceError(f"line {lineno}: {exc}") from exc
            if not math.isfinite(seconds) or seconds < 0:
                raise TraceError(f"line {lineno}: wait must be >= 0 seconds")
            clock += seconds
        elif cmd == "spawn":
            count = 1
            if len(parts) == 2:
                if not parts[1].isdigit():
                    raise TraceError(f"line {lineno}: spawn count must be an integer")
                count = int(parts[1])
            elif len(parts) > 2:
                raise TraceError(f"line {lineno}: spawn takes at most one count")
            for _ in range(count):
                events.append(ScenarioEvent(time=clock, action="spawn", arg=0))
        elif cmd == "delete":
            if len(parts) != 2 or not parts[1].isdigit():
                raise TraceError(f"line {lineno}: delete takes one key")
            events.append(ScenarioEvent(time=clock, action="delete", arg=int(parts[1])))
        else:
            raise TraceError(f"line {lineno}: unknown command {cmd!r}")
    return events


def load_scenario(path: str) -> list[ScenarioEvent]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


class ScenarioRunner:
    """Feeds scenario events to a world as its virtual clock advances."""

    def __init__(self, events: list[ScenarioEvent]):
        self._events = sorted(events, key=lambda e: e.time)
        self._cursor = 0

    def run_due(self, world, now: float) -> None:
        while self._cursor < len(self._events):
            event = self._events[self._cursor]
            if event.time > now:
                break
            if event.action == "spawn":
                world.spawn_block()
            elif event.action == "delete":
                world.despawn(event.arg)
            self._cursor += 1

    @property
    def exhausted(self) -> bool:
        return self._cursor >= len(self._events)
