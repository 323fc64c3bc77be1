"""Production loop drivers: paced controller and client threads.

Both loops are independent and communicate only through the latest-wins
endpoints; each consumes its mailbox at tick start. The client reuses its
previous operator input when nothing new arrived, with the pause edge
cleared so a single press never re-toggles.
"""

from __future__ import annotations

import threading
import time
from dataclasses import replace
from typing import Callable

from .messages import GoalCommandMessage, SceneUpdateMessage
from .session import OperatorInput, OperatorSession
from .simrobot import SimWorld
from .traces import ScenarioRunner
from .transport import UdpEndpoint


class TickPacer:
    """Absolute-schedule sleep pacing; resyncs instead of bursting after lag."""

    def __init__(self, rate_hz: float):
        self.period = 1.0 / rate_hz
        self._next: float | None = None

    def wait(self) -> float:
        now = time.perf_counter()
        if self._next is None:
            self._next = now + self.period
        delay = self._next - now
        if delay > 0.0:
            time.sleep(delay)
            now = time.perf_counter()
            self._next += self.period
        else:
            # Overdue: schedule one full period out so a stall costs one
            # late tick, never a burst of immediate ones.
            self._next = now + self.period
        return now


def controller_tick(
    world: SimWorld,
    endpoint: UdpEndpoint,
    *,
    scenario: ScenarioRunner | None = None,
    now: float | None = None,
) -> int | None:
    """One controller tick: consume mailbox, run scenario, step, send.

    Returns the seq of the sent scene message, or None if sending failed
    because the message outgrew a datagram.
    """
    incoming = endpoint.receive_latest()
    if isinstance(incoming, GoalCommandMessage):
        world.apply_goal_command(incoming)
    if scenario is not None and now is not None:
        scenario.run_due(world, now)
    msg = world.step()
    return endpoint.send(msg)


def client_tick(
    session: OperatorSession,
    endpoint: UdpEndpoint,
    operator_input: OperatorInput,
) -> GoalCommandMessage:
    """One client tick: consume mailbox, run the session, send the goal."""
    incoming = endpoint.receive_latest()
    scene = incoming if isinstance(incoming, SceneUpdateMessage) else None
    msg = session.tick(operator_input, scene)
    endpoint.send(msg)
    return msg


def reuse_input(previous: OperatorInput) -> OperatorInput:
    """Previous input carried into a tick with no fresh commands."""
    if previous.pause_pressed:
        return replace(previous, pause_pressed=False)
    return previous


def run_controller_loop(
    world: SimWorld,
    endpoint: UdpEndpoint,
    rate_hz: float,
    stop: threading.Event,
    *,
    scenario: ScenarioRunner | None = None,
    tick_delay: float = 0.0,
) -> None:
    """Paced controller loop until stop is set. `tick_delay` emulates a slow
    robot backend by sleeping inside each tick."""
    pacer = TickPacer(rate_hz)
    start = time.perf_counter()
    while not stop.is_set():
        if tick_delay > 0.0:
            time.sleep(tick_delay)
        controller_tick(
            world, endpoint, scenario=scenario, now=time.perf_counter() - start
        )
        pacer.wait()


def run_client_loop(
    session: OperatorSession,
    endpoint: UdpEndpoint,
    rate_hz: float,
    stop: threading.Event,
    *,
    input_source: Callable[[], OperatorInput | None],
    on_tick: Callable[[], None] | None = None,
) -> None:
    """Paced client loop until stop is set.

    `input_source` returns fresh input or None; None reuses the previous
    input with the pause edge cleared. `on_tick` runs after each tick (the
    gateway publishes its frame there).
    """
    pacer = TickPacer(rate_hz)
    current = OperatorInput(hand_pose=session.last_emitted_goal)
    while not stop.is_set():
        fresh = input_source()
        if fresh is not None:
            current = fresh
        client_tick(session, endpoint, current)
        current = reuse_input(current)
        if on_tick is not None:
            on_tick()
        pacer.wait()
