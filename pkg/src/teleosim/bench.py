"""Benchmarks: sustained loop frequency and object-count overload.

The frequency bench drives one serialized round trip per tick through the
real wire path: session tick, goal message out, controller apply and step,
scene message back. The tick completes when the responding scene message has
been received, so the measured rate covers the whole pipeline and drops when
the controller is slow (an artificial controller delay emulates a slow robot
backend). A pacer caps the rate at the requested client rate.

The overload bench co-steps both loops on a virtual clock as fast as the CPU
allows, spawning blocks at a fixed virtual rate until a failure or the
ceiling; 20 seeded runs finish in minutes instead of the half hour real-time
pacing would need. Deadline misses therefore cannot occur here; the failure
taxonomy keeps the value for real-time runs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .codec import OversizeMessage, encoded_size
from .loops import TickPacer
from .messages import GoalCommandMessage, SceneUpdateMessage
from .session import OperatorInput, OperatorSession
from .simrobot import DEFAULT_HOME, SimWorld
from .transport import UdpEndpoint

FAILURE_NONE = "none"
FAILURE_OVERSIZE = "oversize-message"
FAILURE_DECODE = "decode-error"
FAILURE_DEADLINE = "deadline-miss"


class InsufficientSamples(RuntimeError):
    """Fewer than the minimum tick samples for a meaningful report."""


class IoFailure(OSError):
    """Report emission failed."""


@dataclass(frozen=True)
class FrequencyReport:
    samples: int
    avg_hz: float
    low1_hz: float
    duration_s: float
    object_count: int
    client_rate_hz: float
    controller_rate_hz: float
    controller_delay_s: float = 0.0


@dataclass(frozen=True)
class OverloadRun:
    seed: int
    max_objects: int
    failure_mode: str
    size_mismatches: int
    virtual_duration_s: float


@dataclass(frozen=True)
class OverloadReport:
    spawn_rate_per_s: float
    ceiling: int
    runs: tuple[OverloadRun, ...] = field(default=())

    @property
    def min_objects(self) -> int:
        return min(run.max_objects for run in self.runs)

    @property
    def mean_objects(self) -> float:
        return float(np.mean([run.max_objects for run in self.runs]))

    @property
    def failure_mode(self) -> str:
        for run in self.runs:
            if run.failure_mode != FAILURE_NONE:
                return run.failure_mode
        return FAILURE_NONE

    @property
    def size_mismatches(self) -> int:
        return sum(run.size_mismatches for run in self.runs)


MIN_SAMPLES = 100


def _pair() -> tuple[UdpEndpoint, UdpEndpoint]:
    a = UdpEndpoint()
    b = UdpEndpoint()
    a.set_peer(b.local_address)
    b.set_peer(a.local_address)
    return a, b


def run_frequency_bench(
    *,
    object_count: int = 4,
    duration_s: float = 30.0,
    client_rate_hz: float = 72.0,
    controller_rate_hz: float = 120.0,
    controller_delay_s: float = 0.0,
    seed: int = 0,
) -> FrequencyReport:
    ctrl_ep, client_ep = _pair()
    world = SimWorld(seed=seed)
    for _ in range(object_count):
        world.spawn_block()
    session = OperatorSession(rate_hz=client_rate_hz)
    operator_input = OperatorInput(hand_pose=DEFAULT_HOME)

    completions: list[float] = []
    pacer = TickPacer(client_rate_hz)
    incoming: SceneUpdateMessage | None = None
    start = time.perf_counter()
    deadline = start + duration_s
    try:
        while time.perf_counter() < deadline:
            goal = session.tick(operator_input, incoming)
            client_ep.send(goal)
            received = ctrl_ep.receive_latest(timeout=1.0)
            if isinstance(received, GoalCommandMessage):
                world.apply_goal_command(received)
            if controller_delay_s > 0.0:
                time.sleep(controller_delay_s)
            ctrl_ep.send(world.step())
            scene = client_ep.receive_latest(timeout=1.0)
            incoming = scene if isinstance(scene, SceneUpdateMessage) else None
            completions.append(time.perf_counter())
            pacer.wait()
    finally:
        ctrl_ep.close()
        client_ep.close()

    if len(completions) < MIN_SAMPLES + 1:
        raise InsufficientSamples(
            f"{len(completions)} ticks; need more than {MIN_SAMPLES}"
        )
    deltas = np.diff(np.asarray(completions))
    freqs = 1.0 / deltas[deltas > 0.0]
    return FrequencyReport(
        samples=int(freqs.size),
        avg_hz=float(freqs.mean()),
        low1_hz=float(np.percentile(freqs, 1.0)),
        duration_s=float(completions[-1] - start),
        object_count=object_count,
        client_rate_hz=client_rate_hz,
        controller_rate_hz=controller_rate_hz,
        controller_delay_s=controller_delay_s,
    )


def _overload_single(
    seed: int,
    *,
    spawn_rate_per_s: float,
    ceiling: int,
    controller_rate_hz: float,
    client_rate_hz: float,
) -> OverloadRun:
    dt_ctrl = 1.0 / controller_rate_hz
    dt_client = 1.0 / client_rate_hz
    spawn_interval = 1.0 / spawn_rate_per_s
    ctrl_ep, client_ep = _pair()
    world = SimWorld(seed=seed)
    session = OperatorSession(rate_hz=client_rate_hz)
    operator_input = OperatorInput(hand_pose=DEFAULT_HOME)

    t_ctrl = 0.0
    t_client = 0.0
    next_spawn = spawn_interval
    max_objects = 0
    mismatches = 0
    failure = FAILURE_NONE
    budget = (ceiling / spawn_rate_per_s + 60.0) * 2.0  # runaway guard

    try:
        while True:
            if t_ctrl > budget or t_client > budget:
                raise RuntimeError("overload run failed to terminate")
            if t_ctrl <= t_client:
                incoming = ctrl_ep.receive_latest()
                if isinstance(incoming, GoalCommandMessage):
                    world.apply_goal_command(incoming)
                while next_spawn <= t_ctrl:
                    world.spawn_block()
                    next_spawn += spawn_interval
                msg = world.step()
                predicted = encoded_size(msg)
                try:
                    ctrl_ep.send(msg)
                except OversizeMessage:
                    failure = FAILURE_OVERSIZE
                    break
                if ctrl_ep.stats().last_sent_bytes != predicted:
                    mismatches += 1
                max_objects = max(max_objects, world.object_count())
                if world.object_count() >= ceiling:
                    break
                t_ctrl += dt_ctrl
            else:
                before = client_ep.stats().decode_errors
                scene = client_ep.receive_latest()
                if client_ep.stats().decode_errors > before:
                    failure = FAILURE_DECODE
                    break
                incoming = scene if isinstance(scene, SceneUpdateMessage) else None
                out = session.tick(operator_input, incoming)
                client_ep.send(out)
                t_client += dt_client
    finally:
        ctrl_ep.close()
        client_ep.close()

    return OverloadRun(
        seed=seed,
        max_objects=max_objects,
        failure_mode=failure,
        size_mismatches=mismatches,
        virtual_duration_s=max(t_ctrl, t_client),
    )


def run_overload_bench(
    *,
    spawn_rate_per_s: float = 4.0,
    ceiling: int = 300,
    runs: int = 20,
    seed: int = 7,
    controller_rate_hz: float = 120.0,
    client_rate_hz: float = 72.0,
) -> OverloadReport:
    results = tuple(
        _overload_single(
            seed + i,
            spawn_rate_per_s=spawn_rate_per_s,
            ceiling=ceiling,
            controller_rate_hz=controller_rate_hz,
            client_rate_hz=client_rate_hz,
        )
        for i in range(runs)
    )
    return OverloadReport(
        spawn_rate_per_s=spawn_rate_per_s, ceiling=ceiling, runs=results
    )


def format_report(report: FrequencyReport | OverloadReport) -> str:
    lines: list[str] = []
    if isinstance(report, FrequencyReport):
        lines.append("report frequency")
        lines.append(f"samples {report.samples}")
        lines.append(f"avg_hz {report.avg_hz:.3f}")
        lines.append(f"low1_hz {report.low1_hz:.3f}")
        lines.append(f"duration_s {report.duration_s:.3f}")
        lines.append(f"object_count {report.object_count}")
        lines.append(f"client_rate_hz {report.client_rate_hz:g}")
        lines.append(f"controller_rate_hz {report.controller_rate_hz:g}")
        lines.append(f"controller_delay_s {report.controller_delay_s:g}")
    else:
        lines.append("report overload")
        lines.append(f"runs {len(report.runs)}")
        lines.append(f"spawn_rate_per_s {report.spawn_rate_per_s:g}")
        lines.append(f"ceiling {report.ceiling}")
        lines.append(f"min_objects {report.min_objects}")
        lines.append(f"mean_objects {report.mean_objects:.1f}")
        lines.append(f"failure_mode {report.failure_mode}")
        lines.append(f"size_mismatches {report.size_mismatches}")
        for i, run in enumerate(report.runs):
            lines.append(
                f"run {i} seed {run.seed} max_objects {run.max_objects} "
                f"failure {run.failure_mode} size_mismatches {run.size_mismatches}"
            )
    return "\n".join(lines) + "\n"


def emit_report(report: FrequencyReport | OverloadReport, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(format_report(report))
    except OSError as exc:
        raise IoFailure(f"cannot write report to {path}: {exc}") from exc


def check_thresholds(
    report: FrequencyReport | OverloadReport, thresholds: dict
) -> list[str]:
    """Human-readable violations; empty means every gate passed."""
    violations = []
    if isinstance(report, FrequencyReport):
        min_avg = thresholds.get("min_avg_hz")
        if min_avg is not None and report.avg_hz < min_avg:
            violations.append(f"avg_hz {report.avg_hz:.3f} below {min_avg}")
        min_low1 = thresholds.get("min_low1_hz")
        if min_low1 is not None and report.low1_hz < min_low1:
            violations.append(f"low1_hz {report.low1_hz:.3f} below {min_low1}")
    else:
        min_objects = thresholds.get("min_objects")
        if min_objects is not None and report.min_objects < min_objects:
            violations.append(
                f"min_objects {report.min_objects} below {min_objects}"
            )
        if thresholds.get("require_no_failure") and report.failure_mode != FAILURE_NONE:
            violations.append(f"failure_mode {report.failure_mode}")
    return violations
