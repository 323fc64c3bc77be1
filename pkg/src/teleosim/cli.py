"""Command-line entry points.

    teleosim controller --listen 127.0.0.1:9000 --peer 127.0.0.1:9001
    teleosim client     --listen 127.0.0.1:9001 --peer 127.0.0.1:9000
    teleosim demo       --console-port 8765
    teleosim bench freq --objects 4 --duration 30 --report freq.txt
    teleosim bench overload --runs 20 --ceiling 300 --report overload.txt
"""

from __future__ import annotations

import argparse
import sys
import threading

from . import bench as bench_mod
from .config import WorkspaceConfig, load_workspace_config
from .gateway import ConsoleGateway, GatewayServer
from .loops import run_client_loop, run_controller_loop
from .session import OperatorInput, OperatorSession
from .simrobot import DEFAULT_HOME, SimWorld
from .traces import ScenarioRunner, load_input_trace, load_scenario
from .transport import UdpEndpoint


def _addr(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected host:port, got {text!r}")
    return host, int(port)


def _load_config(path: str | None) -> WorkspaceConfig:
    if path is None:
        return WorkspaceConfig()
    return load_workspace_config(path)


def _cmd_controller(args) -> int:
    cfg = _load_config(args.config)
    world = SimWorld(bounds=cfg.bounds, spawn=cfg.spawn, seed=args.seed)
    scenario = None
    if args.scenario:
        scenario = ScenarioRunner(load_scenario(args.scenario))
    endpoint = UdpEndpoint(listen=args.listen, peer=args.peer)
    stop = threading.Event()
    print(f"controller on {endpoint.local_address}, peer {args.peer}", flush=True)
    try:
        run_controller_loop(world, endpoint, args.rate, stop, scenario=scenario)
    except KeyboardInterrupt:
        pass
    finally:
        endpoint.close()
    return 0


def _trace_input_source(steps):
    iterator = iter(steps)

    def source():
        step = next(iterator, None)
        return None if step is None else step.operator_input

    return source


def _cmd_client(args) -> int:
    cfg = _load_config(args.config)
    session = OperatorSession(
        polytope=cfg.polytope, walls=cfg.walls, rate_hz=args.rate
    )
    endpoint = UdpEndpoint(listen=args.listen, peer=args.peer)
    stop = threading.Event()

    gateway = None
    server = None
    on_tick = None
    if args.input:
        steps = load_input_trace(args.input)
        source = _trace_input_source(steps)
    else:
        gateway = ConsoleGateway(initial_hand_pose=session.last_emitted_goal)
        server = GatewayServer(
            gateway,
            host=args.console_host,
            port=args.console_port,
            static_dir=args.console_dir,
        )
        server.start()
        print(f"operator console: {server.url}", flush=True)
        source = gateway.poll_command

        def on_tick():
            try:
                gateway.publish_frame(session.snapshot())
            except Exception:
                pass  # gateway closed during shutdown

    print(f"client on {endpoint.local_address}, peer {args.peer}", flush=True)
    try:
        run_client_loop(
            session, endpoint, args.rate, stop, input_source=source, on_tick=on_tick
        )
    except KeyboardInterrupt:
        pass
    finally:
        if server is not None:
            server.stop()
        endpoint.close()
    return 0


def _cmd_demo(args) -> int:
    """Controller, client, and console gateway in one process."""
    cfg = _load_config(args.config)
    world = SimWorld(bounds=cfg.bounds, spawn=cfg.spawn, seed=args.seed)
    for _ in range(args.objects):
        world.spawn_block()
    scenario = None
    if args.scenario:
        scenario = ScenarioRunner(load_scenario(args.scenario))
    session = OperatorSession(polytope=cfg.polytope, walls=cfg.walls)

    ctrl_ep = UdpEndpoint()
    client_ep = UdpEndpoint()
    ctrl_ep.set_peer(client_ep.local_address)
    client_ep.set_peer(ctrl_ep.local_address)

    gateway = ConsoleGateway(initial_hand_pose=session.last_emitted_goal)
    server = GatewayServer(
        gateway,
        host=args.console_host,
        port=args.console_port,
        static_dir=args.console_dir,
    )
    server.start()
    print(f"operator console: {server.url}", flush=True)

    stop = threading.Event()
    controller = threading.Thread(
        target=run_controller_loop,
        args=(world, ctrl_ep, args.controller_rate, stop),
        kwargs={"scenario": scenario},
        daemon=True,
    )
    controller.start()

    def on_tick():
        try:
            gateway.publish_frame(session.snapshot())
        except Exception:
            pass

    try:
        run_client_loop(
            session,
            client_ep,
            args.client_rate,
            stop,
            input_source=gateway.poll_command,
            on_tick=on_tick,
        )
    except KeyboardInterrupt:
        pass
    finally:
        stop.set()
        controller.join(timeout=2.0)
        server.stop()
        ctrl_ep.close()
        client_ep.close()
    return 0


def _cmd_bench_freq(args) -> int:
    report = bench_mod.run_frequency_bench(
        object_count=args.objects,
        duration_s=args.duration,
        client_rate_hz=args.client_rate,
        controller_rate_hz=args.controller_rate,
        controller_delay_s=args.controller_delay,
        seed=args.seed,
    )
    text = bench_mod.format_report(report)
    sys.stdout.write(text)
    if args.report:
        bench_mod.emit_report(report, args.report)
    thresholds = {}
    if args.min_avg_hz is not None:
        thresholds["min_avg_hz"] = args.min_avg_hz
    if args.min_low1_hz is not None:
        thresholds["min_low1_hz"] = args.min_low1_hz
    violations = bench_mod.check_thresholds(report, thresholds)
    for violation in violations:
        print(f"THRESHOLD VIOLATION: {violation}", file=sys.stderr)
    return 1 if violations else 0


def _cmd_bench_overload(args) -> int:
    report = bench_mod.run_overload_bench(
        spawn_rate_per_s=args.spawn_rate,
        ceiling=args.ceiling,
        runs=args.runs,
        seed=args.seed,
        controller_rate_hz=args.controller_rate,
        client_rate_hz=args.client_rate,
    )
    text = bench_mod.format_report(report)
    sys.stdout.write(text)
    if args.report:
        bench_mod.emit_report(report, args.report)
    thresholds = {}
    if args.min_objects is not None:
        thresholds["min_objects"] = args.min_objects
        thresholds["require_no_failure"] = True
    violations = bench_mod.check_thresholds(report, thresholds)
    for violation in violations:
        print(f"THRESHOLD VIOLATION: {violation}", file=sys.stderr)
    return 1 if violations else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teleosim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ctrl = sub.add_parser("controller", help="run the simulated robot")
    ctrl.add_argument("--listen", type=_addr, default=("127.0.0.1", 9000))
    ctrl.add_argument("--peer", type=_addr, default=("127.0.0.1", 9001))
    ctrl.add_argument("--rate", type=float, default=120.0, help="tick rate, Hz")
    ctrl.add_argument("--seed", type=int, default=0)
    ctrl.add_argument("--config", help="workspace YAML")
    ctrl.add_argument("--scenario", help="scenario script (wait/spawn/delete)")
    ctrl.set_defaults(func=_cmd_controller)

    client = sub.add_parser("client", help="run the operator client")
    client.add_argument("--listen", type=_addr, default=("127.0.0.1", 9001))
    client.add_argument("--peer", type=_addr, default=("127.0.0.1", 9000))
    client.add_argument("--rate", type=float, default=72.0, help="tick rate, Hz")
    client.add_argument("--config", help="workspace YAML")
    client.add_argument("--input", help="scripted input trace instead of the console")
    client.add_argument("--console-host", default="127.0.0.1")
    client.add_argument("--console-port", type=int, default=8765)
    client.add_argument("--console-dir", help="static console bundle directory")
    client.set_defaults(func=_cmd_client)

    demo = sub.add_parser("demo", help="controller + client + console, one process")
    demo.add_argument("--objects", type=int, default=4, help="blocks at start")
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--config", help="workspace YAML")
    demo.add_argument("--scenario", help="scenario script (wait/spawn/delete)")
    demo.add_argument("--controller-rate", type=float, default=120.0)
    demo.add_argument("--client-rate", type=float, default=72.0)
    demo.add_argument("--console-host", default="127.0.0.1")
    demo.add_argument("--console-port", type=int, default=8765)
    demo.add_argument("--console-dir", help="static console bundle directory")
    demo.set_defaults(func=_cmd_demo)

    bench = sub.add_parser("bench", help="performance measurements")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)

    freq = bench_sub.add_parser("freq", help="sustained loop frequency")
    freq.add_argument("--objects", type=int, default=4)
    freq.add_argument("--duration", type=float, default=30.0, help="seconds")
    freq.add_argument("--client-rate", type=float, default=72.0)
    freq.add_argument("--controller-rate", type=float, default=120.0)
    freq.add_argument(
        "--controller-delay",
        type=float,
        default=0.0,
        help="artificial per-tick controller delay, seconds",
    )
    freq.add_argument("--seed", type=int, default=0)
    freq.add_argument("--report", help="write the report here")
    freq.add_argument("--min-avg-hz", type=float)
    freq.add_argument("--min-low1-hz", type=float)
    freq.set_defaults(func=_cmd_bench_freq)

    overload = bench_sub.add_parser("overload", help="spawn until failure or ceiling")
    overload.add_argument("--spawn-rate", type=float, default=4.0, help="blocks/s")
    overload.add_argument("--ceiling", type=int, default=300)
    overload.add_argument("--runs", type=int, default=20)
    overload.add_argument("--seed", type=int, default=7)
    overload.add_argument("--client-rate", type=float, default=72.0)
    overload.add_argument("--controller-rate", type=float, default=120.0)
    overload.add_argument("--report", help="write the report here")
    overload.add_argument("--min-objects", type=int)
    overload.set_defaults(func=_cmd_bench_overload)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
