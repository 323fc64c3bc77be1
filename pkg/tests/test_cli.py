"""Command-line interface: parsing, bench subcommands, exit codes."""

import pytest

from teleosim.cli import _addr, build_parser, main


def test_addr_parses_host_port():
    assert _addr("127.0.0.1:9000") == ("127.0.0.1", 9000)
    assert _addr("[::1]:9000") == ("[::1]", 9000)


@pytest.mark.parametrize("text", ["localhost", "9000", "host:", ":", "h:port"])
def test_addr_rejects_malformed(text):
    import argparse

    with pytest.raises(argparse.ArgumentTypeError):
        _addr(text)


def test_controller_defaults():
    args = build_parser().parse_args(["controller"])
    assert args.listen == ("127.0.0.1", 9000)
    assert args.peer == ("127.0.0.1", 9001)
    assert args.rate == 120.0
    assert args.seed == 0
    assert args.config is None and args.scenario is None


def test_client_defaults():
    args = build_parser().parse_args(["client"])
    assert args.listen == ("127.0.0.1", 9001)
    assert args.peer == ("127.0.0.1", 9000)
    assert args.rate == 72.0
    assert args.console_port == 8765
    assert args.input is None


def test_demo_defaults():
    args = build_parser().parse_args(["demo"])
    assert args.objects == 4
    assert args.controller_rate == 120.0
    assert args.client_rate == 72.0


def test_bench_freq_flags():
    args = build_parser().parse_args(
        [
            "bench",
            "freq",
            "--objects",
            "2",
            "--duration",
            "5",
            "--min-avg-hz",
            "60",
        ]
    )
    assert args.objects == 2
    assert args.duration == 5.0
    assert args.min_avg_hz == 60.0
    assert args.min_low1_hz is None


def test_bench_overload_defaults():
    args = build_parser().parse_args(["bench", "overload"])
    assert args.spawn_rate == 4.0
    assert args.ceiling == 300
    assert args.runs == 20
    assert args.seed == 7


def test_missing_subcommand_exits():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_bench_freq_runs_and_writes_report(tmp_path, capsys):
    path = tmp_path / "freq.txt"
    code = main(
        [
            "bench",
            "freq",
            "--objects",
            "0",
            "--duration",
            "1.5",
            "--client-rate",
            "100",
            "--report",
            str(path),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("report frequency")
    assert path.read_text(encoding="utf-8") == out


def test_bench_freq_threshold_violation_exits_nonzero(capsys):
    code = main(
        [
            "bench",
            "freq",
            "--objects",
            "0",
            "--duration",
            "1.5",
            "--client-rate",
            "100",
            "--min-avg-hz",
            "1000",
        ]
    )
    assert code == 1
    err = capsys.readouterr().err
    assert "THRESHOLD VIOLATION" in err and "avg_hz" in err


def test_bench_overload_runs_and_gates(tmp_path, capsys):
    path = tmp_path / "overload.txt"
    code = main(
        [
            "bench",
            "overload",
            "--spawn-rate",
            "40",
            "--ceiling",
            "30",
            "--runs",
            "1",
            "--min-objects",
            "30",
            "--report",
            str(path),
        ]
    )
    assert code == 0
    assert path.read_text(encoding="utf-8").startswith("report overload")
    code = main(
        [
            "bench",
            "overload",
            "--spawn-rate",
            "40",
            "--ceiling",
            "30",
            "--runs",
            "1",
            "--min-objects",
            "5000",
        ]
    )
    assert code == 1
    assert "min_objects" in capsys.readouterr().err
