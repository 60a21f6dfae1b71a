"""Command-line front end.

Subcommands: analyze, calibrate, power, suite, sweep, generate. Exit codes:
0 success, 1 suite/sweep assertion failure, 2 input or model error,
3 calibration failure. Config precedence is defaults < --config file <
individual flags, and every run echoes the effective values.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .calibration import calibrate_trace
from .config import AnalysisConfig, load_config
from .errors import CalibrationError, ForkmonError, InputError
from .logio import emit_report, parse_log, write_log
from .pipeline import analyze_log, header_lines
from .power import PowerProfile, autonomy_years, solve_active_time
from .suite import build_scenarios, run_scenario_suite, sensitivity_sweep
from .synth import generate

_THRESHOLD_FLAGS = (
    "trigger_threshold",
    "release_threshold",
    "merge_gap",
    "min_segment",
    "short_max",
    "long_min",
    "ratio_long",
    "vibration_severe",
    "harsh_braking_threshold",
    "crossing_rate_braking_max",
    "sample_rate",
    "gravity",
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="key = value config file")
    parser.add_argument("--front-node", dest="front_node", help="node id of the front sensor")
    parser.add_argument("--back-node", dest="back_node", help="node id of the back sensor")
    parser.add_argument(
        "--braking-axis", choices=("x", "y"), help="axis for the braking sign test"
    )
    for key in _THRESHOLD_FLAGS:
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float)


def _effective_config(args: argparse.Namespace) -> AnalysisConfig:
    cfg = load_config(args.config)
    overrides: dict[str, str] = {}
    for key in _THRESHOLD_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = repr(value)
    if getattr(args, "front_node", None):
        overrides["front_node_id"] = args.front_node
    if getattr(args, "back_node", None):
        overrides["back_node_id"] = args.back_node
    if getattr(args, "braking_axis", None):
        overrides["braking_axis"] = args.braking_axis
    return cfg.with_overrides(overrides) if overrides else cfg


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _effective_config(args)
    result = analyze_log(args.log, cfg)
    emit_report(
        sys.stdout,
        list(result.events),
        fmt=args.format,
        header_lines=header_lines(result),
    )
    if args.plot_dir is not None:
        from .plots import plot_analysis

        args.plot_dir.mkdir(parents=True, exist_ok=True)
        out = plot_analysis(result, args.plot_dir / f"{Path(args.log).stem}_analysis.png")
        print(f"# figure: {out}", file=sys.stderr)
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    cfg = _effective_config(args)
    for trace in parse_log(args.log, sample_rate_hz=cfg.sample_rate):
        params = calibrate_trace(trace, gravity=cfg.gravity)
        print(
            f"{trace.node_id}: roll {math.degrees(params.roll_phi):.3f} deg, "
            f"pitch {math.degrees(params.pitch_theta):.3f} deg"
        )
    return 0


def cmd_power(args: argparse.Namespace) -> int:
    profile = PowerProfile(
        battery_wh=args.battery_wh,
        triggers_per_day=args.triggers,
        active_s_per_trigger=args.active_s,
    )
    if args.solve_years is not None:
        active = solve_active_time(args.solve_years, args.triggers, profile)
        print(f"active time per trigger for {args.solve_years:g} years: {active:.6f} s")
        profile = PowerProfile(
            battery_wh=args.battery_wh,
            triggers_per_day=args.triggers,
            active_s_per_trigger=active,
        )
    else:
        print("triggers/day\tautonomy_years")
        for rate in sorted({args.triggers, 720.0, 5000.0}):
            years = autonomy_years(
                PowerProfile(
                    battery_wh=args.battery_wh,
                    triggers_per_day=rate,
                    active_s_per_trigger=args.active_s,
                )
            )
            print(f"{rate:g}\t{years:.1f}")
    if args.plot_dir is not None:
        from .plots import plot_autonomy

        args.plot_dir.mkdir(parents=True, exist_ok=True)
        out = plot_autonomy(profile, args.plot_dir / "autonomy.png")
        print(f"# figure: {out}", file=sys.stderr)
    return 0


def cmd_suite(args: argparse.Namespace) -> int:
    cfg = _effective_config(args)
    report = run_scenario_suite(
        cfg,
        seed=args.seed,
        noise_sigma=args.noise_sigma,
        roll_deg=args.roll_deg,
        pitch_deg=args.pitch_deg,
        yaw_deg=args.yaw_deg,
        benign_duration_s=args.benign_s,
    )
    lines = report.machine_lines() if args.format == "machine" else report.lines()
    for line in lines:
        print(line)
    if args.plot_dir is not None:
        from .plots import plot_suite

        args.plot_dir.mkdir(parents=True, exist_ok=True)
        out = plot_suite(report, args.plot_dir / "suite.png")
        print(f"# figure: {out}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _effective_config(args)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise InputError("--values must list at least one number")
    result = sensitivity_sweep(args.parameter, values, cfg, seed=args.seed)
    for line in result.lines():
        print(line)
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _effective_config(args)
    scenarios = {s.name: s for s in build_scenarios(args.seed)}
    if args.scenario not in scenarios:
        raise InputError(
            f"unknown scenario {args.scenario!r}; choose from {sorted(scenarios)}"
        )
    scenario = scenarios[args.scenario]
    front, back, _truth = generate(
        list(scenario.specs),
        cfg,
        seed=args.seed,
        total_duration=scenario.total_duration,
        roll_deg=args.roll_deg,
        pitch_deg=args.pitch_deg,
        yaw_deg=args.yaw_deg,
    )
    write_log(args.out, [front, back])
    print(f"wrote {args.out} ({scenario.name}, {len(front)} samples/node)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forkmon",
        description="Impact detection and classification for dual-node forklift accelerometer logs",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="detect and classify events in a log")
    p.add_argument("log", type=Path)
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("--plot-dir", type=Path, default=None, help="write figures here")
    _add_config_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("calibrate", help="estimate mounting roll/pitch from a log")
    p.add_argument("log", type=Path)
    _add_config_flags(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("power", help="battery autonomy model")
    p.add_argument("--triggers", type=float, default=720.0, help="wakeups per day")
    p.add_argument("--active-s", dest="active_s", type=float, default=0.5)
    p.add_argument("--battery-wh", dest="battery_wh", type=float, default=15.0)
    p.add_argument(
        "--solve-years",
        dest="solve_years",
        type=float,
        default=None,
        help="solve for the active time that reaches this autonomy",
    )
    p.add_argument("--plot-dir", type=Path, default=None)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("suite", help="run the synthetic validation suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float, default=0.05)
    p.add_argument("--roll-deg", dest="roll_deg", type=float, default=0.0)
    p.add_argument("--pitch-deg", dest="pitch_deg", type=float, default=0.0)
    p.add_argument("--yaw-deg", dest="yaw_deg", type=float, default=0.0)
    p.add_argument("--benign-s", dest="benign_s", type=float, default=3600.0)
    p.add_argument("--plot-dir", type=Path, default=None)
    _add_config_flags(p)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("sweep", help="sensitivity sweep over a threshold or yaw")
    p.add_argument("parameter", help="config key, or 'yaw' for mounting misalignment")
    p.add_argument("values", help="comma-separated values to sweep")
    p.add_argument("--seed", type=int, default=0)
    _add_config_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("generate", help="write a synthetic scenario as a log file")
    p.add_argument("scenario", help="scenario name (see suite)")
    p.add_argument("out", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--roll-deg", dest="roll_deg", type=float, default=0.0)
    p.add_argument("--pitch-deg", dest="pitch_deg", type=float, default=0.0)
    p.add_argument("--yaw-deg", dest="yaw_deg", type=float, default=0.0)
    _add_config_flags(p)
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CalibrationError as exc:
        print(f"calibration error: {exc}", file=sys.stderr)
        return 3
    except (ForkmonError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
