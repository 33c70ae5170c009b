"""Command-line front end: plan | sweep | simulate | validate.

Exit codes: 0 success, 1 configuration or usage error, 2 infeasible
plan or failed validation, 3 insufficient Monte Carlo samples.

Every file output is accompanied by a JSON manifest (path +
".manifest.json") holding the fully resolved configuration, the
command, its flags and the tool version; the resolved_config block is
itself valid config-file text, so any run can be replayed bit-exactly
(timestamps aside) by saving that block and repeating the command.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, planner
from .config import ConfigError, ResolvedConfig, resolve, resolved_text
from .sim import InsufficientSamplesError, ThroughputStudy, simulate
from .units import db_to_linear


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to the config-error exit code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def parse_scalar(text: str) -> float:
    """Parse a number, converting a trailing 'dB' to the linear scale."""
    stripped = text.strip()
    if stripped.lower().endswith("db"):
        return db_to_linear(float(stripped[:-2]))
    return float(stripped)


def _write_manifest(path: str, command: str, flags: dict, resolved: ResolvedConfig) -> None:
    manifest = {
        "tool": "absfplan",
        "version": __version__,
        "command": command,
        "flags": {k: v for k, v in flags.items() if k not in ("func",)},
        "seed": resolved.sim.seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "resolved_config": resolved_text(resolved),
    }
    with open(path + ".manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, default=str)
        handle.write("\n")


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


# ---------------------------------------------------------------------------
# plan


def _format_plan(result: planner.PlanResult) -> str:
    p = result.params
    lines = [
        f"scenario          {p.kind.value}",
        f"n_absf            {result.n_absf}",
        f"feasible          {'yes' if result.feasible else 'no'}",
        f"success_nsf       {result.success_nsf:.6f}",
        f"success_absf      {result.success_absf:.6f}",
        f"omega_nsf         {result.share_nsf:.6f}",
        f"omega_absf        {result.share_absf:.6f}",
        f"c_nsf_bps         {result.c_nsf:.3f}",
        f"c_absf_bps        {result.c_absf:.3f}",
        f"c_mixed_bps       {result.c_mixed:.3f}",
        f"c_v_min_bps       {p.c_v_min:.3f}",
    ]
    return "\n".join(lines) + "\n"


def cmd_plan(args: argparse.Namespace) -> int:
    resolved = resolve(args.config)
    result = planner.required_absf(resolved.params)
    text = _format_plan(result)
    _emit(text, args.output)
    if args.output is not None:
        sys.stdout.write(text)
        _write_manifest(args.output, "plan", _flags(args), resolved)
    return 0 if result.feasible else 2


# ---------------------------------------------------------------------------
# sweep


def _sweep_grid(args: argparse.Namespace) -> np.ndarray:
    lo = parse_scalar(getattr(args, "from"))
    hi = parse_scalar(args.to)
    if args.steps < 1:
        raise ConfigError("--steps must be at least 1")
    if args.steps == 1:
        return np.array([lo])
    if args.log:
        if lo <= 0 or hi <= 0:
            raise ConfigError("--log spacing requires positive endpoints")
        return np.geomspace(lo, hi, args.steps)
    return np.linspace(lo, hi, args.steps)


def _sweep_csv(curve: planner.SweepCurve) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["param_value", "n_absf", "c_nsf_bps", "c_absf_bps"])
    for value, n_absf, c_nsf, c_absf in curve.rows():
        writer.writerow([repr(float(value)), n_absf, repr(float(c_nsf)), repr(float(c_absf))])
    return buffer.getvalue()


def cmd_sweep(args: argparse.Namespace) -> int:
    resolved = resolve(args.config)
    grid = _sweep_grid(args)
    curve = planner.sweep(resolved.params, args.param, grid)
    _emit(_sweep_csv(curve), args.output)
    if args.output is not None:
        _write_manifest(args.output, "sweep", _flags(args), resolved)
    if args.figure is not None:
        from . import plots

        plots.save_sweep_figure(curve, args.figure)
    return 0


# ---------------------------------------------------------------------------
# simulate


def _simulate_csv(study: ThroughputStudy) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["snapshot", "ue_id", "tier", "is_victim", "serving_distance_m", "throughput_bps"]
    )
    for record in study.records():
        writer.writerow(
            [
                record.snapshot,
                record.ue_id,
                record.tier,
                "true" if record.is_victim else "false",
                f"{record.serving_distance:.6f}",
                f"{record.throughput:.6f}",
            ]
        )
    return buffer.getvalue()


def _simulate_summary(study: ThroughputStudy) -> str:
    lines = []
    masks = {name: study.class_mask(name) for name in ("all", "victim", "nonvictim")}
    counts = ", ".join(f"{name}={int(mask.sum())}" for name, mask in masks.items())
    lines.append(f"class counts: {counts}")
    for name, mask in masks.items():
        if mask.any():
            p5, p50, p95 = study.percentiles(name)
            lines.append(
                f"throughput_bps {name}: p5={p5:.1f} p50={p50:.1f} p95={p95:.1f}"
            )
        else:
            lines.append(f"throughput_bps {name}: no samples")
    if masks["victim"].any():
        lines.append(
            "victim_mean_outage_throughput_bps: "
            f"{float(study.outage_throughput[masks['victim']].mean()):.1f}"
        )
    for kind, estimate in study.victim_slot_success.items():
        lines.append(
            f"victim slot success {kind.value}: {estimate.probability:.4f} "
            f"[{estimate.ci_low:.4f}, {estimate.ci_high:.4f}] (slots={estimate.samples})"
        )
    return "\n".join(lines) + "\n"


def cmd_simulate(args: argparse.Namespace) -> int:
    resolved = resolve(
        args.config,
        snapshots=args.snapshots,
        frames=args.frames,
        scheduler=args.scheduler,
        absf_count=args.absf,
        seed=args.seed,
    )
    study = simulate(resolved.sim)
    _emit(_simulate_csv(study), args.output)
    summary = _simulate_summary(study)
    if args.output is not None:
        sys.stdout.write(summary)
        _write_manifest(args.output, "simulate", _flags(args), resolved)
    else:
        sys.stderr.write(summary)
    if args.figure is not None:
        from . import plots

        plots.save_cdf_figure(study, args.figure)
    return 0


# ---------------------------------------------------------------------------
# validate


def cmd_validate(args: argparse.Namespace) -> int:
    from .validate import format_report, run_validation

    resolved = resolve(args.config, snapshots=args.snapshots, seed=args.seed)
    report = run_validation(resolved.sim)
    text = format_report(report) + "\n"
    _emit(text, args.output)
    if args.output is not None:
        sys.stdout.write(text)
        _write_manifest(args.output, "validate", _flags(args), resolved)
    if args.figure is not None:
        from . import plots

        plots.save_validation_figure(report, args.figure)
    return 0 if report.passed else 2


# ---------------------------------------------------------------------------
# wiring


def _flags(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="absfplan",
        description="Dimension almost-blank-subframe counts for two-tier HetNets.",
    )
    parser.add_argument("--version", action="version", version=f"absfplan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="compute the required ABSF count for one config")
    plan.add_argument("config")
    plan.add_argument("--output", help="write the summary to a file (with manifest)")
    plan.set_defaults(func=cmd_plan)

    sweep = sub.add_parser("sweep", help="required ABSFs over a parameter grid (CSV)")
    sweep.add_argument("config")
    sweep.add_argument("--param", required=True, choices=planner.SWEEP_PARAMETERS)
    sweep.add_argument("--from", required=True, help="grid start (suffix dB allowed)")
    sweep.add_argument("--to", required=True, help="grid end (suffix dB allowed)")
    sweep.add_argument("--steps", type=int, default=10)
    spacing = sweep.add_mutually_exclusive_group()
    spacing.add_argument("--log", action="store_true", help="geometric grid spacing")
    spacing.add_argument("--linear", dest="log", action="store_false")
    sweep.set_defaults(log=False)
    sweep.add_argument("--output", help="CSV path (default stdout)")
    sweep.add_argument("--figure", help="also render the curve to this image file")
    sweep.set_defaults(func=cmd_sweep)

    simulate_p = sub.add_parser("simulate", help="snapshot Monte Carlo throughput study")
    simulate_p.add_argument("config")
    simulate_p.add_argument("--snapshots", type=int)
    simulate_p.add_argument("--frames", type=int)
    simulate_p.add_argument("--scheduler", choices=["rr", "pf"])
    simulate_p.add_argument("--absf", type=int, help="ABSFs per frame")
    simulate_p.add_argument("--seed", type=int)
    simulate_p.add_argument("--output", help="per-UE CSV path (default stdout)")
    simulate_p.add_argument("--figure", help="also render throughput CDFs to this file")
    simulate_p.set_defaults(func=cmd_simulate)

    validate_p = sub.add_parser("validate", help="compare analytics against simulation")
    validate_p.add_argument("config")
    validate_p.add_argument("--snapshots", type=int)
    validate_p.add_argument("--seed", type=int)
    validate_p.add_argument("--output", help="report path (default stdout)")
    validate_p.add_argument("--figure", help="also render the comparison bars")
    validate_p.set_defaults(func=cmd_validate)
    return parser


def _join_signed_values(argv: list[str]) -> list[str]:
    """Turn ["--from", "-40dB"] into ["--from=-40dB"].

    argparse reads a leading dash as an option marker, which would
    reject the documented negative-dB call form.
    """
    joined: list[str] = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if token in ("--from", "--to") and nxt and len(nxt) > 1 and nxt[0] == "-" and nxt[1].isdigit():
            joined.append(f"{token}={nxt}")
            skip = True
        else:
            joined.append(token)
    return joined


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_join_signed_values(argv))
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except InsufficientSamplesError as exc:
        print(
            f"insufficient samples: {exc} (increase snapshots or the region)",
            file=sys.stderr,
        )
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
