"""Command-line entry point: ``simulate``, ``discord``, ``detect`` and ``validate``.

Exit codes: 0 success, 1 runtime or check failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time

from . import __version__
from .channels import RelaxationParams
from .correlations import OptimizerSettings, quantum_discord
from .dynamics import TrajectoryError, detect_sudden_change, evolve_trajectory
from .io import (
    ConfigError,
    SimulationConfig,
    load_config,
    load_state,
    read_trajectory_csv,
    trajectory_from_columns,
    trajectory_svg,
    trajectory_to_csv,
    write_atomic,
)
from .selfcheck import run_checks
from .states import BellDiagonalCoeffs, DomainError, bell_diagonal_deviation

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_state_flags(p):
    p.add_argument("--cx", type=float)
    p.add_argument("--cy", type=float)
    p.add_argument("--cz", type=float)
    p.add_argument("--state", help="state JSON with 4x4 're'/'im' arrays")


def _add_optimizer_flags(p):
    p.add_argument("--grid-theta", type=int)
    p.add_argument("--grid-phi", type=int)
    p.add_argument("--refine-iters", type=int)
    p.add_argument("--tolerance", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nmrdiscord", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sim = sub.add_parser("simulate", help="correlation trajectory under relaxation")
    sim.add_argument("--config", help="config JSON (or a previous run manifest)")
    _add_state_flags(sim)
    for name in ("t1-a", "t1-b", "t2-a", "t2-b", "epsilon"):
        sim.add_argument(f"--{name}", type=float)
    sim.add_argument("--channels", choices=("pd", "gad", "both"))
    sim.add_argument("--j-coupling", type=float)
    sim.add_argument("--m-max", type=int)
    sim.add_argument("--times", type=float, nargs="+", help="explicit delays in seconds")
    sim.add_argument("--residual-amplitude", type=float)
    _add_optimizer_flags(sim)
    sim.add_argument("--csv")
    sim.add_argument("--manifest")
    sim.add_argument("--svg")

    dis = sub.add_parser("discord", help="correlations of a single state")
    _add_state_flags(dis)
    _add_optimizer_flags(dis)

    det = sub.add_parser("detect", help="sudden-change detection on a trajectory CSV")
    det.add_argument("csv")
    det.add_argument("--curve", choices=("classical", "quantum", "mutual_info"), default="classical")
    det.add_argument("--scale", choices=("auto", "linear", "log"), default="auto")

    val = sub.add_parser("validate", help="run built-in consistency checks")
    val.add_argument("--quick", action="store_true")
    val.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def _optimizer(args, base: OptimizerSettings) -> OptimizerSettings:
    over = {
        k: getattr(args, k)
        for k in ("grid_theta", "grid_phi", "refine_iters", "tolerance")
        if getattr(args, k) is not None
    }
    try:
        return dataclasses.replace(base, **over)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _coeff_flags(args):
    flags = (args.cx, args.cy, args.cz)
    if all(v is None for v in flags):
        return None
    if any(v is None for v in flags):
        raise ConfigError("--cx, --cy and --cz go together")
    return list(flags)


def resolve_config(args) -> SimulationConfig:
    cfg = load_config(args.config) if args.config else SimulationConfig()
    coeffs = _coeff_flags(args)
    if coeffs is not None:
        cfg.bell_diagonal, cfg.state_file = coeffs, None
    if args.state:
        cfg.state_file, cfg.bell_diagonal = args.state, None
    rel = {
        k: getattr(args, k)
        for k in ("t1_a", "t1_b", "t2_a", "t2_b", "epsilon")
        if getattr(args, k) is not None
    }
    if rel:
        try:
            cfg.relaxation = RelaxationParams(**{**dataclasses.asdict(cfg.relaxation), **rel})
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
    if args.channels:
        cfg.channels = args.channels
    if args.j_coupling is not None:
        cfg.j_coupling = args.j_coupling
    if args.m_max is not None:
        cfg.m_max, cfg.times = args.m_max, None
    if args.times:
        cfg.times, cfg.m_max = list(args.times), None
    if args.residual_amplitude is not None:
        cfg.residual_amplitude = args.residual_amplitude
    cfg.optimizer = _optimizer(args, cfg.optimizer)
    for k in ("csv", "manifest", "svg"):
        if getattr(args, k):
            setattr(cfg, k, getattr(args, k))
    return cfg.validate()


def cmd_simulate(args) -> int:
    cfg = resolve_config(args)
    delta0 = cfg.initial_deviation()
    start = time.perf_counter()
    try:
        traj = evolve_trajectory(
            delta0, cfg.relaxation, cfg.grid(), cfg.selection(), cfg.optimizer, cfg.j_coupling
        )
    except TrajectoryError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    elapsed = time.perf_counter() - start

    report = detect_sudden_change(traj, "classical") if len(traj) >= 8 else None
    manifest = {
        "tool_version": __version__,
        "config": cfg.to_dict(),
        "wall_clock_seconds": elapsed,
        "t_star": report.t_star if report else None,
        "sudden_change": report.to_dict() if report else None,
        "records": len(traj),
        "all_converged": all(r.converged for r in traj.records),
    }
    write_atomic(cfg.csv, trajectory_to_csv(traj))
    if cfg.svg:
        write_atomic(cfg.svg, trajectory_svg(traj))
    write_atomic(cfg.manifest, json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(traj)} records to {cfg.csv}; manifest {cfg.manifest}")
    return EXIT_OK


def cmd_discord(args) -> int:
    coeffs = _coeff_flags(args)
    if (coeffs is None) == (args.state is None):
        raise ConfigError("give either --cx/--cy/--cz or --state")
    if coeffs is not None:
        try:
            delta = bell_diagonal_deviation(BellDiagonalCoeffs(*coeffs))
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        delta = load_state(args.state)
    vals = quantum_discord(delta, _optimizer(args, OptimizerSettings())).clamped()
    out = {
        "mutual_info": vals.mutual_info,
        "classical": vals.classical,
        "quantum": vals.quantum,
        "maximizer": vals.maximizer.angles(),
        "converged": vals.converged,
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_detect(args) -> int:
    try:
        with open(args.csv) as fh:
            cols = read_trajectory_csv(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {args.csv!r}: {exc}") from exc
    if len(cols["t"]) < 8:
        raise ConfigError(f"need at least 8 rows, got {len(cols['t'])}")
    report = detect_sudden_change(trajectory_from_columns(cols), args.curve, scale=args.scale)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def cmd_validate(args) -> int:
    start = time.perf_counter()
    results = run_checks(quick=args.quick, fault=args.inject_fault)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}")
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed "
          f"in {time.perf_counter() - start:.2f} s")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {
    "simulate": cmd_simulate,
    "discord": cmd_discord,
    "detect": cmd_detect,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"nmrdiscord: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
