"""Command-line entry point.

Subcommands: stationary, gradient, sweep, premium, mc. Each writes CSV
output plus a JSON metadata sidecar carrying every effective parameter
value, enough to reproduce the run exactly. Exit codes: 0 success,
1 solver failure, 2 invalid configuration or parameters.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .config import (ConfigError, DEFAULT_PREMIUM_GRID, McSection, RunConfig,
                     apply_overrides, params_dict, parse_file, parse_grid,
                     strategies_label)
from .markov import SolverError, gradient_field, solve_stationary
from .montecarlo import GENERATOR, SimConfig, simulate
from .output import (SCHEMA_VERSION, write_gradient_csv, write_metadata,
                     write_stationary_csv, write_summary_csv, write_sweep_csv)
from .params import ParameterError, validate
from .sweeps import SweepSpec, optimal_premium, sweep_grid


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="run configuration file")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="override a model parameter (repeatable)")
    common.add_argument("--out", type=Path, default=None,
                        help="output directory (default from config)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for sweeps "
                             "(default $RISKEVO_THREADS or 1)")

    parser = argparse.ArgumentParser(
        prog="riskevo",
        description="Evolutionary dynamics of disaster-risk strategies: "
                    "risk-sharing pool (S), index insurance (I), none (A).")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("stationary", parents=[common],
                   help="exact stationary distribution and adoption rates")
    sub.add_parser("gradient", parents=[common],
                   help="per-state selection-gradient field")
    sub.add_parser("sweep", parents=[common],
                   help="parameter-grid sweep from the [sweep] config section")
    sub.add_parser("premium", parents=[common],
                   help="premium scan and profit-maximizing price")
    mc = sub.add_parser("mc", parents=[common],
                        help="Monte Carlo simulation of the same process")
    mc.add_argument("--seed", type=int, default=None,
                    help="override the RNG seed from the config")
    return parser


def _load(args) -> RunConfig:
    config = parse_file(args.config) if args.config else RunConfig()
    model = validate(apply_overrides(config.model, args.overrides))
    out_dir = str(args.out) if args.out else config.output_dir
    return RunConfig(model=model, output_dir=out_dir, sweep=config.sweep,
                     premium=config.premium, mc=config.mc)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    return max(1, int(os.environ.get("RISKEVO_THREADS", "1")))


def _meta(command: str, config: RunConfig, **extra) -> dict:
    payload = {
        "command": command,
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "params": params_dict(config.model),
    }
    payload.update(extra)
    return payload


def _cmd_stationary(config: RunConfig, out: Path, threads: int) -> None:
    model, result = solve_stationary(config.model)
    write_stationary_csv(out / "stationary.csv", model.space.states, result.probs)
    write_summary_csv(out / "stationary_summary.csv", result.adoption, result.residual)
    write_metadata(out / "stationary_meta.json",
                   _meta("stationary", config,
                         residual=result.residual, solver=result.method,
                         output_files=["stationary.csv", "stationary_summary.csv"]))


def _cmd_gradient(config: RunConfig, out: Path, threads: int) -> None:
    model, result = solve_stationary(config.model)
    grad = gradient_field(model)
    write_gradient_csv(out / "gradient.csv", model.space.states, grad)
    write_metadata(out / "gradient_meta.json",
                   _meta("gradient", config, residual=result.residual,
                         solver=result.method, output_files=["gradient.csv"]))


def _cmd_sweep(config: RunConfig, out: Path, threads: int) -> None:
    if config.sweep is None:
        raise ConfigError("sweep subcommand needs a [sweep] config section")
    sec = config.sweep
    spec = SweepSpec(base=config.model, axes=sec.axes, outputs=sec.outputs,
                     mode=sec.mode)
    rows = sweep_grid(spec, threads=threads)
    write_sweep_csv(out / "sweep.csv", spec.axis_names, rows)
    files = ["sweep.csv"]
    for i, row in enumerate(rows):
        if row.probs is not None:
            name = f"point_{i:03d}_stationary.csv"
            write_stationary_csv(out / name, row.states, row.probs)
            files.append(name)
        if row.gradient is not None:
            name = f"point_{i:03d}_gradient.csv"
            write_gradient_csv(out / name, row.states, row.gradient)
            files.append(name)
    errors = {i: row.error for i, row in enumerate(rows) if row.error}
    write_metadata(out / "sweep_meta.json",
                   _meta("sweep", config,
                         axes=[{"name": n, "values": list(v)} for n, v in sec.axes],
                         mode=strategies_label(sec.mode) if sec.mode else None,
                         outputs=list(sec.outputs), threads=threads,
                         point_errors=errors, output_files=files))


def _cmd_premium(config: RunConfig, out: Path, threads: int) -> None:
    grid = (config.premium.c_grid if config.premium is not None
            else parse_grid(DEFAULT_PREMIUM_GRID))
    curve = optimal_premium(config.model, grid, threads=threads)
    write_sweep_csv(out / "premium.csv", ("c",), curve.rows)
    write_metadata(out / "premium_meta.json",
                   _meta("premium", config, c_grid=list(grid),
                         c_star=curve.c_star, profit_star=curve.profit_star,
                         threads=threads, output_files=["premium.csv"]))


def _cmd_mc(config: RunConfig, out: Path, threads: int, seed: int | None) -> None:
    sec = config.mc if config.mc is not None else McSection()
    if seed is not None:
        sec = McSection(steps=sec.steps, burnin=sec.burnin,
                        thinning=sec.thinning, seed=seed, initial=sec.initial)
    sim = SimConfig(steps=sec.steps, burnin=sec.burnin, thinning=sec.thinning,
                    seed=sec.seed, initial=sec.initial)
    try:
        result = simulate(config.model, sim)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_stationary_csv(out / "mc.csv", result.space.states, result.frequencies)
    write_summary_csv(out / "mc_summary.csv", result.adoption, float("nan"))
    write_metadata(out / "mc_meta.json",
                   _meta("mc", config, seed=sec.seed, steps=sec.steps,
                         burnin=sec.burnin, thinning=sec.thinning,
                         samples=result.samples, generator=GENERATOR,
                         initial=list(sim.initial) if sim.initial else None,
                         output_files=["mc.csv", "mc_summary.csv"]))


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load(args)
        out = Path(config.output_dir)
        threads = _threads(args)
        if args.command == "stationary":
            _cmd_stationary(config, out, threads)
        elif args.command == "gradient":
            _cmd_gradient(config, out, threads)
        elif args.command == "sweep":
            _cmd_sweep(config, out, threads)
        elif args.command == "premium":
            _cmd_premium(config, out, threads)
        elif args.command == "mc":
            _cmd_mc(config, out, threads, args.seed)
    except (ConfigError, ParameterError) as exc:
        print(f"riskevo: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"riskevo: solver failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
