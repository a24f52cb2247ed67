"""
hlflock command line.

    hlflock run      --config flock.json [--absolute] [--format csv|json]
    hlflock verify   --config flock.json
    hlflock ensemble --config flock.json [--replicas R] [--horizon T] [--workers W] [--traces]
    hlflock sweep    --config flock.json --grid model.p=0.2,0.5 [--grid initial.speed=0.01,0.1]

Exit codes: 0 ok, 1 other failure, 2 invalid config, 3 output failure, 4 invariant breach.
"""

import argparse
import itertools
import logging
import os
import sys
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from hlflock.utils.analysis.bounds import BoundParams, derive_bound_params
from hlflock.utils.analysis.flocking import FlockingVerdict, detect_flocking
from hlflock.utils.analysis.theorem import (
    ConditionRow,
    SeriesDiagnosis,
    TheoremVerdict,
    check_corollary2,
    check_theorem1,
    condition_table,
    corollary1_series,
    delta_flocking,
)
from hlflock.utils.config.loader import apply_overrides, load_config
from hlflock.utils.core.dynamics import to_absolute, to_relative
from hlflock.utils.core.simulate import simulate
from hlflock.utils.core.state import Frame
from hlflock.utils.ensemble.runner import EnsembleSpec, run_ensemble
from hlflock.utils.errors import (
    BoundInapplicable,
    ConfigError,
    FlockError,
    InvariantBreach,
    OutputError,
    ReplicaError,
)
from hlflock.utils.interactions.rng import RngStream
from hlflock.utils.writer.csv_writer import save_csv, trajectory_frame
from hlflock.utils.writer.json_writer import save_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_OUTPUT = 3
EXIT_INVARIANT = 4

SWEEP_COLUMNS = [
    "point",
    "parameter",
    "value",
    "replicas",
    "flocking_fraction",
    "final_mean_sup_v",
    "final_mean_sup_v_se",
]


class RunSummary(BaseModel):
    """
    Everything ``run`` records next to the trajectory.

    Attributes:
        frame (Frame): Frame of the trajectory file.
        x1_origin (list): Bird 1's initial absolute position.
        v1_origin (list): Bird 1's absolute velocity.
        verdict (FlockingVerdict): Flocking read off the run.
        bounds (BoundParams): Constants derived from the initial state.
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    frame: Frame
    horizon: int
    seed: int
    x1_origin: List[float]
    v1_origin: List[float]
    verdict: FlockingVerdict
    bounds: BoundParams


class VerifyReport(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    theorem1: TheoremVerdict
    corollary2: bool
    degenerate: List[int]
    delta_flocking: Dict[int, bool]
    conditions: List[ConditionRow]
    series: Optional[SeriesDiagnosis] = None
    bounds: BoundParams


def _grid_argument(text):
    name, sep, values = text.partition("=")
    if not sep or not name or not values:
        raise argparse.ArgumentTypeError(f"expected name=v1,v2,..., got '{text}'")
    try:
        return name, [float(value) for value in values.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid values must be numbers, got '{values}'")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Path to the JSON run configuration")
    common.add_argument("--seed", type=int, help="Override the master seed (unsigned 64-bit)")
    common.add_argument("--out", help="Override the output directory")
    common.add_argument("--format", choices=["csv", "json"], default="csv", help="Tabular output format")
    common.add_argument("--horizon", type=int, help="Override the number of steps T")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug")

    fan_out = argparse.ArgumentParser(add_help=False)
    fan_out.add_argument("--replicas", type=int, help="Number of replicas R")
    fan_out.add_argument("--workers", type=int, help="Worker processes")

    parser = argparse.ArgumentParser(prog="hlflock", description="Hierarchical random-interaction flocking simulator")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="Simulate one trajectory")
    run.add_argument("--absolute", action="store_true", help="Write the absolute frame instead of the relative one")
    commands.add_parser("verify", parents=[common], help="Evaluate the flocking conditions without simulating")
    ensemble = commands.add_parser("ensemble", parents=[common, fan_out], help="Monte Carlo over R replicas")
    ensemble.add_argument("--traces", action="store_true", help="Spill every replica's trajectory as CSV")
    sweep = commands.add_parser("sweep", parents=[common, fan_out], help="Ensembles over a parameter grid")
    sweep.add_argument(
        "--grid", type=_grid_argument, action="append", default=[], help="Dotted config path and values, name=v1,v2"
    )
    return parser


def configure_logging(verbosity):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _load(args):
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output.directory"] = args.out
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if getattr(args, "replicas", None) is not None:
        overrides["ensemble.replicas"] = args.replicas
    if getattr(args, "workers", None) is not None:
        overrides["ensemble.workers"] = args.workers
    if getattr(args, "traces", False):
        overrides["ensemble.traces"] = True
    config = load_config(args.config)
    return apply_overrides(config, overrides) if overrides else config


def _output_path(config, name):
    return os.path.join(config.output.directory, name)


def _with_extension(name, fmt):
    stem, _ = os.path.splitext(name)
    return f"{stem}.{fmt}"


# Function to simulate and save one trajectory
def cmd_run(config, absolute=False, fmt="csv"):
    """
    Simulates replica 0 of the configuration and writes its trajectory and summary.

    Args:
        config (SimConfig): Validated configuration.
        absolute (bool): Write the absolute frame.
        fmt (str): ``csv`` or ``json`` for the trajectory file.

    Returns:
        RunSummary: What was written to the summary file.
    """
    stream = RngStream(seed=config.seed)
    hierarchy = config.build_hierarchy()
    start = config.initial_state(stream)
    initial = to_relative(start)
    trajectory = simulate(initial, hierarchy, config.model, config.h, config.horizon, stream)
    verdict = detect_flocking(trajectory, config.flocking.epsilon, min(config.flocking.window, config.horizon + 1))
    certificate = config.model.certificate
    bounds = derive_bound_params(initial, hierarchy, config.h, certificate.p, certificate.alpha)

    x1_origin, v1_origin = start.position(1), start.velocity(1)
    x, v = trajectory.x, trajectory.v
    if absolute:
        states = [to_absolute(state, x1_origin, v1_origin, config.h) for state in trajectory.states()]
        x = np.stack([state.x for state in states])
        v = np.stack([state.v for state in states])
    frame = trajectory_frame(x, v)

    path = _output_path(config, _with_extension(config.output.trajectory, fmt))
    if fmt == "json":
        save_json(frame.to_dict(orient="records"), path)
    else:
        save_csv(frame, path)

    summary = RunSummary(
        frame=Frame.ABSOLUTE if absolute else Frame.RELATIVE,
        horizon=config.horizon,
        seed=config.seed,
        x1_origin=x1_origin.tolist(),
        v1_origin=v1_origin.tolist(),
        verdict=verdict,
        bounds=bounds,
    )
    save_json(summary, _output_path(config, config.output.summary))
    logger.info("run finished: flocking=%s, wrote %s", verdict.flocking, path)
    return summary


def cmd_verify(config):
    """Evaluates the flocking conditions on replica 0's initial state."""
    certificate = config.model.certificate
    hierarchy = config.build_hierarchy()
    initial = to_relative(config.initial_state(RngStream(seed=config.seed)))
    bounds = derive_bound_params(initial, hierarchy, config.h, certificate.p, certificate.alpha)

    series = None
    try:
        series = corollary1_series(
            config.verify.series_delta,
            bounds,
            config.h,
            certificate.p,
            certificate.alpha,
            config.k,
        )
    except BoundInapplicable as e:
        logger.info("series check skipped: %s", e)

    report = VerifyReport(
        theorem1=check_theorem1(bounds, certificate.alpha, config.k),
        corollary2=check_corollary2(bounds.v0, certificate.p, config.k),
        degenerate=bounds.degenerate,
        delta_flocking=delta_flocking(bounds),
        conditions=condition_table(bounds, config.k),
        series=series,
        bounds=bounds,
    )
    save_json(report, _output_path(config, config.output.verify))
    return report


def _ensemble_spec(config, point=None):
    traces_dir = None
    if config.ensemble.traces:
        name = "traces" if point is None else f"traces_{point:03d}"
        traces_dir = _output_path(config, name)
    return EnsembleSpec.from_config(config, traces_dir=traces_dir)


def cmd_ensemble(config, fmt="csv"):
    report = run_ensemble(_ensemble_spec(config))
    save_json(report, _output_path(config, config.output.report))
    if fmt == "csv":
        save_csv(report.series_frame(), _output_path(config, config.output.series))
    if not report.all_passed:
        failed = [row for row in report.comparisons if not row.passed]
        logger.warning("%d bound comparisons failed", len(failed))
    return report


def sweep_points(grid):
    """Cartesian product of the grid, in insertion order of its parameters."""
    names = list(grid)
    return [dict(zip(names, values)) for values in itertools.product(*(grid[name] for name in names))]


# Function to run an ensemble per grid point
def cmd_sweep(config, extra_grid=(), fmt="csv"):
    """
    Runs one ensemble per point of the parameter grid.

    Args:
        config (SimConfig): Base configuration.
        extra_grid (list): ``(dotted path, values)`` pairs added to ``config.sweep.grid``.
        fmt (str): ``csv`` or ``json``.

    Returns:
        pd.DataFrame: One row per parameter per grid point.
    """
    grid = dict(config.sweep.grid)
    grid.update(extra_grid)
    if not grid:
        raise ConfigError("sweep.grid: at least one parameter is needed")

    rows = []
    for index, point in enumerate(sweep_points(grid)):
        logger.info("sweep point %d: %s", index, point)
        report = run_ensemble(_ensemble_spec(apply_overrides(config, point), point=index))
        for name, value in point.items():
            rows.append(
                {
                    "point": index,
                    "parameter": name,
                    "value": value,
                    "replicas": report.replicas,
                    "flocking_fraction": report.flocking_fraction,
                    "final_mean_sup_v": report.final_mean_sup_v,
                    "final_mean_sup_v_se": report.final_mean_sup_v_se,
                }
            )
    table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)

    path = _output_path(config, _with_extension(config.output.sweep, fmt))
    if fmt == "json":
        save_json(table.to_dict(orient="records"), path)
    else:
        save_csv(table, path)
    return table


def exit_code(error):
    if isinstance(error, ReplicaError):
        return exit_code(error.cause)
    if isinstance(error, ConfigError):
        return EXIT_CONFIG
    if isinstance(error, OutputError):
        return EXIT_OUTPUT
    if isinstance(error, InvariantBreach):
        return EXIT_INVARIANT
    return EXIT_FAILURE


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        config = _load(args)
        if args.command == "run":
            cmd_run(config, absolute=args.absolute, fmt=args.format)
        elif args.command == "verify":
            cmd_verify(config)
        elif args.command == "ensemble":
            cmd_ensemble(config, fmt=args.format)
        elif args.command == "sweep":
            cmd_sweep(config, extra_grid=args.grid, fmt=args.format)
    except FlockError as e:
        logger.error("%s failed: %s", args.command, e)
        return exit_code(e)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
