"""Command-line front end.

Three commands produce figure-ready tabular data:

  simulate  - one ensemble: variance series, observable series, final
              position distribution
  sweep     - regime diagram over a (q, theta, coin) grid
  network   - trajectory-to-graph mapping: edge list, metric time
              series, degree distribution

Angles are taken in degrees on the command line.  Every output file
embeds the full run configuration, the master seed and the package
version, so a job can be reproduced from any of its outputs.  Output
bytes are independent of ``--workers``.

Exit codes: 0 success, 1 usage error, 2 numerical-invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .ensemble import (AVERAGING_MODES, RunConfig, run_ensemble,
                       run_trajectory, sweep)
from .exceptions import NumericalInvariantError
from .netmap import build_graph, degree_stats, edge_list_text, graph_timeseries
from .observables import DEFAULT_OCCUPANCY_THRESHOLD


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the CLI contract
    # reserves 2 for numerical failures and uses 1 for usage errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    items = [s for s in text.split(",") if s.strip()]
    return [float(s) for s in items]


def _int_list(text: str) -> list[int]:
    items = [s for s in text.split(",") if s.strip()]
    return [int(s) for s in items]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tmax", type=int, default=1000, help="number of time steps")
    parser.add_argument("--ntraj", type=int, default=1, help="trajectories in the ensemble")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--avg-mode", choices=AVERAGING_MODES, default="distributions",
                        help="ensemble averaging mode")
    parser.add_argument("--threshold", type=float, default=DEFAULT_OCCUPANCY_THRESHOLD,
                        help="occupancy threshold for 'nonzero' probability")
    parser.add_argument("--fit-window", type=_float_list, default=[0.1, 1.0],
                        metavar="LO,HI", help="diffusion-fit window as fractions of tmax")
    parser.add_argument("--entropy-base", type=float, default=None,
                        help="log base for position entropy (default: natural)")
    parser.add_argument("--workers", type=int, default=min(4, os.cpu_count() or 1),
                        help="worker processes (does not affect results)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output file format")


def _add_point(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--q", type=float, required=True, help="entropic index (>= 0.5)")
    parser.add_argument("--coin", choices=("H", "K"), default="H", help="coin family")
    parser.add_argument("--theta", type=float, default=45.0, help="coin angle, degrees")
    parser.add_argument("--phi", type=float, default=None,
                        help="initial phase, degrees (default: per-family symmetric value)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="jumpwalk",
                     description="Quantum walk with q-exponential time-dependent jumps.")
    parser.add_argument("--version", action="version", version=f"jumpwalk {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p_sim = commands.add_parser("simulate", help="run one ensemble and dump its series")
    _add_point(p_sim)
    _add_common(p_sim)

    p_sweep = commands.add_parser("sweep", help="regime diagram over a parameter grid")
    p_sweep.add_argument("--q", type=_float_list, required=True, metavar="Q1,Q2,...",
                         help="entropic indices")
    p_sweep.add_argument("--theta", type=_float_list, default=[45.0], metavar="T1,T2,...",
                         help="coin angles, degrees")
    p_sweep.add_argument("--coins", default="H,K", metavar="H,K", help="coin families")
    _add_common(p_sweep)

    p_net = commands.add_parser("network", help="map a trajectory onto a graph")
    _add_point(p_net)
    p_net.add_argument("--times", type=_int_list, default=None, metavar="T1,T2,...",
                       help="snapshot times for graph metrics (default: log-spaced)")
    p_net.add_argument("--degree-dist", choices=("single", "mean"), default="single",
                       help="degree distribution from one trajectory or averaged")
    _add_common(p_net)
    return parser


def _make_config(args, **overrides) -> RunConfig:
    values = dict(
        q=args.q, coin=getattr(args, "coin", "H"),
        theta=math.radians(args.theta) if not isinstance(args.theta, list) else 0.0,
        phi=None if getattr(args, "phi", None) is None else math.radians(args.phi),
        t_max=args.tmax, n_trajectories=args.ntraj, seed=args.seed,
        averaging=args.avg_mode, occupancy_threshold=args.threshold,
        entropy_base=args.entropy_base, fit_window=tuple(args.fit_window))
    values.update(overrides)
    try:
        return RunConfig(**values)
    except (ValueError, TypeError) as exc:
        raise _UsageError(str(exc)) from exc


def _fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    # repr of a float is its shortest exact round-trip form
    return repr(float(value))


def _metadata(command: str, config: RunConfig) -> dict:
    return {"version": __version__, "command": command, "config": config.to_dict()}


def _write_table(path: str, meta: dict, columns: list[tuple[str, list]],
                 fmt: str) -> str:
    """Write one table; returns the path actually written."""
    if fmt == "json":
        path += ".json"
        payload = dict(meta)
        payload["columns"] = {name: [None if v is None else v for v in values]
                              for name, values in columns}
        with open(path, "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")
        return path
    path += ".csv"
    n_rows = len(columns[0][1])
    with open(path, "w") as fh:
        for key, value in meta.items():
            fh.write(f"# {key} = {json.dumps(value)}\n")
        fh.write(",".join(name for name, _ in columns) + "\n")
        for row in range(n_rows):
            fh.write(",".join(_fmt(values[row]) for _, values in columns) + "\n")
    return path


def _cmd_simulate(args) -> int:
    config = _make_config(args)
    result = run_ensemble(config, workers=args.workers)
    meta = _metadata("simulate", config)
    meta["alpha"] = result.alpha
    meta["alpha_se"] = result.alpha_se
    meta["max_norm_error"] = result.max_norm_error
    out = args.out
    os.makedirs(out, exist_ok=True)
    t = [int(v) for v in result.times]
    written = [
        _write_table(os.path.join(out, "variance"), meta, [
            ("t", t),
            ("variance", list(result.variance_mean)),
            ("variance_se", list(result.variance_se)),
        ], args.format),
        _write_table(os.path.join(out, "observables"), meta, [
            ("t", t),
            ("variance", list(result.variance_mean)),
            ("variance_se", list(result.variance_se)),
            ("entropy", list(result.entropy_mean)),
            ("entropy_se", list(result.entropy_se)),
            ("ipr", list(result.ipr_mean)),
            ("ipr_se", list(result.ipr_se)),
            ("occupancy", list(result.occupancy_mean)),
            ("occupancy_se", list(result.occupancy_se)),
            ("entanglement", list(result.entanglement_mean)),
            ("entanglement_se", list(result.entanglement_se)),
        ], args.format),
        _write_table(os.path.join(out, "distribution"), meta, [
            ("x", [int(x) for x in result.final_distribution.positions()]),
            ("p", list(result.final_distribution.p)),
        ], args.format),
    ]
    for path in written:
        print(path)
    return 0


def _cmd_sweep(args) -> int:
    coins = [c for c in args.coins.split(",") if c.strip()]
    if not args.q or not args.theta or not coins:
        raise _UsageError("sweep grid must be nonempty in q, theta and coins")
    if any(c not in ("H", "K") for c in coins):
        raise _UsageError(f"unknown coin family in {coins}")
    template = _make_config(args, q=args.q[0], coin=coins[0], theta=0.0, phi=None)
    points = sweep(template, qs=args.q,
                   thetas=[math.radians(t) for t in args.theta],
                   coins=coins, workers=args.workers)
    meta = _metadata("sweep", template)
    meta["q_grid"] = args.q
    meta["theta_grid_deg"] = args.theta
    meta["coins"] = coins
    os.makedirs(args.out, exist_ok=True)
    # echo the requested grid angles instead of re-deriving them from radians
    theta_deg = [t for _ in args.q for t in args.theta for _ in coins]
    path = _write_table(os.path.join(args.out, "sweep"), meta, [
        ("q", [p.q for p in points]),
        ("theta_deg", theta_deg),
        ("coin", [p.coin for p in points]),
        ("alpha", [p.alpha for p in points]),
        ("alpha_se", [p.alpha_se for p in points]),
        ("variance", [p.variance for p in points]),
        ("entropy", [p.entropy for p in points]),
        ("ipr", [p.ipr for p in points]),
        ("occupancy", [p.occupancy for p in points]),
        ("entanglement", [p.entanglement for p in points]),
        ("jsd", [p.jsd for p in points]),
    ], args.format)
    print(path)
    return 0


def _default_sample_times(t_max: int) -> list[int]:
    times = np.unique(np.geomspace(1, t_max, 20).astype(int))
    return [int(t) for t in times]


def _cmd_network(args) -> int:
    config = _make_config(args)
    times = args.times if args.times is not None else _default_sample_times(args.tmax)
    if not times:
        raise _UsageError("at least one sample time is required")
    if any(t < 1 or t > config.t_max for t in times):
        raise _UsageError(f"sample times must lie in [1, {config.t_max}]")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise _UsageError("sample times must be strictly increasing")

    record = run_trajectory(config, index=0, record_distributions=True)
    series = graph_timeseries(record, times, threshold=config.occupancy_threshold)
    graph = build_graph(record, threshold=config.occupancy_threshold)

    meta = _metadata("network", config)
    os.makedirs(args.out, exist_ok=True)
    edge_path = os.path.join(args.out, "edges.txt")
    with open(edge_path, "w") as fh:
        for key, value in meta.items():
            fh.write(f"# {key} = {json.dumps(value)}\n")
        fh.write(edge_list_text(graph))

    metrics_path = _write_table(os.path.join(args.out, "network_metrics"), meta, [
        ("t", [t for t, _, _ in series]),
        ("n_vertices", [s.n_vertices for _, _, s in series]),
        ("n_edges", [s.n_edges for _, _, s in series]),
        ("degree_mean", [d.mean for _, d, _ in series]),
        ("degree_std", [d.std for _, d, _ in series]),
        ("degree_skewness", [d.skewness for _, d, _ in series]),
        ("degree_entropy", [d.entropy for _, d, _ in series]),
        ("avg_path_length", [s.avg_path_length for _, _, s in series]),
        ("assortativity", [s.assortativity for _, _, s in series]),
    ], args.format)

    if args.degree_dist == "mean":
        hists = []
        for index in range(config.n_trajectories):
            rec = record if index == 0 else run_trajectory(
                config, index=index, record_distributions=True)
            hists.append(degree_stats(build_graph(
                rec, threshold=config.occupancy_threshold)).histogram)
        width = max(len(h) for h in hists)
        stacked = np.zeros((len(hists), width))
        for row, h in enumerate(hists):
            stacked[row, :len(h)] = h
        hist = stacked.mean(axis=0)
    else:
        hist = degree_stats(graph).histogram
    degree_path = _write_table(os.path.join(args.out, "degree_distribution"), meta, [
        ("k", list(range(len(hist)))),
        ("p", list(hist)),
    ], args.format)

    for path in (edge_path, metrics_path, degree_path):
        print(path)
    return 0


_COMMANDS = {"simulate": _cmd_simulate, "sweep": _cmd_sweep, "network": _cmd_network}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"jumpwalk {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except NumericalInvariantError as exc:
        print(f"jumpwalk {args.command}: numerical invariant violated: {exc}",
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
