"""Command-line interface: single runs, experiment grids, CSV summaries.

Exit codes: 0 success, 1 usage/config error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench
from .config import GatewayPlacement, ProtocolKind, SimConfig
from .engine import run
from .errors import InvalidParameterError


def _parse_pair(value: str) -> tuple[float, float]:
    parts = value.split(",")
    if len(parts) != 2:
        raise ValueError("expected two comma-separated numbers")
    return float(parts[0]), float(parts[1])


def _parse_protocol(value: str) -> ProtocolKind:
    try:
        return ProtocolKind[value.strip().upper()]
    except KeyError:
        raise ValueError(f"unknown protocol {value!r} "
                         f"(choose from {', '.join(p.name for p in ProtocolKind)})")


def _parse_placement(value: str) -> GatewayPlacement:
    try:
        return GatewayPlacement[value.strip().upper()]
    except KeyError:
        raise ValueError(f"unknown gateway_placement {value!r} (RANDOM or GRID)")


# config file keys mirror SimConfig field names exactly
_CONFIG_PARSERS = {
    "area": _parse_pair,
    "n_nodes": int,
    "n_gateways": int,
    "e0_normal": float,
    "e0_high": float,
    "p_select": float,
    "packet_bits": int,
    "frames_per_round": int,
    "max_rounds": int,
    "sink": _parse_pair,
    "protocol": _parse_protocol,
    "sep_m": float,
    "sep_a": float,
    "seed": int,
    "gateway_placement": _parse_placement,
    "setup_cost_joules": float,
}


def parse_config_file(path) -> dict:
    """Parse a flat key=value config file into SimConfig keyword arguments."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidParameterError(f"cannot read config file {path}: {exc}")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_PARSERS:
            raise InvalidParameterError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](value)
        except ValueError as exc:
            raise InvalidParameterError(f"{path}:{lineno}: bad value for {key!r}: {exc}")
    return values


def build_config(file_values: dict | None = None, **flag_values) -> SimConfig:
    """Merge config file values with flag overrides (flags win)."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    return SimConfig(**merged)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(1)


def _parse_seeds(value: str) -> list[int]:
    if "," in value:
        return [int(s) for s in value.split(",") if s.strip()]
    return list(range(int(value)))


def _add_common_flags(p):
    p.add_argument("--config", metavar="PATH", help="flat key=value config file")
    p.add_argument("--protocol", type=_parse_protocol,
                   help="LEACH, SEP or GATEWAY")
    p.add_argument("--nodes", type=int, dest="n_nodes", help="sensing node count")
    p.add_argument("--gateways", type=int, dest="n_gateways",
                   help="high-energy node count")
    p.add_argument("--rounds", type=int, dest="max_rounds", help="round cap")
    p.add_argument("--seed", type=int, help="run seed")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wsnsim",
                     description="Round-based LEACH/SEP/gateway WSN simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", parents=[], help="run one simulation")
    _add_common_flags(p_sim)
    p_sim.add_argument("--out-dir", help="write runs.csv/series.csv for this run")

    p_exp = sub.add_parser("experiment", help="run a protocol comparison grid")
    _add_common_flags(p_exp)
    p_exp.add_argument("--node-counts", default=None,
                       help="comma-separated node counts "
                            f"(default {','.join(map(str, bench.DEFAULT_NODE_COUNTS))})")
    p_exp.add_argument("--protocols", default=None,
                       help="comma-separated protocol list (default all three)")
    p_exp.add_argument("--seeds", default=None,
                       help="N for seeds 0..N-1, or a comma-separated list "
                            "(default 30)")
    p_exp.add_argument("--out-dir", default="results", help="output directory")
    p_exp.add_argument("--parallelism", type=int, default=1,
                       help="concurrent worker processes")
    p_exp.add_argument("--pin-gateways", action="store_true",
                       help="use the base gateway count at every node count "
                            "instead of scaling 4 per 100 nodes")

    p_sum = sub.add_parser("summarize", help="summarize an existing runs.csv")
    p_sum.add_argument("--runs", default="results/runs.csv", help="path to runs.csv")
    return parser


def _config_from_args(args) -> SimConfig:
    file_values = parse_config_file(args.config) if args.config else None
    return build_config(
        file_values,
        protocol=args.protocol,
        n_nodes=args.n_nodes,
        n_gateways=args.n_gateways,
        max_rounds=args.max_rounds,
        seed=args.seed,
    )


def _cmd_simulate(args) -> int:
    config = _config_from_args(args)
    result = run(config)
    rec = bench._record_from_result(result)
    print(f"protocol={config.protocol.value} nodes={config.n_nodes} "
          f"gateways={config.n_gateways} seed={config.seed}")
    print(f"rounds executed: {result.rounds_executed}"
          + (" (terminated early: all sensing nodes dead)"
             if result.terminated_early else ""))
    print(f"fnd={result.fnd} hnd={result.hnd} lnd={result.lnd}")
    print(f"total energy spent: {result.total_energy_spent:.6f} J")
    print(f"rng: {result.rng_algorithm}")
    if args.out_dir:
        runs_path, series_path = bench.emit_csv([rec], args.out_dir)
        print(f"wrote {runs_path} and {series_path}")
    return 0


def _cmd_experiment(args) -> int:
    file_values = parse_config_file(args.config) if args.config else None
    base = build_config(file_values,
                        protocol=args.protocol,
                        n_gateways=args.n_gateways,
                        max_rounds=args.max_rounds)
    grid = bench.ExperimentGrid(base_config=base, pin_gateways=args.pin_gateways)
    if args.node_counts:
        grid.node_counts = [int(s) for s in args.node_counts.split(",") if s.strip()]
    elif args.n_nodes:
        grid.node_counts = [args.n_nodes]
    if args.protocols:
        grid.protocols = [_parse_protocol(s) for s in args.protocols.split(",")]
    elif args.protocol:
        grid.protocols = [args.protocol]
    if args.seeds:
        grid.seeds = _parse_seeds(args.seeds)
    elif args.seed is not None:
        grid.seeds = [args.seed]

    records = bench.run_experiment(grid, parallelism=args.parallelism)
    runs_path, series_path = bench.emit_csv(records, args.out_dir)
    plot_paths = bench.emit_plot_data(records, args.out_dir)
    print(f"wrote {runs_path}, {series_path} and {len(plot_paths)} plot data files")
    _print_summary(bench.summarize(records))
    return 0


def _cmd_summarize(args) -> int:
    records = bench.load_runs_csv(args.runs)
    _print_summary(bench.summarize(records))
    return 0


def _print_summary(summary) -> None:
    print(f"{'protocol':<10}{'nodes':>7}{'metric':>8}{'mean':>10}{'min':>7}"
          f"{'max':>7}{'stddev':>9}{'undef':>7}")
    for (protocol, n), cell in summary.per_cell.items():
        for metric in ("fnd", "hnd", "lnd"):
            s = cell[metric]
            print(f"{protocol:<10}{n:>7}{metric:>8}{s.mean:>10.1f}{s.min:>7.0f}"
                  f"{s.max:>7.0f}{s.stddev:>9.2f}{s.n_undefined:>7}")


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        return _cmd_summarize(args)
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
