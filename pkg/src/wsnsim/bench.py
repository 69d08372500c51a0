"""Experiment grid orchestration, CSV/plot-data emission and summaries."""

from __future__ import annotations

import concurrent.futures
import dataclasses
import statistics
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .config import ProtocolKind, SimConfig
from .engine import RoundMetrics, SimResult, run
from .errors import InvalidParameterError

DEFAULT_NODE_COUNTS = [50, 100, 200, 300, 400, 500]
DEFAULT_SEEDS = list(range(30))
GATEWAY_RATIO = 0.04  # 4 high-energy nodes per 100 sensors

RUNS_HEADER = ("protocol,n_nodes,n_gateways,seed,fnd,hnd,lnd,"
               "rounds_executed,total_energy_spent_j")
SERIES_HEADER = ("protocol,n_nodes,seed,round,alive_normal,alive_high,heads,"
                 "energy_remaining_j,packets_to_sink")


@dataclass
class ExperimentGrid:
    """Cross product of node counts, protocols and seeds over a base config."""

    node_counts: list[int] = field(default_factory=lambda: list(DEFAULT_NODE_COUNTS))
    protocols: list[ProtocolKind] = field(default_factory=lambda: list(ProtocolKind))
    seeds: list[int] = field(default_factory=lambda: list(DEFAULT_SEEDS))
    base_config: SimConfig = field(default_factory=SimConfig)
    pin_gateways: bool = False   # keep the base gateway count at every node count

    def gateways_for(self, n_nodes: int) -> int:
        if self.pin_gateways:
            return self.base_config.n_gateways
        return max(4, round(GATEWAY_RATIO * n_nodes))

    def expand(self) -> list[SimConfig]:
        cells = []
        for protocol in self.protocols:
            for n in self.node_counts:
                for seed in self.seeds:
                    cells.append(dataclasses.replace(
                        self.base_config,
                        protocol=protocol, n_nodes=n,
                        n_gateways=self.gateways_for(n), seed=seed,
                    ))
        return cells


@dataclass
class RunRecord:
    """One completed run, as it appears in runs.csv (plus the round series)."""

    protocol: str
    n_nodes: int
    n_gateways: int
    seed: int
    fnd: int | None
    hnd: int | None
    lnd: int | None
    rounds_executed: int
    total_energy_spent: float
    series: list[RoundMetrics] | None = None

    @property
    def sort_key(self):
        return (self.protocol, self.n_nodes, self.seed)


@dataclass
class MetricStats:
    mean: float
    min: float
    max: float
    stddev: float
    n_defined: int
    n_undefined: int


@dataclass
class ComparisonSummary:
    """Per (protocol, node count) statistics of the lifetime metrics."""

    per_cell: dict[tuple[str, int], dict[str, MetricStats]]


def _record_from_result(result: SimResult) -> RunRecord:
    cfg = result.config_echo
    return RunRecord(
        protocol=cfg.protocol.value,
        n_nodes=cfg.n_nodes,
        n_gateways=cfg.n_gateways,
        seed=cfg.seed,
        fnd=result.fnd, hnd=result.hnd, lnd=result.lnd,
        rounds_executed=result.rounds_executed,
        total_energy_spent=result.total_energy_spent,
        series=result.series,
    )


def _run_cell(config: SimConfig) -> RunRecord:
    return _record_from_result(run(config))


def run_experiment(grid: ExperimentGrid, parallelism: int = 1,
                   progress=None) -> list[RunRecord]:
    """Execute every grid cell; results are sorted and order-independent.

    A failing cell aborts the whole experiment with its config attached.
    """
    cells = grid.expand()
    if progress is None:
        progress = sys.stderr
    records: list[RunRecord] = []
    if parallelism <= 1:
        for i, cfg in enumerate(cells):
            try:
                records.append(_run_cell(cfg))
            except Exception as exc:
                raise RuntimeError(
                    f"run failed: protocol={cfg.protocol.value} "
                    f"n_nodes={cfg.n_nodes} seed={cfg.seed}: {exc}") from exc
            _report(progress, i + 1, len(cells))
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = {pool.submit(_run_cell, cfg): cfg for cfg in cells}
            done = 0
            for fut in concurrent.futures.as_completed(futures):
                cfg = futures[fut]
                try:
                    records.append(fut.result())
                except Exception as exc:
                    raise RuntimeError(
                        f"run failed: protocol={cfg.protocol.value} "
                        f"n_nodes={cfg.n_nodes} seed={cfg.seed}: {exc}") from exc
                done += 1
                _report(progress, done, len(cells))
    records.sort(key=lambda rec: rec.sort_key)
    return records


def _report(stream, done: int, total: int) -> None:
    if stream is not None and (done % 25 == 0 or done == total):
        print(f"  {done}/{total} runs complete", file=stream)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)  # shortest round-trip representation
    return str(value)


def emit_csv(records: list[RunRecord], out_dir) -> tuple[Path, Path]:
    """Write runs.csv and series.csv with canonical ordering and formatting."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = sorted(records, key=lambda rec: rec.sort_key)

    runs_path = out_dir / "runs.csv"
    lines = [RUNS_HEADER]
    for rec in records:
        lines.append(",".join([
            rec.protocol, str(rec.n_nodes), str(rec.n_gateways), str(rec.seed),
            _fmt(rec.fnd), _fmt(rec.hnd), _fmt(rec.lnd),
            str(rec.rounds_executed), _fmt(float(rec.total_energy_spent)),
        ]))
    runs_path.write_text("\n".join(lines) + "\n")

    series_path = out_dir / "series.csv"
    lines = [SERIES_HEADER]
    for rec in records:
        for m in rec.series or []:
            lines.append(",".join([
                rec.protocol, str(rec.n_nodes), str(rec.seed), str(m.round),
                str(m.alive_normal), str(m.alive_high), str(m.heads_count),
                _fmt(float(m.energy_remaining_total)), str(m.packets_to_sink),
            ]))
    series_path.write_text("\n".join(lines) + "\n")
    return runs_path, series_path


def emit_plot_data(records: list[RunRecord], out_dir) -> list[Path]:
    """Write whitespace-delimited curve files plus the FND comparison table."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    cells: dict[tuple[str, int], list[RunRecord]] = {}
    for rec in sorted(records, key=lambda r: r.sort_key):
        cells.setdefault((rec.protocol, rec.n_nodes), []).append(rec)

    for (protocol, n_nodes), recs in cells.items():
        length = max(rec.rounds_executed for rec in recs)
        path = out_dir / f"alive_{protocol.lower()}_n{n_nodes}.dat"
        lines = ["# round mean_alive"]
        for r in range(length):
            total = 0
            for rec in recs:
                # runs that terminated early have zero alive nodes afterwards
                total += rec.series[r].alive_sensing if r < len(rec.series) else 0
            lines.append(f"{r} {_fmt(total / len(recs))}")
        path.write_text("\n".join(lines) + "\n")
        written.append(path)

    summary = summarize(records)
    node_counts = sorted({n for _, n in summary.per_cell})
    path = out_dir / "fnd_vs_n.dat"
    lines = ["# n_nodes mean_fnd_leach mean_fnd_sep mean_fnd_gateway"]
    for n in node_counts:
        row = [str(n)]
        for protocol in ("LEACH", "SEP", "GATEWAY"):
            stats = summary.per_cell.get((protocol, n), {}).get("fnd")
            row.append(_fmt(stats.mean) if stats and stats.n_defined else "nan")
        lines.append(" ".join(row))
    path.write_text("\n".join(lines) + "\n")
    written.append(path)
    return written


def summarize(records: list[RunRecord]) -> ComparisonSummary:
    """Mean/min/max/sample-stddev of FND/HND/LND per (protocol, node count)."""
    if not records:
        raise InvalidParameterError("no run records to summarize")
    grouped: dict[tuple[str, int], list[RunRecord]] = {}
    for rec in records:
        grouped.setdefault((rec.protocol, rec.n_nodes), []).append(rec)

    per_cell = {}
    for key, recs in sorted(grouped.items()):
        cell = {}
        for metric in ("fnd", "hnd", "lnd"):
            values = [getattr(rec, metric) for rec in recs]
            defined = [v for v in values if v is not None]
            if defined:
                cell[metric] = MetricStats(
                    mean=statistics.mean(defined),
                    min=min(defined), max=max(defined),
                    stddev=statistics.stdev(defined) if len(defined) > 1 else 0.0,
                    n_defined=len(defined),
                    n_undefined=len(values) - len(defined),
                )
            else:
                cell[metric] = MetricStats(
                    mean=float("nan"), min=float("nan"), max=float("nan"),
                    stddev=float("nan"), n_defined=0, n_undefined=len(values))
        per_cell[key] = cell
    return ComparisonSummary(per_cell=per_cell)


def load_runs_csv(path) -> list[RunRecord]:
    """Read runs.csv back into records (without round series)."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InvalidParameterError(f"cannot read {path}: {exc}")
    if not lines or lines[0] != RUNS_HEADER:
        raise InvalidParameterError(f"{path}: unexpected or missing runs.csv header")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 9:
            raise InvalidParameterError(f"{path}:{lineno}: expected 9 fields")
        records.append(RunRecord(
            protocol=parts[0], n_nodes=int(parts[1]), n_gateways=int(parts[2]),
            seed=int(parts[3]),
            fnd=int(parts[4]) if parts[4] else None,
            hnd=int(parts[5]) if parts[5] else None,
            lnd=int(parts[6]) if parts[6] else None,
            rounds_executed=int(parts[7]),
            total_energy_spent=float(parts[8]),
        ))
    return records
