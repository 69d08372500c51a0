import math

import pytest

from wsnsim import InvalidParameterError, ProtocolKind, SimConfig
from wsnsim.bench import (ExperimentGrid, RunRecord, emit_csv, emit_plot_data,
                          load_runs_csv, run_experiment, summarize)
from wsnsim.cli import build_config, main, parse_config_file


def small_grid(**kwargs):
    base = SimConfig(max_rounds=150, e0_normal=0.01, e0_high=0.02)
    defaults = dict(node_counts=[10, 20], protocols=[ProtocolKind.LEACH],
                    seeds=[0, 1], base_config=base)
    defaults.update(kwargs)
    return ExperimentGrid(**defaults)


class TestExperimentGrid:
    def test_default_grid_size(self):
        assert len(ExperimentGrid().expand()) == 6 * 3 * 30

    def test_single_cell(self):
        grid = ExperimentGrid(node_counts=[50], protocols=[ProtocolKind.LEACH],
                              seeds=[7])
        cells = grid.expand()
        assert len(cells) == 1
        assert cells[0].seed == 7 and cells[0].n_nodes == 50

    def test_gateway_scaling(self):
        grid = ExperimentGrid()
        assert grid.gateways_for(100) == 4
        assert grid.gateways_for(500) == 20
        assert grid.gateways_for(50) == 4  # floor of 4

    def test_pinned_gateways(self):
        grid = ExperimentGrid(pin_gateways=True)
        assert grid.gateways_for(500) == 4


class TestRunExperiment:
    def test_grid_completeness(self):
        records = run_experiment(small_grid(), progress=None)
        keys = {(r.protocol, r.n_nodes, r.seed) for r in records}
        assert len(records) == 4
        assert keys == {("LEACH", 10, 0), ("LEACH", 10, 1),
                        ("LEACH", 20, 0), ("LEACH", 20, 1)}

    def test_parallel_matches_serial(self, tmp_path):
        serial = run_experiment(small_grid(), parallelism=1, progress=None)
        parallel = run_experiment(small_grid(), parallelism=2, progress=None)
        a = emit_csv(serial, tmp_path / "a")
        b = emit_csv(parallel, tmp_path / "b")
        assert a[0].read_bytes() == b[0].read_bytes()
        assert a[1].read_bytes() == b[1].read_bytes()


class TestEmitCsv:
    def test_single_run_has_two_lines(self, tmp_path):
        grid = small_grid(node_counts=[10], seeds=[0])
        records = run_experiment(grid, progress=None)
        runs_path, _ = emit_csv(records, tmp_path)
        lines = runs_path.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("protocol,n_nodes,n_gateways,seed,fnd")

    def test_undefined_metric_is_empty_field(self, tmp_path):
        rec = RunRecord(protocol="LEACH", n_nodes=10, n_gateways=0, seed=0,
                        fnd=None, hnd=None, lnd=None, rounds_executed=5,
                        total_energy_spent=0.25, series=[])
        runs_path, _ = emit_csv([rec], tmp_path)
        row = runs_path.read_text().splitlines()[1]
        assert row == "LEACH,10,0,0,,,,5,0.25"

    def test_reemit_is_byte_identical(self, tmp_path):
        records = run_experiment(small_grid(), progress=None)
        a = emit_csv(records, tmp_path / "a")
        b = emit_csv(records, tmp_path / "b")
        assert a[0].read_bytes() == b[0].read_bytes()
        assert a[1].read_bytes() == b[1].read_bytes()

    def test_round_trip_preserves_summary(self, tmp_path):
        records = run_experiment(small_grid(), progress=None)
        runs_path, _ = emit_csv(records, tmp_path)
        reloaded = load_runs_csv(runs_path)
        assert summarize(reloaded) == summarize(records)


class TestEmitPlotData:
    def test_file_count(self, tmp_path):
        grid = small_grid(node_counts=[10],
                          protocols=list(ProtocolKind), seeds=[0])
        records = run_experiment(grid, progress=None)
        paths = emit_plot_data(records, tmp_path)
        names = sorted(p.name for p in paths)
        assert names == ["alive_gateway_n10.dat", "alive_leach_n10.dat",
                         "alive_sep_n10.dat", "fnd_vs_n.dat"]

    def test_mean_of_constant_series_is_constant(self, tmp_path):
        base = SimConfig(max_rounds=5, e0_normal=1e9, e0_high=1e9)
        grid = small_grid(node_counts=[10], seeds=[0, 1, 2], base_config=base)
        records = run_experiment(grid, progress=None)
        paths = emit_plot_data(records, tmp_path)
        curve = [p for p in paths if p.name == "alive_leach_n10.dat"][0]
        rows = curve.read_text().splitlines()[1:]
        assert all(row.split()[1] == "14.0" for row in rows)  # 10 + 4 advanced

    def test_comparison_row_matches_summary(self, tmp_path):
        records = run_experiment(small_grid(node_counts=[10]), progress=None)
        summary = summarize(records)
        paths = emit_plot_data(records, tmp_path)
        fnd_file = [p for p in paths if p.name == "fnd_vs_n.dat"][0]
        row = fnd_file.read_text().splitlines()[1].split()
        assert float(row[1]) == summary.per_cell[("LEACH", 10)]["fnd"].mean


class TestSummarize:
    def rec(self, seed, fnd):
        return RunRecord(protocol="LEACH", n_nodes=10, n_gateways=0, seed=seed,
                         fnd=fnd, hnd=None, lnd=None, rounds_executed=10,
                         total_energy_spent=0.1)

    def test_single_seed_degenerate_stats(self):
        summary = summarize([self.rec(0, 100)])
        s = summary.per_cell[("LEACH", 10)]["fnd"]
        assert s.mean == s.min == s.max == 100
        assert s.stddev == 0.0

    def test_two_seed_hand_arithmetic(self):
        summary = summarize([self.rec(0, 100), self.rec(1, 200)])
        s = summary.per_cell[("LEACH", 10)]["fnd"]
        assert s.mean == 150
        assert s.stddev == pytest.approx(70.71067811865476, rel=1e-12)

    def test_all_undefined_reports_counts(self):
        summary = summarize([self.rec(0, None), self.rec(1, None)])
        s = summary.per_cell[("LEACH", 10)]["fnd"]
        assert s.n_defined == 0 and s.n_undefined == 2
        assert math.isnan(s.mean)

    def test_empty_results_rejected(self):
        with pytest.raises(InvalidParameterError):
            summarize([])


class TestConfigParsing:
    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("# nothing here\n\n")
        config = build_config(parse_config_file(path))
        assert config.n_nodes == 100 and config.n_gateways == 4
        assert config.e0_normal == 0.5 and config.e0_high == 1.0
        assert config.max_rounds == 1000

    def test_values_parsed(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("n_nodes = 50\nprotocol = sep\nsink = 0,0\nseed=9\n")
        config = build_config(parse_config_file(path))
        assert config.n_nodes == 50
        assert config.protocol is ProtocolKind.SEP
        assert config.sink == (0.0, 0.0)
        assert config.seed == 9

    def test_unknown_key_names_key_and_line(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("n_nodes = 50\nbogus_key = 1\n")
        with pytest.raises(InvalidParameterError, match=r"2: unknown key 'bogus_key'"):
            parse_config_file(path)

    def test_out_of_range_value_names_field(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("p_select = 1.5\n")
        with pytest.raises(InvalidParameterError, match="p_select"):
            build_config(parse_config_file(path))

    def test_flag_overrides_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("n_nodes = 50\nseed = 1\n")
        config = build_config(parse_config_file(path), n_nodes=75)
        assert config.n_nodes == 75
        assert config.seed == 1


class TestCli:
    def test_simulate_exit_zero(self, capsys):
        assert main(["simulate", "--nodes", "10", "--gateways", "0",
                     "--rounds", "5", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        assert "rounds executed: 5" in out

    def test_config_error_exit_one(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("p_select = 1.5\n")
        assert main(["simulate", "--config", str(path)]) == 1
        assert "p_select" in capsys.readouterr().err

    def test_experiment_writes_outputs(self, tmp_path, capsys):
        out_dir = tmp_path / "results"
        code = main(["experiment", "--node-counts", "10", "--protocols", "LEACH",
                     "--seeds", "2", "--rounds", "20", "--gateways", "2",
                     "--out-dir", str(out_dir)])
        assert code == 0
        assert (out_dir / "runs.csv").exists()
        assert (out_dir / "series.csv").exists()
        assert (out_dir / "fnd_vs_n.dat").exists()

    def test_summarize_from_csv(self, tmp_path, capsys):
        out_dir = tmp_path / "results"
        main(["experiment", "--node-counts", "10", "--protocols", "LEACH",
              "--seeds", "2", "--rounds", "20", "--gateways", "2",
              "--out-dir", str(out_dir)])
        capsys.readouterr()
        assert main(["summarize", "--runs", str(out_dir / "runs.csv")]) == 0
        assert "LEACH" in capsys.readouterr().out

    def test_missing_runs_csv_exit_one(self, tmp_path, capsys):
        assert main(["summarize", "--runs", str(tmp_path / "nope.csv")]) == 1
