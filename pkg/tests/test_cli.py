import csv
import json

import pytest

from axedp.cli import main

CONFIG = """\
[dp]
epsilon = 0.3
horizon = 30
bucket = 20

[adtv]
default = 25000

[sim]
hit_ratio = 0.05
holding_period = 10
n_paths = 8
leak_lags = 1,5
"""


@pytest.fixture
def run_cfg(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(CONFIG, encoding="utf-8")
    return path


@pytest.fixture
def scenario_dir(tmp_path):
    # default 44-day ramp: daily moves (~21k shares) stay inside the configured ADTV cap
    out = tmp_path / "scenario"
    assert main(["synth", "--days", "44", "--start", "100000", "--ramp", "10", "--out", str(out)]) == 0
    return out


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


class TestSynth:
    def test_default_days_write_both_files(self, tmp_path):
        out = tmp_path / "scn"
        assert main(["synth", "--out", str(out)]) == 0
        axe_rows = read_csv(out / "axe.csv")
        client_rows = read_csv(out / "client.csv")
        assert len(axe_rows) == 45  # header + 44 business days
        assert len(client_rows) == 45

    def test_unit_ramp_constant_series(self, tmp_path):
        out = tmp_path / "scn"
        assert main(["synth", "--ramp", "1", "--days", "10", "--out", str(out)]) == 0
        quantities = {row[2] for row in read_csv(out / "client.csv")[1:]}
        assert len(quantities) == 1

    def test_round_trips_through_loader(self, scenario_dir):
        from axedp.io import load_scenario

        _, filled = load_scenario(scenario_dir / "axe.csv", client_path=scenario_dir / "client.csv")
        assert filled == 0


class TestObfuscate:
    def test_deterministic_given_seed(self, tmp_path, run_cfg, scenario_dir):
        args = [
            "obfuscate", "--input", str(scenario_dir / "axe.csv"), "--config", str(run_cfg),
            "--mechanism", "window", "--seed", "7",
        ]
        assert main(args + ["--output", str(tmp_path / "a.csv")]) == 0
        assert main(args + ["--output", str(tmp_path / "b.csv")]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_zero_noise_reproduces_input(self, tmp_path, run_cfg, scenario_dir):
        out = tmp_path / "pub.csv"
        args = [
            "obfuscate", "--input", str(scenario_dir / "axe.csv"), "--config", str(run_cfg),
            "--mechanism", "binary", "--seed", "1", "--output", str(out), "--zero-noise",
        ]
        assert main(args) == 0
        assert read_csv(out) == read_csv(scenario_dir / "axe.csv")

    def test_missing_required_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["obfuscate", "--mechanism", "window"])
        assert excinfo.value.code == 2
        assert "usage" in capsys.readouterr().err

    def test_bad_config_path_exits_2(self, tmp_path, scenario_dir):
        code = main([
            "obfuscate", "--input", str(scenario_dir / "axe.csv"), "--config", str(tmp_path / "nope.cfg"),
            "--output", str(tmp_path / "x.csv"),
        ])
        assert code == 2


class TestSimulate:
    def test_single_path_report(self, tmp_path, run_cfg, scenario_dir):
        out = tmp_path / "report"
        code = main([
            "simulate", "--scenario", str(scenario_dir), "--config", str(run_cfg),
            "--paths", "1", "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        rows = read_csv(out / "metrics.csv")
        assert rows[0] == ["epsilon", "T", "B", "scenario", "metric", "lag", "mean", "stderr", "n_paths"]
        assert all(row[8] == "1" for row in rows[1:])

    def test_compare_client_emits_paired_rows(self, tmp_path, run_cfg, scenario_dir):
        out = tmp_path / "report"
        code = main([
            "simulate", "--scenario", str(scenario_dir), "--config", str(run_cfg),
            "--paths", "4", "--seed", "3", "--out", str(out), "--compare-client",
        ])
        assert code == 0
        scenarios = {row[3] for row in read_csv(out / "metrics.csv")[1:]}
        assert {"obf_incl", "obf_excl", "nonobf_excl", "incl_minus_excl"} <= scenarios

    def test_rerun_identical_reports(self, tmp_path, run_cfg, scenario_dir):
        base = [
            "simulate", "--scenario", str(scenario_dir), "--config", str(run_cfg),
            "--paths", "4", "--seed", "9",
        ]
        assert main(base + ["--out", str(tmp_path / "r1")]) == 0
        assert main(base + ["--out", str(tmp_path / "r2")]) == 0
        for name in ("metrics.csv", "histograms.csv", "summary.json"):
            assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()

    def test_write_paths_flag(self, tmp_path, run_cfg, scenario_dir):
        out = tmp_path / "report"
        code = main([
            "simulate", "--scenario", str(scenario_dir), "--config", str(run_cfg),
            "--paths", "2", "--seed", "3", "--out", str(out), "--write-paths", "1",
        ])
        assert code == 0
        assert (out / "paths.csv").exists()

    def test_summary_echoes_config(self, tmp_path, run_cfg, scenario_dir):
        out = tmp_path / "report"
        main([
            "simulate", "--scenario", str(scenario_dir), "--config", str(run_cfg),
            "--paths", "2", "--seed", "3", "--out", str(out),
        ])
        summary = json.loads((out / "summary.json").read_text())
        assert summary["config"]["n_paths"] == 2
        assert summary["config"]["master_seed"] == 3


class TestSweep:
    def test_grid_cardinality(self, tmp_path, run_cfg, scenario_dir):
        out = tmp_path / "report"
        code = main([
            "sweep", "--scenario", str(scenario_dir), "--config", str(run_cfg),
            "--grid", "eps=0.1,0.3,0.5,0.9;T=30;B=10,20", "--paths", "2", "--seed", "1",
            "--out", str(out),
        ])
        assert code == 0
        rows = read_csv(out / "metrics.csv")[1:]
        points = {(row[0], row[1], row[2]) for row in rows}
        assert len(points) == 8

    def test_default_grid_includes_production_point(self, tmp_path, run_cfg, scenario_dir):
        out = tmp_path / "report"
        code = main([
            "sweep", "--scenario", str(scenario_dir), "--config", str(run_cfg),
            "--paths", "2", "--seed", "1", "--out", str(out),
        ])
        assert code == 0
        points = {(row[0], row[1], row[2]) for row in read_csv(out / "metrics.csv")[1:]}
        assert ("0.3", "30", "20") in points

    def test_empty_dimension_exits_2(self, tmp_path, run_cfg, scenario_dir):
        code = main([
            "sweep", "--scenario", str(scenario_dir), "--config", str(run_cfg),
            "--grid", "eps=;T=30;B=20", "--out", str(tmp_path / "r"),
        ])
        assert code == 2

    def test_unknown_dimension_exits_2(self, tmp_path, run_cfg, scenario_dir):
        code = main([
            "sweep", "--scenario", str(scenario_dir), "--config", str(run_cfg),
            "--grid", "alpha=1", "--out", str(tmp_path / "r"),
        ])
        assert code == 2


class TestMetricsCommand:
    def test_leakage_from_csvs(self, tmp_path, run_cfg, scenario_dir, capsys):
        pub = tmp_path / "pub.csv"
        main([
            "obfuscate", "--input", str(scenario_dir / "axe.csv"), "--config", str(run_cfg),
            "--mechanism", "window", "--seed", "5", "--output", str(pub),
        ])
        capsys.readouterr()
        code = main([
            "metrics", "--published", str(pub), "--client", str(scenario_dir / "client.csv"),
            "--lags", "1,5",
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "lag=1 leak_probability=" in out
        assert "lag=5 leak_probability=" in out


class TestHelp:
    @pytest.mark.parametrize("command", ["obfuscate", "simulate", "sweep", "synth", "metrics"])
    def test_help_exits_zero(self, command, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main([command, "--help"])
        assert excinfo.value.code == 0
        assert "--" in capsys.readouterr().out
