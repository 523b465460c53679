import csv

import pytest

from axeplots.cli import main
from axeplots.figures import plot_lp_histogram, plot_metric_vs_epsilon, plot_scenario_fan
from axeplots.reading import FigureInputError, read_histograms

SCENARIOS = "nonobf_excl,obf_incl,obf_excl"


class TestMetricVsEpsilon:
    def test_renders_sweep_metric(self, sweep_dir, tmp_path):
        out = tmp_path / "pnl.svg"
        result = plot_metric_vs_epsilon(sweep_dir / "metrics.csv", "pnl_diff_vs_true", output=out)
        assert out.exists() and out.stat().st_size > 0
        assert result.line_count == 1  # single (T, B) pair in the grid

    def test_lagged_metric_series(self, sweep_dir, tmp_path):
        out = tmp_path / "lp.svg"
        result = plot_metric_vs_epsilon(
            sweep_dir / "metrics.csv", "lp_diff", lag=5, scenario="incl_minus_excl", output=out
        )
        assert result.line_count == 1

    def test_refuses_single_budget_point(self, report_dir, tmp_path):
        # the plain simulate report has one epsilon only
        with pytest.raises(FigureInputError, match="single budget"):
            plot_metric_vs_epsilon(report_dir / "metrics.csv", "pnl", output=tmp_path / "x.svg")

    def test_missing_metric_exits_2(self, sweep_dir, tmp_path, capsys):
        code = main([
            "metric-vs-epsilon", "--metrics", str(sweep_dir / "metrics.csv"),
            "--metric", "no_such_metric", "--out", str(tmp_path / "x.svg"),
        ])
        assert code == 2
        assert "no rows" in capsys.readouterr().err

    def test_rerun_byte_identical(self, sweep_dir, tmp_path):
        args = [
            "metric-vs-epsilon", "--metrics", str(sweep_dir / "metrics.csv"),
            "--metric", "pnl_diff_vs_true",
        ]
        assert main(args + ["--out", str(tmp_path / "a.svg")]) == 0
        assert main(args + ["--out", str(tmp_path / "b.svg")]) == 0
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


class TestLpHistogram:
    def test_renders_three_scenarios(self, report_dir, tmp_path):
        out = tmp_path / "hist.svg"
        result = plot_lp_histogram(
            report_dir / "histograms.csv", SCENARIOS.split(","), lag=5, output=out
        )
        assert out.exists()
        assert result.bar_groups == 3

    def test_bin_sums_equal_path_count(self, report_dir):
        bins = read_histograms(report_dir / "histograms.csv")
        with open(report_dir / "metrics.csv", newline="") as handle:
            n_paths = {int(row["n_paths"]) for row in csv.DictReader(handle)}
        assert n_paths == {40}
        per_hist = {}
        for entry in bins:
            key = (entry.scenario, entry.metric, entry.lag)
            per_hist[key] = per_hist.get(key, 0) + entry.count
        assert per_hist  # histograms exist
        assert set(per_hist.values()) == {40}

    def test_unknown_scenario_exits_2(self, report_dir, tmp_path, capsys):
        code = main([
            "lp-histogram", "--histograms", str(report_dir / "histograms.csv"),
            "--scenarios", "obf_incl,bogus", "--lag", "5", "--out", str(tmp_path / "x.svg"),
        ])
        assert code == 2
        assert "bogus" in capsys.readouterr().err

    def test_requires_single_lag(self, report_dir, tmp_path):
        with pytest.raises(FigureInputError, match="multiple lags"):
            plot_lp_histogram(report_dir / "histograms.csv", ["obf_incl"], output=tmp_path / "x.svg")

    def test_cli_round_trip(self, report_dir, tmp_path):
        code = main([
            "lp-histogram", "--histograms", str(report_dir / "histograms.csv"),
            "--scenarios", SCENARIOS, "--lag", "1", "--out", str(tmp_path / "h.svg"),
        ])
        assert code == 0
        assert (tmp_path / "h.svg").exists()


class TestScenarioFan:
    def test_line_count_is_two_plus_paths(self, report_dir, tmp_path):
        result = plot_scenario_fan(
            report_dir / "paths.csv", "SYNTH", max_paths=3, output=tmp_path / "fan.svg"
        )
        assert result.line_count == 5
        assert (tmp_path / "fan.svg").exists()

    def test_single_path_renders_three_lines(self, report_dir, tmp_path):
        result = plot_scenario_fan(
            report_dir / "paths.csv", "SYNTH", max_paths=1, output=tmp_path / "fan1.svg"
        )
        assert result.line_count == 3

    def test_absent_asset_exits_2(self, report_dir, tmp_path, capsys):
        code = main([
            "scenario-fan", "--paths", str(report_dir / "paths.csv"),
            "--asset", "NOPE", "--out", str(tmp_path / "x.svg"),
        ])
        assert code == 2
        assert "NOPE" in capsys.readouterr().err

    def test_png_output(self, report_dir, tmp_path):
        result = plot_scenario_fan(report_dir / "paths.csv", "SYNTH", output=tmp_path / "fan.png")
        assert result.output.suffix == ".png"
        assert result.output.stat().st_size > 0


class TestMissingInputs:
    def test_missing_file_exits_2(self, tmp_path, capsys):
        code = main([
            "metric-vs-epsilon", "--metrics", str(tmp_path / "absent.csv"),
            "--metric", "pnl", "--out", str(tmp_path / "x.svg"),
        ])
        assert code == 2
        assert "not found" in capsys.readouterr().err

    def test_wrong_schema_rejected(self, tmp_path):
        bad = tmp_path / "metrics.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(FigureInputError, match="header"):
            plot_metric_vs_epsilon(bad, "pnl", output=tmp_path / "x.svg")
