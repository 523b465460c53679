"""Fixtures: real report CSVs produced by driving the axedp CLI as a subprocess.

The renderer consumes the primary package only through its published file
formats, so the fixtures are generated through its command-line interface.
"""

import subprocess
import sys

import pytest

RUN_CFG = """\
[dp]
epsilon = 0.3
horizon = 30
bucket = 20

[adtv]
default = 25000

[sim]
hit_ratio = 0.05
holding_period = 10
n_paths = 40
leak_lags = 1,5
"""


def run_axedp(*args) -> None:
    result = subprocess.run(
        [sys.executable, "-m", "axedp.cli", *map(str, args)],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("report_fixtures")
    scenario = base / "scenario"
    config = base / "run.cfg"
    config.write_text(RUN_CFG, encoding="utf-8")

    run_axedp("synth", "--days", "44", "--start", "100000", "--ramp", "10", "--out", scenario)
    run_axedp(
        "simulate", "--scenario", scenario, "--config", config,
        "--seed", "11", "--out", base / "report", "--compare-client", "--write-paths", "4",
    )
    run_axedp(
        "sweep", "--scenario", scenario, "--config", config,
        "--grid", "eps=0.1,0.3,0.5,0.9;T=30;B=20", "--paths", "12", "--seed", "11",
        "--out", base / "sweep",
    )
    return base


@pytest.fixture(scope="session")
def report_dir(fixture_dir):
    return fixture_dir / "report"


@pytest.fixture(scope="session")
def sweep_dir(fixture_dir):
    return fixture_dir / "sweep"
