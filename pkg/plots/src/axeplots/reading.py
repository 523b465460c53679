"""Readers for the report CSV schemas (metrics, histograms, paths).

This package renders from files only; nothing is recomputed. Headers are
validated exactly so schema drift fails loudly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path


class FigureInputError(ValueError):
    """Missing or malformed figure input (bad schema, unknown metric/scenario/asset)."""


METRICS_HEADER = ["epsilon", "T", "B", "scenario", "metric", "lag", "mean", "stderr", "n_paths"]
HISTOGRAMS_HEADER = ["epsilon", "T", "B", "scenario", "metric", "lag", "decile", "count"]
PATHS_HEADER = [
    "path", "asset", "date", "a_pre", "a_pub", "a_hit", "a_post",
    "client", "pnl", "over_axe_qty", "over_axe_cost",
]


@dataclass(frozen=True)
class MetricRow:
    epsilon: float
    horizon: int
    bucket: int
    scenario: str
    metric: str
    lag: int
    mean: float
    stderr: float
    n_paths: int


@dataclass(frozen=True)
class HistogramBin:
    epsilon: float
    horizon: int
    bucket: int
    scenario: str
    metric: str
    lag: int
    decile: int
    count: int


@dataclass(frozen=True)
class PathPoint:
    path: int
    asset: str
    date: str
    a_pre: int
    a_pub: int
    a_hit: int
    a_post: int
    client: int


def _rows(path, header: list[str]):
    path = Path(path)
    if not path.exists():
        raise FigureInputError(f"input file not found: {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        first = next(reader, None)
        if first != header:
            raise FigureInputError(f"{path}: expected header {','.join(header)!r}")
        yield from (row for row in reader if row)


def read_metrics(path) -> list[MetricRow]:
    return [
        MetricRow(float(r[0]), int(r[1]), int(r[2]), r[3], r[4], int(r[5]), float(r[6]), float(r[7]), int(r[8]))
        for r in _rows(path, METRICS_HEADER)
    ]


def read_histograms(path) -> list[HistogramBin]:
    return [
        HistogramBin(float(r[0]), int(r[1]), int(r[2]), r[3], r[4], int(r[5]), int(r[6]), int(r[7]))
        for r in _rows(path, HISTOGRAMS_HEADER)
    ]


def read_paths(path) -> list[PathPoint]:
    return [
        PathPoint(int(r[0]), r[1], r[2], int(r[3]), int(r[4]), int(r[5]), int(r[6]), int(r[7]))
        for r in _rows(path, PATHS_HEADER)
    ]
