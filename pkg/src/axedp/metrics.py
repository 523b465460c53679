"""Leakage, over-axe and P&L-difference estimators over simulated paths.

All aggregation is pure and reduction order is fixed, so reports are
deterministic functions of their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .finance import MarketQuote, over_axe_quantity

DEFAULT_LEAK_LAGS = (1, 5, 10)


@dataclass(frozen=True)
class LeakConfig:
    """Time lags (in days) at which direction leakage is evaluated."""

    lags: tuple[int, ...] = DEFAULT_LEAK_LAGS

    def __post_init__(self) -> None:
        if not self.lags or any(lag < 1 for lag in self.lags):
            raise InvalidParameterError(f"lags must be positive integers, got {self.lags}")


class MeanWithError(NamedTuple):
    mean: float
    stderr: float


def leakage_probability(client_positions, published, lag: int, include_idle_days: bool = False) -> float:
    """Probability that the published axe's direction of change betrays the client's.

    Over all days t with a nonzero client move p(t) - p(t-lag), counts the
    fraction where the published axe moved the opposite way (a client buying
    consumes the axe, so opposite signs mean the direction is readable).
    Days without a client move carry no direction to guess; by default they
    are excluded from the denominator (`include_idle_days` keeps them, never
    counting as leaks). A flat published axe never counts as a leak. When the
    denominator is empty the probability is 0 by convention.
    """
    positions = np.asarray(client_positions, dtype=np.float64)
    axe = np.asarray(published, dtype=np.float64)
    if positions.shape != axe.shape or positions.ndim != 1:
        raise InvalidInputError("client and published series must be 1-d and aligned")
    if not (1 <= lag < positions.size):
        raise InvalidParameterError(f"lag must satisfy 1 <= lag < series length, got {lag}")
    client_move = positions[lag:] - positions[:-lag]
    axe_move = axe[lag:] - axe[:-lag]
    counted = np.ones_like(client_move, dtype=bool) if include_idle_days else client_move != 0
    if not np.any(counted):
        return 0.0
    leaked = np.sign(client_move[counted]) * np.sign(axe_move[counted]) < 0
    return float(np.mean(leaked))


def over_axe_frequency(published, true_axe, quotes) -> float:
    """Fraction of days on which the published axe leaves the profitable interval.

    `quotes` is either one MarketQuote applied to every day or a sequence
    aligned with the series.
    """
    published = np.asarray(published, dtype=np.float64)
    true_axe = np.asarray(true_axe, dtype=np.float64)
    if published.shape != true_axe.shape or published.ndim != 1:
        raise InvalidInputError("published and true series must be 1-d and aligned")
    if isinstance(quotes, MarketQuote):
        quotes = [quotes] * published.size
    if len(quotes) != published.size:
        raise InvalidInputError("quotes must align with the series")
    violations = [
        float(over_axe_quantity(pub, true, quote)) > 0.0
        for pub, true, quote in zip(published, true_axe, quotes)
    ]
    return float(np.mean(violations))


def pnl_difference(strategy_a_pnl, strategy_b_pnl) -> MeanWithError:
    """Mean of (a - b) with its Monte Carlo standard error.

    Inputs are aligned samples of the same scenario set: per-day series, or
    per-path means when the pairing is across paths (common random numbers).
    """
    a = np.asarray(strategy_a_pnl, dtype=np.float64)
    b = np.asarray(strategy_b_pnl, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise InvalidInputError("P&L series must be non-empty, 1-d and aligned")
    diffs = a - b
    return MeanWithError(mean=float(diffs.mean()), stderr=mean_stderr(diffs))


def mean_stderr(samples) -> float:
    """Standard error of the sample mean (0 for a single sample)."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size < 2:
        return 0.0
    return float(samples.std(ddof=1) / np.sqrt(samples.size))


def decile_histogram(samples) -> np.ndarray:
    """Counts of probability samples per decile bin [0, 0.1), ..., [0.9, 1.0].

    The top bin is closed so a sample of exactly 1.0 lands in it.
    """
    values = np.asarray(samples, dtype=np.float64)
    if values.size == 0:
        raise InvalidInputError("decile histogram needs at least one sample")
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise InvalidInputError("samples must be probabilities in [0, 1]")
    bins = np.minimum((values * 10).astype(np.int64), 9)
    return np.bincount(bins, minlength=10).astype(np.int64)


# ---------------------------------------------------------------------------
# report containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricRow:
    """One aggregated statistic at one parameter point and scenario.

    `lag` is 0 for metrics without a time lag. `samples` keeps the per-path
    values behind the aggregate; histograms are derived from them for
    probability-valued metrics.
    """

    epsilon: float
    horizon: int
    bucket: int
    scenario: str
    metric: str
    lag: int
    mean: float
    stderr: float
    n_paths: int
    samples: np.ndarray | None = None


@dataclass(frozen=True)
class HistogramRow:
    epsilon: float
    horizon: int
    bucket: int
    scenario: str
    metric: str
    lag: int
    counts: tuple[int, ...]


@dataclass(frozen=True)
class PathRow:
    """One simulated asset-day on one path (written to paths.csv on request)."""

    path: int
    asset: str
    date: str
    a_pre: int
    a_pub: int
    a_hit: int
    a_post: int
    client: int
    pnl: float
    over_axe_qty: float
    over_axe_cost: float


@dataclass
class MetricsReport:
    """Aggregated simulation output: metric rows, decile histograms, optional path records."""

    rows: list[MetricRow] = field(default_factory=list)
    histograms: list[HistogramRow] = field(default_factory=list)
    paths: list[PathRow] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def add_metric(
        self,
        *,
        epsilon: float,
        horizon: int,
        bucket: int,
        scenario: str,
        metric: str,
        samples,
        lag: int = 0,
        histogram: bool = False,
    ) -> MetricRow:
        """Aggregate per-path samples into a row (and a decile histogram for probabilities)."""
        values = np.asarray(samples, dtype=np.float64)
        row = MetricRow(
            epsilon=epsilon,
            horizon=horizon,
            bucket=bucket,
            scenario=scenario,
            metric=metric,
            lag=lag,
            mean=float(values.mean()),
            stderr=mean_stderr(values),
            n_paths=values.size,
            samples=values,
        )
        self.rows.append(row)
        if histogram:
            self.histograms.append(
                HistogramRow(
                    epsilon=epsilon,
                    horizon=horizon,
                    bucket=bucket,
                    scenario=scenario,
                    metric=metric,
                    lag=lag,
                    counts=tuple(int(c) for c in decile_histogram(values)),
                )
            )
        return row

    def find(self, *, scenario: str, metric: str, lag: int = 0) -> list[MetricRow]:
        """Rows matching (scenario, metric, lag), in insertion order."""
        return [r for r in self.rows if r.scenario == scenario and r.metric == metric and r.lag == lag]
