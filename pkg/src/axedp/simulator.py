"""Monte Carlo engine for the daily publish-and-trade loop.

Every simulated day, per asset: the true start-of-day axe is the historical
axe minus the executed trades still on the book; an obfuscation strategy maps
it to a published axe; clients hit a constant fraction of the published
quantity; the executed amount rolls the book forward and accrues marginal
carry P&L. Paths run as vector lanes in lockstep, with keyed noise streams
per asset, so a full report is a pure function of (scenario, config, seed).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field, replace

import numpy as np

from .dp_core import ClipBounds, RngHandle, clip
from .errors import InvalidInputError, InvalidParameterError
from .finance import MarketQuote, marginal_axe_pnl, over_axe_cost, over_axe_quantity
from .mechanisms import MECHANISMS, DpParams, create_state, round_shares, step
from .metrics import (
    DEFAULT_LEAK_LAGS,
    MetricsReport,
    PathRow,
    leakage_probability,
)

STRATEGIES = ("none",) + MECHANISMS

# Synthetic market constants used when no market data is supplied (per-day rates).
DEFAULT_QUOTE = MarketQuote(price=10.0, funding_rate=0.02, borrow_rate=0.01)

# Public per-asset volume cap assumed for synthetic scenarios, in shares/day.
SYNTH_ADTV = 25_000

BUSINESS_DAYS_PER_MONTH = 22


@dataclass(frozen=True)
class SimConfig:
    """Simulation knobs. Hit ratio and holding period default to desk-calibrated values."""

    dp: DpParams
    strategy: str = "window"
    hit_ratio: float = 0.05
    holding_period: int = 10
    n_paths: int = 1000
    master_seed: int = 0
    leak_lags: tuple[int, ...] = DEFAULT_LEAK_LAGS
    record_paths: int = 0  # how many lanes to keep as per-day records

    def __post_init__(self) -> None:
        if not 0.0 <= self.hit_ratio <= 1.0:
            raise InvalidParameterError(f"hit_ratio must lie in [0, 1], got {self.hit_ratio}")
        if self.holding_period < 1:
            raise InvalidParameterError(f"holding_period must be >= 1, got {self.holding_period}")
        if self.n_paths < 1:
            raise InvalidParameterError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.strategy not in STRATEGIES:
            raise InvalidParameterError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if any(lag < 1 for lag in self.leak_lags):
            raise InvalidParameterError(f"leak lags must be positive, got {self.leak_lags}")
        if self.record_paths < 0:
            raise InvalidParameterError("record_paths must be >= 0")

    def echo(self) -> dict:
        """Flat dict of the run configuration, for report provenance."""
        return {
            "strategy": self.strategy,
            "epsilon": self.dp.epsilon,
            "horizon": self.dp.horizon,
            "bucket": self.dp.bucket,
            "clip_lo": self.dp.clip.lo,
            "clip_hi": self.dp.clip.hi,
            "sensitivity_mode": self.dp.sensitivity_mode,
            "zero_noise": self.dp.zero_noise,
            "hit_ratio": self.hit_ratio,
            "holding_period": self.holding_period,
            "n_paths": self.n_paths,
            "master_seed": self.master_seed,
            "leak_lags": list(self.leak_lags),
        }


@dataclass(frozen=True)
class QuoteSeries:
    """Per-day market quotes for one asset."""

    price: np.ndarray
    funding_rate: np.ndarray
    borrow_rate: np.ndarray

    def __len__(self) -> int:
        return len(self.price)

    def day(self, t: int) -> MarketQuote:
        return MarketQuote(float(self.price[t]), float(self.funding_rate[t]), float(self.borrow_rate[t]))

    @classmethod
    def constant(cls, quote: MarketQuote, days: int) -> "QuoteSeries":
        return cls(
            price=np.full(days, quote.price),
            funding_rate=np.full(days, quote.funding_rate),
            borrow_rate=np.full(days, quote.borrow_rate),
        )


@dataclass(frozen=True)
class ScenarioSpec:
    """Input data of a simulation: historical axes, client positions, market quotes.

    All series share one business-day grid. ``include_client`` selects whether
    the client's positions stay inside the stream handed to the obfuscation
    strategy; the book (and hence P&L) always contains them.
    """

    dates: tuple[dt.date, ...]
    hist_axe: dict[str, np.ndarray]
    quotes: dict[str, QuoteSeries]
    client_positions: dict[str, np.ndarray] | None = None
    include_client: bool = True
    adtv: dict[str, int] | None = None  # per-asset public volume caps overriding the base clip

    def __post_init__(self) -> None:
        days = len(self.dates)
        if days == 0 or not self.hist_axe:
            raise InvalidInputError("scenario needs at least one day and one asset")
        for asset, series in self.hist_axe.items():
            if len(series) != days:
                raise InvalidInputError(f"axe series for {asset} has {len(series)} days, grid has {days}")
            if asset not in self.quotes or len(self.quotes[asset]) != days:
                raise InvalidInputError(f"quotes for {asset} missing or misaligned")
        if self.client_positions is not None:
            for asset, series in self.client_positions.items():
                if asset not in self.hist_axe or len(series) != days:
                    raise InvalidInputError(f"client series for {asset} missing from axe data or misaligned")
        if self.adtv is not None and any(volume <= 0 for volume in self.adtv.values()):
            raise InvalidParameterError("ADTV volumes must be positive")

    @property
    def days(self) -> int:
        return len(self.dates)

    @property
    def assets(self) -> list[str]:
        return sorted(self.hist_axe)


def business_days(start: dt.date, count: int) -> tuple[dt.date, ...]:
    """`count` consecutive weekdays beginning at the first weekday >= start."""
    out: list[dt.date] = []
    day = start
    while len(out) < count:
        if day.weekday() < 5:
            out.append(day)
        day += dt.timedelta(days=1)
    return tuple(out)


def synth_concentrated_scenario(
    days: int = 2 * BUSINESS_DAYS_PER_MONTH,
    start_position: int = 100_000,
    ramp_factor: float = 10.0,
    asset: str = "SYNTH",
    start_date: dt.date = dt.date(2025, 1, 6),
) -> ScenarioSpec:
    """Single asset whose axe is driven entirely by one client ramping up.

    The client's position grows linearly from start_position to
    ramp_factor * start_position over `days` (defaults: tenfold over two
    months of business days); the historical axe is its negation. Market
    quotes are the synthetic constants; nothing else is invented.
    """
    if days < 2:
        raise InvalidParameterError(f"need at least 2 days, got {days}")
    if ramp_factor <= 0:
        raise InvalidParameterError(f"ramp_factor must be positive, got {ramp_factor}")
    positions = round_shares(np.linspace(start_position, ramp_factor * start_position, days))
    return ScenarioSpec(
        dates=business_days(start_date, days),
        hist_axe={asset: -positions},
        quotes={asset: QuoteSeries.constant(DEFAULT_QUOTE, days)},
        client_positions={asset: positions},
        include_client=True,
    )


# ---------------------------------------------------------------------------
# path engine
# ---------------------------------------------------------------------------


@dataclass
class PathFrame:
    """Per-day records for one asset, lanes stacked on axis 0 (shape (n_paths, days))."""

    pre: np.ndarray
    pub: np.ndarray
    hit: np.ndarray
    post: np.ndarray
    pnl: np.ndarray
    over_qty: np.ndarray
    over_cost: np.ndarray


def _validate_hits(hit: np.ndarray, pub: np.ndarray) -> None:
    # Boundary check on executed trades: sign matches the offer, magnitude never exceeds it.
    if np.any(np.abs(hit) > np.abs(pub)) or np.any(np.sign(hit) * np.sign(pub) < 0):
        raise InvalidInputError("executed hit violates the published-axe constraints")


def _simulate_asset(
    hist: np.ndarray,
    offset: np.ndarray,
    quotes: QuoteSeries,
    dp: DpParams,
    config: SimConfig,
    handle: RngHandle,
    n_paths: int,
) -> PathFrame:
    """Run `n_paths` lanes of the daily loop for one asset.

    `offset` is added to the book's true axe to form the stream the
    obfuscation strategy sees (zero when the client stays included).
    """
    days = len(hist)
    horizon = dp.horizon
    hold = config.holding_period
    gen = handle.generator()

    pre = np.zeros((n_paths, days), dtype=np.int64)
    pub = np.zeros((n_paths, days), dtype=np.int64)
    hit = np.zeros((n_paths, days), dtype=np.int64)
    post = np.zeros((n_paths, days), dtype=np.int64)
    pnl = np.zeros((n_paths, days))
    over_qty = np.zeros((n_paths, days))
    over_cost = np.zeros((n_paths, days))

    state = None
    mech_prev = None
    for t in range(days):
        lo = max(0, t - hold)
        pre[:, t] = hist[t] - hit[:, lo:t].sum(axis=1)
        mech_level = pre[:, t] + offset[t]

        if config.strategy == "none":
            pub[:, t] = mech_level
        elif t == 0:
            # Day-0 level is the anchor, published unperturbed.
            state = create_state(dp, config.strategy, int(mech_level[0]), n_paths)
            pub[:, t] = mech_level
        else:
            if state.t >= horizon:
                state.reset(pub[:, t - 1])
            delta = clip(mech_level - mech_prev, dp.clip)
            pub[:, t] = step(state, np.maximum(delta, 0), np.minimum(delta, 0), gen)
        mech_prev = mech_level

        executed = round_shares(config.hit_ratio * pub[:, t])
        executed = np.clip(executed, -np.abs(pub[:, t]), np.abs(pub[:, t]))
        _validate_hits(executed, pub[:, t])
        hit[:, t] = executed
        post[:, t] = pre[:, t] - executed

        quote = quotes.day(t)
        pnl[:, t] = marginal_axe_pnl(executed, pre[:, t], quote)
        over_qty[:, t] = over_axe_quantity(pub[:, t], pre[:, t], quote)
        over_cost[:, t] = over_axe_cost(pub[:, t], pre[:, t], quote)

    return PathFrame(pre=pre, pub=pub, hit=hit, post=post, pnl=pnl, over_qty=over_qty, over_cost=over_cost)


def _mechanism_offsets(scenario: ScenarioSpec) -> dict[str, np.ndarray]:
    """Per-asset series added to the book before obfuscation (removes the client when excluded)."""
    zero = {asset: np.zeros(scenario.days, dtype=np.int64) for asset in scenario.assets}
    if scenario.include_client:
        return zero
    if scenario.client_positions is None:
        raise InvalidInputError("cannot exclude the client: scenario has no client positions")
    out = dict(zero)
    for asset, positions in scenario.client_positions.items():
        out[asset] = np.asarray(positions, dtype=np.int64)
    return out


def _resolve_dp(scenario: ScenarioSpec, asset: str, base: DpParams) -> DpParams:
    """Per-asset params: clip bounds come from the scenario's ADTV table when present."""
    if scenario.adtv and asset in scenario.adtv:
        volume = scenario.adtv[asset]
        return replace(base, clip=ClipBounds(-volume, volume))
    return base


def _simulate_scenario(scenario: ScenarioSpec, config: SimConfig, n_paths: int, handle: RngHandle) -> dict[str, PathFrame]:
    if config.strategy != "none" and not config.dp.zero_noise and handle is None:
        raise InvalidParameterError("an RngHandle is required for noisy strategies")
    offsets = _mechanism_offsets(scenario)
    frames: dict[str, PathFrame] = {}
    for index, asset in enumerate(scenario.assets):
        frames[asset] = _simulate_asset(
            np.asarray(scenario.hist_axe[asset], dtype=np.int64),
            offsets[asset],
            scenario.quotes[asset],
            _resolve_dp(scenario, asset, config.dp),
            config,
            handle.substream(index),
            n_paths,
        )
    return frames


def run_path(scenario: ScenarioSpec, config: SimConfig, path_rng: RngHandle) -> dict[str, PathFrame]:
    """Simulate a single path; arrays in the returned frames have shape (1, days)."""
    return _simulate_scenario(scenario, config, 1, path_rng)


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------


@dataclass
class _Samples:
    """Per-path reductions of one simulated variant."""

    pnl: np.ndarray  # mean daily marginal P&L per path (per asset-day)
    lp: dict[int, np.ndarray]  # per lag: mean leak probability across assets, per path
    oa_freq: np.ndarray
    oa_cost: np.ndarray
    frames: dict[str, PathFrame]


def _collect_samples(scenario: ScenarioSpec, config: SimConfig, n_paths: int) -> _Samples:
    frames = _simulate_scenario(scenario, config, n_paths, RngHandle(config.master_seed))
    stacked_pnl = np.stack([f.pnl for f in frames.values()])  # (assets, n, days)
    stacked_oq = np.stack([f.over_qty for f in frames.values()])
    stacked_oc = np.stack([f.over_cost for f in frames.values()])

    lp: dict[int, np.ndarray] = {}
    if scenario.client_positions is not None:
        for lag in config.leak_lags:
            if lag >= scenario.days:
                raise InvalidParameterError(f"leak lag {lag} >= scenario length {scenario.days}")
            per_asset = []
            for asset in scenario.assets:
                if asset not in scenario.client_positions:
                    continue
                positions = scenario.client_positions[asset]
                pub = frames[asset].pub
                per_asset.append(
                    [leakage_probability(positions, pub[lane], lag) for lane in range(n_paths)]
                )
            lp[lag] = np.asarray(per_asset).mean(axis=0) if per_asset else np.zeros(n_paths)

    return _Samples(
        pnl=stacked_pnl.mean(axis=(0, 2)),
        lp=lp,
        oa_freq=(stacked_oq > 0).mean(axis=(0, 2)),
        oa_cost=stacked_oc.mean(axis=(0, 2)),
        frames=frames,
    )


def scenario_label(strategy: str, include_client: bool) -> str:
    return f"{'nonobf' if strategy == 'none' else 'obf'}_{'incl' if include_client else 'excl'}"


def _emit_rows(report: MetricsReport, dp: DpParams, label: str, samples: _Samples) -> None:
    tag = dict(epsilon=dp.epsilon, horizon=dp.horizon, bucket=dp.bucket, scenario=label)
    report.add_metric(**tag, metric="pnl", samples=samples.pnl)
    for lag, values in samples.lp.items():
        report.add_metric(**tag, metric="leak_probability", lag=lag, samples=values, histogram=True)
    report.add_metric(**tag, metric="over_axe_frequency", samples=samples.oa_freq, histogram=True)
    report.add_metric(**tag, metric="over_axe_cost", samples=samples.oa_cost)


def _emit_diff_rows(
    report: MetricsReport,
    dp: DpParams,
    label: str,
    lhs: _Samples,
    rhs: _Samples,
    *,
    pnl_metric: str = "pnl_diff",
) -> None:
    tag = dict(epsilon=dp.epsilon, horizon=dp.horizon, bucket=dp.bucket, scenario=label)
    report.add_metric(**tag, metric=pnl_metric, samples=lhs.pnl - rhs.pnl)
    for lag in lhs.lp:
        if lag in rhs.lp:
            report.add_metric(**tag, metric="lp_diff", lag=lag, samples=lhs.lp[lag] - rhs.lp[lag])
    report.add_metric(**tag, metric="over_axe_frequency_diff", samples=lhs.oa_freq - rhs.oa_freq)
    report.add_metric(**tag, metric="over_axe_cost_diff", samples=lhs.oa_cost - rhs.oa_cost)


def _record_paths(report: MetricsReport, scenario: ScenarioSpec, samples: _Samples, config: SimConfig) -> None:
    lanes = min(config.record_paths, config.n_paths)
    client = scenario.client_positions or {}
    for asset in scenario.assets:
        frame = samples.frames[asset]
        positions = client.get(asset, np.zeros(scenario.days, dtype=np.int64))
        for lane in range(lanes):
            for t, day in enumerate(scenario.dates):
                report.paths.append(
                    PathRow(
                        path=lane,
                        asset=asset,
                        date=day.isoformat(),
                        a_pre=int(frame.pre[lane, t]),
                        a_pub=int(frame.pub[lane, t]),
                        a_hit=int(frame.hit[lane, t]),
                        a_post=int(frame.post[lane, t]),
                        client=int(positions[t]),
                        pnl=float(frame.pnl[lane, t]),
                        over_axe_qty=float(frame.over_qty[lane, t]),
                        over_axe_cost=float(frame.over_cost[lane, t]),
                    )
                )


def run_monte_carlo(scenario: ScenarioSpec, config: SimConfig) -> MetricsReport:
    """Simulate `config.n_paths` paths and aggregate them into a MetricsReport."""
    samples = _collect_samples(scenario, config, config.n_paths)
    report = MetricsReport(config=config.echo())
    _emit_rows(report, config.dp, scenario_label(config.strategy, scenario.include_client), samples)
    _record_paths(report, scenario, samples, config)
    return report


def compare_with_without_client(scenario: ScenarioSpec, config: SimConfig) -> MetricsReport:
    """Paired comparison of publishing with vs. without the client's positions.

    Both variants run on shared noise streams (common random numbers), so the
    per-path differences have a smaller standard error than independent runs.
    Also emits the un-obfuscated client-excluded baseline for reference.
    """
    if scenario.client_positions is None:
        raise InvalidInputError("comparison requires client positions in the scenario")
    incl = _collect_samples(replace(scenario, include_client=True), config, config.n_paths)
    excl = _collect_samples(replace(scenario, include_client=False), config, config.n_paths)
    baseline_cfg = replace(config, strategy="none")
    nonobf_excl = _collect_samples(replace(scenario, include_client=False), baseline_cfg, config.n_paths)

    report = MetricsReport(config=config.echo())
    _emit_rows(report, config.dp, "obf_incl", incl)
    _emit_rows(report, config.dp, "obf_excl", excl)
    _emit_rows(report, config.dp, "nonobf_excl", nonobf_excl)
    _emit_diff_rows(report, config.dp, "incl_minus_excl", incl, excl)
    _record_paths(report, scenario, incl, config)
    return report


def sweep(scenario: ScenarioSpec, grid, config: SimConfig) -> MetricsReport:
    """Run the paired comparison for every parameter point of a grid.

    Every point reuses the same noise streams (rows are comparable), and each
    gets the diff of its obfuscated P&L against publishing the true axe.
    Per-day path records, when requested, come from the first grid point's
    client-included run (the records schema carries no parameter columns).
    """
    points = list(grid)
    if not points:
        raise InvalidParameterError("sweep grid must not be empty")

    baseline_cfg = replace(config, strategy="none")
    true_incl = _collect_samples(replace(scenario, include_client=True), baseline_cfg, config.n_paths)
    has_client = scenario.client_positions is not None
    if has_client:
        nonobf_excl = _collect_samples(replace(scenario, include_client=False), baseline_cfg, config.n_paths)

    report = MetricsReport(config={**config.echo(), "grid_points": len(points)})
    for index, dp_params in enumerate(points):
        point_cfg = replace(config, dp=dp_params)
        incl = _collect_samples(replace(scenario, include_client=True), point_cfg, config.n_paths)
        _emit_rows(report, dp_params, "obf_incl", incl)
        _emit_diff_rows(report, dp_params, "obf_minus_true", incl, true_incl, pnl_metric="pnl_diff_vs_true")
        if index == 0:
            _record_paths(report, scenario, incl, config)
        if has_client:
            excl = _collect_samples(replace(scenario, include_client=False), point_cfg, config.n_paths)
            _emit_rows(report, dp_params, "obf_excl", excl)
            _emit_rows(report, dp_params, "nonobf_excl", nonobf_excl)
            _emit_diff_rows(report, dp_params, "incl_minus_excl", incl, excl)
    return report


def epsilon_grid(epsilons, horizons, buckets, base: DpParams) -> list[DpParams]:
    """Cartesian product of parameter values, clip bounds and mode taken from `base`."""
    points = [
        replace(base, epsilon=float(eps), horizon=int(horizon), bucket=int(bucket))
        for eps in epsilons
        for horizon in horizons
        for bucket in buckets
    ]
    if not points:
        raise InvalidParameterError("grid has an empty dimension")
    return points
