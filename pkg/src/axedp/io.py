"""CSV ingestion, run-configuration files and report emission.

File formats (UTF-8, comma-separated, ``\\n`` line endings, exact headers):

* axe/client series: ``date,asset,quantity`` - ISO dates, integer shares.
* market data: ``date,asset,price,funding_rate,borrow_rate`` - rates per day.
* run config: INI-style sections ``[dp] [adtv] [sim] [scenario] [output]``.

Missing business days are forward-filled (positions persist) and counted;
clip bounds are never inferred from the data, only from the ``[adtv]`` table.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
from configparser import ConfigParser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dp_core import ClipBounds
from .errors import InvalidInputError, InvalidParameterError
from .mechanisms import SENSITIVITY_MODES, DpParams
from .metrics import MetricsReport
from .simulator import DEFAULT_QUOTE, DEFAULT_LEAK_LAGS, QuoteSeries, ScenarioSpec, SimConfig

AXE_HEADER = ["date", "asset", "quantity"]
MARKET_HEADER = ["date", "asset", "price", "funding_rate", "borrow_rate"]

METRICS_HEADER = ["epsilon", "T", "B", "scenario", "metric", "lag", "mean", "stderr", "n_paths"]
HISTOGRAMS_HEADER = ["epsilon", "T", "B", "scenario", "metric", "lag", "decile", "count"]
PATHS_HEADER = [
    "path", "asset", "date", "a_pre", "a_pub", "a_hit", "a_post",
    "client", "pnl", "over_axe_qty", "over_axe_cost",
]


def _fmt(value) -> str:
    """Shortest round-trip decimal for floats, plain text otherwise."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _next_business_day(day: dt.date) -> dt.date:
    day += dt.timedelta(days=1)
    while day.weekday() >= 5:
        day += dt.timedelta(days=1)
    return day


@dataclass
class SeriesTable:
    """Per-asset day-indexed integer series plus the forward-fill count."""

    series: dict[str, np.ndarray] = field(default_factory=dict)
    dates: dict[str, tuple[dt.date, ...]] = field(default_factory=dict)
    filled: int = 0


def _read_rows(path, header: list[str]):
    """Yield (line_number, row) after validating the exact header."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            first = next(reader)
        except StopIteration:
            raise InvalidInputError(f"{path}:1: empty file, expected header {','.join(header)}") from None
        if first != header:
            raise InvalidInputError(f"{path}:1: header must be exactly {','.join(header)!r}, got {','.join(first)!r}")
        for number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InvalidInputError(f"{path}:{number}: expected {len(header)} fields, got {len(row)}")
            yield number, row


def _parse_date(path, line: int, text: str) -> dt.date:
    try:
        day = dt.date.fromisoformat(text)
    except ValueError:
        raise InvalidInputError(f"{path}:{line}: bad ISO date {text!r}") from None
    if day.weekday() >= 5:
        raise InvalidInputError(f"{path}:{line}: {text} falls on a weekend; series are business-day indexed")
    return day


def _collect_by_asset(path, header, parse_payload):
    """Group rows per asset, enforcing unique keys and strictly increasing dates."""
    rows: dict[str, list[tuple[dt.date, tuple]]] = {}
    seen: set[tuple[str, dt.date]] = set()
    for line, row in _read_rows(path, header):
        day = _parse_date(path, line, row[0])
        asset = row[1].strip()
        if not asset:
            raise InvalidInputError(f"{path}:{line}: empty asset identifier")
        key = (asset, day)
        if key in seen:
            raise InvalidInputError(f"{path}:{line}: duplicate (date, asset) key {day} {asset}")
        seen.add(key)
        per_asset = rows.setdefault(asset, [])
        if per_asset and day <= per_asset[-1][0]:
            raise InvalidInputError(f"{path}:{line}: dates for {asset} must be strictly increasing")
        per_asset.append((day, parse_payload(line, row)))
    if not rows:
        raise InvalidInputError(f"{path}: no data rows")
    return rows


def _forward_fill(entries: list[tuple[dt.date, tuple]]) -> tuple[tuple[dt.date, ...], list[tuple], int]:
    """Expand to the full business-day grid, repeating the last payload over gaps."""
    dates: list[dt.date] = []
    payloads: list[tuple] = []
    filled = 0
    for day, payload in entries:
        if dates:
            cursor = _next_business_day(dates[-1])
            while cursor < day:
                dates.append(cursor)
                payloads.append(payloads[-1])
                filled += 1
                cursor = _next_business_day(cursor)
        dates.append(day)
        payloads.append(payload)
    return tuple(dates), payloads, filled


def read_axe_csv(path) -> SeriesTable:
    """Load a ``date,asset,quantity`` file into per-asset aligned series."""

    def payload(line, row):
        try:
            return (int(row[2]),)
        except ValueError:
            raise InvalidInputError(f"{path}:{line}: quantity must be an integer, got {row[2]!r}") from None

    table = SeriesTable()
    for asset, entries in sorted(_collect_by_asset(path, AXE_HEADER, payload).items()):
        dates, payloads, filled = _forward_fill(entries)
        table.dates[asset] = dates
        table.series[asset] = np.array([q for (q,) in payloads], dtype=np.int64)
        table.filled += filled
    return table


def read_market_csv(path):
    """Load a market file into per-asset QuoteSeries; returns (quotes, dates, filled)."""

    def payload(line, row):
        try:
            price, funding, borrow = float(row[2]), float(row[3]), float(row[4])
        except ValueError:
            raise InvalidInputError(f"{path}:{line}: price and rates must be numeric") from None
        if not price > 0:
            raise InvalidInputError(f"{path}:{line}: price must be positive, got {row[2]}")
        if funding < 0 or borrow < 0:
            raise InvalidInputError(f"{path}:{line}: rates must be non-negative")
        return (price, funding, borrow)

    quotes: dict[str, QuoteSeries] = {}
    dates: dict[str, tuple[dt.date, ...]] = {}
    filled = 0
    for asset, entries in sorted(_collect_by_asset(path, MARKET_HEADER, payload).items()):
        grid, payloads, gaps = _forward_fill(entries)
        arr = np.array(payloads, dtype=np.float64)
        quotes[asset] = QuoteSeries(price=arr[:, 0], funding_rate=arr[:, 1], borrow_rate=arr[:, 2])
        dates[asset] = grid
        filled += gaps
    return quotes, dates, filled


def write_axe_csv(path, series: dict[str, np.ndarray], dates) -> None:
    """Write per-asset series as ``date,asset,quantity``, assets sorted, dates ascending.

    `dates` is either one shared grid or a per-asset mapping.
    """
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(AXE_HEADER)
        for asset in sorted(series):
            grid = dates[asset] if isinstance(dates, dict) else dates
            values = series[asset]
            if len(grid) != len(values):
                raise InvalidInputError(f"series and dates misaligned for {asset}")
            for day, value in zip(grid, values):
                writer.writerow([day.isoformat(), asset, int(value)])


def load_scenario(
    axe_path,
    client_path=None,
    market_path=None,
    include_client: bool = True,
    adtv: dict[str, int] | None = None,
) -> tuple[ScenarioSpec, int]:
    """Assemble a ScenarioSpec from CSV files; returns (scenario, forward-fill count).

    Without a market file every asset gets the constant synthetic quote; with
    one, every axe asset must be covered (no invented dynamics).
    """
    axe = read_axe_csv(axe_path)
    assets = sorted(axe.series)
    grid = axe.dates[assets[0]]
    for asset in assets:
        if axe.dates[asset] != grid:
            raise InvalidInputError(f"{axe_path}: asset {asset} is not on the shared business-day grid")
    filled = axe.filled

    client = None
    if client_path is not None:
        table = read_axe_csv(client_path)
        for asset, series_dates in table.dates.items():
            if asset not in axe.series:
                raise InvalidInputError(f"{client_path}: client asset {asset} absent from the axe file")
            if series_dates != grid:
                raise InvalidInputError(f"{client_path}: client series for {asset} not on the axe grid")
        client = table.series
        filled += table.filled

    if market_path is not None:
        quotes, market_dates, market_filled = read_market_csv(market_path)
        for asset in assets:
            if asset not in quotes:
                raise InvalidInputError(f"{market_path}: no market data for asset {asset}")
            if market_dates[asset] != grid:
                raise InvalidInputError(f"{market_path}: market series for {asset} not on the axe grid")
        filled += market_filled
        quotes = {asset: quotes[asset] for asset in assets}
    else:
        quotes = {asset: QuoteSeries.constant(DEFAULT_QUOTE, len(grid)) for asset in assets}

    scenario = ScenarioSpec(
        dates=grid,
        hist_axe=axe.series,
        quotes=quotes,
        client_positions=client,
        include_client=include_client,
        adtv=adtv,
    )
    return scenario, filled


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Parsed run-configuration file (see the module docstring for the format)."""

    epsilon: float = 0.3
    horizon: int = 30
    bucket: int = 20
    sensitivity_mode: str = "fixed"
    adtv: dict[str, int] = field(default_factory=dict)
    adtv_default: int | None = None
    hit_ratio: float = 0.05
    holding_period: int = 10
    n_paths: int = 1000
    leak_lags: tuple[int, ...] = DEFAULT_LEAK_LAGS
    record_paths: int = 0
    axe_csv: Path | None = None
    client_csv: Path | None = None
    market_csv: Path | None = None
    include_client: bool = True
    output_dir: Path = Path("out")

    def clip_for(self, asset: str) -> ClipBounds:
        """Symmetric bounds from the ADTV table: [-adtv, +adtv]."""
        volume = self.adtv.get(asset, self.adtv_default)
        if volume is None:
            raise InvalidParameterError(f"no ADTV entry (and no default) for asset {asset!r}")
        if volume <= 0:
            raise InvalidParameterError(f"ADTV for {asset!r} must be positive, got {volume}")
        return ClipBounds(-volume, volume)

    def base_clip(self) -> ClipBounds:
        if self.adtv_default is not None:
            return ClipBounds(-self.adtv_default, self.adtv_default)
        if self.adtv:
            return self.clip_for(sorted(self.adtv)[0])
        raise InvalidParameterError("config has no [adtv] table; clip bounds are required")

    def dp_params(self, asset: str | None = None, **overrides) -> DpParams:
        clip = self.base_clip() if asset is None else self.clip_for(asset)
        values = dict(
            clip=clip,
            epsilon=self.epsilon,
            horizon=self.horizon,
            bucket=self.bucket,
            sensitivity_mode=self.sensitivity_mode,
        )
        values.update(overrides)
        return DpParams(**values)

    def sim_config(self, strategy: str, master_seed: int, **overrides) -> SimConfig:
        values = dict(
            dp=self.dp_params(),
            strategy=strategy,
            hit_ratio=self.hit_ratio,
            holding_period=self.holding_period,
            n_paths=self.n_paths,
            master_seed=master_seed,
            leak_lags=self.leak_lags,
            record_paths=self.record_paths,
        )
        values.update(overrides)
        return SimConfig(**values)


def load_run_config(path) -> RunConfig:
    """Parse and validate a run-configuration file.

    Unknown sections or keys are rejected, referenced data files must exist,
    and numeric fields are range-checked here so failures carry the file
    context rather than surfacing later.
    """
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"config file not found: {path}")
    parser = ConfigParser()
    parser.optionxform = str  # asset names in [adtv] are case-sensitive
    parser.read(path, encoding="utf-8")

    known = {
        "dp": {"epsilon", "horizon", "bucket", "sensitivity_mode"},
        "adtv": None,  # free-form asset table
        "sim": {"hit_ratio", "holding_period", "n_paths", "leak_lags", "record_paths"},
        "scenario": {"axe_csv", "client_csv", "market_csv", "include_client"},
        "output": {"dir"},
    }
    for section in parser.sections():
        if section not in known:
            raise InvalidParameterError(f"{path}: unknown section [{section}]")
        allowed = known[section]
        if allowed is not None:
            for key in parser[section]:
                if key not in allowed:
                    raise InvalidParameterError(f"{path}: unknown key {key!r} in [{section}]")

    values: dict = {}
    if parser.has_section("dp"):
        section = parser["dp"]
        if "epsilon" in section:
            values["epsilon"] = section.getfloat("epsilon")
        if "horizon" in section:
            values["horizon"] = section.getint("horizon")
        if "bucket" in section:
            values["bucket"] = section.getint("bucket")
        if "sensitivity_mode" in section:
            mode = section.get("sensitivity_mode")
            if mode not in SENSITIVITY_MODES:
                raise InvalidParameterError(f"{path}: sensitivity_mode must be one of {SENSITIVITY_MODES}")
            values["sensitivity_mode"] = mode

    if parser.has_section("adtv"):
        adtv: dict[str, int] = {}
        default = None
        for key, raw in parser["adtv"].items():
            try:
                volume = int(raw)
            except ValueError:
                raise InvalidParameterError(f"{path}: ADTV for {key!r} must be an integer, got {raw!r}") from None
            if key == "default":
                default = volume
            else:
                adtv[key] = volume
        values["adtv"] = adtv
        values["adtv_default"] = default

    if parser.has_section("sim"):
        section = parser["sim"]
        if "hit_ratio" in section:
            values["hit_ratio"] = section.getfloat("hit_ratio")
        if "holding_period" in section:
            values["holding_period"] = section.getint("holding_period")
        if "n_paths" in section:
            values["n_paths"] = section.getint("n_paths")
        if "record_paths" in section:
            values["record_paths"] = section.getint("record_paths")
        if "leak_lags" in section:
            try:
                lags = tuple(int(part) for part in section.get("leak_lags").split(",") if part.strip())
            except ValueError:
                raise InvalidParameterError(f"{path}: leak_lags must be comma-separated integers") from None
            if not lags:
                raise InvalidParameterError(f"{path}: leak_lags must not be empty")
            values["leak_lags"] = lags

    if parser.has_section("scenario"):
        section = parser["scenario"]
        base = path.parent
        for key in ("axe_csv", "client_csv", "market_csv"):
            if key in section:
                file_path = base / section.get(key)
                if not file_path.exists():
                    raise InvalidInputError(f"{path}: referenced file does not exist: {file_path}")
                values[key] = file_path
        if "include_client" in section:
            values["include_client"] = section.getboolean("include_client")

    if parser.has_section("output") and "dir" in parser["output"]:
        values["output_dir"] = Path(parser["output"].get("dir"))

    config = RunConfig(**values)
    if not math.isfinite(config.epsilon) or config.epsilon <= 0:
        raise InvalidParameterError(f"{path}: epsilon must be positive")
    if not (1 <= config.bucket <= config.horizon):
        raise InvalidParameterError(f"{path}: need 1 <= bucket <= horizon")
    if not (0.0 <= config.hit_ratio <= 1.0):
        raise InvalidParameterError(f"{path}: hit_ratio must lie in [0, 1]")
    if config.holding_period < 1 or config.n_paths < 1:
        raise InvalidParameterError(f"{path}: holding_period and n_paths must be >= 1")
    return config


# ---------------------------------------------------------------------------
# report emission
# ---------------------------------------------------------------------------


def write_report(report: MetricsReport, out_dir, write_paths: bool = False) -> dict[str, Path]:
    """Emit metrics.csv, histograms.csv, summary.json and optionally paths.csv.

    Output is byte-deterministic for a given report: fixed row order, floats
    printed as their shortest round-trip decimals, LF line endings.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}

    metrics_path = out / "metrics.csv"
    with metrics_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        for row in report.rows:
            writer.writerow([
                _fmt(float(row.epsilon)), row.horizon, row.bucket, row.scenario, row.metric,
                row.lag, _fmt(float(row.mean)), _fmt(float(row.stderr)), row.n_paths,
            ])
    written["metrics"] = metrics_path

    hist_path = out / "histograms.csv"
    with hist_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(HISTOGRAMS_HEADER)
        for hist in report.histograms:
            for decile, count in enumerate(hist.counts, start=1):
                writer.writerow([
                    _fmt(float(hist.epsilon)), hist.horizon, hist.bucket, hist.scenario,
                    hist.metric, hist.lag, decile, count,
                ])
    written["histograms"] = hist_path

    if write_paths:
        paths_path = out / "paths.csv"
        with paths_path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(PATHS_HEADER)
            for record in report.paths:
                writer.writerow([
                    record.path, record.asset, record.date, record.a_pre, record.a_pub,
                    record.a_hit, record.a_post, record.client,
                    _fmt(record.pnl), _fmt(record.over_axe_qty), _fmt(record.over_axe_cost),
                ])
        written["paths"] = paths_path

    summary_path = out / "summary.json"
    headline = [
        {
            "epsilon": float(row.epsilon),
            "T": row.horizon,
            "B": row.bucket,
            "scenario": row.scenario,
            "metric": row.metric,
            "lag": row.lag,
            "mean": float(row.mean),
            "stderr": float(row.stderr),
            "n_paths": row.n_paths,
        }
        for row in report.rows
    ]
    payload = {"config": report.config, "metrics": headline}
    summary_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written["summary"] = summary_path
    return written
