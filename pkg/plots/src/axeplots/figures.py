"""The three figure families rendered from report CSVs.

Output is deterministic for fixed inputs: the SVG hash salt is pinned and no
timestamp metadata is embedded, so reruns are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "axeplots"

import matplotlib.pyplot as plt

from .reading import FigureInputError, read_histograms, read_metrics, read_paths

DECILE_LABELS = [f"{lo / 10:.1f}-{(lo + 1) / 10:.1f}" for lo in range(10)]


@dataclass(frozen=True)
class FigureResult:
    """What was drawn: the output file plus artist counts the tests assert on."""

    output: Path
    line_count: int
    bar_groups: int


def _save(fig, output) -> Path:
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if output.suffix.lower() == ".svg" else None
    fig.savefig(output, metadata=metadata)
    plt.close(fig)
    return output


def plot_metric_vs_epsilon(
    metrics_csv,
    metric: str,
    lag: int = 0,
    scenario: str | None = None,
    output="metric_vs_epsilon.svg",
    title: str | None = None,
) -> FigureResult:
    """Error-bar line chart of one metric against the privacy budget.

    One series per (T, B) parameter pair (and per scenario when `scenario`
    is not pinned). Refuses to draw fewer than two budget values.
    """
    rows = [r for r in read_metrics(metrics_csv) if r.metric == metric and r.lag == lag]
    if scenario is not None:
        rows = [r for r in rows if r.scenario == scenario]
    if not rows:
        raise FigureInputError(f"no rows for metric {metric!r} (lag {lag}) in {metrics_csv}")
    if len({r.epsilon for r in rows}) < 2:
        raise FigureInputError(f"metric {metric!r} has a single budget value; a sweep over epsilon is required")

    series: dict[tuple, list] = {}
    for row in sorted(rows, key=lambda r: (r.scenario, r.horizon, r.bucket, r.epsilon)):
        series.setdefault((row.scenario, row.horizon, row.bucket), []).append(row)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for (label_scenario, horizon, bucket), points in series.items():
        label = f"T={horizon}, B={bucket}"
        if scenario is None and len({key[0] for key in series}) > 1:
            label = f"{label_scenario}, {label}"
        ax.errorbar(
            [p.epsilon for p in points],
            [p.mean for p in points],
            yerr=[p.stderr for p in points],
            marker="o",
            capsize=3,
            label=label,
        )
    ax.set_xlabel("privacy budget")
    ax.set_ylabel(metric + (f" (lag {lag}d)" if lag else ""))
    ax.set_title(title or f"{metric} vs privacy budget")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return FigureResult(output=_save(fig, output), line_count=len(series), bar_groups=0)


def plot_lp_histogram(
    histograms_csv,
    scenarios: list[str],
    metric: str = "leak_probability",
    lag: int | None = None,
    epsilon: float | None = None,
    output="lp_histogram.svg",
    title: str | None = None,
) -> FigureResult:
    """Grouped decile bars of a probability metric, one bar group per scenario."""
    bins = [b for b in read_histograms(histograms_csv) if b.metric == metric]
    if lag is not None:
        bins = [b for b in bins if b.lag == lag]
    if epsilon is not None:
        bins = [b for b in bins if b.epsilon == epsilon]
    if not bins:
        raise FigureInputError(f"no histogram bins for metric {metric!r} in {histograms_csv}")

    lags = sorted({b.lag for b in bins})
    if len(lags) > 1:
        raise FigureInputError(f"multiple lags present {lags}; pass one with --lag")
    points = sorted({(b.epsilon, b.horizon, b.bucket) for b in bins})
    if len(points) > 1:
        raise FigureInputError(f"multiple parameter points present {points}; pass --epsilon")

    available = {b.scenario for b in bins}
    counts: dict[str, list[int]] = {}
    for name in scenarios:
        if name not in available:
            raise FigureInputError(f"scenario {name!r} not in {histograms_csv} (have {sorted(available)})")
        per_decile = [0] * 10
        for entry in bins:
            if entry.scenario == name:
                per_decile[entry.decile - 1] = entry.count
        counts[name] = per_decile

    fig, ax = plt.subplots(figsize=(8, 4.5))
    width = 0.8 / len(scenarios)
    for offset, name in enumerate(scenarios):
        positions = [i + offset * width for i in range(10)]
        ax.bar(positions, counts[name], width=width, label=name)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(10)])
    ax.set_xticklabels(DECILE_LABELS, rotation=45, ha="right")
    ax.set_xlabel(f"{metric} decile")
    ax.set_ylabel("paths")
    ax.set_title(title or f"{metric} distribution by scenario")
    ax.legend()
    fig.tight_layout()
    return FigureResult(output=_save(fig, output), line_count=0, bar_groups=len(scenarios))


def plot_scenario_fan(
    paths_csv,
    asset: str,
    max_paths: int = 6,
    output="scenario_fan.svg",
    title: str | None = None,
) -> FigureResult:
    """True axe and client positions overlaid with sampled published-axe paths."""
    points = [p for p in read_paths(paths_csv) if p.asset == asset]
    if not points:
        raise FigureInputError(f"asset {asset!r} not present in {paths_csv}")

    by_path: dict[int, list] = {}
    for point in points:
        by_path.setdefault(point.path, []).append(point)
    sampled = sorted(by_path)[:max_paths]
    first = sorted(by_path[sampled[0]], key=lambda p: p.date)
    dates = [p.date for p in first]
    axis = range(len(dates))

    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(axis, [p.a_pre for p in first], color="tab:blue", linewidth=2.0, label="true axe")
    ax.plot(axis, [p.client for p in first], color="tab:green", linewidth=2.0, label="client positions")
    for lane in sampled:
        records = sorted(by_path[lane], key=lambda p: p.date)
        ax.plot(
            axis,
            [p.a_pub for p in records],
            color="tab:orange",
            alpha=0.6,
            linewidth=1.0,
            label="published axe" if lane == sampled[0] else None,
        )
    ticks = list(axis)[:: max(1, len(dates) // 8)]
    ax.set_xticks(ticks)
    ax.set_xticklabels([dates[i] for i in ticks], rotation=45, ha="right")
    ax.set_ylabel("shares")
    ax.set_title(title or f"published-axe scenarios: {asset}")
    ax.legend()
    fig.tight_layout()
    return FigureResult(output=_save(fig, output), line_count=2 + len(sampled), bar_groups=0)
