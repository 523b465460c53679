#!/usr/bin/env python3
"""The four publication mechanisms side by side on one inventory series.

Demonstrates the error/privacy structure: fresh-noise republication error is
flat but its privacy cost grows linearly; per-item noise accumulates; the
window and binary-tree mechanisms keep both small.

Run: python demos/02_publication_mechanisms.py
"""

import numpy as np

from axedp import ClipBounds, DpParams, MECHANISMS, RngHandle, publish_series, split_stream
from axedp.mechanisms import publish_paths

gen = np.random.default_rng(12)
days = 120
series = np.concatenate([[50_000], 50_000 + np.cumsum(gen.integers(-4_000, 4_001, size=days))])
stream = split_stream(series)
bounds = ClipBounds(-5_000, 5_000)

print("=" * 70)
print("1. With noise disabled every mechanism reproduces the series exactly")
print("=" * 70)
quiet = DpParams(clip=bounds, zero_noise=True)
for mechanism in MECHANISMS:
    exact = np.array_equal(publish_series(stream, quiet, mechanism), series)
    print(f"  {mechanism:<8} exact: {exact}")

print()
print("=" * 70)
print("2. One noisy publication per mechanism (epsilon=0.3, T=30, B=20)")
print("=" * 70)
params = DpParams(clip=bounds, epsilon=0.3)
print(f"  {'day':>4} {'true':>9} " + " ".join(f"{m:>9}" for m in MECHANISMS))
published = {m: publish_series(stream, params, m, RngHandle(5)) for m in MECHANISMS}
for day in (0, 1, 10, 30, 60, 120):
    row = " ".join(f"{published[m][day]:>9,}" for m in MECHANISMS)
    print(f"  {day:>4} {series[day]:>9,} {row}")

print()
print("=" * 70)
print("3. Error growth along the stream (95% quantile over 2000 paths)")
print("=" * 70)
checkpoints = [1, 5, 10, 20, 30, 60, 120]
print(f"  {'day':>4} " + " ".join(f"{m:>9}" for m in MECHANISMS))
lanes = {m: publish_paths(stream, params, m, RngHandle(9), n_paths=2000) for m in MECHANISMS}
for day in checkpoints:
    cells = []
    for mechanism in MECHANISMS:
        err = np.quantile(np.abs(lanes[mechanism][:, day] - series[day]), 0.95)
        cells.append(f"{err:>9,.0f}")
    print(f"  {day:>4} " + " ".join(cells))
print()
print("  naive's error is flat, but every extra day of republication burns more")
print("  privacy budget, so it cannot be run continually at a fixed epsilon.")
print("  simple keeps the budget flat and pays ~sqrt(t) error growth instead.")
print("  window caps both: each day touches two partial sums, error ~T^(1/4).")
print("  binary's per-node log(T) noise premium only amortizes over horizons far")
print("  beyond the 30-day production reset, where window is the better deal.")
print("  All mechanisms re-anchor on the last published value every T=30 days.")
