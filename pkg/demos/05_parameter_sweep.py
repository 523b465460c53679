#!/usr/bin/env python3
"""Choosing the operating point: sweep the privacy budget and read the trade-off.

For each epsilon the sweep reports the carry cost of obfuscation (P&L vs.
publishing the true axe) against the residual leakage (LP difference with
vs. without the client). More budget buys P&L and costs privacy; the desk
picks the point, the sweep prices it. Report CSVs land in demo_out/.

Run: python demos/05_parameter_sweep.py
"""

from axedp import (
    ClipBounds,
    DpParams,
    SimConfig,
    epsilon_grid,
    sweep,
    synth_concentrated_scenario,
)
from axedp.io import write_report

scenario = synth_concentrated_scenario()
base = DpParams(clip=ClipBounds(-25_000, 25_000), horizon=30, bucket=20)
config = SimConfig(dp=base, strategy="window", n_paths=1000, master_seed=2025, record_paths=4)
grid = epsilon_grid([0.1, 0.3, 0.5, 0.9], [30], [20], base)

print(f"sweeping {len(grid)} parameter points x {config.n_paths} paths ...")
report = sweep(scenario, grid, config)

print()
print(f"  {'eps':>4} {'P&L vs true ($/d)':>18} {'LP diff @1d':>12} {'LP diff @10d':>13} {'over-axe freq':>14}")
for point in grid:
    eps = point.epsilon
    pnl = [r for r in report.find(scenario="obf_minus_true", metric="pnl_diff_vs_true") if r.epsilon == eps][0]
    lp1 = [r for r in report.find(scenario="incl_minus_excl", metric="lp_diff", lag=1) if r.epsilon == eps][0]
    lp10 = [r for r in report.find(scenario="incl_minus_excl", metric="lp_diff", lag=10) if r.epsilon == eps][0]
    oa = [r for r in report.find(scenario="obf_incl", metric="over_axe_frequency") if r.epsilon == eps][0]
    print(f"  {eps:>4} {pnl.mean:>11,.0f} +-{pnl.stderr:>4,.0f} {lp1.mean:>12.4f} {lp10.mean:>13.4f} {oa.mean:>14.3%}")

written = write_report(report, "demo_out", write_paths=True)
print()
for name, path in written.items():
    print(f"wrote {path}")
print()
print("  Reading the table: raising epsilon recovers P&L (the vs-true gap shrinks)")
print("  while the leak-probability gap between including and excluding the")
print("  client widens. The production point 0.3 sits between the extremes.")
