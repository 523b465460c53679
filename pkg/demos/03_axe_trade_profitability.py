#!/usr/bin/env python3
"""Profitability geometry of an axe trade.

A client execution helps the bank only while it shrinks the book: the
marginal carry P&L peaks when the trade flattens the inventory and turns
negative past the rate-determined interval. Publishing outside that interval
("over-axing") invites loss-making trades.

Run: python demos/03_axe_trade_profitability.py
"""

import numpy as np

from axedp import (
    MarketQuote,
    inventory_pnl,
    marginal_axe_pnl,
    over_axe_cost,
    over_axe_quantity,
    profit_bounds,
)

quote = MarketQuote(price=10.0, funding_rate=0.02, borrow_rate=0.01)
a_true = 100_000

print("=" * 70)
print("1. Carrying inventory always costs money")
print("=" * 70)
for x in (250_000, 0, -250_000):
    print(f"  net position {x:>9,} shares: carry P&L {inventory_pnl(x, quote):>12,.0f} $/day")

print()
print("=" * 70)
print(f"2. Marginal P&L of executing against a true axe of {a_true:,} shares")
print("=" * 70)
lo, hi = profit_bounds(a_true, quote)
print(f"  profitable interval: [{lo:,.0f}, {hi:,.0f}] shares")
print(f"  {'executed':>10} {'marginal $/day':>15}")
for hit in (0, 25_000, 100_000, int(hi), 200_000):
    print(f"  {hit:>10,} {marginal_axe_pnl(hit, a_true, quote):>15,.1f}")
print("  peak sits exactly at the true axe (the book goes flat); the break-even")
print("  endpoints earn zero; anything further loses at the funding rate.")

print()
print("=" * 70)
print("3. Over-axe: how far a published axe overshoots the interval")
print("=" * 70)
print(f"  {'published':>10} {'overshoot (sh)':>15} {'worst-case $/day':>17}")
for published in (80_000, int(hi), 200_000, -30_000):
    qty = over_axe_quantity(published, a_true, quote)
    cost = over_axe_cost(published, a_true, quote)
    print(f"  {published:>10,} {qty:>15,.0f} {cost:>17,.2f}")
