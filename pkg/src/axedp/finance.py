"""Inventory carry P&L and the profitability geometry of axe trades.

Holding a net position is never free: long inventory pays the funding rate
to raise cash, short inventory pays the borrow rate to source shares. All
functions take rates per day and accept scalars or numpy arrays (broadcast
elementwise); annualized rates must be converted by the caller (rate / 252
trading days).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidParameterError


@dataclass(frozen=True)
class MarketQuote:
    """Per-asset market state for one day: price and daily funding/borrow rates."""

    price: float
    funding_rate: float
    borrow_rate: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.price) and self.price > 0):
            raise InvalidParameterError(f"price must be positive, got {self.price}")
        if self.funding_rate < 0 or self.borrow_rate < 0:
            raise InvalidParameterError("rates must be non-negative")

    def require_positive_rates(self) -> None:
        """Profitability bounds divide by the rates; both must be strictly positive."""
        if self.funding_rate <= 0 or self.borrow_rate <= 0:
            raise InvalidParameterError(
                f"operation requires strictly positive rates, got funding={self.funding_rate} borrow={self.borrow_rate}"
            )


@dataclass(frozen=True)
class AxeTriple:
    """True / published / executed quantities for one asset-day."""

    a_true: int
    a_pub: int
    a_hit: int

    def validate_execution(self) -> None:
        """A client can only trade with the published axe, never beyond it."""
        if np.sign(self.a_hit) != np.sign(self.a_pub) and self.a_hit != 0:
            raise InvalidInputError(f"hit {self.a_hit} has a different sign than published {self.a_pub}")
        if abs(self.a_hit) > abs(self.a_pub):
            raise InvalidInputError(f"hit {self.a_hit} exceeds published {self.a_pub} in magnitude")


def inventory_pnl(x, quote: MarketQuote):
    """Daily carry P&L of a net position x: -funding*x*price if long, borrow*x*price if short.

    Always <= 0; flat inventory costs nothing.
    """
    return np.where(
        np.asarray(x) >= 0,
        -quote.funding_rate * np.asarray(x, dtype=np.float64) * quote.price,
        quote.borrow_rate * np.asarray(x, dtype=np.float64) * quote.price,
    )[()]


def marginal_axe_pnl(a_hit, a_true, quote: MarketQuote):
    """Change in carry P&L caused by executing a_hit against a book whose axe is a_true.

    The trade moves the net position from -a_true to a_hit - a_true; the
    difference of the two carry costs is the trade's worth. It peaks at
    a_hit = a_true (the trade flattens the book) and falls off linearly at
    the funding rate above and the borrow rate below.
    """
    a_hit = np.asarray(a_hit, dtype=np.float64)
    a_true = np.asarray(a_true, dtype=np.float64)
    return (inventory_pnl(a_hit - a_true, quote) - inventory_pnl(-a_true, quote))[()]


def profit_bounds(a_true, quote: MarketQuote) -> tuple[float, float]:
    """Closed interval of executed quantities with non-negative marginal P&L.

    [0, a_true * (1 + borrow/funding)] for a long axe, mirrored for a short
    one. Scalar only; requires strictly positive rates.
    """
    quote.require_positive_rates()
    a_true = float(a_true)
    if a_true >= 0:
        return (0.0, a_true * (1.0 + quote.borrow_rate / quote.funding_rate))
    return (a_true * (1.0 + quote.funding_rate / quote.borrow_rate), 0.0)


def over_axe_quantity(a_pub, a_true, quote: MarketQuote):
    """Shares by which a published axe overshoots the profitable interval (hinge loss).

    Zero exactly when a_pub lies within profit_bounds(a_true); otherwise the
    distance past the far edge plus any wrong-sign quantity.
    """
    quote.require_positive_rates()
    a_pub = np.asarray(a_pub, dtype=np.float64)
    a_true = np.asarray(a_true, dtype=np.float64)
    long_edge = a_true * (1.0 + quote.borrow_rate / quote.funding_rate)
    short_edge = a_true * (1.0 + quote.funding_rate / quote.borrow_rate)
    long_overshoot = np.maximum(0.0, a_pub - long_edge) + np.maximum(0.0, -a_pub)
    short_overshoot = np.maximum(0.0, short_edge - a_pub) + np.maximum(0.0, a_pub)
    return np.where(a_true >= 0, long_overshoot, short_overshoot)[()]


def over_axe_cost(a_pub, a_true, quote: MarketQuote):
    """Worst-case daily cost of the overshoot: every over-axed share is assumed hit.

    Charged at the borrow rate for a long axe and the funding rate for a
    short one (the side whose carry the surplus would increase).
    """
    quantity = over_axe_quantity(a_pub, a_true, quote)
    return np.where(np.asarray(a_true) >= 0, quantity * quote.borrow_rate, quantity * quote.funding_rate)[()]
