"""Shared test oracles: analytic Laplace CDF and a Kolmogorov-Smirnov statistic.

Kept independent of the package's sampling path so distribution tests check
the implementation against closed forms, not against itself.
"""

import numpy as np


def laplace_cdf(x, scale: float = 1.0):
    x = np.asarray(x, dtype=np.float64)
    return np.where(x < 0, 0.5 * np.exp(x / scale), 1.0 - 0.5 * np.exp(-x / scale))


def ks_statistic(samples, cdf) -> float:
    """max |empirical CDF - analytic CDF| over the sample points."""
    ordered = np.sort(np.asarray(samples, dtype=np.float64))
    n = ordered.size
    values = cdf(ordered)
    upper = np.max(np.arange(1, n + 1) / n - values)
    lower = np.max(values - np.arange(0, n) / n)
    return float(max(upper, lower))


def ks_critical(n: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sided critical value c(alpha)/sqrt(n)."""
    return float(np.sqrt(-0.5 * np.log(alpha / 2.0)) / np.sqrt(n))


def quantile_stderr(samples, q: float) -> float:
    """Order-statistic estimate of the standard error of an empirical quantile."""
    ordered = np.sort(np.asarray(samples, dtype=np.float64))
    n = ordered.size
    k = int(np.ceil(q * n)) - 1
    spread = 1.96 * np.sqrt(n * q * (1.0 - q))
    lo = max(0, int(k - spread))
    hi = min(n - 1, int(k + spread))
    return float((ordered[hi] - ordered[lo]) / (2.0 * 1.96))
