"""Small estimation helpers: confidence intervals used by every estimator.

Probabilities get Wilson score intervals (valid near 0 and 1); error means
get normal-approximation intervals. Both at 99% confidence throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# z-quantile for two-sided 99% confidence (norm.ppf(0.995))
Z99 = 2.5758293035489004


@dataclass(frozen=True)
class Estimate:
    """Point estimate with a 99% confidence half-width."""

    value: float
    halfwidth: float
    trials: int

    @property
    def lo(self) -> float:
        return self.value - self.halfwidth

    @property
    def hi(self) -> float:
        return self.value + self.halfwidth


def wilson(successes: int, trials: int, z: float = Z99) -> Estimate:
    """Wilson score interval for a binomial proportion.

    Returns the plain proportion as the point estimate and half the Wilson
    interval width as the half-width, so `value +/- halfwidth` need not be
    centered on the Wilson midpoint but always covers it.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = (z / denom) * np.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    lo = max(0.0, center - half)
    hi = min(1.0, center + half)
    return Estimate(value=p, halfwidth=float(max(hi - p, p - lo, 0.0)), trials=trials)


def mean_ci(values: np.ndarray, z: float = Z99) -> Estimate:
    """Normal-approximation 99% interval for a sample mean."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        raise ValueError("empty sample")
    mean = float(values.mean())
    if n == 1:
        return Estimate(value=mean, halfwidth=float("inf"), trials=1)
    sd = float(values.std(ddof=1))
    return Estimate(value=mean, halfwidth=float(z * sd / np.sqrt(n)), trials=n)


def mean_ci_from_moments(total: float, total_sq: float, n: int, z: float = Z99) -> Estimate:
    """Same as :func:`mean_ci` but from streaming sums (for chunked loops)."""
    if n <= 0:
        raise ValueError("empty sample")
    mean = total / n
    if n == 1:
        return Estimate(value=mean, halfwidth=float("inf"), trials=1)
    var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    return Estimate(value=float(mean), halfwidth=float(z * np.sqrt(var / n)), trials=n)
