"""Closed-form constants of the hard-instance construction.

All values are derived, not tuned: the error floor eps0 comes from plugging
the distinctness probability 1/10 and the truncation defect e^-4 into the
certified bound with separation 1/3; the mixture-size threshold ties the
number of anchors to the noise-ellipsoid inflation radius.
"""

from __future__ import annotations

from math import ceil, exp, log, pi, sqrt

# guaranteed error floor for non-adaptive algorithms on the hard instance:
# (1/3) * (1/20 - e^-4) ~= 0.010561
EPS0 = (1.0 / 3.0) * (1.0 / 20.0 - exp(-4.0))

# mixture-size constant: 10 e^{3/2} / (3 pi) ~= 4.7552
C_POINTS = 10.0 * exp(1.5) / (3.0 * pi)

# growth exponent with e^{a n^2} >= (12 n 2^n + 3 sqrt n)^n for all n >= 1,
# with equality at n = 1: a = ln 27 = 3 ln 3 ~= 3.2958
A_EXP = 3.0 * log(3.0)


def inflation_radius(n: int) -> float:
    """Center-cloud radius 12 n 2^n that half the columns provably respect."""
    return 12.0 * n * (2.0**n)


def hard_instance_m_threshold(n: int) -> int:
    """Smallest m at which the certified floor eps0 applies at budget n:
    ceil(C (12 n 2^n + 3 sqrt n)^n). 129 for n = 1, 47784 for n = 2."""
    return ceil(C_POINTS * (inflation_radius(n) + 3.0 * sqrt(n)) ** n)
