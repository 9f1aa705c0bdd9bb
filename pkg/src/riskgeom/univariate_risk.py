"""Scalar risk measures of univariate scenario distributions.

Sign convention: a risk is the capital required, so a sure gain ``c`` has
risk ``-c``.  All quantile integrals are evaluated exactly per CDF step.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .empirical import EmpiricalDist, quantile


def _check_level(alpha, closed_right=True):
    ok = 0 < alpha <= 1 if closed_right else 0 < alpha < 1
    if not ok:
        rng = "(0, 1]" if closed_right else "(0, 1)"
        raise ValueError(f"level must lie in {rng}, got {alpha}")


def var(D: EmpiricalDist, alpha: float) -> float:
    """Value at risk ``-inf{x : P(X <= x) > alpha}``."""
    _check_level(alpha, closed_right=False)
    return -quantile(D, alpha, kind="strict")


def es(D: EmpiricalDist, alpha: float) -> float:
    """Expected shortfall: minus the mean of the lowest ``alpha`` mass."""
    _check_level(alpha)
    y, w = D.sorted_atoms()
    return -_kernels.lower_tail_mean(y, w, alpha)


def em(D: EmpiricalDist, n: int) -> float:
    """Expected minimum ``-E min(X_1, ..., X_n)`` of ``n`` iid copies."""
    if int(n) != n or n < 1:
        raise ValueError(f"number of copies must be a positive integer, got {n}")
    y, w = D.sorted_atoms()
    return -_kernels.spectral_lower(y, w, int(n))


def em_alpha(D: EmpiricalDist, alpha: float) -> float:
    """Expected minimum with ``n`` replaced by ``1/alpha`` in its spectral form.

    The kernel ``(1/alpha)(1 - t)^(1/alpha - 1)`` integrates in closed form over
    each CDF step, so no quadrature is involved.
    """
    _check_level(alpha)
    y, w = D.sorted_atoms()
    return -_kernels.spectral_lower(y, w, 1.0 / alpha)


def entropic(D: EmpiricalDist, gamma: float) -> float:
    """Entropic risk ``gamma * log E exp(-X / gamma)`` (convex, not homogeneous)."""
    if not gamma > 0:
        raise ValueError(f"risk tolerance gamma must be positive, got {gamma}")
    x = D.values
    return float(gamma * logsumexp(-x / gamma, b=D.weights))


def cd_interval(D: EmpiricalDist, alpha: float) -> tuple[float, float]:
    """Univariate expected-convex-hull region ``[-EM_alpha(X), EM_alpha(-X)]``."""
    lo = -em_alpha(D, alpha)
    hi = em_alpha(D.negate(), alpha)
    return lo, hi


def neg_mean(D: EmpiricalDist) -> float:
    return -float(D.weights @ D.values)
