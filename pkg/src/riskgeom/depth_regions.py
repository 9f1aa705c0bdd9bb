"""Depth-trimmed regions of scenario distributions.

zonoid
    ``ZD^a(X) = {E[X l(X)] : 0 <= l <= 1/a, E l = 1}``.  Its support value in
    direction ``u`` is the mean of the upper ``a``-tail of ``<X, u>``: the
    fractional knapsack that fills weight ``1/a`` on the largest projections is
    the optimal vertex of the defining LP.
halfspace
    Monotone halfspace trimming: the intersection, over dual-cone directions
    ``u``, of the upper halfspaces ``{<x, u> >= t}`` carrying probability at
    least ``1 - a``.  Stored as a :class:`ConstraintRegion`.
ech
    Expected convex hull of ``n`` iid copies, ``h(u) = E max_i <X_i, u>``.  A
    real level ``a`` uses the spectral form with ``n = 1/a`` in every direction.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .cone_algebra import RieszCone, in_dual_cone, normalized_generators
from .convex_region import ConstraintRegion, DirectionGrid, SupportRegion
from .empirical import EmpiricalDist, project, quantile

FAMILIES = ("zonoid", "halfspace", "ech")


def _check_alpha(alpha, open_right=False):
    ok = 0 < alpha < 1 if open_right else 0 < alpha <= 1
    if not ok:
        raise ValueError(f"trimming level must lie in {'(0, 1)' if open_right else '(0, 1]'}, got {alpha}")


def ech_power(level) -> float:
    """Exponent of the ECH spectral kernel: ``n`` for an integer level, ``1/a`` for a real one."""
    if isinstance(level, (bool, np.bool_)):
        raise TypeError("ECH level must be an integer n >= 1 or a real alpha in (0, 1]")
    if isinstance(level, numbers.Integral):
        if level < 1:
            raise ValueError(f"number of copies must be at least 1, got {level}")
        return float(level)
    level = float(level)
    _check_alpha(level)
    return 1.0 / level


@dataclass(frozen=True, eq=False)
class RegionSpec:
    """Which trimmed region to build: ``family`` at ``level`` for ``cone``.

    ``level`` is ``alpha`` for zonoid/halfspace; ech accepts an integer ``n``
    or a real ``alpha``.
    """

    family: str
    level: float
    cone: RieszCone

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown region family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "ech":
            ech_power(self.level)
        else:
            _check_alpha(self.level, open_right=self.family == "halfspace")

    @property
    def alpha(self) -> float:
        if self.family == "ech":
            return 1.0 / ech_power(self.level)
        return float(self.level)


def zonoid_support(D: EmpiricalDist, alpha: float, u) -> float:
    _check_alpha(alpha)
    u = np.atleast_2d(np.asarray(u, dtype=float))
    return float(_kernels.zonoid_support_batch(D.points, D.weights, u, alpha)[0])


def zonoid_support_many(D: EmpiricalDist, alpha: float, dirs) -> np.ndarray:
    _check_alpha(alpha)
    return _kernels.zonoid_support_batch(D.points, D.weights, np.atleast_2d(dirs), alpha)


def ech_support(D: EmpiricalDist, level, u) -> float:
    """``E max{<X_1,u>, ..., <X_n,u>}``, exact from powers of the projected CDF."""
    p = ech_power(level)
    u = np.atleast_2d(np.asarray(u, dtype=float))
    return float(_kernels.ech_support_batch(D.points, D.weights, u, p)[0])


def ech_support_many(D: EmpiricalDist, level, dirs) -> np.ndarray:
    return _kernels.ech_support_batch(D.points, D.weights, np.atleast_2d(dirs), ech_power(level))


def halfspace_threshold(D: EmpiricalDist, alpha: float, u) -> float:
    """``sup{t : P(<X, u> >= t) >= 1 - alpha}``, the strict ``alpha``-quantile of ``<X, u>``."""
    _check_alpha(alpha, open_right=True)
    return quantile(project(D, u), alpha, kind="strict")


def halfspace_constraints(D: EmpiricalDist, alpha: float, K: RieszCone, extra_dirs=None) -> ConstraintRegion:
    """Monotone halfspace region on the unit dual generators of ``K`` plus ``extra_dirs``.

    Every extra direction must lie in ``K*``.
    """
    _check_alpha(alpha, open_right=True)
    if D.dim != K.dim:
        raise ValueError(f"data dimension {D.dim} does not match cone dimension {K.dim}")
    unit, _ = normalized_generators(K)
    dirs = [u for u in unit]
    if extra_dirs is not None:
        for u in np.atleast_2d(np.asarray(extra_dirs, dtype=float)):
            if u.size == 0:
                continue
            if not in_dual_cone(u, K):
                raise ValueError(f"direction {u.tolist()} is not in the dual cone")
            u = u / np.linalg.norm(u)
            if min(np.linalg.norm(u - v) for v in dirs) > 1e-10:
                dirs.append(u)
    dirs = np.array(dirs)
    q = [halfspace_threshold(D, alpha, u) for u in dirs]
    return ConstraintRegion(dirs, q, K)


def build_region(D: EmpiricalDist, spec: RegionSpec, grid: DirectionGrid | None = None):
    """Region for ``spec``: a :class:`SupportRegion` on ``grid`` for zonoid/ech, a
    :class:`ConstraintRegion` for halfspace (generators plus the grid's dual-cone
    directions)."""
    K = spec.cone
    if D.dim != K.dim:
        raise ValueError(f"data dimension {D.dim} does not match cone dimension {K.dim}")
    if grid is None:
        grid = DirectionGrid.build(D.dim, K)
    if grid.dim != D.dim:
        raise ValueError(f"grid dimension {grid.dim} does not match data dimension {D.dim}")
    if spec.family == "zonoid":
        return SupportRegion(grid, zonoid_support_many(D, spec.level, grid.dirs))
    if spec.family == "ech":
        return SupportRegion(grid, ech_support_many(D, spec.level, grid.dirs))
    extra = [u for u in grid.dirs if in_dual_cone(u, K)]
    return halfspace_constraints(D, spec.level, K, np.array(extra) if extra else None)
