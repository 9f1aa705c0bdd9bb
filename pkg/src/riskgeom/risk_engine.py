"""Risks induced by trimmed regions, and constructions producing new risks.

Set-valued risks over a Riesz cone ``K`` always have the form ``x* + K``, so
they are carried as a :class:`RiskPoint` holding ``x*``.  Scalar risks live on
the real line with the reversed order: the lattice infimum of a family of
scalar risks is their maximum, which is what every construction below takes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .cone_algebra import RieszCone, cone_contains, in_dual_cone, k_infimum
from .convex_region import ConstraintRegion, DirectionGrid, SupportRegion
from .depth_regions import RegionSpec, build_region, ech_power
from .empirical import (
    Density,
    EmpiricalDist,
    linear_transform,
    reweight,
    tail_density,
)
from . import univariate_risk as ur


@dataclass(frozen=True, eq=False)
class RiskPoint:
    """Set-valued risk ``point + K`` in canonical form."""

    point: np.ndarray
    cone: RieszCone

    def __post_init__(self):
        p = np.array(self.point, dtype=float).reshape(-1) + 0.0
        if p.shape[0] != self.cone.dim:
            raise ValueError(f"risk point of length {p.shape[0]} for a {self.cone.dim}-dimensional cone")
        if not np.all(np.isfinite(p)):
            raise ValueError("risk point must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "point", p)

    def to_json(self) -> dict:
        return {"risk_point": self.point.tolist(), "cone": self.cone.to_json()}

    def __repr__(self):
        return f"RiskPoint({self.point.tolist()})"


# ---------------------------------------------------------------------------
# regions -> vector risks
# ---------------------------------------------------------------------------


def vector_risk_from_region(R: SupportRegion | ConstraintRegion, K: RieszCone) -> RiskPoint:
    """``x* = -inf_K R``; the induced risk is ``x* + K``."""
    return RiskPoint(-k_infimum(R, K), K)


def region_risk(D: EmpiricalDist, spec: RegionSpec, grid: DirectionGrid | None = None) -> RiskPoint:
    return vector_risk_from_region(build_region(D, spec, grid), spec.cone)


def marginal_risk(D: EmpiricalDist, rho: Callable[[EmpiricalDist], float], K: RieszCone) -> RiskPoint:
    """``A^{-1} (rho((AX)_1), ..., rho((AX)_d))`` for ``K = A^{-1} R^d_+``."""
    AX = linear_transform(D, K.A)
    return RiskPoint(K.A_inv @ np.array([rho(AX.marginal(i)) for i in range(D.dim)]), K)


def srisk_zonoid_direct(D: EmpiricalDist, alpha: float, K: RieszCone) -> RiskPoint:
    """Zonoid-induced vector risk computed through marginal expected shortfalls."""
    return marginal_risk(D, lambda Z: ur.es(Z, alpha), K)


def srisk_ech_direct(D: EmpiricalDist, level, K: RieszCone) -> RiskPoint:
    p = ech_power(level)
    if float(p).is_integer():
        return marginal_risk(D, lambda Z: ur.em(Z, int(p)), K)
    return marginal_risk(D, lambda Z: ur.em_alpha(Z, 1.0 / p), K)


def srisk_halfspace_direct(D: EmpiricalDist, alpha: float, K: RieszCone) -> RiskPoint:
    return marginal_risk(D, lambda Z: ur.var(Z, alpha), K)


def is_acceptable(r: RiskPoint) -> bool:
    """Acceptable iff ``x* <=_K 0``, i.e. ``x* + K`` contains ``K``."""
    return cone_contains(-r.point, r.cone)


def scalarize(r: RiskPoint, u) -> float:
    """Scalar risk ``<x*, u>`` for ``u`` in the dual cone."""
    u = np.asarray(u, dtype=float).reshape(-1)
    if not in_dual_cone(u, r.cone):
        raise ValueError(f"scalarising direction {u.tolist()} is not in the dual cone")
    return float(r.point @ u)


def linear_conjugate(rho_vector: Callable[[EmpiricalDist], RiskPoint], D: EmpiricalDist, A) -> RiskPoint:
    """``A^{-1} rho(A X)``, ordered by the cone ``A^{-1} R^d_+``."""
    cone = A if isinstance(A, RieszCone) else RieszCone.from_matrix(A)
    inner = rho_vector(linear_transform(D, cone.A))
    x = inner.point if isinstance(inner, RiskPoint) else np.asarray(inner, dtype=float)
    return RiskPoint(cone.A_inv @ x, cone)


def recenter(rho, D: EmpiricalDist):
    """``rho(X - E X) - E X``; works for vector (RiskPoint) and scalar risks."""
    mu = D.mean()
    r = rho(D.translate(-mu))
    if isinstance(r, RiskPoint):
        return RiskPoint(r.point - mu, r.cone)
    if D.dim != 1:
        raise ValueError("scalar re-centring needs a univariate distribution")
    return float(r) - float(mu[0])


def minimise(rhos: Sequence[Callable[[EmpiricalDist], float]], D: EmpiricalDist) -> float:
    """Lattice infimum of scalar risks under the reversed order: their maximum."""
    if not rhos:
        raise ValueError("minimise needs at least one risk measure")
    return max(float(r(D)) for r in rhos)


# ---------------------------------------------------------------------------
# scalar risk functionals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarRisk:
    """Named law-invariant scalar risk; known kinds enable closed-form constructions."""

    kind: str
    level: float | None = None
    func: Callable[[EmpiricalDist], float] | None = field(default=None, compare=False)
    label: str | None = None

    def __call__(self, D: EmpiricalDist) -> float:
        if self.kind == "neg_mean":
            return ur.neg_mean(D)
        if self.kind == "es":
            return ur.es(D, self.level)
        if self.kind == "var":
            return ur.var(D, self.level)
        if self.kind == "em":
            return ur.em(D, int(self.level))
        if self.kind == "em_alpha":
            return ur.em_alpha(D, self.level)
        if self.kind == "entropic":
            return ur.entropic(D, self.level)
        if self.func is None:
            raise ValueError(f"scalar risk {self.kind!r} has no implementation")
        return float(self.func(D))

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        return self.kind if self.level is None else f"{self.kind}({self.level:g})"


def neg_mean() -> ScalarRisk:
    return ScalarRisk("neg_mean")


def expected_shortfall(beta: float) -> ScalarRisk:
    ur._check_level(beta)
    return ScalarRisk("es", beta)


def value_at_risk(beta: float) -> ScalarRisk:
    ur._check_level(beta, closed_right=False)
    return ScalarRisk("var", beta)


def expected_minimum(n: int) -> ScalarRisk:
    return ScalarRisk("em", int(n))


def spectral_minimum(alpha: float) -> ScalarRisk:
    return ScalarRisk("em_alpha", alpha)


def entropic_risk(gamma: float) -> ScalarRisk:
    return ScalarRisk("entropic", gamma)


def custom_risk(func: Callable[[EmpiricalDist], float], name: str = "custom") -> ScalarRisk:
    return ScalarRisk("custom", None, func, name)


# ---------------------------------------------------------------------------
# worst conditioning
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WorstCase:
    """Result of worst conditioning.  ``exact`` is False for search results,
    which are lower bounds of the true supremum."""

    value: float
    exact: bool
    density: Density


def _vertex_density(order, weights, cap):
    l = np.zeros(len(weights))
    mass = 0.0
    for i in order:
        if mass + weights[i] * cap >= 1.0:
            l[i] = (1.0 - mass) / weights[i]
            break
        l[i] = cap
        mass += weights[i] * cap
    return l


def _eval_scalar(rho, D):
    v = rho(D)
    if isinstance(v, RiskPoint) or np.ndim(v) != 0:
        raise TypeError("worst conditioning needs a scalar risk functional")
    return float(v)


def worst_conditioning(
    rho,
    D: EmpiricalDist,
    alpha: float,
    restarts: int = 8,
    sweeps: int = 200,
    seed: int = 0,
) -> WorstCase:
    """Worst risk over reweightings of the atoms with density at most ``1/alpha``.

    Closed forms for ``-E`` (expected shortfall at ``alpha``), ``ES_b``
    (``ES_{alpha b}``) and ``VaR_b`` (``VaR_{alpha b}``).  On atoms these are
    exact for the capped-density family: the greedy density filling the lowest
    atoms at the cap has the pointwise largest CDF ``min(1, F/alpha)`` and
    attains all three.  Other functionals get a seeded local search over the
    vertices of the density polytope (entries in ``{0, 1/alpha}`` plus one
    fractional atom), started from the greedy vertex.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"conditioning level must lie in (0, 1], got {alpha}")
    greedy = tail_density(D, alpha) if D.is_univariate else None
    kind = getattr(rho, "kind", None)
    if kind == "neg_mean":
        return WorstCase(ur.es(D, alpha), True, greedy)
    if kind == "es":
        return WorstCase(ur.es(D, alpha * rho.level), True, greedy)
    if kind == "var" and alpha * rho.level < 1:
        return WorstCase(ur.var(D, alpha * rho.level), True, greedy)

    cap = 1.0 / alpha
    w = D.weights
    m = D.m

    def value(order):
        l = _vertex_density(order, w, cap)
        return _eval_scalar(rho, reweight(D, Density(l, cap))), l

    rng = np.random.default_rng(seed)
    starts = []
    if greedy is not None:
        starts.append(np.argsort(D.values, kind="stable"))
    while len(starts) < max(restarts, 1):
        starts.append(rng.permutation(m))

    best_v, best_l = -math.inf, None
    for order in starts:
        order = np.array(order)
        cur_v, cur_l = value(order)
        if m > 1:
            for _ in range(sweeps):
                n_in = int(np.count_nonzero(cur_l))
                if n_in >= m:
                    break
                i = int(rng.integers(n_in))
                j = int(rng.integers(n_in, m))
                cand = order.copy()
                cand[i], cand[j] = cand[j], cand[i]
                v, l = value(cand)
                if v > cur_v:
                    order, cur_v, cur_l = cand, v, l
        if cur_v > best_v:
            best_v, best_l = cur_v, cur_l
    return WorstCase(best_v, False, Density(best_l, cap))


# ---------------------------------------------------------------------------
# homogenisation and translation constructions
# ---------------------------------------------------------------------------

DEFAULT_T_GRID = np.logspace(-3, 6, 37)


@dataclass(frozen=True)
class GridSupremum:
    """Supremum over a finite parameter grid; a lower bound of the supremum
    over the full parameter range."""

    value: float
    argmax: float
    lower_bound: bool = True


def homogenise(rho, D: EmpiricalDist, t_grid=None) -> GridSupremum:
    """``sup_t rho(t X) / t`` over ``t_grid`` (default ``10^-3 .. 10^6``, 37 points)."""
    t_grid = DEFAULT_T_GRID if t_grid is None else np.asarray(t_grid, dtype=float).reshape(-1)
    if t_grid.size == 0:
        raise ValueError("empty dilation grid")
    if np.any(t_grid <= 0):
        raise ValueError("dilation factors must be positive")
    vals = [float(rho(D.scale(t))) / t for t in t_grid]
    k = int(np.argmax(vals))
    return GridSupremum(float(vals[k]), float(t_grid[k]))


def translate_construct(rho, D: EmpiricalDist, z_grid) -> GridSupremum:
    """``sup_z (rho(X + z) + z)`` over scalar shifts ``z_grid``."""
    z_grid = np.asarray(z_grid, dtype=float).reshape(-1)
    if z_grid.size == 0:
        raise ValueError("empty translation grid")
    if not D.is_univariate:
        raise ValueError("translation construction is implemented for univariate risks")
    vals = [float(rho(D.translate(z))) + z for z in z_grid]
    k = int(np.argmax(vals))
    return GridSupremum(float(vals[k]), float(z_grid[k]))


@dataclass(frozen=True)
class MonotoneFunction:
    """Strictly decreasing continuous bijection with its inverse.

    ``log_f``/``log_inverse`` optionally give ``log f`` and the inverse of
    ``log f``; when present the expectation is formed with ``logsumexp`` so
    that steep utilities survive large dilations.
    """

    f: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[float], float]
    name: str = "f"
    log_f: Callable[[np.ndarray], np.ndarray] | None = None
    log_inverse: Callable[[float], float] | None = None


def exponential_utility(gamma: float) -> MonotoneFunction:
    """``f(t) = exp(-t / gamma)``; generates the entropic risk."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return MonotoneFunction(
        lambda t: np.exp(-np.asarray(t, dtype=float) / gamma),
        lambda v: -gamma * math.log(v) if v > 0 else math.nan,
        f"exp(-t/{gamma:g})",
        log_f=lambda t: -np.asarray(t, dtype=float) / gamma,
        log_inverse=lambda L: -gamma * L,
    )


def linear_decreasing() -> MonotoneFunction:
    return MonotoneFunction(lambda t: -np.asarray(t, dtype=float), lambda v: -v, "-t")


def monotone_function_risk(D: EmpiricalDist, f_spec: MonotoneFunction) -> float:
    """``-f^{-1}(E f(X))`` for a decreasing ``f``."""
    x = D.values
    ux = np.unique(x)
    if f_spec.log_f is not None and f_spec.log_inverse is not None:
        lx = np.asarray(f_spec.log_f(ux), dtype=float)
        if ux.size > 1 and not np.all(np.diff(lx) < 0):
            raise ValueError(f"{f_spec.name} is not strictly decreasing on the atoms")
        L = float(logsumexp(np.asarray(f_spec.log_f(x), dtype=float), b=D.weights))
        return -float(f_spec.log_inverse(L))
    fx = np.asarray(f_spec.f(ux), dtype=float)
    if ux.size > 1 and not np.all(np.diff(fx) < 0):
        raise ValueError(f"{f_spec.name} is not strictly decreasing on the atoms")
    v = float(D.weights @ np.asarray(f_spec.f(x), dtype=float))
    y = f_spec.inverse(v)
    if y is None or not math.isfinite(y):
        raise ValueError(f"E f(X) = {v:.17g} is outside the range of {f_spec.name}")
    back = float(np.asarray(f_spec.f(np.array([y])))[0])
    if abs(back - v) > 1e-9 * (1.0 + abs(v)):
        raise ValueError(f"E f(X) = {v:.17g} is outside the range of {f_spec.name}")
    return -float(y)


def homogenised_monotone_risk(D: EmpiricalDist, f_spec: MonotoneFunction, z_grid, t_grid=None) -> GridSupremum:
    """Homogenisation of the translation construction applied to ``-f^{-1}(E f(X))``."""

    def translated(E):
        return translate_construct(lambda G: monotone_function_risk(G, f_spec), E, z_grid).value

    return homogenise(translated, D, t_grid)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def region_report(D: EmpiricalDist, spec: RegionSpec, grid: DirectionGrid | None = None) -> dict:
    """``{"alpha", "family", "cone", "risk_point", "acceptable", "region"}`` for one level."""
    R = build_region(D, spec, grid)
    r = vector_risk_from_region(R, spec.cone)
    report = {
        "alpha": spec.alpha,
        "family": spec.family,
        "cone": spec.cone.to_json(),
        "risk_point": r.point.tolist(),
        "acceptable": is_acceptable(r),
        "region": R.to_json(),
        "rejection": "complement of region + K",
    }
    if spec.family == "ech" and float(ech_power(spec.level)).is_integer():
        report["n"] = int(ech_power(spec.level))
    return report
