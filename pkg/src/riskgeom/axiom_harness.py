"""Randomised certification of the risk axioms R1-R4 and region axioms D1-D6.

Every trial draws its inputs from a seed derived from the master seed and the
trial counter, so any recorded violation can be replayed in isolation with
:func:`replay`.  Portfolios that must be added or compared share scenario rows
(coupled pairs); that is the only way to form ``X + Y`` or ``Y <=_K X`` on
empirical data.

Some axioms are expected to fail: VaR and the halfspace-induced risk are not
subadditive, the entropic risk is not homogeneous, and halfspace regions break
D6.  For those the check passes only when a violation is found.
"""

from __future__ import annotations

import hashlib
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import univariate_risk as ur
from .cone_algebra import RieszCone
from .convex_region import DirectionGrid
from .depth_regions import RegionSpec, build_region, halfspace_constraints
from .empirical import EmpiricalDist, coupled_combination, coupled_sum
from .risk_engine import region_risk

TOL = 1e-9
MAX_RECORDED = 25


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    seed: int
    digest: str
    lhs: float
    rhs: float
    gap: float

    def to_json(self) -> dict:
        return {"seed": self.seed, "digest": self.digest, "lhs": self.lhs, "rhs": self.rhs, "gap": self.gap}


@dataclass
class AxiomReport:
    axiom: str
    subject: str
    expect: str  # "hold", "violate" or "vacuous"
    trials: int
    tolerance: float
    violations: list = field(default_factory=list)
    violation_count: int = 0

    @property
    def passed(self) -> bool:
        if self.expect == "hold":
            return self.violation_count == 0
        if self.expect == "violate":
            return self.violation_count > 0
        return True

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "subject": self.subject,
            "expect": self.expect,
            "passed": self.passed,
            "trials": self.trials,
            "tolerance": self.tolerance,
            "violation_count": self.violation_count,
            "violations": [v.to_json() for v in self.violations],
        }


@dataclass
class SuiteReport:
    subject: str
    seed: int
    trials: int
    axioms: list

    @property
    def ok(self) -> bool:
        return all(a.passed for a in self.axioms)

    def __getitem__(self, axiom: str) -> AxiomReport:
        for a in self.axioms:
            if a.axiom == axiom:
                return a
        raise KeyError(axiom)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "subject": self.subject,
            "seed": self.seed,
            "trials": self.trials,
            "ok": self.ok,
            "axioms": [a.to_json() for a in self.axioms],
        }


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def trial_seed(master: int, counter: int) -> int:
    return int(np.random.SeedSequence([int(master), int(counter)]).generate_state(1, dtype=np.uint64)[0] >> 1)


def _rng(seed: int, tag: str):
    return np.random.default_rng([seed, zlib.crc32(tag.encode())])


def random_cloud(rng, d: int | None = None, m: int | None = None) -> EmpiricalDist:
    """Mixture of uniform and shifted-lognormal clouds, m in [2, 50], d in {1, 2, 3}."""
    d = int(rng.integers(1, 4)) if d is None else d
    m = int(rng.integers(2, 51)) if m is None else m
    if rng.random() < 0.5:
        pts = rng.uniform(-2.0, 2.0, size=(m, d))
    else:
        pts = rng.lognormal(0.0, 0.6, size=(m, d)) - rng.uniform(0.0, 2.0)
    if rng.random() < 0.3:
        # coarse rounding produces tied atoms
        pts = np.round(pts, 1)
    w = None if rng.random() < 0.5 else rng.uniform(0.2, 1.0, size=m)
    return EmpiricalDist.from_arrays(pts, w)


def random_partner(rng, X: EmpiricalDist) -> EmpiricalDist:
    """Second portfolio on the scenarios of ``X``."""
    other = random_cloud(rng, d=X.dim, m=X.m)
    if rng.random() < 0.3:
        # partly comonotone partner
        return EmpiricalDist(other.points + rng.uniform(-1, 1) * X.points, X.weights)
    return EmpiricalDist(other.points, X.weights)


def random_cone(rng, d: int) -> RieszCone:
    if rng.random() < 0.3:
        return RieszCone.identity(d)
    A = np.diag(rng.uniform(0.5, 2.0, size=d))
    mask = rng.random((d, d)) < 0.5
    A = A + np.where(mask & ~np.eye(d, dtype=bool), rng.uniform(0.0, 1.0, size=(d, d)), 0.0)
    return RieszCone.from_matrix(A)


def dominated(rng, X: EmpiricalDist, K: RieszCone) -> EmpiricalDist:
    """``Y <=_K X`` row by row: ``Y = X - A^{-1} z`` with ``z >= 0``."""
    z = rng.exponential(1.0, size=X.points.shape) * (rng.random(X.points.shape) < 0.7)
    return EmpiricalDist(X.points - z @ K.A_inv.T, X.weights)


def crafted_tail_pair(rng, d: int = 1):
    """Two portfolios losing ``L`` on disjoint scenarios of probability ``p`` each.

    At a level in ``[p, 2p)`` both have zero VaR but their sum loses ``L`` with
    probability ``2p``, so the quantile of the sum drops below the sum of quantiles.
    """
    p = rng.uniform(0.02, 0.2)
    alpha = rng.uniform(1.05 * p, 1.95 * p)
    L = rng.uniform(0.5, 3.0)
    w = np.array([p, p, 1.0 - 2 * p])
    x = np.zeros((3, d))
    y = np.zeros((3, d))
    x[0, 0] = -L
    y[1, 0] = -L
    if d > 1:
        x[:, 1:] = rng.uniform(0, 1, size=(3, d - 1))
        y[:, 1:] = rng.uniform(0, 1, size=(3, d - 1))
    shift = rng.uniform(-1.0, 1.0)
    return EmpiricalDist(x + shift, w), EmpiricalDist(y - shift, w), float(alpha)


def _grid(rng, d: int, K: RieszCone) -> DirectionGrid:
    extra = rng.normal(size=(4, d)) if d == 3 else None
    if extra is not None:
        extra = np.vstack([extra, -extra])
    return DirectionGrid.build(d, K, n_angles=32, extra=extra)


def _digest(*items) -> str:
    h = hashlib.sha256()
    for it in items:
        if isinstance(it, EmpiricalDist):
            h.update(it.points.tobytes())
            h.update(it.weights.tobytes())
        elif isinstance(it, RieszCone):
            h.update(it.A.tobytes())
        else:
            h.update(np.asarray(it, dtype=float).tobytes())
    return h.hexdigest()[:16]


def _compare_eq(lhs, rhs):
    lhs, rhs = np.atleast_1d(lhs), np.atleast_1d(rhs)
    k = int(np.argmax(np.abs(lhs - rhs)))
    return float(lhs[k]), float(rhs[k]), float(abs(lhs[k] - rhs[k]))


def _compare_le(lhs, rhs):
    lhs, rhs = np.atleast_1d(lhs), np.atleast_1d(rhs)
    k = int(np.argmax(lhs - rhs))
    return float(lhs[k]), float(rhs[k]), float(lhs[k] - rhs[k])


# ---------------------------------------------------------------------------
# risk measures under test
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RiskSubject:
    name: str
    vector: bool
    expect: dict  # axiom -> "hold" | "violate"
    crafted_r4: bool = False

    def draw(self, rng, crafted_level=None):
        """Return ``(evaluate(D) -> A-coordinates of the risk, cone, dim)`` for one trial."""
        raise NotImplementedError


_COHERENT = {"R1": "hold", "R2": "hold", "R3": "hold", "R4": "hold"}
_HOMOGENEOUS = {"R1": "hold", "R2": "hold", "R3": "hold", "R4": "violate"}
_CONVEX = {"R1": "hold", "R2": "hold", "R3": "violate", "CRM": "hold"}


def _scalar_measure(name, rng, level=None):
    if name == "es":
        a = rng.uniform(0.05, 1.0) if level is None else level
        return (lambda D: ur.es(D, a)), {"alpha": a}
    if name == "em":
        n = int(rng.integers(1, 6))
        return (lambda D: ur.em(D, n)), {"n": n}
    if name == "em_alpha":
        a = rng.uniform(0.1, 1.0)
        return (lambda D: ur.em_alpha(D, a)), {"alpha": a}
    if name == "neg_mean":
        return ur.neg_mean, {}
    if name == "var":
        a = rng.uniform(0.05, 0.95) if level is None else level
        return (lambda D: ur.var(D, a)), {"alpha": a}
    if name == "entropic":
        g = rng.uniform(0.3, 3.0)
        return (lambda D: ur.entropic(D, g)), {"gamma": g}
    raise KeyError(name)


def _vector_measure(name, rng, d, level=None, cone=None):
    K = random_cone(rng, d) if cone is None else cone
    if name == "zonoid_vector":
        spec = RegionSpec("zonoid", rng.uniform(0.05, 1.0), K)
    elif name == "ech_vector":
        spec = RegionSpec("ech", int(rng.integers(1, 5)), K)
    elif name == "halfspace_vector":
        spec = RegionSpec("halfspace", rng.uniform(0.05, 0.95) if level is None else level, K)
    else:
        raise KeyError(name)
    return (lambda D: region_risk(D, spec).point), K


RISK_SUBJECTS = {
    "es": _COHERENT,
    "em": _COHERENT,
    "em_alpha": _COHERENT,
    "neg_mean": _COHERENT,
    "var": _HOMOGENEOUS,
    "entropic": _CONVEX,
    "zonoid_vector": _COHERENT,
    "ech_vector": _COHERENT,
    "halfspace_vector": _HOMOGENEOUS,
}
_CRAFTED_R4 = {"var", "halfspace_vector"}


def _risk_trial(subject: str, axiom: str, seed: int):
    """Evaluate one axiom instance; returns ``(lhs, rhs, gap, digest)``.

    Risks are compared in the coordinates ``A x`` of the cone matrix, where
    ``x <=_K y`` is the componentwise order (scalar risks use ``A = [1]``).
    """
    rng = _rng(seed, f"{subject}/{axiom}")
    vector = subject.endswith("_vector")
    crafted = axiom == "R4" and subject in _CRAFTED_R4 and rng.random() < 0.5
    if crafted:
        d = int(rng.integers(1, 4)) if vector else 1
        X, Y, level = crafted_tail_pair(rng, d)
    else:
        X = random_cloud(rng, d=None if vector else 1)
        Y = None
        level = None
    d = X.dim
    if vector:
        rho, K = _vector_measure(subject, rng, d, level, RieszCone.identity(d) if crafted else None)
    else:
        rho, _ = _scalar_measure(subject, rng, level)
        K = RieszCone.identity(1)
    A = K.A

    def coords(D):
        return A @ np.atleast_1d(rho(D))

    if axiom == "R1":
        y = rng.uniform(-3, 3, size=d)
        lhs = np.atleast_1d(rho(X.translate(y)))
        rhs = np.atleast_1d(rho(X)) - y
        return (*_compare_eq(A @ lhs, A @ rhs), _digest(X, K, y))
    if axiom == "R2":
        Yd = dominated(rng, X, K)
        # Y <=_K X  =>  rho(X) <=_K rho(Y)
        return (*_compare_le(coords(X), coords(Yd)), _digest(X, Yd, K))
    if axiom == "R3":
        t = rng.uniform(0.0, 10.0) or 1.0
        if abs(t - 1.0) < 1e-3:
            t = 2.0
        lhs = coords(X.scale(t))
        rhs = t * coords(X)
        return (*_compare_eq(lhs, rhs), _digest(X, K, [t]))
    if axiom == "R4":
        if Y is None:
            Y = random_partner(rng, X)
        lhs = coords(coupled_sum(X, Y))
        rhs = coords(X) + coords(Y)
        # rho(X) + rho(Y) subset rho(X+Y)  <=>  x*(X+Y) <=_K x*(X) + x*(Y)
        return (*_compare_le(lhs, rhs), _digest(X, Y, K))
    if axiom == "CRM":
        Y = random_partner(rng, X)
        t = rng.uniform(0.0, 1.0)
        lhs = coords(coupled_combination(X, Y, t))
        rhs = t * coords(X) + (1 - t) * coords(Y)
        return (*_compare_le(lhs, rhs), _digest(X, Y, K, [t]))
    raise KeyError(axiom)


# ---------------------------------------------------------------------------
# region families under test
# ---------------------------------------------------------------------------

REGION_FAMILIES = {
    "zonoid": {"D1": "hold", "D2": "hold", "D3": "hold", "D4": "vacuous", "D5": "hold", "D6": "hold"},
    "ech": {"D1": "hold", "D2": "hold", "D3": "hold", "D4": "vacuous", "D5": "hold", "D6": "hold"},
    "halfspace": {"D1": "hold", "D2": "hold", "D3": "hold", "D4": "vacuous", "D5": "hold", "D6": "violate"},
}
_LEVEL_CHAINS = {
    "zonoid": [1.0, 0.8, 0.6, 0.4, 0.2],
    "ech": [1, 2, 3],
    "halfspace": [0.9, 0.7, 0.5, 0.3, 0.1],
}


def _draw_level(rng, family):
    if family == "zonoid":
        return rng.uniform(0.05, 1.0)
    if family == "ech":
        return int(rng.integers(1, 4))
    return rng.uniform(0.05, 0.95)


def _values(R):
    """Support values for support regions, thresholds for constraint regions."""
    return np.asarray(R.h if hasattr(R, "h") else R.q)


def _region_trial(family: str, axiom: str, seed: int):
    rng = _rng(seed, f"{family}/{axiom}")
    halfspace = family == "halfspace"
    crafted = halfspace and axiom == "D6" and rng.random() < 0.5
    if crafted:
        d = int(rng.integers(1, 4))
        X, Y, level = crafted_tail_pair(rng, d)
        K = RieszCone.identity(d)
    else:
        X = random_cloud(rng)
        d = X.dim
        Y = None
        K = random_cone(rng, d)
        level = _draw_level(rng, family)
    grid = _grid(rng, d, K)

    def region(D, lev=level, generators_only=False):
        if halfspace and generators_only:
            return halfspace_constraints(D, lev, K)
        return build_region(D, RegionSpec(family, lev, K), grid)

    if axiom == "D1":
        y = rng.uniform(-3, 3, size=d)
        base = region(X)
        dirs = base.grid.dirs if hasattr(base, "grid") else base.dirs
        return (*_compare_eq(_values(region(X.translate(y))), _values(base) + dirs @ y), _digest(X, K, y))
    if axiom == "D2":
        t = rng.uniform(0.05, 10.0)
        return (*_compare_eq(_values(region(X.scale(t))), t * _values(region(X))), _digest(X, K, [t]))
    if axiom == "D3":
        chain = [_values(region(X, lev)) for lev in _LEVEL_CHAINS[family]]
        worst = (0.0, 0.0, -np.inf)
        for inner, outer in zip(chain, chain[1:]):
            # halfspace: larger threshold = smaller region
            cmp = _compare_le(outer, inner) if halfspace else _compare_le(inner, outer)
            if cmp[2] > worst[2]:
                worst = cmp
        return (*worst, _digest(X, K))
    if axiom == "D5":
        Yd = dominated(rng, X, K)
        zero = EmpiricalDist(np.zeros_like(X.points), X.weights)
        z_vals = _values(region(zero))
        z_cmp = _compare_eq(z_vals, np.zeros_like(z_vals))
        if halfspace:
            # region(X) subset region(Y): thresholds of X dominate those of Y
            cmp = _compare_le(_values(region(Yd)), _values(region(X)))
        else:
            from .cone_algebra import in_dual_cone

            anti = grid.antipodes
            idx = [i for i, u in enumerate(grid.dirs) if in_dual_cone(u, K) and anti[i] >= 0]
            neg = anti[idx]
            # region(X) subset region(Y) + K  =>  h(X, -u) <= h(Y, -u) for u in K*
            cmp = _compare_le(_values(region(X))[neg], _values(region(Yd))[neg])
        worst = cmp if cmp[2] >= z_cmp[2] else z_cmp
        return (*worst, _digest(X, Yd, K))
    if axiom == "D6":
        if Y is None:
            Y = random_partner(rng, X)
        S = coupled_sum(X, Y)
        if halfspace:
            # generator-only constraints are all tight, so the sum's thresholds
            # must dominate the summed thresholds for the inclusion to hold
            q = lambda D: _values(region(D, generators_only=True))
            return (*_compare_le(q(X) + q(Y), q(S)), _digest(X, Y, K))
        return (*_compare_le(_values(region(S)), _values(region(X)) + _values(region(Y))), _digest(X, Y, K))
    raise KeyError(axiom)


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------


def _run(subject, expectations, trial_fn, seed, trials, tol):
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    reports = []
    for axiom, expect in expectations.items():
        rep = AxiomReport(axiom, subject, expect, 0 if expect == "vacuous" else trials, tol)
        if expect != "vacuous":
            for i in range(trials):
                s = trial_seed(seed, i)
                lhs, rhs, gap, digest = trial_fn(subject, axiom, s)
                if gap > tol:
                    rep.violation_count += 1
                    if len(rep.violations) < MAX_RECORDED:
                        rep.violations.append(Violation(s, digest, lhs, rhs, gap))
        reports.append(rep)
    return SuiteReport(subject, int(seed), int(trials), reports)


def check_risk_axioms(risk_id: str, generator_seed: int = 0, trials: int = 200, tol: float = TOL) -> SuiteReport:
    """Run R1-R4 (or R1-R3 plus convexity) for a registered risk measure.

    Registered ids: ``es``, ``em``, ``em_alpha``, ``neg_mean``, ``var``,
    ``entropic``, ``zonoid_vector``, ``ech_vector``, ``halfspace_vector``.
    """
    if risk_id not in RISK_SUBJECTS:
        raise KeyError(f"unknown risk measure {risk_id!r}; registered: {sorted(RISK_SUBJECTS)}")
    return _run(risk_id, RISK_SUBJECTS[risk_id], _risk_trial, generator_seed, trials, tol)


def check_region_axioms(family: str, generator_seed: int = 0, trials: int = 100, tol: float = TOL) -> SuiteReport:
    """Run D1-D6 for ``zonoid``, ``ech`` or ``halfspace`` regions (D4 is structural)."""
    if family not in REGION_FAMILIES:
        raise KeyError(f"unknown region family {family!r}; registered: {sorted(REGION_FAMILIES)}")
    return _run(family, REGION_FAMILIES[family], _region_trial, generator_seed, trials, tol)


def replay(subject: str, axiom: str, seed: int):
    """Re-evaluate a single recorded trial; returns ``(lhs, rhs, gap, digest)``."""
    if subject in RISK_SUBJECTS:
        return _risk_trial(subject, axiom, seed)
    if subject in REGION_FAMILIES:
        return _region_trial(subject, axiom, seed)
    raise KeyError(subject)
