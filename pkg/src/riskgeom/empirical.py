"""Weighted point clouds standing in for bounded random vectors.

Each row of ``points`` is one scenario (atom) with probability ``weights[i]``.
Ties are never merged; CDF-based computations merge them on the fly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Slack when comparing cumulative weights to a probability level; sums of
# equal weights such as 0.1 drift by a few ulps.
CDF_TOL = 1e-12


class DataError(ValueError):
    """Malformed scenario data."""


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EmpiricalDist:
    """Discrete distribution on the rows of ``points`` (shape ``m x d``)."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise DataError(f"points must be a nonempty m x d array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DataError("points must be finite")
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != pts.shape[0]:
            raise DataError(f"{w.shape[0]} weights for {pts.shape[0]} atoms")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DataError("weights must be positive and finite")
        if abs(w.sum() - 1.0) > 1e-12:
            raise DataError(f"weights sum to {w.sum():.17g}, not 1")
        object.__setattr__(self, "points", _readonly(pts))
        object.__setattr__(self, "weights", _readonly(w))

    @classmethod
    def from_arrays(cls, points, weights=None) -> EmpiricalDist:
        """Normalise ``weights`` (default: equal) and build the distribution."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        m = pts.shape[0]
        if m == 0:
            raise DataError("no scenarios")
        if weights is None:
            w = np.full(m, 1.0 / m)
        else:
            w = np.asarray(weights, dtype=float).reshape(-1)
            if w.shape[0] != m:
                raise DataError(f"{w.shape[0]} weights for {m} atoms")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise DataError("weights must be positive and finite")
            w = w / w.sum()
        return cls(pts, w)

    @classmethod
    def point_mass(cls, x) -> EmpiricalDist:
        return cls(np.atleast_2d(np.asarray(x, dtype=float)), np.ones(1))

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def is_univariate(self) -> bool:
        return self.dim == 1

    @property
    def values(self) -> np.ndarray:
        """Atoms of a univariate distribution as a flat array."""
        if not self.is_univariate:
            raise ValueError(f"expected a univariate distribution, got d={self.dim}")
        return self.points[:, 0]

    def mean(self) -> np.ndarray:
        return self.weights @ self.points

    def translate(self, y) -> EmpiricalDist:
        return EmpiricalDist(self.points + np.asarray(y, dtype=float), self.weights)

    def scale(self, t: float) -> EmpiricalDist:
        return EmpiricalDist(t * self.points, self.weights)

    def negate(self) -> EmpiricalDist:
        return EmpiricalDist(-self.points, self.weights)

    def marginal(self, i: int) -> EmpiricalDist:
        return EmpiricalDist(self.points[:, i : i + 1], self.weights)

    def sorted_atoms(self):
        """``(values, weights)`` of a univariate distribution, sorted ascending (stable)."""
        y = self.values
        order = np.argsort(y, kind="stable")
        return y[order], self.weights[order]

    def to_json(self) -> dict:
        return {"points": self.points.tolist(), "weights": self.weights.tolist()}


@dataclass(frozen=True, eq=False)
class Density:
    """Per-atom density ``l`` with ``0 <= l <= cap`` and ``sum(l * w) = 1``."""

    l: np.ndarray
    cap: float

    def __post_init__(self):
        l = _readonly(np.asarray(self.l, dtype=float).reshape(-1))
        if not self.cap >= 1.0:
            raise ValueError(f"density cap must be at least 1, got {self.cap}")
        object.__setattr__(self, "l", l)

    def validate(self, D: EmpiricalDist, tol: float = 1e-9):
        if self.l.shape[0] != D.m:
            raise ValueError(f"density has {self.l.shape[0]} entries for {D.m} atoms")
        if np.any(self.l < 0) or np.any(self.l > self.cap * (1 + 1e-12)):
            raise ValueError(f"density leaves [0, {self.cap:g}]")
        total = float(self.l @ D.weights)
        if abs(total - 1.0) > tol:
            raise ValueError(f"density integrates to {total:.17g}, not 1")


def load_csv(path, weight_column: str | None = "weight") -> EmpiricalDist:
    """Scenario table: header of asset names, one numeric row per scenario.

    A column named ``weight_column`` (if present) holds unnormalised scenario
    weights; otherwise all scenarios are equally likely.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if any(cell.strip() for cell in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DataError(f"{path}: no scenario rows")
    wcol = header.index(weight_column) if weight_column and weight_column in header else None
    assets = [j for j in range(len(header)) if j != wcol]
    if not assets:
        raise DataError(f"{path}: no asset columns")
    pts = np.empty((len(body), len(assets)))
    w = np.ones(len(body))
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"{path}: row {i} has {len(row)} cells, header has {len(header)}")
        for j, cell in enumerate(row):
            try:
                val = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric cell {cell!r} at row {i}, column {j + 1} ({header[j]})"
                ) from None
            if not np.isfinite(val):
                raise DataError(f"{path}: non-finite cell at row {i}, column {j + 1} ({header[j]})")
            if j == wcol:
                if val <= 0:
                    raise DataError(f"{path}: nonpositive weight {val} at row {i}")
                w[i - 2] = val
            else:
                pts[i - 2, assets.index(j)] = val
    return EmpiricalDist.from_arrays(pts, w if wcol is not None else None)


def load_json(path) -> EmpiricalDist:
    """``{"points": [[...], ...], "weights": [...]}``; weights optional."""
    obj = json.loads(Path(path).read_text())
    if "points" not in obj:
        raise DataError(f"{path}: missing 'points'")
    try:
        return EmpiricalDist.from_arrays(obj["points"], obj.get("weights"))
    except (TypeError, ValueError) as exc:
        raise DataError(f"{path}: {exc}") from None


def load(path) -> EmpiricalDist:
    if str(path).lower().endswith(".json"):
        return load_json(path)
    return load_csv(path)


def quantile(D: EmpiricalDist, t: float, kind: str = "left") -> float:
    """Lower quantile ``inf{x : F(x) >= t}`` (``left``) or ``inf{x : F(x) > t}`` (``strict``)."""
    y, w = D.sorted_atoms()
    cum = np.cumsum(w)
    if kind == "left":
        if not 0 < t <= 1:
            raise ValueError(f"left quantile level must lie in (0, 1], got {t}")
        k = int(np.searchsorted(cum, t - CDF_TOL, side="left"))
    elif kind == "strict":
        if not 0 <= t < 1:
            raise ValueError(f"strict quantile level must lie in [0, 1), got {t}")
        k = int(np.searchsorted(cum, t + CDF_TOL, side="right"))
    else:
        raise ValueError(f"unknown quantile kind {kind!r}")
    return float(y[min(k, len(y) - 1)])


def project(D: EmpiricalDist, u) -> EmpiricalDist:
    """Distribution of ``<X, u>``."""
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape[0] != D.dim:
        raise ValueError(f"direction of length {u.shape[0]} for a {D.dim}-dimensional distribution")
    return EmpiricalDist((D.points @ u)[:, None], D.weights)


def linear_transform(D: EmpiricalDist, A) -> EmpiricalDist:
    """Distribution of ``A X``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[1] != D.dim:
        raise ValueError(f"matrix with {A.shape[1]} columns for a {D.dim}-dimensional distribution")
    return EmpiricalDist(D.points @ A.T, D.weights)


def coupled_sum(D: EmpiricalDist, E: EmpiricalDist) -> EmpiricalDist:
    """``X + Y`` for two portfolios on the same scenario rows."""
    if D.m != E.m or not np.array_equal(D.weights, E.weights):
        raise ValueError("coupled sum needs the same scenarios (row count and weights)")
    if D.dim != E.dim:
        raise ValueError(f"dimension mismatch {D.dim} vs {E.dim}")
    return EmpiricalDist(D.points + E.points, D.weights)


def coupled_combination(D: EmpiricalDist, E: EmpiricalDist, t: float) -> EmpiricalDist:
    """``t X + (1 - t) Y`` on shared scenarios."""
    if D.m != E.m or not np.array_equal(D.weights, E.weights) or D.dim != E.dim:
        raise ValueError("coupled combination needs the same scenarios and dimension")
    return EmpiricalDist(t * D.points + (1 - t) * E.points, D.weights)


def reweight(D: EmpiricalDist, density: Density) -> EmpiricalDist:
    """Law with weights ``w_i l_i`` (zero-weight atoms dropped)."""
    density.validate(D)
    nw = D.weights * density.l
    keep = nw > 0
    nw = nw[keep]
    return EmpiricalDist(D.points[keep], nw / nw.sum())


def tail_density(D: EmpiricalDist, alpha: float, u=None) -> Density:
    """Capped density putting weight ``1/alpha`` on the lowest atoms of ``<X, u>``.

    Atoms are filled in ascending order (stable) until the reweighted mass
    reaches one; the boundary atom gets the fractional remainder.  This density
    attains ``inf E_l <X, u>`` over all densities bounded by ``1/alpha``.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if u is None:
        y = D.values
    else:
        y = D.points @ np.asarray(u, dtype=float)
    cap = 1.0 / alpha
    order = np.argsort(y, kind="stable")
    l = np.zeros(D.m)
    mass = 0.0
    for i in order:
        w = D.weights[i]
        if mass + w * cap >= 1.0:
            l[i] = (1.0 - mass) / w
            break
        l[i] = cap
        mass += w * cap
    return Density(l, cap)
