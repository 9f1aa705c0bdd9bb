"""Riesz cones ``K = A^{-1} R^d_+`` and the order ``x <=_K y`` they induce."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAX_CONDITION = 1e12


class ConeError(ValueError):
    """Invalid cone matrix or a direction outside the dual cone."""


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RieszCone:
    """Cone ``K = {x : A x >= 0}`` for a nonsingular nonnegative matrix ``A``.

    Use :meth:`from_matrix` or :meth:`identity`; the inverse is computed once
    and cached.
    """

    A: np.ndarray
    A_inv: np.ndarray

    @classmethod
    def from_matrix(cls, A) -> RieszCone:
        A = np.array(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise ConeError(f"cone matrix must be square and nonempty, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ConeError("cone matrix has non-finite entries")
        if np.any(A < 0):
            raise ConeError("cone matrix must have nonnegative entries")
        scale = float(np.max(np.abs(A)))
        d = A.shape[0]
        if scale == 0.0 or abs(np.linalg.det(A / scale)) <= 1e-12:
            raise ConeError("cone matrix is singular")
        cond = np.linalg.cond(A)
        if not np.isfinite(cond) or cond > MAX_CONDITION:
            raise ConeError(f"cone matrix is ill-conditioned (cond={cond:.3g} > {MAX_CONDITION:g})")
        # LAPACK getrf/getri: LU with partial pivoting.
        A_inv = np.linalg.inv(A)
        if np.max(np.abs(A @ A_inv - np.eye(d))) > 1e-10:
            raise ConeError("cone matrix inverse failed the A @ A_inv = I check")
        return cls(_frozen(A), _frozen(A_inv))

    @classmethod
    def identity(cls, d: int) -> RieszCone:
        return cls.from_matrix(np.eye(d))

    @classmethod
    def from_json(cls, obj, d: int | None = None) -> RieszCone:
        """Build from ``{"A": [[...], ...]}``; a missing ``A`` means the orthant."""
        if isinstance(obj, (str, Path)):
            obj = json.loads(Path(obj).read_text())
        if obj is None or obj.get("A") is None:
            if d is None:
                raise ConeError("cone config without 'A' needs the dimension")
            return cls.identity(d)
        cone = cls.from_matrix(obj["A"])
        if d is not None and cone.dim != d:
            raise ConeError(f"cone dimension {cone.dim} does not match data dimension {d}")
        return cone

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def is_orthant(self) -> bool:
        return bool(np.array_equal(self.A, np.eye(self.dim)))

    def to_json(self) -> dict:
        return {"A": self.A.tolist()}

    def __repr__(self):
        return f"RieszCone(A={self.A.tolist()})"


def _check_dim(x, K: RieszCone):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != K.dim:
        raise ValueError(f"vector of length {x.shape[0]} does not match cone dimension {K.dim}")
    return x


def cone_contains(x, K: RieszCone) -> bool:
    """True iff ``x`` lies in ``K`` (componentwise ``A x >= -tol``)."""
    x = _check_dim(x, K)
    if not np.all(np.isfinite(x)):
        raise ValueError("cone membership needs a finite vector")
    ax = K.A @ x
    tol = 1e-12 * float(np.max(np.abs(ax))) + 1e-15
    return bool(np.all(ax >= -tol))


def leq_k(x, y, K: RieszCone) -> bool:
    """``x <=_K y``, i.e. ``y - x`` in ``K``."""
    x = _check_dim(x, K)
    y = _check_dim(y, K)
    return cone_contains(y - x, K)


def dual_generators(K: RieszCone) -> np.ndarray:
    """Rows of ``A``; they generate the positive dual cone ``K*``.

    For ``v = A^{-1} z`` with ``z >= 0``, ``<a_i, v> = z_i >= 0``, and any
    ``u`` with ``A^{-T} u >= 0`` is a nonnegative combination of the rows.
    """
    return np.array(K.A)


def in_dual_cone(u, K: RieszCone, tol: float = 1e-12) -> bool:
    """True iff ``<u, v> >= 0`` for all ``v`` in ``K`` (``A^{-T} u >= -tol``)."""
    u = _check_dim(u, K)
    coeff = K.A_inv.T @ u
    return bool(np.all(coeff >= -tol * (1.0 + float(np.max(np.abs(coeff))))))


def normalized_generators(K: RieszCone):
    """Unit dual generators ``a_i / |a_i|`` and the norms ``|a_i|``."""
    norms = np.linalg.norm(K.A, axis=1)
    return K.A / norms[:, None], norms


def k_infimum(F, K: RieszCone) -> np.ndarray:
    """The ``<=_K``-infimum of a region, ``A^{-1} m`` with ``m_i = inf_F <a_i, x>``.

    ``F`` is a :class:`~riskgeom.convex_region.SupportRegion` (uses the support
    values in directions ``-a_i/|a_i|``) or a
    :class:`~riskgeom.convex_region.ConstraintRegion` (uses the thresholds in
    directions ``a_i/|a_i|``, the tight lower corner of the constraint set).
    Required directions must be present; nothing is interpolated.
    """
    from .convex_region import ConstraintRegion, SupportRegion

    unit, norms = normalized_generators(K)
    if isinstance(F, SupportRegion):
        if F.dim != K.dim:
            raise ValueError(f"region dimension {F.dim} does not match cone dimension {K.dim}")
        m = np.array([-F.support_at(-a) for a in unit]) * norms
    elif isinstance(F, ConstraintRegion):
        if F.dim != K.dim:
            raise ValueError(f"region dimension {F.dim} does not match cone dimension {K.dim}")
        m = np.array([F.threshold_at(a) for a in unit]) * norms
    else:
        raise TypeError(f"k_infimum needs a SupportRegion or ConstraintRegion, got {type(F).__name__}")
    return K.A_inv @ m
