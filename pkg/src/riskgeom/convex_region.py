"""Convex regions carried by support values on a fixed direction grid.

A :class:`SupportRegion` stores ``h(F, u) = sup{<x, u> : x in F}`` for every
grid direction.  Minkowski sums add support values and dilations scale them,
so region arithmetic is exact on the grid.  Intersections are deliberately
absent (a pointwise minimum of support functions is not a support function);
unbounded upper sets are :class:`ConstraintRegion` objects instead.
"""

from __future__ import annotations

import math

import numpy as np

from .cone_algebra import RieszCone, in_dual_cone, normalized_generators

UNIT_TOL = 1e-12
DUP_TOL = 1e-10
SUBSET_TOL = 1e-9


class GridError(ValueError):
    """Direction grid mismatch or a required direction missing from a grid."""


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _normalize_rows(dirs):
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(norms == 0) or not np.all(np.isfinite(dirs)):
        raise GridError("directions must be finite and nonzero")
    return dirs / norms[:, None]


def _dedupe(dirs):
    kept = []
    for u in dirs:
        if all(np.linalg.norm(u - v) > DUP_TOL for v in kept):
            kept.append(u)
    return np.array(kept)


class DirectionGrid:
    """Finite set of unit directions shared by every region of one computation.

    In 2D the directions are kept sorted by polar angle in ``[0, 2 pi)``.
    """

    def __init__(self, dirs):
        dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
        if dirs.shape[0] == 0:
            raise GridError("direction grid is empty")
        if np.any(np.abs(np.linalg.norm(dirs, axis=1) - 1.0) > UNIT_TOL):
            raise GridError("grid directions must be unit vectors")
        if len(_dedupe(dirs)) != len(dirs):
            raise GridError("grid contains duplicate directions")
        if dirs.shape[1] == 2:
            ang = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2 * math.pi)
            dirs = dirs[np.argsort(ang, kind="stable")]
        self.dirs = _readonly(dirs)
        self._antipodes = None

    @classmethod
    def build(cls, d: int, cone: RieszCone | None = None, n_angles: int = 64, extra=None):
        """Grid with ``+-e_i``, ``+-a_i/|a_i|`` for ``cone``, optional extras and,
        in 2D, ``n_angles`` equally spaced angles."""
        required = [np.eye(d), -np.eye(d)]
        if cone is not None:
            if cone.dim != d:
                raise GridError(f"cone dimension {cone.dim} does not match grid dimension {d}")
            unit, _ = normalized_generators(cone)
            required += [unit, -unit]
        if extra is not None and len(extra):
            required.append(_normalize_rows(extra))
        dirs = _dedupe(np.vstack(required))
        if d == 2 and n_angles:
            theta = 2 * math.pi * np.arange(n_angles) / n_angles
            ring = np.column_stack([np.cos(theta), np.sin(theta)])
            ring = [u for u in ring if np.min(np.linalg.norm(dirs - u, axis=1)) > DUP_TOL]
            if ring:
                dirs = np.vstack([dirs, ring])
        return cls(dirs)

    @property
    def dim(self) -> int:
        return self.dirs.shape[1]

    def __len__(self):
        return self.dirs.shape[0]

    def __eq__(self, other):
        return isinstance(other, DirectionGrid) and np.array_equal(self.dirs, other.dirs)

    def __hash__(self):
        return hash(self.dirs.tobytes())

    @property
    def antipodes(self) -> np.ndarray:
        """Index of ``-u`` for each direction ``u``, or -1 when absent."""
        if self._antipodes is None:
            idx = [self.find(-u) for u in self.dirs]
            self._antipodes = np.array([-1 if k is None else k for k in idx])
        return self._antipodes

    def find(self, u) -> int | None:
        u = np.asarray(u, dtype=float).reshape(-1)
        if u.shape[0] != self.dim:
            raise GridError(f"direction of length {u.shape[0]} on a {self.dim}-dimensional grid")
        n = np.linalg.norm(u)
        if n == 0:
            raise GridError("zero direction")
        dist = np.linalg.norm(self.dirs - u / n, axis=1)
        k = int(np.argmin(dist))
        return k if dist[k] <= DUP_TOL else None

    def index_of(self, u) -> int:
        k = self.find(u)
        if k is None:
            raise GridError(f"direction {np.asarray(u).tolist()} is not on the grid")
        return k


class SupportRegion:
    """Compact convex region given by its support values on ``grid``."""

    def __init__(self, grid: DirectionGrid, h):
        h = np.asarray(h, dtype=float).reshape(-1)
        if h.shape[0] != len(grid):
            raise GridError(f"{h.shape[0]} support values for a grid of {len(grid)} directions")
        if not np.all(np.isfinite(h)):
            raise ValueError("support values must be finite")
        self.grid = grid
        self.h = _readonly(h)
        self._check_nonempty()

    def _check_nonempty(self):
        anti = self.grid.antipodes
        paired = anti >= 0
        width = self.h[paired] + self.h[anti[paired]]
        scale = 1.0 + float(np.max(np.abs(self.h)))
        if np.any(width < -SUBSET_TOL * scale):
            u = self.grid.dirs[paired][int(np.argmin(width))]
            raise ValueError(f"support values describe an empty region along {u.tolist()}")

    @classmethod
    def from_points(cls, grid: DirectionGrid, vertices) -> SupportRegion:
        """Support values of the convex hull of ``vertices``."""
        v = np.atleast_2d(np.asarray(vertices, dtype=float))
        return cls(grid, np.max(v @ grid.dirs.T, axis=0))

    @classmethod
    def singleton(cls, grid: DirectionGrid, p) -> SupportRegion:
        return cls(grid, grid.dirs @ np.asarray(p, dtype=float))

    @property
    def dim(self) -> int:
        return self.grid.dim

    def support_at(self, u) -> float:
        return float(self.h[self.grid.index_of(u)])

    def to_json(self) -> dict:
        return {"directions": self.grid.dirs.tolist(), "support": self.h.tolist()}

    @classmethod
    def from_json(cls, obj) -> SupportRegion:
        try:
            return cls(DirectionGrid(obj["directions"]), obj["support"])
        except KeyError as exc:
            raise ValueError(f"region JSON is missing field {exc}") from None

    def __repr__(self):
        return f"SupportRegion(d={self.dim}, directions={len(self.grid)})"


def _same_grid(F: SupportRegion, G: SupportRegion):
    if F.grid is not G.grid and F.grid != G.grid:
        raise GridError("regions live on different direction grids")


def minkowski_sum(F: SupportRegion, G: SupportRegion) -> SupportRegion:
    _same_grid(F, G)
    return SupportRegion(F.grid, F.h + G.h)


def scale_translate(F: SupportRegion, t: float, y=None) -> SupportRegion:
    """Support values of ``t F + y``: ``t h(F, u) + <y, u>``."""
    if not t > 0:
        raise ValueError(f"dilation factor must be positive, got {t}")
    h = t * F.h
    if y is not None:
        h = h + F.grid.dirs @ np.asarray(y, dtype=float)
    return SupportRegion(F.grid, h)


def subset_on_grid(F: SupportRegion, G: SupportRegion, tol: float = SUBSET_TOL) -> bool:
    """Grid-certified inclusion ``F subset G``: ``h_F <= h_G + tol`` everywhere."""
    _same_grid(F, G)
    return bool(np.all(F.h <= G.h + tol))


def polygon_2d(F: SupportRegion, merge_tol: float = 1e-9) -> np.ndarray:
    """Vertices (counter-clockwise) of the polygon cut out by the grid's support lines.

    The polygon contains the region and coincides with it when the grid refines
    the region's normal fan.  Consecutive near-parallel lines are merged.
    """
    if F.dim != 2:
        raise GridError(f"polygon extraction needs a 2D region, got d={F.dim}")
    dirs, h = F.grid.dirs, F.h
    ang = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2 * math.pi)
    keep_u, keep_h, keep_a = [], [], []
    for u, hv, a in zip(dirs, h, ang):
        if keep_a and a - keep_a[-1] < merge_tol:
            keep_h[-1] = min(keep_h[-1], hv)
            continue
        keep_u.append(u)
        keep_h.append(hv)
        keep_a.append(a)
    if len(keep_a) > 1 and keep_a[0] + 2 * math.pi - keep_a[-1] < merge_tol:
        keep_h[0] = min(keep_h[0], keep_h.pop())
        keep_u.pop()
        keep_a.pop()
    n = len(keep_u)
    if n < 3:
        raise GridError(f"need at least 3 distinct directions for a polygon, got {n}")
    gaps = np.diff(np.append(keep_a, keep_a[0] + 2 * math.pi))
    if np.max(gaps) >= math.pi - 1e-12:
        raise GridError("grid directions do not positively span the plane; polygon is unbounded")

    verts = []
    for i in range(n):
        j = (i + 1) % n
        M = np.array([keep_u[i], keep_u[j]])
        verts.append(np.linalg.solve(M, [keep_h[i], keep_h[j]]))
    verts = np.array(verts)

    scale = 1.0 + float(np.max(np.abs(verts)))
    out = [verts[0]]
    for v in verts[1:]:
        if np.linalg.norm(v - out[-1]) > merge_tol * scale:
            out.append(v)
    if len(out) > 1 and np.linalg.norm(out[0] - out[-1]) <= merge_tol * scale:
        out.pop()
    return np.array(out)


def polygon_area(vertices) -> float:
    """Shoelace area of an ordered vertex list (0 for fewer than 3 vertices)."""
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(float(x @ np.roll(y, -1) - y @ np.roll(x, -1)))


class ConstraintRegion:
    """Upper set ``{x : <u_k, x> >= q_k for all k}`` with every ``u_k`` in ``K*``."""

    def __init__(self, dirs, q, cone: RieszCone):
        dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
        q = np.asarray(q, dtype=float).reshape(-1)
        if dirs.shape[0] != q.shape[0]:
            raise ValueError(f"{dirs.shape[0]} constraint directions but {q.shape[0]} thresholds")
        if dirs.shape[1] != cone.dim:
            raise ValueError(f"constraint dimension {dirs.shape[1]} does not match cone dimension {cone.dim}")
        if np.any(np.abs(np.linalg.norm(dirs, axis=1) - 1.0) > UNIT_TOL):
            raise GridError("constraint directions must be unit vectors")
        for u in dirs:
            if not in_dual_cone(u, cone):
                raise ValueError(f"constraint direction {u.tolist()} is not in the dual cone")
        self.dirs = _readonly(dirs)
        self.q = _readonly(q)
        self.cone = cone

    @property
    def dim(self) -> int:
        return self.dirs.shape[1]

    def threshold_at(self, u) -> float:
        u = np.asarray(u, dtype=float)
        dist = np.linalg.norm(self.dirs - u / np.linalg.norm(u), axis=1)
        k = int(np.argmin(dist))
        if dist[k] > DUP_TOL:
            raise GridError(f"no constraint in direction {u.tolist()}")
        return float(self.q[k])

    def contains(self, x, tol: float = SUBSET_TOL) -> bool:
        return bool(np.all(self.dirs @ np.asarray(x, dtype=float) >= self.q - tol))

    def to_json(self) -> dict:
        return {"dirs": self.dirs.tolist(), "q": self.q.tolist()}

    def __repr__(self):
        return f"ConstraintRegion(d={self.dim}, constraints={len(self.q)})"
