"""Sorted-scan kernels shared by the risk measures and the region builders.

Every support value and every quantile-integral risk in this package reduces to
one of three scans over atoms sorted ascending:

* ``lower_tail_mean``  mean of the lowest ``alpha`` probability mass, with the
  boundary atom taken fractionally;
* ``spectral_lower``   sum_k y_k [(1 - F_{k-1})^p - (1 - F_k)^p];
* ``spectral_upper``   sum_k y_k [F_k^p - F_{k-1}^p].

The batch kernels repeat a scan over many projection directions, which is
where the time goes.  Two implementations exist: numba ``@njit`` loops and a
vectorised numpy path.  Set ``RISKGEOM_DISABLE_JIT=1`` to force the numpy path
(numba is also skipped automatically when it cannot be imported).
"""

import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

JIT_OPTIONS = {"nogil": True, "cache": True}


def _jit_disabled():
    return os.environ.get("RISKGEOM_DISABLE_JIT", "").strip().lower() in ("1", "true", "yes", "on")


# ---------------------------------------------------------------------------
# numpy path
# ---------------------------------------------------------------------------


def _lower_tail_mean_np(y, w, alpha):
    cum = np.cumsum(w)
    prev = cum - w
    take = np.minimum(cum, alpha) - prev
    np.maximum(take, 0.0, out=take)
    return float(take @ y) / alpha


def _cdf_steps(w):
    cum = np.cumsum(w)
    cum[-1] = 1.0
    np.minimum(cum, 1.0, out=cum)
    prev = np.empty_like(cum)
    prev[0] = 0.0
    prev[1:] = cum[:-1]
    return prev, cum


def _spectral_lower_np(y, w, p):
    prev, cum = _cdf_steps(w)
    return float(y @ ((1.0 - prev) ** p - (1.0 - cum) ** p))


def _spectral_upper_np(y, w, p):
    prev, cum = _cdf_steps(w)
    return float(y @ (cum**p - prev**p))


def _sorted_columns(values, weights):
    order = np.argsort(values, axis=0, kind="stable")
    return np.take_along_axis(values, order, axis=0), weights[order]


def _zonoid_support_batch_np(points, weights, dirs, alpha):
    # h(u) = upper alpha-tail mean of <X,u> = -(lower tail mean of -<X,u>)
    ys, ws = _sorted_columns(-(points @ dirs.T), weights)
    cum = np.cumsum(ws, axis=0)
    take = np.minimum(cum, alpha) - (cum - ws)
    np.maximum(take, 0.0, out=take)
    return -(take * ys).sum(axis=0) / alpha


def _ech_support_batch_np(points, weights, dirs, p):
    ys, ws = _sorted_columns(points @ dirs.T, weights)
    cum = np.cumsum(ws, axis=0)
    cum[-1] = 1.0
    np.minimum(cum, 1.0, out=cum)
    prev = np.zeros_like(cum)
    prev[1:] = cum[:-1]
    return (ys * (cum**p - prev**p)).sum(axis=0)


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:

    @njit(**JIT_OPTIONS)
    def _lower_tail_mean_nb(y, w, alpha):
        acc = 0.0
        cum = 0.0
        for k in range(y.shape[0]):
            nxt = cum + w[k]
            if nxt >= alpha:
                acc += (alpha - cum) * y[k]
                return acc / alpha
            acc += w[k] * y[k]
            cum = nxt
        return acc / alpha

    @njit(**JIT_OPTIONS)
    def _spectral_lower_nb(y, w, p):
        m = y.shape[0]
        acc = 0.0
        cum = 0.0
        g_prev = 1.0
        for k in range(m):
            cum += w[k]
            if k == m - 1 or cum > 1.0:
                cum = 1.0
            g = (1.0 - cum) ** p
            acc += y[k] * (g_prev - g)
            g_prev = g
        return acc

    @njit(**JIT_OPTIONS)
    def _spectral_upper_nb(y, w, p):
        m = y.shape[0]
        acc = 0.0
        cum = 0.0
        f_prev = 0.0
        for k in range(m):
            cum += w[k]
            if k == m - 1 or cum > 1.0:
                cum = 1.0
            f = cum**p
            acc += y[k] * (f - f_prev)
            f_prev = f
        return acc

    @njit(**JIT_OPTIONS)
    def _project(points, u):
        m, d = points.shape
        out = np.empty(m)
        for i in range(m):
            s = 0.0
            for j in range(d):
                s += points[i, j] * u[j]
            out[i] = s
        return out

    @njit(**JIT_OPTIONS)
    def _zonoid_support_batch_nb(points, weights, dirs, alpha):
        n = dirs.shape[0]
        out = np.empty(n)
        for j in range(n):
            y = -_project(points, dirs[j])
            order = np.argsort(y, kind="mergesort")
            out[j] = -_lower_tail_mean_nb(y[order], weights[order], alpha)
        return out

    @njit(**JIT_OPTIONS)
    def _ech_support_batch_nb(points, weights, dirs, p):
        n = dirs.shape[0]
        out = np.empty(n)
        for j in range(n):
            y = _project(points, dirs[j])
            order = np.argsort(y, kind="mergesort")
            out[j] = _spectral_upper_nb(y[order], weights[order], p)
        return out


IMPLEMENTATIONS = {
    "numpy": {
        "lower_tail_mean": _lower_tail_mean_np,
        "spectral_lower": _spectral_lower_np,
        "spectral_upper": _spectral_upper_np,
        "zonoid_support_batch": _zonoid_support_batch_np,
        "ech_support_batch": _ech_support_batch_np,
    }
}
if _HAVE_NUMBA:
    IMPLEMENTATIONS["numba"] = {
        "lower_tail_mean": _lower_tail_mean_nb,
        "spectral_lower": _spectral_lower_nb,
        "spectral_upper": _spectral_upper_nb,
        "zonoid_support_batch": _zonoid_support_batch_nb,
        "ech_support_batch": _ech_support_batch_nb,
    }

BACKEND = "numba" if _HAVE_NUMBA and not _jit_disabled() else "numpy"
_active = IMPLEMENTATIONS[BACKEND]


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def lower_tail_mean(y_sorted, w_sorted, alpha):
    """Mean of the lowest ``alpha`` mass of atoms ``y_sorted`` (ascending)."""
    return float(_active["lower_tail_mean"](_f64(y_sorted), _f64(w_sorted), float(alpha)))


def spectral_lower(y_sorted, w_sorted, p):
    return float(_active["spectral_lower"](_f64(y_sorted), _f64(w_sorted), float(p)))


def spectral_upper(y_sorted, w_sorted, p):
    return float(_active["spectral_upper"](_f64(y_sorted), _f64(w_sorted), float(p)))


def zonoid_support_batch(points, weights, dirs, alpha):
    """Zonoid support values ``h(ZD^alpha, u)`` for every row ``u`` of ``dirs``."""
    return np.asarray(
        _active["zonoid_support_batch"](_f64(points), _f64(weights), _f64(dirs), float(alpha))
    )


def ech_support_batch(points, weights, dirs, p):
    """``E max`` of ``p`` iid projections (spectral form for real ``p``) per row of ``dirs``."""
    return np.asarray(
        _active["ech_support_batch"](_f64(points), _f64(weights), _f64(dirs), float(p))
    )
