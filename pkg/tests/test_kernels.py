import numpy as np
import pytest
from conftest import seeds
from hypothesis import given
from hypothesis import strategies as st

from riskgeom import _kernels

NUMPY = _kernels.IMPLEMENTATIONS["numpy"]
NUMBA = _kernels.IMPLEMENTATIONS.get("numba")
pytestmark = pytest.mark.skipif(NUMBA is None, reason="numba not installed")


def _atoms(seed, m=None, d=2):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 60)) if m is None else m
    pts = np.round(rng.normal(size=(m, d)), int(rng.integers(0, 3)))
    w = rng.uniform(0.1, 1, m)
    return pts, w / w.sum()


@given(seeds, st.floats(0.01, 1.0))
def test_tail_mean(seed, alpha):
    pts, w = _atoms(seed, d=1)
    order = np.argsort(pts[:, 0], kind="stable")
    y, w = pts[order, 0], w[order]
    assert NUMBA["lower_tail_mean"](y, w, alpha) == pytest.approx(NUMPY["lower_tail_mean"](y, w, alpha), abs=1e-13)


@given(seeds, st.floats(1.0, 8.0))
def test_spectral(seed, p):
    pts, w = _atoms(seed, d=1)
    order = np.argsort(pts[:, 0], kind="stable")
    y, w = pts[order, 0], w[order]
    for name in ("spectral_lower", "spectral_upper"):
        assert NUMBA[name](y, w, p) == pytest.approx(NUMPY[name](y, w, p), abs=1e-12)


@given(seeds, st.floats(0.01, 1.0), st.floats(1.0, 6.0))
def test_support_batches(seed, alpha, p):
    pts, w = _atoms(seed)
    dirs = np.random.default_rng(seed + 1).normal(size=(9, 2))
    np.testing.assert_allclose(
        NUMBA["zonoid_support_batch"](pts, w, dirs, alpha), NUMPY["zonoid_support_batch"](pts, w, dirs, alpha), atol=1e-12
    )
    np.testing.assert_allclose(
        NUMBA["ech_support_batch"](pts, w, dirs, p), NUMPY["ech_support_batch"](pts, w, dirs, p), atol=1e-12
    )


def test_backend_flag(monkeypatch):
    import importlib

    monkeypatch.setenv("RISKGEOM_DISABLE_JIT", "1")
    mod = importlib.reload(_kernels)
    try:
        assert mod.BACKEND == "numpy"
    finally:
        monkeypatch.delenv("RISKGEOM_DISABLE_JIT")
        importlib.reload(_kernels)
