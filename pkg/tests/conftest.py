import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from riskgeom import EmpiricalDist, RieszCone

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
SHEAR = [[1.0, 0.0], [1.0, 1.0]]


@pytest.fixture
def square():
    return EmpiricalDist.from_arrays(SQUARE)


@pytest.fixture
def five():
    return EmpiricalDist.from_arrays(np.arange(1.0, 6.0))


@pytest.fixture
def shear():
    return RieszCone.from_matrix(SHEAR)


def cloud_from_seed(seed, d=None, m=None, ties=None):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4)) if d is None else d
    m = int(rng.integers(2, 51)) if m is None else m
    pts = rng.normal(size=(m, d)) * rng.uniform(0.5, 3)
    if (rng.random() < 0.3) if ties is None else ties:
        pts = np.round(pts, 0)
    w = None if rng.random() < 0.5 else rng.uniform(0.1, 1.0, size=m)
    return EmpiricalDist.from_arrays(pts, w)


def cone_from_seed(seed, d):
    rng = np.random.default_rng(seed)
    A = np.diag(rng.uniform(0.5, 2, size=d)) + rng.uniform(0, 1, size=(d, d)) * (rng.random((d, d)) < 0.5)
    return RieszCone.from_matrix(A)


seeds = st.integers(0, 2**32 - 1)


@st.composite
def clouds(draw, d=None, m_max=30):
    dd = draw(st.integers(1, 3)) if d is None else d
    m = draw(st.integers(1, m_max))
    vals = st.floats(-50, 50, allow_nan=False, allow_infinity=False).map(lambda x: round(x, 3))
    pts = draw(st.lists(st.lists(vals, min_size=dd, max_size=dd), min_size=m, max_size=m))
    uniform = draw(st.booleans())
    w = None if uniform else draw(st.lists(st.floats(0.05, 1.0), min_size=m, max_size=m))
    return EmpiricalDist.from_arrays(np.array(pts), w)


@st.composite
def cones(draw, d):
    diag = draw(st.lists(st.floats(0.2, 3.0), min_size=d, max_size=d))
    off = draw(st.lists(st.floats(0.0, 2.0), min_size=d * d, max_size=d * d))
    mask = draw(st.lists(st.booleans(), min_size=d * d, max_size=d * d))
    A = np.diag(diag) + np.where(np.array(mask).reshape(d, d), np.array(off).reshape(d, d), 0.0) * (1 - np.eye(d))
    if abs(np.linalg.det(A)) < 0.1 * np.prod(diag):
        A = np.triu(A)  # triangular keeps it well away from singular
    return RieszCone.from_matrix(A)


# --- acceptance summary ----------------------------------------------------

_acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    key, title = marker.args
    prior = _acceptance.get(key, (True, title))[0]
    # a criterion spread over several tests passes only if all of them do
    _acceptance[key] = (prior and rep.passed, title)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance, key=lambda k: int(k[2:])):
        ok, title = _acceptance[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}  {title}")
