import numpy as np
import pytest

from gtphd.models import GgiwComponent, MeasurementModel, MotionModel, PhdMixture, TrajectoryGaussian, UniformClutter
from gtphd.simulate import cv_model

REGION = [[-25.0, 25.0], [0.0, 300.0]]


def make_measurement_model(p_detect=0.98, clutter_rate=5.0, region=REGION):
    H = np.hstack([np.eye(2), np.zeros((2, 2))])
    return MeasurementModel(H, np.eye(2), p_detect, UniformClutter(clutter_rate, region), clutter_rate)


def make_motion_model(**kw):
    F, Q = cv_model(1.0, 0.1)
    kw.setdefault("p_survival", 0.99)
    kw.setdefault("rate_forgetting", 1.05)
    kw.setdefault("correlation_time", 5.48)
    return MotionModel(F, Q, **kw)


def random_spd(rng, n, scale=1.0, floor=0.1):
    A = rng.normal(size=(n, n))
    return scale * (A @ A.T / n + floor * np.eye(n))


def random_point(rng, length=1, birth=1, center=(0.0, 0.0), spread=3.0):
    n = 4 * length
    mean = np.concatenate([np.asarray(center) + spread * rng.normal(size=2), rng.normal(size=2 + n - 4)])
    return TrajectoryGaussian(float(rng.uniform(0.1, 1.0)), birth, mean, random_spd(rng, n))


def random_ggiw(rng, length=1, birth=1, center=(0.0, 0.0), spread=3.0):
    base = random_point(rng, length, birth, center, spread)
    return GgiwComponent(
        base.weight,
        birth,
        base.mean,
        base.cov,
        a=float(rng.uniform(2, 20)),
        b=float(rng.uniform(0.5, 3)),
        v=float(rng.uniform(10, 60)),
        V=random_spd(rng, 2, scale=rng.uniform(2, 20)),
    )


def random_scene(rng, n_point, n_ext, m, time=1, spread=3.0):
    mix = PhdMixture(
        time=time,
        point=[random_point(rng, spread=spread) for _ in range(n_point)],
        extended=[random_ggiw(rng, spread=spread) for _ in range(n_ext)],
    )
    z = spread * rng.normal(size=(m, 2))
    return mix, z


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def meas_model():
    return make_measurement_model()


@pytest.fixture
def motion_model():
    return make_motion_model()


# -- acceptance report ---------------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, ok, detail)``; lines are printed in the terminal summary."""
    def record(criterion, ok, detail):
        _ACCEPTANCE[criterion] = (bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
