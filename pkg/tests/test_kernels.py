import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from gtphd import _kernels
from gtphd.partition import sweep_thresholds

from conftest import random_spd

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")


@pytest.fixture
def both():
    """Run a callable under each backend and return both results."""
    def run(fn):
        prev = _kernels.backend()
        try:
            _kernels.set_backend("numpy")
            a = fn()
            _kernels.set_backend("numba")
            b = fn()
        finally:
            _kernels.set_backend(prev)
        return a, b
    return run


def _ggiw_inputs(rng, C=6, J=4):
    sizes = rng.integers(1, 8, size=C)
    zbar = rng.normal(size=(C, 2)) * 3
    scatter = np.array([random_spd(rng, 2) * s for s in sizes])
    pz = rng.normal(size=(J, 2)) * 3
    hph = np.array([random_spd(rng, 2) for _ in range(J)])
    a = rng.uniform(2, 20, J)
    b = rng.uniform(0.5, 3, J)
    v = rng.uniform(10, 60, J)
    V = np.array([random_spd(rng, 2, scale=10) for _ in range(J)])
    return sizes, zbar, scatter, pz, hph, a, b, v, V


@needs_numba
def test_ggiw_backends_agree(rng, both):
    args = _ggiw_inputs(rng)
    a, b = both(lambda: _kernels.ggiw_loglik(*args))
    assert a.shape == (6, 4)
    assert_allclose(a, b, rtol=1e-11)


@needs_numba
def test_gaussian_backends_agree(rng, both):
    z = rng.normal(size=(7, 2))
    pz = rng.normal(size=(3, 2))
    S = np.array([random_spd(rng, 2) for _ in range(3)])
    a, b = both(lambda: _kernels.gaussian_loglik(z, pz, S))
    assert_allclose(a, b, rtol=1e-12)


@needs_numba
def test_linkage_backends_agree(rng, both):
    thr = sweep_thresholds(0.1, 8.0, 0.1)
    for m in (0, 1, 2, 5, 17, 30):
        pts = rng.uniform(0, 15, size=(m, 2))
        a, b = both(lambda: _kernels.linkage_labels(pts, thr))
        assert_array_equal(a, b)


def test_empty_kernel_inputs():
    out = _kernels.ggiw_loglik(np.zeros(0), np.zeros((0, 2)), np.zeros((0, 2, 2)), np.zeros((2, 2)),
                               np.zeros((2, 2, 2)), np.ones(2), np.ones(2), np.ones(2), np.zeros((2, 2, 2)))
    assert out.shape == (0, 2)
    assert _kernels.gaussian_loglik(np.zeros((3, 2)), np.zeros((0, 2)), np.zeros((0, 2, 2))).shape == (3, 0)


def test_descending_thresholds_rejected():
    with pytest.raises(ValueError):
        _kernels.linkage_labels(np.zeros((3, 2)), np.array([1.0, 0.5]))


def test_canonical_labels():
    assert_array_equal(_kernels.canonical_labels(np.array([[5, 5, 2, 7, 2]])), [[0, 0, 1, 2, 1]])


def test_set_backend_validation():
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")


def test_env_flag_selects_numpy():
    env = dict(os.environ, GTPHD_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from gtphd import _kernels; print(_kernels.backend(), _kernels.HAVE_NUMBA)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.split() == ["numpy", "False"]
