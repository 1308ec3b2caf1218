import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from gtphd.exceptions import StructureError
from gtphd.metrics import MetricConfig, MetricResult, Track, assign_step, rms_over_runs, trajectory_metric

CFG = MetricConfig(p=2, c=100, switch=1)


def line(start, n, y=0.0):
    return Track(start, np.column_stack([np.arange(n, dtype=float), np.full(n, y)]))


def test_identical_sets_zero():
    tr = [line(1, 10), line(3, 5, y=40.0)]
    r = trajectory_metric(tr, tr, CFG)
    assert r.as_tuple() == (0.0, 0.0, 0.0, 0.0, 0.0)


def test_missed_trajectory():
    r = trajectory_metric([line(1, 10)], [], CFG)
    assert_allclose(r.total, np.sqrt(10 * 100**2 / 2), rtol=1e-12)
    assert_allclose(r.total, 223.6068, rtol=1e-6)
    assert r.miss == r.total and r.false == 0


def test_constant_offset():
    r = trajectory_metric([line(1, 10)], [line(1, 10, y=1.0)], CFG)
    assert_allclose(r.total, np.sqrt(10), rtol=1e-12)
    assert_allclose(r.localization, np.sqrt(10), rtol=1e-12)


def test_normalised_window():
    r = trajectory_metric([line(1, 10)], [line(1, 10, y=1.0)], CFG, window=(1, 10), normalize=True)
    assert_allclose(r.total, 1.0, rtol=1e-12)


def test_switch_penalty():
    a, b = line(1, 4, y=0.0), line(1, 4, y=10.0)
    # estimates swap identities half way
    e1 = Track(1, np.array([[0, 0], [1, 0], [2, 10], [3, 10.0]]))
    e2 = Track(1, np.array([[0, 10], [1, 10], [2, 0], [3, 0.0]]))
    r = trajectory_metric([a, b], [e1, e2], CFG)
    assert_allclose(r.switch, np.sqrt(2.0))
    assert r.localization == 0


def test_far_pairs_are_not_matched():
    pairs, loc, nm, nf = assign_step(np.zeros((1, 2)), np.array([[150.0, 0]]), CFG)
    assert pairs == {} and (nm, nf) == (1, 1) and loc == 0


def brute_force(x, y, cfg):
    nx, ny = len(x), len(y)
    best = np.inf
    if nx <= ny:
        for perm in itertools.permutations(range(ny), nx):
            d = np.linalg.norm(x - y[list(perm)], axis=1)
            best = min(best, (np.minimum(d, cfg.c) ** cfg.p).sum())
        unmatched = ny - nx
    else:
        for perm in itertools.permutations(range(nx), ny):
            d = np.linalg.norm(x[list(perm)] - y, axis=1)
            best = min(best, (np.minimum(d, cfg.c) ** cfg.p).sum())
        unmatched = nx - ny
    if nx == 0 or ny == 0:
        best = 0.0
    return best + cfg.c**cfg.p / 2 * unmatched


def test_assignment_matches_brute_force(rng):
    cfg = MetricConfig(p=2, c=5.0)
    for _ in range(40):
        nx, ny = rng.integers(0, 7, size=2)
        x = rng.uniform(0, 10, size=(nx, 2))
        y = rng.uniform(0, 10, size=(ny, 2))
        _, loc, nm, nf = assign_step(x if nx else None, y if ny else None, cfg)
        # a pair at distance >= c costs c^p either way, equal to two halves
        got = loc + cfg.c**cfg.p / 2 * (nm + nf)
        assert_allclose(got, brute_force(x, y, cfg), rtol=1e-12)


tracks = st.lists(
    st.tuples(st.integers(1, 5), st.integers(1, 6), st.floats(-50, 50), st.floats(-50, 50)),
    max_size=4,
)


def to_tracks(spec):
    return [Track(s, np.column_stack([np.arange(n) + x, np.full(n, y)])) for s, n, x, y in spec]


@settings(max_examples=60, deadline=None)
@given(tracks, tracks)
def test_symmetry_and_additivity(a, b):
    X, Y = to_tracks(a), to_tracks(b)
    # switches are counted on the truth side only, so symmetry needs switch=0
    cfg0 = MetricConfig(p=2, c=100, switch=0)
    s1 = trajectory_metric(X, Y, cfg0, window=(1, 12))
    s2 = trajectory_metric(Y, X, cfg0, window=(1, 12))
    assert_allclose(s1.total, s2.total, rtol=1e-12, atol=1e-12)
    assert_allclose(s1.miss, s2.false, rtol=1e-12, atol=1e-12)
    r1 = trajectory_metric(X, Y, CFG, window=(1, 12))
    parts = np.array([r1.localization, r1.miss, r1.false, r1.switch]) ** 2
    assert_allclose(r1.total**2, parts.sum(), rtol=1e-12, atol=1e-9)


def test_monotone_in_offset():
    vals = [trajectory_metric([line(1, 5)], [line(1, 5, y=d)], CFG).total for d in (0.5, 1, 5, 50, 99)]
    assert vals == sorted(vals)


def test_rms_over_runs():
    r = rms_over_runs([MetricResult(5, 0, 5, 0, 0), MetricResult(0, 0, 0, 0, 0)])
    assert_allclose(r.total, 3.5355339, rtol=1e-7)
    with pytest.raises(ValueError):
        rms_over_runs([])


def test_empty_window():
    with pytest.raises(StructureError):
        trajectory_metric([], [], CFG, window=(3, 2))
    assert trajectory_metric([], [], CFG).total == 0.0


def test_bad_config():
    with pytest.raises(ValueError):
        MetricConfig(p=0.5)
