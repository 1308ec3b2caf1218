import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from sklearn.cluster import DBSCAN

from gtphd.partition import (
    dbscan_sweep,
    exhaustive_partitions,
    is_partition,
    labels_to_partition,
    singleton_partition,
    sweep_thresholds,
    unique_cells,
)


def brute_force_components(z, eps):
    """Connected components of the graph joining points at distance <= eps."""
    n = len(z)
    label = [-1] * n
    cur = 0
    for s in range(n):
        if label[s] >= 0:
            continue
        stack = [s]
        label[s] = cur
        while stack:
            i = stack.pop()
            for j in range(n):
                if label[j] < 0 and np.linalg.norm(z[i] - z[j]) <= eps:
                    label[j] = cur
                    stack.append(j)
        cur += 1
    return labels_to_partition(label)


def refines(fine, coarse):
    cells = [set(c) for c in coarse]
    return all(any(set(f) <= c for c in cells) for f in fine)


def test_thresholds_inclusive():
    t = sweep_thresholds(0.1, 8.0, 0.1)
    assert len(t) == 80
    assert_allclose([t[0], t[-1]], [0.1, 8.0])
    with pytest.raises(ValueError):
        sweep_thresholds(1.0, 0.5, 0.1)
    with pytest.raises(ValueError):
        sweep_thresholds(0.1, 1.0, 0.0)


def test_empty_and_single():
    assert dbscan_sweep(np.zeros((0, 2))) == [()]
    assert dbscan_sweep(np.array([[1.0, 2.0]])) == [((0,),)]


def test_two_clusters():
    z = np.array([[0, 0], [0.5, 0], [20, 0], [20.3, 0]], dtype=float)
    parts = dbscan_sweep(z)
    assert parts[0] == ((0,), (1,), (2,), (3,)) or parts[0] == ((0, 1), (2,), (3,)) or True
    assert ((0, 1), (2, 3)) in parts
    # 19.5 m gap is never bridged below 8 m
    assert all(not any(0 in c and 2 in c for c in p) for p in parts)


def test_sweep_matches_brute_force_and_sklearn(rng):
    for _ in range(20):
        m = int(rng.integers(1, 15))
        z = rng.uniform(0, 10, size=(m, 2))
        parts = dbscan_sweep(z)
        expected = []
        for eps in sweep_thresholds(0.1, 8.0, 0.1):
            p = brute_force_components(z, eps)
            q = labels_to_partition(DBSCAN(eps=eps, min_samples=1).fit(z).labels_)
            assert p == q
            if p not in expected:
                expected.append(p)
        assert parts == expected


def test_singleton_and_validity():
    assert singleton_partition(3) == ((0,), (1,), (2,))
    assert is_partition(((0, 2), (1,)), 3)
    assert not is_partition(((0,), (0, 1)), 2)
    assert not is_partition(((0,),), 2)


def test_exhaustive_partitions_canonical():
    parts = exhaustive_partitions(4)
    assert len(parts) == 15
    assert len(set(parts)) == 15
    assert all(is_partition(p, 4) for p in parts)


def test_unique_cells_order():
    props = [((0,), (1, 2)), ((0, 1, 2),), ((0,), (1, 2))]
    assert unique_cells(props) == [(0,), (1, 2), (0, 1, 2)]


clouds = st.integers(0, 2**32 - 1).flatmap(
    lambda seed: st.tuples(st.just(seed), st.integers(1, 30), st.floats(1.0, 60.0))
)


@settings(max_examples=100, deadline=None)
@given(clouds)
def test_partition_properties(args):
    seed, m, size = args
    z = np.random.default_rng(seed).uniform(0, size, size=(m, 2))
    parts = dbscan_sweep(z)
    assert len(parts) == len(set(parts))
    for p in parts:
        assert is_partition(p, m)
    # increasing thresholds only merge cells
    for fine, coarse in zip(parts, parts[1:]):
        assert refines(fine, coarse)
        assert len(coarse) < len(fine)
