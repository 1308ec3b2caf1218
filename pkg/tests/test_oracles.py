import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from gtphd.exceptions import DomainError
from gtphd.oracles import (
    check_lemma1,
    check_lemma2,
    enumerate_partitions,
    measurement_set_density_oracle,
    partitions_of,
    posterior_mass_oracle,
    subsets,
)
from gtphd.models import PhdMixture

from conftest import make_measurement_model, random_scene

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140]


@pytest.mark.parametrize("n", range(9))
def test_bell_numbers(n):
    parts = enumerate_partitions(n)
    assert len(parts) == BELL[n]
    canon = {tuple(sorted(tuple(sorted(c)) for c in p)) for p in parts}
    assert len(canon) == BELL[n]
    for p in parts:
        assert sorted(i for c in p for i in c) == list(range(n))


def test_enumeration_limit():
    with pytest.raises(DomainError):
        enumerate_partitions(11)


def test_subsets_count():
    assert len(list(subsets(range(5)))) == 32


def _random_tables(rng, z):
    lam = {e: rng.uniform(0.1, 2.0) for e in z}
    tau = {w: rng.uniform(0.05, 2.0) for w in subsets(z) if w}
    return lam, tau


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_lemma1_random(m, seed):
    rng = np.random.default_rng(seed)
    lhs, rhs = check_lemma1(*_random_tables(rng, range(m)), range(m))
    assert_allclose(lhs, rhs, rtol=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_lemma2_random(m, seed):
    rng = np.random.default_rng(seed)
    f = {w: rng.uniform(0.0, 2.0) for w in subsets(range(m)) if w}
    g = {w: rng.uniform(0.1, 2.0) for w in subsets(range(m)) if w}
    lhs, rhs = check_lemma2(f, g, range(m))
    assert_allclose(lhs, rhs, rtol=1e-10, atol=0 if m else 1e-300)


def test_lemma1_hand_value():
    # z={1,2}: lambda1*lambda2 + lambda2*tau1 + lambda1*tau2 + tau1*tau2 + tau12
    lam = {1: 2.0, 2: 3.0}
    tau = {frozenset({1}): 0.5, frozenset({2}): 0.25, frozenset({1, 2}): 0.125}
    lhs, rhs = check_lemma1(lam, tau, [1, 2])
    expected = 6.0 + 3.0 * 0.5 + 2.0 * 0.25 + 0.5 * 0.25 + 0.125
    assert_allclose([lhs, rhs], [expected, expected])


def test_lemma2_rejects_zero_g():
    g = {frozenset({0}): 0.0}
    with pytest.raises(DomainError):
        check_lemma2({frozenset({0}): 1.0}, g, [0])


def test_lemma_size_limit():
    with pytest.raises(DomainError):
        check_lemma1({}, {}, range(9))


def test_partitions_of_labels():
    parts = list(partitions_of(["a", "b", "c"]))
    assert len(parts) == 5
    assert all(isinstance(c, frozenset) for p in parts for c in p)


def test_density_of_empty_set():
    # no measurements: exp(-clutter_mean - mass + tau_empty)
    model = make_measurement_model()
    rng = np.random.default_rng(3)
    mix, _ = random_scene(rng, 2, 1, 0)
    mass = sum(c.weight for c in mix.components())
    from gtphd.oracles import tau_terms

    _, tau_empty = tau_terms(np.zeros((0, 2)), mix, model)
    assert_allclose(measurement_set_density_oracle(np.zeros((0, 2)), mix, model), math.exp(-5.0 - mass + tau_empty))


def test_posterior_mass_oracle_no_targets():
    # only clutter: posterior mass stays zero
    model = make_measurement_model()
    mix = PhdMixture(time=1)
    z = np.array([[0.0, 10.0], [1.0, 20.0]])
    assert posterior_mass_oracle(z, mix, model) == 0.0
