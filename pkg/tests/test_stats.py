import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, stats

from gtphd.exceptions import DomainError, SingularMatrixError
from gtphd.stats import (
    cholesky,
    inverse_wishart_mean,
    log_gamma_pdf,
    log_gaussian,
    log_inverse_wishart_pdf,
    log_multivariate_gamma,
    logdet_pd,
)


def test_log_gaussian_matches_scipy(rng):
    for n in (1, 2, 4):
        A = rng.normal(size=(n, n))
        cov = A @ A.T + 0.5 * np.eye(n)
        x, m = rng.normal(size=n), rng.normal(size=n)
        assert_allclose(log_gaussian(x, m, cov), stats.multivariate_normal(m, cov).logpdf(x), rtol=1e-12)


def test_log_gaussian_integrates_to_one():
    val, _ = integrate.quad(lambda x: math.exp(log_gaussian(x, 0.3, 2.0)), -40, 40)
    assert_allclose(val, 1.0, rtol=1e-10)


def test_log_gaussian_dimension_mismatch():
    with pytest.raises(DomainError):
        log_gaussian(np.zeros(2), np.zeros(3), np.eye(2))


def test_gamma_density():
    # shape-rate: mean a/b
    a, b = 8.0, 1.0
    assert_allclose(log_gamma_pdf(3.0, a, b), stats.gamma(a, scale=1 / b).logpdf(3.0), rtol=1e-12)
    val, _ = integrate.quad(lambda g: math.exp(log_gamma_pdf(g, a, b)), 0, np.inf)
    assert_allclose(val, 1.0, rtol=1e-9)
    mean, _ = integrate.quad(lambda g: g * math.exp(log_gamma_pdf(g, a, b)), 0, np.inf)
    assert_allclose(mean, a / b, rtol=1e-9)


@pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
def test_gamma_domain(a, b):
    with pytest.raises(DomainError):
        log_gamma_pdf(1.0, a, b)


def test_multivariate_gamma():
    assert_allclose(log_multivariate_gamma(1, 3.7), math.lgamma(3.7))
    x = 5.3
    expected = 0.5 * math.log(math.pi) + math.lgamma(x) + math.lgamma(x - 0.5)
    assert_allclose(log_multivariate_gamma(2, x), expected, rtol=1e-13)
    with pytest.raises(DomainError):
        log_multivariate_gamma(2, 0.4)


def test_inverse_wishart_matches_scipy(rng):
    d = 2
    V = np.array([[2.5, 0.3], [0.3, 1.2]])
    v = 12.0
    X = np.array([[0.4, 0.05], [0.05, 0.3]])
    ref = stats.invwishart(df=v - d - 1, scale=V).logpdf(X)
    assert_allclose(log_inverse_wishart_pdf(X, v, V), ref, rtol=1e-12)


def test_inverse_wishart_mean_and_normalisation_1d():
    v, V = 9.0, np.array([[3.0]])
    total, _ = integrate.quad(lambda x: math.exp(log_inverse_wishart_pdf([[x]], v, V)), 0, np.inf)
    assert_allclose(total, 1.0, rtol=1e-8)
    mean, _ = integrate.quad(lambda x: x * math.exp(log_inverse_wishart_pdf([[x]], v, V)), 0, np.inf)
    assert_allclose(mean, inverse_wishart_mean(v, V)[0, 0], rtol=1e-8)


def test_inverse_wishart_paper_birth_parameters():
    X = inverse_wishart_mean(100, 2.5 * np.eye(2))
    assert_allclose(X, 2.5 / 94 * np.eye(2))
    with pytest.raises(DomainError):
        log_inverse_wishart_pdf(np.eye(2), 4.0, np.eye(2))


def test_cholesky_rejects_indefinite():
    with pytest.raises(SingularMatrixError):
        cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert_allclose(logdet_pd(np.diag([2.0, 3.0])), math.log(6.0))
