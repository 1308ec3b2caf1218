"""Log-density evaluations for the Gaussian, Gamma and inverse Wishart laws.

Conventions
-----------
* Gamma is shape-rate: ``G(g; a, b) = b**a g**(a-1) exp(-b g) / Gamma(a)``.
* The inverse Wishart ``IW(X; v, V)`` on d x d matrices counts ``v`` so that
  the mean is ``V / (v - 2d - 2)``; it is the textbook inverse Wishart with
  ``v - d - 1`` degrees of freedom and scale ``V``::

      IW(X; v, V) = |V|**((v-d-1)/2) |X|**(-v/2) exp(-tr(V X^-1) / 2)
                    / (2**((v-d-1)d/2) Gamma_d((v-d-1)/2))

  which is proper for ``v > 2d``.
"""

import math

import numpy as np
from scipy.special import gammaln, multigammaln

from .exceptions import DomainError, SingularMatrixError

LOG_2PI = math.log(2.0 * math.pi)


def symmetrize(P):
    return 0.5 * (P + np.swapaxes(P, -1, -2))


def cholesky(P):
    """Lower Cholesky factor; raises :class:`SingularMatrixError` if P is not PD."""
    try:
        return np.linalg.cholesky(P)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("matrix is not positive definite") from exc


def logdet_pd(P):
    L = cholesky(np.atleast_2d(P))
    return 2.0 * np.sum(np.log(np.diagonal(L, axis1=-2, axis2=-1)), axis=-1)


def log_gaussian(x, mean, cov):
    """Log of ``N(x; mean, cov)``.

    Scalars are accepted for the one-dimensional case.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    n = x.shape[-1]
    if mean.shape[-1] != n or cov.shape != (n, n):
        raise DomainError(f"dimension mismatch: x={x.shape} mean={mean.shape} cov={cov.shape}")
    L = cholesky(cov)
    r = np.linalg.solve(L, x - mean)
    return float(-0.5 * (n * LOG_2PI + r @ r) - np.sum(np.log(np.diag(L))))


def log_gamma_pdf(g, a, b):
    """Log of the shape-rate Gamma density ``G(g; a, b)``."""
    if not (a > 0 and b > 0):
        raise DomainError(f"Gamma parameters must be positive, got a={a}, b={b}")
    if not g > 0:
        raise DomainError(f"Gamma argument must be positive, got {g}")
    return float(a * math.log(b) - gammaln(a) + (a - 1.0) * math.log(g) - b * g)


def log_multivariate_gamma(d, x):
    """``log Gamma_d(x) = d(d-1)/4 log(pi) + sum_j log Gamma(x + (1-j)/2)``."""
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d}")
    if not x > (d - 1) / 2.0:
        raise DomainError(f"multivariate gamma needs x > (d-1)/2, got d={d}, x={x}")
    return float(multigammaln(x, int(d)))


def log_inverse_wishart_pdf(X, v, V):
    """Log of ``IW(X; v, V)`` in the mean ``V/(v-2d-2)`` parameterization."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    V = np.atleast_2d(np.asarray(V, dtype=float))
    d = X.shape[0]
    if V.shape != (d, d) or X.shape != (d, d):
        raise DomainError(f"shape mismatch X={X.shape}, V={V.shape}")
    if not v > 2 * d:
        raise DomainError(f"inverse Wishart needs v > 2d, got v={v}, d={d}")
    dof = v - d - 1.0
    Lx = cholesky(X)
    logdet_x = 2.0 * np.sum(np.log(np.diag(Lx)))
    logdet_v = logdet_pd(V)
    Xinv = np.linalg.inv(X)
    return float(
        0.5 * dof * logdet_v
        - 0.5 * v * logdet_x
        - 0.5 * np.trace(V @ Xinv)
        - 0.5 * dof * d * math.log(2.0)
        - log_multivariate_gamma(d, 0.5 * dof)
    )


def inverse_wishart_mean(v, V):
    V = np.atleast_2d(V)
    d = V.shape[0]
    if not v > 2 * d + 2:
        raise DomainError(f"inverse Wishart mean needs v > 2d+2, got v={v}, d={d}")
    return V / (v - 2 * d - 2)
