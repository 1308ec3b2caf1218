"""Exhaustive partition enumeration and brute-force reference computations.

Everything here trades speed for transparency: sums run over every subset and
every set partition, so sizes are guarded. The filter never calls these; the
test-suite uses them to check the partition-based update.
"""

import math
from itertools import combinations

import numpy as np

from .exceptions import DomainError
from .models import GgiwComponent
from .stats import log_gaussian, log_multivariate_gamma, logdet_pd

MAX_ENUMERATION = 10


def enumerate_partitions(n):
    """All set partitions of ``{0, ..., n-1}`` as lists of sorted index lists.

    The empty set has exactly one partition (with no cells).
    """
    if n > MAX_ENUMERATION:
        raise DomainError(f"refusing to enumerate partitions of {n} > {MAX_ENUMERATION} elements")
    if n < 0:
        raise DomainError("n must be non-negative")

    def rec(i, blocks):
        if i == n:
            yield [list(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from rec(i + 1, blocks)
        blocks.pop()

    return list(rec(0, []))


def partitions_of(items):
    """Set partitions of an arbitrary tuple of hashable items (cells as frozensets)."""
    items = tuple(items)
    return [[frozenset(items[i] for i in cell) for cell in p] for p in enumerate_partitions(len(items))]


def subsets(items):
    items = tuple(items)
    for r in range(len(items) + 1):
        for combo in combinations(items, r):
            yield frozenset(combo)


def _prod(values):
    out = 1.0
    for x in values:
        out *= x
    return out


def check_lemma1(lam, tau, z):
    """Both sides of the subset/partition identity for clutter-plus-target sums.

    ``lam`` maps elements to positive reals and ``tau`` maps non-empty frozensets
    of elements to positive reals.
    """
    z = frozenset(z)
    if len(z) > 8:
        raise DomainError("lemma check limited to |z| <= 8")

    def kappa(w):
        return _prod(lam[e] for e in w) if len(w) == 1 else 0.0

    lhs = 0.0
    for y in subsets(sorted(z)):
        lam_rest = _prod(lam[e] for e in z - y)
        lhs += lam_rest * sum(_prod(tau[w] for w in Q) for Q in partitions_of(sorted(y)))
    rhs = sum(_prod(kappa(w) + tau[w] for w in Q) for Q in partitions_of(sorted(z)))
    return lhs, rhs


def check_lemma2(f, g, z):
    """Both sides of the cell-extraction identity over partitions of ``z``."""
    z = frozenset(z)
    if len(z) > 8:
        raise DomainError("lemma check limited to |z| <= 8")
    for w, val in g.items():
        if val == 0:
            raise DomainError(f"g vanishes on cell {sorted(w)}")
    lhs = 0.0
    for w in subsets(sorted(z)):
        if not w:
            continue
        lhs += f[w] * sum(_prod(g[v] for v in Q) for Q in partitions_of(sorted(z - w)))
    rhs = 0.0
    for P in partitions_of(sorted(z)):
        rhs += _prod(g[v] for v in P) * sum(f[v] / g[v] for v in P)
    return lhs, rhs


# -- reference measurement-set density ------------------------------------------


def _log_qe_reference(zs, c, model):
    """Closed-form GGIW predicted likelihood written out term by term."""
    n = len(zs)
    d = c.V.shape[0]
    H = model.H
    zs = np.asarray(zs, dtype=float)
    zbar = zs.mean(axis=0)
    Z = sum(np.outer(zi - zbar, zi - zbar) for zi in zs)
    X = c.V / (c.v - 2 * d - 2)
    m_k = c.mean[-H.shape[1]:]
    P_k = c.cov[-H.shape[1]:, -H.shape[1]:]
    S = H @ P_k @ H.T + X / n
    eps = zbar - H @ m_k
    Xh = np.linalg.cholesky(X)
    Sh = np.linalg.cholesky(S)
    N = Xh @ np.linalg.inv(Sh) @ np.outer(eps, eps) @ np.linalg.inv(Sh).T @ Xh.T
    v_new, V_new = c.v + n, c.V + N + Z
    a_new, b_new = c.a + n, c.b + 1.0
    return (
        -0.5 * d * math.log(math.pi**n * n)
        + 0.5 * (c.v - d - 1) * logdet_pd(c.V)
        - 0.5 * (v_new - d - 1) * logdet_pd(V_new)
        + log_multivariate_gamma(d, 0.5 * (v_new - d - 1))
        - log_multivariate_gamma(d, 0.5 * (c.v - d - 1))
        + 0.5 * logdet_pd(X)
        - 0.5 * logdet_pd(S)
        + math.lgamma(a_new)
        + c.a * math.log(c.b)
        - math.lgamma(c.a)
        - a_new * math.log(b_new)
    )


def tau_terms(z, mixture, model):
    """``tau_w`` for every non-empty subset ``w`` of the measurement indices, plus ``tau_empty``.

    ``tau_empty`` is the integral of the no-detection likelihood against the PHD.
    """
    z = np.asarray(z, dtype=float).reshape(-1, model.n_z) if len(z) else np.zeros((0, model.n_z))
    pD = model.p_detect
    n_x = mixture.n_x
    tau = {}
    for w in subsets(range(len(z))):
        if not w:
            continue
        idx = sorted(w)
        total = 0.0
        if len(idx) == 1:
            for c in mixture.point:
                m_k, P_k = c.mean[-n_x:], c.cov[-n_x:, -n_x:]
                S = model.H @ P_k @ model.H.T + model.R
                total += c.weight * pD * math.exp(log_gaussian(z[idx[0]], model.H @ m_k, S))
        for c in mixture.extended:
            total += c.weight * pD * math.exp(_log_qe_reference(z[idx], c, model))
        tau[w] = total
    tau_empty = sum(c.weight * (1 - pD) for c in mixture.point)
    for c in mixture.extended:
        assert isinstance(c, GgiwComponent)
        tau_empty += c.weight * ((1 - pD) + pD * (c.b / (c.b + 1.0)) ** c.a)
    return tau, tau_empty


def _sum_over_partitions(elements, weight):
    return sum(_prod(weight(w) for w in Q) for Q in partitions_of(sorted(elements)))


def measurement_set_density_oracle(z, mixture, model):
    """Density of the measurement set under a Poisson trajectory prior, by enumeration.

    ``exp(-clutter_mean - mass + tau_empty) * sum_Q prod_{w in Q} (kappa_w + tau_w)``.
    """
    if len(z) > 6:
        raise DomainError("measurement density oracle limited to |z| <= 6")
    z = np.asarray(z, dtype=float).reshape(-1, model.n_z) if len(z) else np.zeros((0, model.n_z))
    tau, tau_empty = tau_terms(z, mixture, model)
    lam_c = model.clutter_intensity(z) if len(z) else np.zeros(0)
    mass = sum(c.weight for c in mixture.components())

    def kappa_tau(w):
        kappa = lam_c[next(iter(w))] if len(w) == 1 else 0.0
        return kappa + tau[w]

    s = _sum_over_partitions(range(len(z)), kappa_tau)
    return math.exp(-model.clutter_mean - mass + tau_empty) * s


def posterior_mass_oracle(z, mixture, model):
    """Posterior PHD mass from the subset expansion of the exact Bayes update.

    ``tau_empty + sum_{w != {}} tau_w * l(z \\ w) / l(z)`` where ``l`` is the
    measurement-set density; it never forms partition weights.
    """
    z = np.asarray(z, dtype=float).reshape(-1, model.n_z) if len(z) else np.zeros((0, model.n_z))
    tau, tau_empty = tau_terms(z, mixture, model)
    l_full = measurement_set_density_oracle(z, mixture, model)
    mass = tau_empty
    idx = list(range(len(z)))
    for w in subsets(idx):
        if not w:
            continue
        rest = [i for i in idx if i not in w]
        l_rest = measurement_set_density_oracle(z[rest], mixture, model)
        mass += tau[w] * l_rest / l_full
    return mass
