"""Trajectory PHD update for coexisting point (Gaussian) and extended (GGIW) targets.

The update follows the partition form of the general pseudolikelihood. For a
cell ``w`` of the current measurements define

    g_w = kappa_w + tau_w,
    kappa_w = [|w| == 1] * prod_{z in w} clutter(z),
    tau_w = sum_e w_e pD q_e(w) + [|w| == 1] * sum_p w_p pD q_p(w),

so that ``d_w = g_w / prod_{z in w} clutter(z)``. Partition weights are
``prod_{w in P} g_w`` normalised over the proposals, a detected component
created from cell ``w`` carries ``beta_w * term / g_w`` where ``beta_w`` sums
the weights of the proposals containing ``w``, and the whole computation runs
in log space because products over cells underflow quickly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .exceptions import ConfigError, DomainError, StructureError
from .models import GgiwComponent, PhdMixture
from .partition import unique_cells
from .stats import cholesky, log_gaussian, symmetrize

_LOG_PI = math.log(math.pi)


@dataclass
class CellStatistics:
    """Sufficient statistics of one cell paired with one component."""

    size: int
    zbar: np.ndarray
    Z: np.ndarray
    eps: np.ndarray
    S: np.ndarray
    K: np.ndarray
    N: np.ndarray | None = None
    X: np.ndarray | None = None
    log_q: float = float("nan")


@dataclass
class UpdateDiagnostics:
    cells: list
    log_g: np.ndarray  # log(kappa_w + tau_w) per cell
    log_clutter: np.ndarray  # sum over the cell of log clutter intensity
    partition_weights: np.ndarray
    misdetected_point_mass: float = 0.0
    misdetected_extended_mass: float = 0.0
    detected_mass: float = 0.0
    dropped_mass: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def d_w(self):
        with np.errstate(over="ignore"):
            return np.exp(self.log_g - self.log_clutter)

    def to_json(self):
        return json.dumps(
            {
                "cells": [list(c) for c in self.cells],
                "d_w": self.d_w.tolist(),
                "partition_weights": self.partition_weights.tolist(),
                "misdetected_point_mass": self.misdetected_point_mass,
                "misdetected_extended_mass": self.misdetected_extended_mass,
                "detected_mass": self.detected_mass,
                "dropped_mass": self.dropped_mass,
            }
        )


def _cell_moments(zc):
    zbar = zc.mean(axis=0)
    r = zc - zbar
    return zbar, r.T @ r


def cell_statistics(zc, comp, model, n_x):
    """Statistics of measurements ``zc`` (rows) against the last state of ``comp``.

    For an extended component ``S = H P H^T + X/|w|`` with ``X`` the predicted
    extent mean; for a point component ``S = H P H^T + R``. ``K`` is the gain of
    the whole stacked trajectory.
    """
    zc = np.atleast_2d(np.asarray(zc, dtype=float))
    n = zc.shape[0]
    if n < 1:
        raise DomainError("a cell must contain at least one measurement")
    H = model.H
    zbar, Z = _cell_moments(zc)
    m_k = comp.mean[-n_x:]
    P_cross = comp.cov[:, -n_x:] @ H.T
    hph = H @ comp.cov[-n_x:, -n_x:] @ H.T
    eps = zbar - H @ m_k
    if isinstance(comp, GgiwComponent):
        d = comp.V.shape[0]
        if comp.v <= 2 * d + 2:
            raise DomainError(f"extent mean undefined for v={comp.v} <= 2d+2")
        X = comp.V / (comp.v - 2 * d - 2)
        S = symmetrize(hph + X / n)
        Ls = cholesky(S)
        Lx = cholesky(X)
        u = Lx @ np.linalg.solve(Ls, eps)
        N = np.outer(u, u)
    else:
        S = symmetrize(hph + model.R)
        X = N = None
    K = np.linalg.solve(S, P_cross.T).T
    return CellStatistics(size=n, zbar=zbar, Z=Z, eps=eps, S=S, K=K, N=N, X=X)


def predicted_cell_likelihood_point(zc, comp, model, n_x):
    """``log q_p(w) = log N(z; H m_k, H P_kk H^T + R)`` for a one-measurement cell."""
    zc = np.atleast_2d(np.asarray(zc, dtype=float))
    m_k, P_k = comp.mean[-n_x:], comp.cov[-n_x:, -n_x:]
    return log_gaussian(zc[0], model.H @ m_k, model.H @ P_k @ model.H.T + model.R)


def predicted_cell_likelihood_extended(zc, comp, model, n_x):
    """``log q_e(w)`` for the GGIW component ``comp`` and cell measurements ``zc``."""
    zc = np.atleast_2d(np.asarray(zc, dtype=float))
    zbar, Z = _cell_moments(zc)
    m_k, P_k = comp.mean[-n_x:], comp.cov[-n_x:, -n_x:]
    H = model.H
    out = _kernels.ggiw_loglik(
        np.array([zc.shape[0]]),
        zbar[None],
        Z[None],
        (H @ m_k)[None],
        (H @ P_k @ H.T)[None],
        np.array([comp.a]),
        np.array([comp.b]),
        np.array([comp.v]),
        comp.V[None],
    )
    return float(out[0, 0])


def _misdetect_extended(c, pD, split):
    """Missed-detection branch of a GGIW component.

    ``(1-pD) G(a, b) + pD (b/(b+1))^a G(a, b+1)``; either kept as two
    components or moment-matched to one Gamma with the same total weight.
    """
    w_miss = c.weight * (1.0 - pD)
    w_zero = c.weight * pD * math.exp(c.a * (math.log(c.b) - math.log(c.b + 1.0)))
    if split:
        out = []
        if w_miss > 0:
            out.append(c.with_weight(w_miss))
        if w_zero > 0:
            out.append(replace(c, weight=w_zero, b=c.b + 1.0))
        return out
    total = w_miss + w_zero
    if total <= 0:
        return []
    if w_zero == 0 or w_miss == 0:
        b = c.b if w_zero == 0 else c.b + 1.0
        return [replace(c, weight=total, b=b)]
    pi = np.array([w_miss, w_zero]) / total
    bs = np.array([c.b, c.b + 1.0])
    mean = float(pi @ (c.a / bs))
    second = float(pi @ (c.a * (c.a + 1.0) / bs**2))
    var = second - mean * mean
    return [replace(c, weight=total, a=mean * mean / var, b=mean / var)]


def _stack_marginals(comps, H, n_x):
    if not comps:
        nz = H.shape[0]
        return np.zeros((0, nz)), np.zeros((0, nz, nz))
    means = np.array([c.mean[-n_x:] for c in comps])
    covs = np.array([c.cov[-n_x:, -n_x:] for c in comps])
    return means @ H.T, H @ covs @ H.T


def update(pred, z, proposals, model, *, min_weight=0.0, split_misdetection=False):
    """Posterior trajectory PHD and diagnostics.

    Parameters
    ----------
    pred : PhdMixture
        Predicted PHD at the current time.
    z : (m, n_z) array
        Current measurements.
    proposals : list of partitions
        Candidate partitions (tuples of index tuples) of ``range(m)``.
    min_weight : float
        Detected components with weight ``<= min_weight`` are not built. With
        ``min_weight`` equal to the pruning threshold this only skips work that
        pruning would discard.
    split_misdetection : bool
        Keep both Gamma branches of a missed extended component instead of
        moment-matching them.
    """
    n_x = pred.n_x
    pD = model.p_detect
    H = model.H
    z = np.asarray(z, dtype=float).reshape(-1, model.n_z) if np.size(z) else np.zeros((0, model.n_z))
    m = z.shape[0]

    point_out = [c.with_weight((1.0 - pD) * c.weight) for c in pred.point]
    ext_out = []
    for c in pred.extended:
        ext_out.extend(_misdetect_extended(c, pD, split_misdetection))
    diag = UpdateDiagnostics(
        cells=[],
        log_g=np.zeros(0),
        log_clutter=np.zeros(0),
        partition_weights=np.ones(1) if m == 0 else np.zeros(0),
        misdetected_point_mass=sum(c.weight for c in point_out),
        misdetected_extended_mass=sum(c.weight for c in ext_out),
    )
    if m == 0:
        return PhdMixture(pred.time, point_out, ext_out, pred.n_x, pred.d), diag
    if not proposals:
        raise ConfigError("proposals", "non-empty measurement set needs at least one partition")

    cells = unique_cells(proposals)
    cell_index = {c: i for i, c in enumerate(cells)}
    n_cells = len(cells)
    sizes = np.array([len(c) for c in cells])
    log_lc = model.log_clutter(z)
    log_clutter_cell = np.array([log_lc[list(c)].sum() for c in cells])

    # log of each component's tau contribution to each cell, -inf where absent
    jp, je = len(pred.point), len(pred.extended)
    log_terms_p = np.full((n_cells, jp), -np.inf)
    singles = np.flatnonzero(sizes == 1)
    with np.errstate(divide="ignore"):
        log_pd = math.log(pD) if pD > 0 else -np.inf
        if jp and singles.size:
            pz, hph = _stack_marginals(pred.point, H, n_x)
            zi = z[[cells[c][0] for c in singles]]
            ll = _kernels.gaussian_loglik(zi, pz, hph + model.R)
            logw = np.log([c.weight for c in pred.point])
            log_terms_p[singles] = logw[None] + log_pd + ll
        log_terms_e = np.full((n_cells, je), -np.inf)
        if je:
            zbar = np.empty((n_cells, model.n_z))
            scatter = np.empty((n_cells, model.n_z, model.n_z))
            for i, c in enumerate(cells):
                zbar[i], scatter[i] = _cell_moments(z[list(c)])
            pz, hph = _stack_marginals(pred.extended, H, n_x)
            ext = pred.extended
            logq = _kernels.ggiw_loglik(
                sizes,
                zbar,
                scatter,
                pz,
                hph,
                np.array([c.a for c in ext]),
                np.array([c.b for c in ext]),
                np.array([c.v for c in ext]),
                np.array([c.V for c in ext]),
            )
            logw = np.log([c.weight for c in ext])
            log_terms_e = logw[None] + log_pd + logq
        log_kappa = np.where(sizes == 1, log_clutter_cell, -np.inf)
        log_g = logsumexp(
            np.concatenate([log_kappa[:, None], log_terms_p, log_terms_e], axis=1), axis=1
        )

    log_part = np.array([sum(log_g[cell_index[c]] for c in P) for P in proposals])
    if not np.any(np.isfinite(log_part)):
        raise StructureError("every proposed partition has zero weight")
    part_w = np.exp(log_part - logsumexp(log_part))
    beta = np.zeros(n_cells)
    for P, wP in zip(proposals, part_w):
        for c in P:
            beta[cell_index[c]] += wP
    with np.errstate(divide="ignore"):
        log_beta = np.log(beta)
    with np.errstate(invalid="ignore"):  # -inf - -inf on cells nobody can explain
        w_det_p = np.exp(log_beta[:, None] + log_terms_p - log_g[:, None])
        w_det_e = np.exp(log_beta[:, None] + log_terms_e - log_g[:, None])
    w_det_p = np.nan_to_num(w_det_p, nan=0.0)
    w_det_e = np.nan_to_num(w_det_e, nan=0.0)

    keep_p = w_det_p > min_weight
    keep_e = w_det_e > min_weight
    diag.cells = cells
    diag.log_g = log_g
    diag.log_clutter = log_clutter_cell
    diag.partition_weights = part_w
    diag.detected_mass = float(w_det_p.sum() + w_det_e.sum())
    diag.dropped_mass = float(w_det_p[~keep_p].sum() + w_det_e[~keep_e].sum())

    detected = []  # (cell, component index, class, component)
    for j, comp in enumerate(pred.point):
        rows = np.flatnonzero(keep_p[:, j])
        if rows.size:
            for r, new in zip(rows, _update_point(comp, z, [cells[r] for r in rows], w_det_p[rows, j], model, n_x)):
                detected.append((r, j, new))
    det_point = [c for _, _, c in sorted(detected, key=lambda t: (t[0], t[1]))]
    detected = []
    for j, comp in enumerate(pred.extended):
        rows = np.flatnonzero(keep_e[:, j])
        if rows.size:
            for r, new in zip(rows, _update_extended(comp, z, [cells[r] for r in rows], w_det_e[rows, j], model, n_x)):
                detected.append((r, j, new))
    det_ext = [c for _, _, c in sorted(detected, key=lambda t: (t[0], t[1]))]
    post = PhdMixture(pred.time, point_out + det_point, ext_out + det_ext, pred.n_x, pred.d)
    return post, diag


def _gain(comp, S, H, n_x):
    P_cross = comp.cov[:, -n_x:] @ H.T
    K = np.linalg.solve(S, P_cross.T).T
    return K, comp.cov - K @ P_cross.T


def _update_point(comp, z, cells, weights, model, n_x):
    H = model.H
    S = symmetrize(H @ comp.cov[-n_x:, -n_x:] @ H.T + model.R)
    K, cov = _gain(comp, S, H, n_x)
    cov = symmetrize(cov)
    eps = z[[c[0] for c in cells]] - H @ comp.mean[-n_x:]
    means = comp.mean[None] + eps @ K.T
    return [replace(comp, weight=float(w), mean=mu, cov=cov) for w, mu in zip(weights, means)]


def _update_extended(comp, z, cells, weights, model, n_x):
    H = model.H
    d = comp.V.shape[0]
    X = comp.V / (comp.v - 2 * d - 2)
    Lx = cholesky(X)
    hph = H @ comp.cov[-n_x:, -n_x:] @ H.T
    m_pred = H @ comp.mean[-n_x:]
    by_size = {}
    out = []
    for cell, w in zip(cells, weights):
        n = len(cell)
        if n not in by_size:
            S = symmetrize(hph + X / n)
            K, cov = _gain(comp, S, H, n_x)
            by_size[n] = (cholesky(S), K, symmetrize(cov))
        Ls, K, cov = by_size[n]
        zbar, Z = _cell_moments(z[list(cell)])
        eps = zbar - m_pred
        u = Lx @ np.linalg.solve(Ls, eps)
        out.append(
            replace(
                comp,
                weight=float(w),
                mean=comp.mean + K @ eps,
                cov=cov,
                a=comp.a + n,
                b=comp.b + 1.0,
                v=comp.v + n,
                V=symmetrize(comp.V + np.outer(u, u) + Z),
            )
        )
    return out
