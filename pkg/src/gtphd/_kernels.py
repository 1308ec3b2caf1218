"""Hot numeric kernels with a numba path and a pure numpy/scipy path.

The numba path is used when numba imports and ``GTPHD_DISABLE_NUMBA`` is not
set to a truthy value. Both paths return identical results up to floating
point round-off; ``tests/test_kernels.py`` checks them against each other and
``benchmarks/bench_kernels.py`` times them.

Kernels
-------
linkage_labels
    Connected-component labels of the epsilon graph (``dist <= eps``) for a
    sweep of ascending thresholds. This is DBSCAN with ``min_samples=1``.
ggiw_loglik
    Log predicted likelihood of every (cell, GGIW component) pair.
gaussian_loglik
    Log ``N(z; Hm, S)`` for every (measurement, Gaussian component) pair.
"""

import math
import os

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.special import gammaln

_FLAG = os.environ.get("GTPHD_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("disabled by GTPHD_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


_backend = "numba" if HAVE_NUMBA else "numpy"


def backend():
    return _backend


def set_backend(name):
    """Switch between ``"numba"`` and ``"numpy"``; returns the previous backend."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not available or disabled")
    prev, _backend = _backend, name
    return prev


# -- epsilon-linkage sweep ---------------------------------------------------


def canonical_labels(labels):
    """Relabel so clusters are numbered by first appearance (0, 1, 2, ...)."""
    labels = np.asarray(labels)
    out = np.empty(labels.shape, dtype=np.int64)
    for row, src in zip(out.reshape(-1, labels.shape[-1]), labels.reshape(-1, labels.shape[-1])):
        mapping = {}
        for i, lab in enumerate(src):
            row[i] = mapping.setdefault(lab, len(mapping))
    return out


def _linkage_labels_numpy(points, thresholds):
    m = points.shape[0]
    out = np.zeros((thresholds.size, m), dtype=np.int64)
    if m < 2:
        return out
    Z = linkage(points, method="single", metric="euclidean")
    for t, eps in enumerate(thresholds):
        out[t] = fcluster(Z, eps, criterion="distance")
    return canonical_labels(out)


@njit(cache=True)
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@njit(cache=True)
def _linkage_labels_numba(points, thresholds):
    m = points.shape[0]
    n_thr = thresholds.shape[0]
    out = np.zeros((n_thr, m), dtype=np.int64)
    if m < 2:
        return out
    n_edges = m * (m - 1) // 2
    dist = np.empty(n_edges)
    ei = np.empty(n_edges, dtype=np.int64)
    ej = np.empty(n_edges, dtype=np.int64)
    e = 0
    for i in range(m):
        for j in range(i + 1, m):
            s = 0.0
            for c in range(points.shape[1]):
                diff = points[i, c] - points[j, c]
                s += diff * diff
            dist[e] = math.sqrt(s)
            ei[e] = i
            ej[e] = j
            e += 1
    order = np.argsort(dist, kind="mergesort")
    parent = np.arange(m)
    root_label = np.empty(m, dtype=np.int64)
    e = 0
    for t in range(n_thr):
        eps = thresholds[t]
        while e < n_edges and dist[order[e]] <= eps:
            ri = _find(parent, ei[order[e]])
            rj = _find(parent, ej[order[e]])
            if ri != rj:
                if ri < rj:
                    parent[rj] = ri
                else:
                    parent[ri] = rj
            e += 1
        root_label[:] = -1
        n_lab = 0
        for i in range(m):
            r = _find(parent, i)
            if root_label[r] < 0:
                root_label[r] = n_lab
                n_lab += 1
            out[t, i] = root_label[r]
    return out


def linkage_labels(points, thresholds):
    points = np.ascontiguousarray(points, dtype=np.float64)
    points = points.reshape(len(points), -1) if points.size else np.zeros((len(points), 2))
    thresholds = np.ascontiguousarray(thresholds, dtype=np.float64)
    if thresholds.size > 1 and np.any(np.diff(thresholds) < 0):
        raise ValueError("thresholds must be ascending")
    if _backend == "numba":
        return _linkage_labels_numba(points, thresholds)
    return _linkage_labels_numpy(points, thresholds)


# -- GGIW predicted cell likelihood --------------------------------------------

_LOG_PI = math.log(math.pi)


def _log_mvgamma_numpy(d, x):
    j = np.arange(1, d + 1)
    return d * (d - 1) / 4.0 * _LOG_PI + gammaln(np.asarray(x)[..., None] + (1 - j) / 2.0).sum(-1)


def _ggiw_loglik_numpy(sizes, zbar, scatter, pz, hph, a, b, v, V):
    d = zbar.shape[1]
    n = sizes.astype(float)[:, None]  # (C, 1)
    X = V / (v - 2 * d - 2)[:, None, None]  # (J, d, d)
    S = hph[None] + X[None] / n[..., None, None]  # (C, J, d, d)
    Ls = np.linalg.cholesky(S)
    Lx = np.linalg.cholesky(X)
    eps = zbar[:, None, :] - pz[None]  # (C, J, d)
    y = np.linalg.solve(Ls, eps[..., None])  # (C, J, d, 1)
    u = (Lx[None] @ y)[..., 0]
    Vn = V[None] + scatter[:, None] + u[..., :, None] * u[..., None, :]
    logdet_S = 2 * np.log(np.diagonal(Ls, axis1=-2, axis2=-1)).sum(-1)
    logdet_X = 2 * np.log(np.diagonal(Lx, axis1=-2, axis2=-1)).sum(-1)
    logdet_V = np.linalg.slogdet(V)[1]
    logdet_Vn = np.linalg.slogdet(Vn)[1]
    vn = v[None] + n
    an = a[None] + n
    bn = b[None] + 1.0
    return (
        -0.5 * d * (n * _LOG_PI + np.log(n))
        + 0.5 * (v - d - 1)[None] * logdet_V[None]
        - 0.5 * (vn - d - 1) * logdet_Vn
        + _log_mvgamma_numpy(d, 0.5 * (vn - d - 1))
        - _log_mvgamma_numpy(d, 0.5 * (v - d - 1))[None]
        + 0.5 * logdet_X[None]
        - 0.5 * logdet_S
        + gammaln(an)
        + (a * np.log(b))[None]
        - gammaln(a)[None]
        - an * np.log(bn)
    )


@njit(cache=True)
def _chol_inplace(A, L, d):
    """Lower Cholesky of A into L; returns log-determinant or nan if not PD."""
    logdet = 0.0
    for i in range(d):
        for j in range(i + 1):
            s = A[i, j]
            for k in range(j):
                s -= L[i, k] * L[j, k]
            if i == j:
                if s <= 0.0:
                    return np.nan
                L[i, i] = math.sqrt(s)
                logdet += 2.0 * math.log(L[i, i])
            else:
                L[i, j] = s / L[j, j]
        for j in range(i + 1, d):
            L[i, j] = 0.0
    return logdet


@njit(cache=True)
def _log_mvgamma_nb(d, x):
    s = d * (d - 1) / 4.0 * _LOG_PI
    for j in range(1, d + 1):
        s += math.lgamma(x + (1.0 - j) / 2.0)
    return s


@njit(cache=True)
def _ggiw_loglik_numba(sizes, zbar, scatter, pz, hph, a, b, v, V):
    n_cells = zbar.shape[0]
    n_comp = pz.shape[0]
    d = zbar.shape[1]
    out = np.empty((n_cells, n_comp))
    X = np.empty((d, d))
    Lx = np.empty((d, d))
    S = np.empty((d, d))
    Ls = np.empty((d, d))
    Vn = np.empty((d, d))
    Lv = np.empty((d, d))
    y = np.empty(d)
    u = np.empty(d)
    for j in range(n_comp):
        denom = v[j] - 2 * d - 2
        for r in range(d):
            for c in range(d):
                X[r, c] = V[j, r, c] / denom
        logdet_X = _chol_inplace(X, Lx, d)
        logdet_V = _chol_inplace(V[j], Lv, d)
        base = (
            0.5 * (v[j] - d - 1) * logdet_V
            - _log_mvgamma_nb(d, 0.5 * (v[j] - d - 1))
            + 0.5 * logdet_X
            + a[j] * math.log(b[j])
            - math.lgamma(a[j])
        )
        for ci in range(n_cells):
            n = float(sizes[ci])
            for r in range(d):
                for c in range(d):
                    S[r, c] = hph[j, r, c] + X[r, c] / n
            logdet_S = _chol_inplace(S, Ls, d)
            # y = Ls^-1 eps
            for r in range(d):
                s = zbar[ci, r] - pz[j, r]
                for c in range(r):
                    s -= Ls[r, c] * y[c]
                y[r] = s / Ls[r, r]
            for r in range(d):
                s = 0.0
                for c in range(r + 1):
                    s += Lx[r, c] * y[c]
                u[r] = s
            for r in range(d):
                for c in range(d):
                    Vn[r, c] = V[j, r, c] + scatter[ci, r, c] + u[r] * u[c]
            logdet_Vn = _chol_inplace(Vn, Lv, d)
            vn = v[j] + n
            an = a[j] + n
            bn = b[j] + 1.0
            out[ci, j] = (
                base
                - 0.5 * d * (n * _LOG_PI + math.log(n))
                - 0.5 * (vn - d - 1) * logdet_Vn
                + _log_mvgamma_nb(d, 0.5 * (vn - d - 1))
                - 0.5 * logdet_S
                + math.lgamma(an)
                - an * math.log(bn)
            )
    return out


def ggiw_loglik(sizes, zbar, scatter, pz, hph, a, b, v, V):
    """Log predicted likelihood ``log q_e`` for all cells (rows) and components (columns).

    Parameters
    ----------
    sizes : (C,) int
        Number of measurements in each cell.
    zbar, scatter : (C, d), (C, d, d)
        Cell centroid and scatter matrix.
    pz, hph : (J, d), (J, d, d)
        Predicted measurement ``H m`` and ``H P H^T`` of each component's last state.
    a, b, v : (J,)
    V : (J, d, d)
    """
    args = [np.ascontiguousarray(x, dtype=np.float64) for x in (zbar, scatter, pz, hph, a, b, v, V)]
    sizes = np.ascontiguousarray(sizes, dtype=np.int64)
    if sizes.size == 0 or args[2].shape[0] == 0:
        return np.zeros((sizes.size, args[2].shape[0]))
    if _backend == "numba":
        return _ggiw_loglik_numba(sizes, *args)
    return _ggiw_loglik_numpy(sizes, *args)


# -- Gaussian predicted likelihood ---------------------------------------------


def _gaussian_loglik_numpy(z, pz, S):
    k = z.shape[1]
    L = np.linalg.cholesky(S)  # (J, k, k)
    diff = z[:, None, :] - pz[None]  # (M, J, k)
    r = np.linalg.solve(L[None], diff[..., None])[..., 0]
    logdet = 2 * np.log(np.diagonal(L, axis1=-2, axis2=-1)).sum(-1)
    return -0.5 * (k * math.log(2 * math.pi) + logdet[None] + (r * r).sum(-1))


@njit(cache=True)
def _gaussian_loglik_numba(z, pz, S):
    m = z.shape[0]
    n_comp = pz.shape[0]
    k = z.shape[1]
    out = np.empty((m, n_comp))
    L = np.empty((k, k))
    r = np.empty(k)
    c0 = k * math.log(2 * math.pi)
    for j in range(n_comp):
        logdet = _chol_inplace(S[j], L, k)
        for i in range(m):
            q = 0.0
            for a in range(k):
                s = z[i, a] - pz[j, a]
                for c in range(a):
                    s -= L[a, c] * r[c]
                r[a] = s / L[a, a]
                q += r[a] * r[a]
            out[i, j] = -0.5 * (c0 + logdet + q)
    return out


def gaussian_loglik(z, pz, S):
    """``log N(z_i; pz_j, S_j)`` as an (M, J) array."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    pz = np.ascontiguousarray(pz, dtype=np.float64)
    S = np.ascontiguousarray(S, dtype=np.float64)
    if z.shape[0] == 0 or pz.shape[0] == 0:
        return np.zeros((z.shape[0], pz.shape[0]))
    if _backend == "numba":
        return _gaussian_loglik_numba(z, pz, S)
    return _gaussian_loglik_numpy(z, pz, S)
