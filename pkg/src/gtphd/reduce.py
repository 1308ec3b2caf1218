"""Mixture reduction: pruning, greedy absorption, component cap and the L-scan window."""

from dataclasses import replace

import numpy as np

from .models import PhdMixture


def _reduce_list(comps, gamma_p, gamma_a, j_max, n_x):
    theta = [i for i, c in enumerate(comps) if c.weight > gamma_p]
    if not theta:
        return []
    weights = np.array([c.weight for c in comps])
    means = np.array([c.mean[-n_x:] for c in comps])
    births = np.array([c.birth_time for c in comps])
    remaining = np.array(theta)
    merged = []
    while remaining.size:
        j = remaining[np.argmax(weights[remaining])]
        P_j = comps[j].cov[-n_x:, -n_x:]
        diff = means[remaining] - means[j]
        dist = np.einsum("ij,ij->i", diff, np.linalg.solve(P_j, diff.T).T)
        # different birth times live in different trajectory spaces
        group = (dist <= gamma_a) & (births[remaining] == births[j])
        group |= remaining == j
        merged.append(comps[j].with_weight(weights[remaining[group]].sum()))
        remaining = remaining[~group]
    if len(merged) > j_max:
        order = np.argsort([-c.weight for c in merged], kind="stable")[:j_max]
        merged = [merged[i] for i in sorted(order)]
    return merged


def prune_absorb(mix, gamma_p, gamma_a, j_max):
    """Prune weights ``<= gamma_p``, absorb neighbours of the heaviest component, cap at ``j_max``.

    Point and extended lists are reduced independently. The surviving
    component keeps its own parameters and takes the summed weight of
    everything it absorbed; distances are Mahalanobis distances between
    current-state means under the survivor's current-state covariance.
    """
    return PhdMixture(
        time=mix.time,
        point=_reduce_list(mix.point, gamma_p, gamma_a, j_max, mix.n_x),
        extended=_reduce_list(mix.extended, gamma_p, gamma_a, j_max, mix.n_x),
        n_x=mix.n_x,
        d=mix.d,
    )


def _window(c, L, n_x):
    active = c.mean.size // n_x
    if active <= L:
        return c
    cut = (active - L) * n_x
    head = c.mean[:cut].reshape(-1, n_x)
    frozen = head if c.n_frozen == 0 else np.vstack([c.frozen, head])
    return replace(c, mean=c.mean[cut:], cov=c.cov[cut:, cut:], frozen=frozen)


def lscan_apply(mix, L):
    """Keep only the last ``L`` states of each component Gaussian.

    Earlier states are frozen at their current means and their correlations
    with the active window are dropped. ``L=None`` leaves the mixture untouched.
    """
    if L is None:
        return mix
    if L < 1:
        raise ValueError("L must be at least 1")
    return replace(
        mix,
        point=tuple(_window(c, L, mix.n_x) for c in mix.point),
        extended=tuple(_window(c, L, mix.n_x) for c in mix.extended),
    )
