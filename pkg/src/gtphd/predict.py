"""Trajectory PHD prediction for Gaussian (point) and GGIW (extended) mixtures."""

from dataclasses import replace

import numpy as np

from .exceptions import StructureError
from .models import GgiwComponent, PhdMixture
from .stats import symmetrize


def _extend_trajectory(c, F, Q, n_x):
    m_last = c.mean[-n_x:]
    P_cross = c.cov[:, -n_x:] @ F.T
    P_new = F @ c.cov[-n_x:, -n_x:] @ F.T + Q
    mean = np.concatenate([c.mean, F @ m_last])
    cov = np.block([[c.cov, P_cross], [P_cross.T, P_new]])
    return mean, symmetrize(cov)


def predict_component(c, motion, n_x, d):
    mean, cov = _extend_trajectory(c, motion.F, motion.Q, n_x)
    weight = motion.p_survival * c.weight
    if not isinstance(c, GgiwComponent):
        return replace(c, weight=weight, mean=mean, cov=cov)
    decay = motion.extent_decay
    M = np.eye(d) if motion.M is None else motion.M
    mu = motion.rate_forgetting
    return replace(
        c,
        weight=weight,
        mean=mean,
        cov=cov,
        a=c.a / mu,
        b=c.b / mu,
        v=2 * d + 2 + decay * (c.v - 2 * d - 2),
        V=symmetrize(decay * M @ c.V @ M.T),
    )


def predict(post, motion, birth, k):
    """Predict the posterior trajectory PHD at ``k-1`` to time ``k`` and add births.

    Surviving components keep their order; birth components are appended after
    them, point and extended lists separately.
    """
    if post.time != k - 1:
        raise StructureError(f"posterior is at time {post.time}, cannot predict to {k}")
    n_x, d = post.n_x, post.d
    if motion.F.shape != (n_x, n_x) or motion.Q.shape != (n_x, n_x):
        raise StructureError(f"motion model shapes {motion.F.shape}/{motion.Q.shape} != n_x={n_x}")
    born_point, born_ext = birth.at(k)
    for c in (*born_point, *born_ext):
        if c.mean.size != n_x:
            raise StructureError("birth templates must have length one")
    point = [predict_component(c, motion, n_x, d) for c in post.point]
    extended = [predict_component(c, motion, n_x, d) for c in post.extended]
    return PhdMixture(
        time=k,
        point=point + list(born_point),
        extended=extended + list(born_ext),
        n_x=n_x,
        d=d,
    )
