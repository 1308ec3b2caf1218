"""Trajectory metric with localisation / missed / false / switch decomposition.

The metric is evaluated step by step: at every time in the window the alive
true and estimated states are matched by an optimal 2-D assignment with cost
``min(dist, c)**p`` per pair and ``c**p / 2`` per unmatched state. A true
trajectory that changes partner between consecutive steps pays
``switch**p`` (half of it when it goes from matched to unmatched or back).
Each bucket is accumulated separately, so the totals satisfy
``total**p = loc**p + miss**p + false**p + switch**p``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import StructureError


@dataclass(frozen=True)
class MetricConfig:
    p: float = 2.0
    c: float = 100.0
    switch: float = 1.0

    def __post_init__(self):
        if self.p < 1 or self.c <= 0 or self.switch < 0:
            raise ValueError(f"invalid metric parameters {self}")


@dataclass(frozen=True)
class MetricResult:
    total: float
    localization: float
    miss: float
    false: float
    switch: float

    def as_tuple(self):
        return (self.total, self.localization, self.miss, self.false, self.switch)


@dataclass(frozen=True)
class Track:
    """Time-stamped trajectory: ``points[j]`` is the state at ``start + j``."""

    start: int
    points: np.ndarray

    @property
    def end(self):
        return self.start + len(self.points) - 1

    def at(self, k):
        return self.points[k - self.start]


def _alive(tracks, k):
    idx = [i for i, t in enumerate(tracks) if t.start <= k <= t.end]
    if not idx:
        return idx, None
    return idx, np.array([tracks[i].at(k) for i in idx], dtype=float)


def assign_step(x, y, cfg):
    """Optimal assignment between two point sets at one time step.

    Returns ``(pairs, loc, n_miss, n_false)`` where ``pairs`` maps row indices
    of ``x`` to row indices of ``y`` for pairs closer than ``c``.
    """
    nx = 0 if x is None else len(x)
    ny = 0 if y is None else len(y)
    if nx == 0 or ny == 0:
        return {}, 0.0, nx, ny
    dist = np.sqrt(((x[:, None, :] - y[None, :, :]) ** 2).sum(-1))
    cost = np.minimum(dist, cfg.c) ** cfg.p
    rows, cols = linear_sum_assignment(cost)
    pairs = {}
    loc = 0.0
    for r, col in zip(rows, cols):
        if dist[r, col] < cfg.c:
            pairs[int(r)] = int(col)
            loc += cost[r, col]
    return pairs, loc, nx - len(pairs), ny - len(pairs)


def trajectory_metric(truth, estimates, cfg=MetricConfig(), window=None, normalize=False):
    """Metric between two sets of :class:`Track` over an inclusive time window.

    ``window`` defaults to the span of all tracks. With ``normalize`` the
    accumulated costs are divided by the window length before taking roots.
    """
    tracks = list(truth) + list(estimates)
    if window is None:
        if not tracks:
            return MetricResult(0.0, 0.0, 0.0, 0.0, 0.0)
        window = (min(t.start for t in tracks), max(t.end for t in tracks))
    k0, k1 = window
    if k1 < k0:
        raise StructureError(f"empty metric window {window}")
    half = cfg.c**cfg.p / 2.0
    loc = miss = false = switch = 0.0
    previous = None  # truth track index -> estimate track index or None
    for k in range(k0, k1 + 1):
        ti, x = _alive(truth, k)
        ei, y = _alive(estimates, k)
        pairs, l, n_miss, n_false = assign_step(x, y, cfg)
        loc += l
        miss += half * n_miss
        false += half * n_false
        current = {t: None for t in ti}
        for r, col in pairs.items():
            current[ti[r]] = ei[col]
        if previous is not None:
            for t, e in current.items():
                if t not in previous:
                    continue
                before = previous[t]
                if before == e:
                    continue
                switch += cfg.switch**cfg.p * (1.0 if before is not None and e is not None else 0.5)
        previous = current
    scale = 1.0 / (k1 - k0 + 1) if normalize else 1.0
    parts = np.array([loc, miss, false, switch]) * scale
    roots = parts ** (1.0 / cfg.p)
    return MetricResult(float(parts.sum() ** (1.0 / cfg.p)), *map(float, roots))


def rms_over_runs(results):
    """Component-wise root mean square over Monte Carlo runs."""
    results = list(results)
    if not results:
        raise ValueError("rms_over_runs needs at least one result")
    arr = np.array([r.as_tuple() for r in results])
    return MetricResult(*map(float, np.sqrt((arr**2).mean(axis=0))))
