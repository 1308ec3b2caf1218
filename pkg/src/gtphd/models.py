"""Mixture components, the coexisting point/extended PHD and the sensor/motion models."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .exceptions import StructureError

SCHEMA_VERSION = "gtphd.mixture/1"


def time_slice(first, last, start_time, n_x):
    """Slice of a stacked trajectory vector covering time steps ``first..last`` (inclusive).

    ``start_time`` is the time step stored in the first ``n_x`` entries.
    """
    if last < first:
        raise StructureError(f"empty time range {first}..{last}")
    return slice((first - start_time) * n_x, (last - start_time + 1) * n_x)


def get_block(M, rows, cols, start_time, n_x):
    """``M[rows, cols]`` where rows and cols are inclusive ``(first, last)`` time ranges."""
    return M[time_slice(*rows, start_time, n_x), time_slice(*cols, start_time, n_x)]


def set_block(M, rows, cols, start_time, n_x, value):
    out = np.array(M, copy=True)
    out[time_slice(*rows, start_time, n_x), time_slice(*cols, start_time, n_x)] = value
    return out


@dataclass(frozen=True)
class TrajectoryGaussian:
    """Weighted Gaussian over a trajectory ``(t, x^{1:i})``.

    The trajectory is stored as an optional frozen prefix of point estimates
    (set by the L-scan window) followed by an active Gaussian part whose mean
    stacks ``i_active`` states of dimension ``n_x``.
    """

    weight: float
    birth_time: int
    mean: np.ndarray
    cov: np.ndarray
    frozen: np.ndarray = field(default=None)

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (mean.size, mean.size):
            raise StructureError(f"mean {mean.shape} and cov {cov.shape} disagree")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if self.frozen is None:
            object.__setattr__(self, "frozen", np.zeros((0, 0)))

    @property
    def n_frozen(self):
        return self.frozen.shape[0]

    def length(self, n_x):
        return self.n_frozen + self.mean.size // n_x

    def end_time(self, n_x):
        return self.birth_time + self.length(n_x) - 1

    def active_start(self):
        return self.birth_time + self.n_frozen

    def states(self, n_x):
        """All trajectory states as an ``(i, n_x)`` array, frozen prefix first."""
        tail = self.mean.reshape(-1, n_x)
        if self.n_frozen == 0:
            return tail.copy()
        return np.vstack([self.frozen, tail])

    def with_weight(self, weight):
        return replace(self, weight=float(weight))


@dataclass(frozen=True)
class GgiwComponent(TrajectoryGaussian):
    """Trajectory Gaussian times a Gamma(a, b) rate law and an IW(v, V) extent law."""

    a: float = 1.0
    b: float = 1.0
    v: float = 7.0
    V: np.ndarray = None

    def __post_init__(self):
        super().__post_init__()
        if self.V is None:
            raise StructureError("GgiwComponent requires an extent matrix V")
        object.__setattr__(self, "V", np.atleast_2d(np.asarray(self.V, dtype=float)))

    def extent_mean(self):
        d = self.V.shape[0]
        return self.V / (self.v - 2 * d - 2)

    def rate_mean(self):
        return self.a / self.b


def current_state_marginal(c, n_x):
    """Mean and covariance of the last state of a trajectory component."""
    return c.mean[-n_x:].copy(), c.cov[-n_x:, -n_x:].copy()


@dataclass(frozen=True)
class PhdMixture:
    """Trajectory PHD as separate point (Gaussian) and extended (GGIW) component lists."""

    time: int
    point: tuple = ()
    extended: tuple = ()
    n_x: int = 4
    d: int = 2

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(self.point))
        object.__setattr__(self, "extended", tuple(self.extended))

    def __len__(self):
        return len(self.point) + len(self.extended)

    def components(self):
        return [*self.point, *self.extended]


def total_mass(mix):
    return float(sum(c.weight for c in mix.point) + sum(c.weight for c in mix.extended))


class UniformClutter:
    """Constant clutter intensity ``rate / area`` over a rectangular region.

    The intensity is returned for every position, including points outside the
    region; measurement noise can carry target returns slightly past the border
    and the update needs a finite intensity there.
    """

    def __init__(self, rate, region):
        self.rate = float(rate)
        self.region = np.asarray(region, dtype=float).reshape(-1, 2)
        self.area = float(np.prod(self.region[:, 1] - self.region[:, 0]))
        self.density = self.rate / self.area

    def __call__(self, z):
        z = np.atleast_2d(z)
        return np.full(z.shape[0], self.density)


@dataclass
class MeasurementModel:
    H: np.ndarray
    R: np.ndarray
    p_detect: float
    clutter_intensity: Callable[[np.ndarray], np.ndarray]
    clutter_mean: float

    def __post_init__(self):
        self.H = np.atleast_2d(np.asarray(self.H, dtype=float))
        self.R = np.atleast_2d(np.asarray(self.R, dtype=float))
        if not 0.0 <= self.p_detect <= 1.0:
            raise StructureError(f"p_detect must lie in [0, 1], got {self.p_detect}")

    @property
    def n_z(self):
        return self.H.shape[0]

    def log_clutter(self, z):
        with np.errstate(divide="ignore"):
            return np.log(self.clutter_intensity(np.atleast_2d(z)))


@dataclass
class MotionModel:
    F: np.ndarray
    Q: np.ndarray
    p_survival: float
    rate_forgetting: float = 1.0  # mu; Gamma a and b are divided by it
    correlation_time: float = np.inf  # tau in seconds
    dt: float = 1.0
    M: np.ndarray = None

    def __post_init__(self):
        self.F = np.atleast_2d(np.asarray(self.F, dtype=float))
        self.Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        if not 0.0 <= self.p_survival <= 1.0:
            raise StructureError(f"p_survival must lie in [0, 1], got {self.p_survival}")
        if self.rate_forgetting <= 0 or self.correlation_time <= 0:
            raise StructureError("rate_forgetting and correlation_time must be positive")

    @property
    def extent_decay(self):
        return float(np.exp(-self.dt / self.correlation_time))


@dataclass
class BirthModel:
    """Birth intensity templates; weights live on the templates themselves.

    Templates are stored with ``birth_time=0`` and re-stamped at injection.
    """

    point: list = field(default_factory=list)
    extended: list = field(default_factory=list)

    def at(self, k):
        return (
            [replace(c, birth_time=k) for c in self.point],
            [replace(c, birth_time=k) for c in self.extended],
        )

    def mass(self):
        return float(sum(c.weight for c in self.point) + sum(c.weight for c in self.extended))


# -- debug snapshots ---------------------------------------------------------


def _component_to_dict(c):
    out = {
        "weight": c.weight,
        "birth_time": int(c.birth_time),
        "mean": c.mean.tolist(),
        "cov": c.cov.tolist(),
        "frozen": c.frozen.tolist(),
    }
    if isinstance(c, GgiwComponent):
        out.update(a=c.a, b=c.b, v=c.v, V=c.V.tolist())
    return out


def _component_from_dict(d, extended):
    frozen = np.asarray(d.get("frozen") or np.zeros((0, 0)), dtype=float)
    if frozen.size == 0:
        frozen = np.zeros((0, 0))
    common = dict(
        weight=float(d["weight"]),
        birth_time=int(d["birth_time"]),
        mean=np.asarray(d["mean"], dtype=float),
        cov=np.asarray(d["cov"], dtype=float),
        frozen=frozen,
    )
    if extended:
        return GgiwComponent(**common, a=d["a"], b=d["b"], v=d["v"], V=np.asarray(d["V"]))
    return TrajectoryGaussian(**common)


def mixture_to_json(mix, indent=None):
    payload = {
        "schema": SCHEMA_VERSION,
        "time": int(mix.time),
        "n_x": mix.n_x,
        "d": mix.d,
        "point": [_component_to_dict(c) for c in mix.point],
        "extended": [_component_to_dict(c) for c in mix.extended],
    }
    return json.dumps(payload, indent=indent)


def mixture_from_json(text):
    payload = json.loads(text)
    if payload.get("schema") != SCHEMA_VERSION:
        raise StructureError(f"unsupported mixture schema {payload.get('schema')!r}")
    return PhdMixture(
        time=payload["time"],
        point=[_component_from_dict(d, False) for d in payload["point"]],
        extended=[_component_from_dict(d, True) for d in payload["extended"]],
        n_x=payload["n_x"],
        d=payload["d"],
    )
