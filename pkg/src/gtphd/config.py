"""Scenario and filter configuration.

Configs are YAML documents. Every key is optional; missing keys take the
defaults below, which reproduce the paper's traffic scenario. Schema::

    schema: gtphd.scenario/1
    seed: int
    duration: int                      # number of scans
    dt: float                          # s
    region: [[xmin, xmax], [ymin, ymax]]   # m
    motion:   {sigma_v2, p_survival}
    sensor:   {sigma_eps2, p_detect, clutter_rate}
    truth:
      process_noise: bool
      targets: [{kind, state: [px, py, vx, vy], birth, death,
                 extent_axes: [longitudinal_sd, lateral_sd], rate}]
    filter:
      prune_threshold, absorb_threshold, max_components, lscan,
      extent_dim, birth_weights: [extended, point], birth_mean, birth_sd,
      gamma_a, gamma_b, iw_v, iw_V_scale, rate_forgetting,
      correlation_time, extent_transform (d x d),
      dbscan: {step, min, max}, extraction: round|threshold,
      split_misdetection: bool
    metric:   {p, c, switch, normalize}
"""

from __future__ import annotations

import copy
from dataclasses import asdict, dataclass, field, fields, is_dataclass

import numpy as np
import yaml

from .exceptions import ConfigError

SCHEMA = "gtphd.scenario/1"


@dataclass
class TargetSpec:
    kind: str
    state: list
    birth: int
    death: int
    extent_axes: list = field(default_factory=lambda: [0.5, 0.25])
    rate: float = 10.0


def _default_targets():
    return [
        TargetSpec("extended", [6.0, 50.0, 0.0, 2.0], 1, 100),
        TargetSpec("point", [13.0, 48.0, 0.0, 2.2], 7, 100),
        TargetSpec("point", [9.5, 30.0, 0.0, 2.5], 10, 80),
        TargetSpec("extended", [-7.0, 300.0, 0.0, -5.4], 20, 70),
        TargetSpec("point", [-12.0, 220.0, 0.0, -1.0], 25, 100),
    ]


@dataclass
class MotionConfig:
    sigma_v2: float = 0.1
    p_survival: float = 0.99


@dataclass
class SensorConfig:
    sigma_eps2: float = 1.0
    p_detect: float = 0.98
    clutter_rate: float = 5.0


@dataclass
class TruthConfig:
    process_noise: bool = False
    targets: list = field(default_factory=_default_targets)


@dataclass
class DbscanConfig:
    step: float = 0.1
    min: float = 0.1
    max: float = 8.0


@dataclass
class FilterConfig:
    prune_threshold: float = 1e-5
    absorb_threshold: float = 4.0
    max_components: int = 100
    lscan: int = 5
    extent_dim: int = 2
    birth_weights: list = field(default_factory=lambda: [0.05, 0.05])
    birth_mean: list = field(default_factory=lambda: [0.0, 150.0, 0.0, 0.0])
    birth_sd: list = field(default_factory=lambda: [25.0, 100.0, 5.0, 5.0])
    gamma_a: float = 8.0
    gamma_b: float = 1.0
    iw_v: float = 100.0
    iw_V_scale: float = 2.5
    rate_forgetting: float = 1.05
    correlation_time: float = 5.48
    extent_transform: list = field(default_factory=lambda: [[1.0, 0.0], [0.0, 1.0]])
    dbscan: DbscanConfig = field(default_factory=DbscanConfig)
    extraction: str = "round"
    split_misdetection: bool = False


@dataclass
class MetricSettings:
    p: float = 2.0
    c: float = 100.0
    switch: float = 1.0
    normalize: bool = True


@dataclass
class ScenarioConfig:
    seed: int = 0
    duration: int = 100
    dt: float = 1.0
    region: list = field(default_factory=lambda: [[-25.0, 25.0], [0.0, 300.0]])
    motion: MotionConfig = field(default_factory=MotionConfig)
    sensor: SensorConfig = field(default_factory=SensorConfig)
    truth: TruthConfig = field(default_factory=TruthConfig)
    filter: FilterConfig = field(default_factory=FilterConfig)
    metric: MetricSettings = field(default_factory=MetricSettings)

    def to_dict(self):
        return {"schema": SCHEMA, **asdict(self)}

    def to_yaml(self):
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def validate(self):
        validate(self)
        return self


# -- loading ----------------------------------------------------------------


def _build(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(path or "<root>", f"expected a mapping, got {type(data).__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}".lstrip("."), "unknown key")
    obj = cls()
    for name, value in data.items():
        fpath = f"{path}.{name}".lstrip(".")
        current = getattr(obj, name)
        if is_dataclass(current):
            value = _build(type(current), value, fpath)
        elif name == "targets":
            if not isinstance(value, list):
                raise ConfigError(fpath, "expected a list of targets")
            value = [_build_target(t, f"{fpath}[{i}]") for i, t in enumerate(value)]
        setattr(obj, name, value)
    return obj


def _build_target(data, path):
    if not isinstance(data, dict):
        raise ConfigError(path, "expected a mapping")
    missing = {"kind", "state", "birth", "death"} - set(data)
    if missing:
        raise ConfigError(f"{path}.{sorted(missing)[0]}", "required key missing")
    known = {f.name for f in fields(TargetSpec)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown key")
    return TargetSpec(**data)


def _check(cond, path, message):
    if not cond:
        raise ConfigError(path, message)


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def validate(cfg):
    """Raise :class:`ConfigError` naming the first invalid field."""
    _check(isinstance(cfg.seed, int), "seed", "must be an integer")
    _check(isinstance(cfg.duration, int) and cfg.duration >= 1, "duration", "must be a positive integer")
    _check(_is_number(cfg.dt) and cfg.dt > 0, "dt", "must be positive")
    reg = np.asarray(cfg.region, dtype=float)
    _check(reg.shape == (2, 2) and np.all(reg[:, 1] > reg[:, 0]), "region", "must be [[xmin,xmax],[ymin,ymax]] with max > min")
    for name in ("p_survival",):
        val = getattr(cfg.motion, name)
        _check(_is_number(val) and 0 <= val <= 1, f"motion.{name}", "must be a probability in [0, 1]")
    _check(_is_number(cfg.motion.sigma_v2) and cfg.motion.sigma_v2 >= 0, "motion.sigma_v2", "must be non-negative")
    s = cfg.sensor
    _check(_is_number(s.p_detect) and 0 <= s.p_detect <= 1, "sensor.p_detect", "must be a probability in [0, 1]")
    _check(_is_number(s.sigma_eps2) and s.sigma_eps2 > 0, "sensor.sigma_eps2", "must be positive")
    _check(_is_number(s.clutter_rate) and s.clutter_rate >= 0, "sensor.clutter_rate", "must be non-negative")
    for i, t in enumerate(cfg.truth.targets):
        p = f"truth.targets[{i}]"
        _check(t.kind in ("point", "extended"), f"{p}.kind", "must be 'point' or 'extended'")
        _check(len(t.state) == 4, f"{p}.state", "must have 4 entries [px, py, vx, vy]")
        _check(isinstance(t.birth, int) and isinstance(t.death, int) and 1 <= t.birth < t.death, f"{p}.birth", "need integers 1 <= birth < death")
        _check(len(t.extent_axes) == 2 and all(_is_number(a) and a > 0 for a in t.extent_axes), f"{p}.extent_axes", "need two positive standard deviations")
        _check(_is_number(t.rate) and t.rate >= 0, f"{p}.rate", "must be non-negative")
    f = cfg.filter
    d = f.extent_dim
    _check(isinstance(d, int) and d >= 1, "filter.extent_dim", "must be a positive integer")
    _check(_is_number(f.prune_threshold) and f.prune_threshold >= 0, "filter.prune_threshold", "must be non-negative")
    _check(_is_number(f.absorb_threshold) and f.absorb_threshold > 0, "filter.absorb_threshold", "must be positive")
    _check(isinstance(f.max_components, int) and f.max_components >= 1, "filter.max_components", "must be >= 1")
    _check(f.lscan is None or (isinstance(f.lscan, int) and f.lscan >= 1), "filter.lscan", "must be a positive integer or null")
    _check(len(f.birth_weights) == 2 and all(_is_number(w) and w >= 0 for w in f.birth_weights), "filter.birth_weights", "need [extended, point] non-negative weights")
    _check(len(f.birth_mean) == 4, "filter.birth_mean", "must have 4 entries")
    _check(len(f.birth_sd) == 4 and all(_is_number(x) and x > 0 for x in f.birth_sd), "filter.birth_sd", "need 4 positive standard deviations")
    _check(_is_number(f.gamma_a) and f.gamma_a > 0, "filter.gamma_a", "must be positive")
    _check(_is_number(f.gamma_b) and f.gamma_b > 0, "filter.gamma_b", "must be positive")
    _check(_is_number(f.iw_v) and f.iw_v > 2 * d + 2, "filter.iw_v", "must exceed 2*extent_dim + 2")
    _check(_is_number(f.iw_V_scale) and f.iw_V_scale > 0, "filter.iw_V_scale", "must be positive")
    _check(_is_number(f.rate_forgetting) and f.rate_forgetting > 0, "filter.rate_forgetting", "must be positive")
    _check(_is_number(f.correlation_time) and f.correlation_time > 0, "filter.correlation_time", "must be positive")
    _check(np.asarray(f.extent_transform, dtype=float).shape == (d, d), "filter.extent_transform", "must be extent_dim x extent_dim")
    db = f.dbscan
    _check(_is_number(db.step) and db.step > 0, "filter.dbscan.step", "must be positive")
    _check(_is_number(db.min) and _is_number(db.max) and 0 < db.min <= db.max, "filter.dbscan.min", "need 0 < min <= max")
    _check(f.extraction in ("round", "threshold"), "filter.extraction", "must be 'round' or 'threshold'")
    m = cfg.metric
    _check(_is_number(m.p) and m.p >= 1, "metric.p", "must be >= 1")
    _check(_is_number(m.c) and m.c > 0, "metric.c", "must be positive")
    _check(_is_number(m.switch) and m.switch >= 0, "metric.switch", "must be non-negative")


def config_from_dict(data):
    data = copy.deepcopy(data or {})
    schema = data.pop("schema", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError("schema", f"unsupported schema {schema!r}")
    cfg = _build(ScenarioConfig, data, "")
    validate(cfg)
    return cfg


def load_config(path=None):
    """Load and validate a YAML scenario; ``None`` returns the defaults."""
    if path is None:
        return ScenarioConfig().validate()
    with open(path) as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError("<file>", f"not valid YAML: {exc}") from exc
    return config_from_dict(data)


def save_config(cfg, path):
    with open(path, "w") as fh:
        fh.write(cfg.to_yaml())
