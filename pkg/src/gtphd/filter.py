"""Filter recursion driver and the four comparison variants.

One step is predict -> L-scan window -> partition proposals -> update ->
prune/absorb -> extraction. The variants differ only in configuration:

``g-tphd``  point and extended births, L from the config
``g-phd``   same with L = 1, so only the current state is kept
``p-tphd``  point births only, every measurement its own cell
``e-tphd``  extended births only
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimate import extract
from .exceptions import ConfigError
from .models import BirthModel, GgiwComponent, MeasurementModel, MotionModel, PhdMixture, TrajectoryGaussian, UniformClutter, total_mass
from .partition import dbscan_sweep, singleton_partition
from .predict import predict
from .reduce import lscan_apply, prune_absorb
from .simulate import cv_model
from .update import update

VARIANTS = ("g-tphd", "g-phd", "p-tphd", "e-tphd")


@dataclass
class FilterSetup:
    motion: MotionModel
    measurement: MeasurementModel
    birth: BirthModel
    lscan: int | None
    proposals: str  # "dbscan" or "singletons"
    gamma_p: float
    gamma_a: float
    j_max: int
    dbscan: tuple
    extraction: str
    split_misdetection: bool
    n_x: int = 4
    d: int = 2


def build_setup(cfg, variant="g-tphd", lscan="config"):
    """Models and filter settings for ``variant``; ``lscan`` overrides the config unless ``"config"``."""
    if variant not in VARIANTS:
        raise ConfigError("variant", f"must be one of {', '.join(VARIANTS)}")
    f = cfg.filter
    d = f.extent_dim
    F, Q = cv_model(cfg.dt, cfg.motion.sigma_v2)
    motion = MotionModel(
        F=F,
        Q=Q,
        p_survival=cfg.motion.p_survival,
        rate_forgetting=f.rate_forgetting,
        correlation_time=f.correlation_time,
        dt=cfg.dt,
        M=np.asarray(f.extent_transform, dtype=float),
    )
    H = np.hstack([np.eye(2), np.zeros((2, 2))])
    clutter = UniformClutter(cfg.sensor.clutter_rate, cfg.region)
    measurement = MeasurementModel(
        H=H,
        R=cfg.sensor.sigma_eps2 * np.eye(2),
        p_detect=cfg.sensor.p_detect,
        clutter_intensity=clutter,
        clutter_mean=cfg.sensor.clutter_rate,
    )
    mean = np.asarray(f.birth_mean, dtype=float)
    cov = np.diag(np.asarray(f.birth_sd, dtype=float) ** 2)
    w_ext, w_pt = f.birth_weights
    point = [TrajectoryGaussian(float(w_pt), 0, mean, cov)]
    ext = [GgiwComponent(float(w_ext), 0, mean, cov, a=f.gamma_a, b=f.gamma_b, v=f.iw_v, V=f.iw_V_scale * np.eye(d))]
    if variant == "p-tphd":
        ext = []
    elif variant == "e-tphd":
        point = []
    L = f.lscan if lscan == "config" else lscan
    if variant == "g-phd":
        L = 1
    if L is not None and (not isinstance(L, (int, np.integer)) or L < 1):
        raise ConfigError("lscan", "must be a positive integer or None")
    return FilterSetup(
        motion=motion,
        measurement=measurement,
        birth=BirthModel(point=point, extended=ext),
        lscan=L,
        proposals="singletons" if variant == "p-tphd" else "dbscan",
        gamma_p=f.prune_threshold,
        gamma_a=f.absorb_threshold,
        j_max=f.max_components,
        dbscan=(f.dbscan.min, f.dbscan.max, f.dbscan.step),
        extraction=f.extraction,
        split_misdetection=f.split_misdetection,
        d=d,
    )


@dataclass
class StepRecord:
    step: int
    prior_mass: float  # posterior mass at step-1
    predicted_mass: float
    birth_mass: float
    posterior_mass: float
    n_components: int
    estimates: list
    diagnostics: object = None


@dataclass
class FilterRun:
    steps: list = field(default_factory=list)
    posterior: PhdMixture | None = None


def proposals_for(z, setup):
    if len(z) == 0:
        return [()]
    if setup.proposals == "singletons":
        return [singleton_partition(len(z))]
    gmin, gmax, step = setup.dbscan
    return dbscan_sweep(z, gmin, gmax, step)


def filter_step(post, z, k, setup, keep_diagnostics=False):
    """One recursion from the posterior at ``k-1``; returns ``(posterior, record)``."""
    prior_mass = total_mass(post)
    pred = predict(post, setup.motion, setup.birth, k)
    pred_mass = total_mass(pred)
    pred = lscan_apply(pred, setup.lscan)
    upd, diag = update(
        pred,
        z,
        proposals_for(z, setup),
        setup.measurement,
        min_weight=setup.gamma_p,
        split_misdetection=setup.split_misdetection,
    )
    new = prune_absorb(upd, setup.gamma_p, setup.gamma_a, setup.j_max)
    rec = StepRecord(
        step=k,
        prior_mass=prior_mass,
        predicted_mass=pred_mass,
        birth_mass=setup.birth.mass(),
        posterior_mass=total_mass(new),
        n_components=len(new),
        estimates=extract(new, setup.extraction),
        diagnostics=diag if keep_diagnostics else None,
    )
    return new, rec


def run_filter(scans, setup, first_step=1, keep_diagnostics=False):
    """Run the recursion over measurement sets ``scans`` starting at ``first_step``."""
    post = PhdMixture(time=first_step - 1, n_x=setup.n_x, d=setup.d)
    out = FilterRun()
    for k, z in enumerate(scans, start=first_step):
        post, rec = filter_step(post, np.asarray(z, dtype=float).reshape(-1, 2), k, setup, keep_diagnostics)
        out.steps.append(rec)
    out.posterior = post
    return out
