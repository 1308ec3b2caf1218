"""Ground truth and measurement simulation for the linear traffic scenario."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import StructureError


def cv_model(dt, sigma_v2, n_pos=2):
    """Constant-velocity transition ``F`` and process noise ``Q``."""
    I = np.eye(n_pos)
    Z = np.zeros((n_pos, n_pos))
    F = np.block([[I, dt * I], [Z, I]])
    Q = sigma_v2 * np.block([[dt**4 / 4 * I, dt**3 / 2 * I], [dt**3 / 2 * I, dt**2 * I]])
    return F, Q


def heading_extent(axes, velocity):
    """Extent matrix with standard deviations ``axes=(along, across)`` rotated to the heading."""
    along, across = axes
    v = np.asarray(velocity[:2], dtype=float)
    speed = np.hypot(*v)
    u = v / speed if speed > 0 else np.array([1.0, 0.0])
    R = np.array([[u[0], -u[1]], [u[1], u[0]]])
    return R @ np.diag([along**2, across**2]) @ R.T


@dataclass
class GroundTruthTarget:
    kind: str
    birth: int
    death: int
    states: np.ndarray  # (death - birth + 1, n_x)
    extent: np.ndarray | None = None
    rate: float = 0.0

    def __post_init__(self):
        if self.kind not in ("point", "extended"):
            raise StructureError(f"unknown target kind {self.kind!r}")
        if not self.birth < self.death:
            raise StructureError("birth must precede death")
        if len(self.states) != self.death - self.birth + 1:
            raise StructureError("states must cover birth..death")

    def alive(self, k):
        return self.birth <= k <= self.death

    def at(self, k):
        return self.states[k - self.birth]


def generate_truth(cfg, rng=None):
    """Target trajectories from the config's target list.

    Kinematics are noise-free constant velocity unless
    ``cfg.truth.process_noise`` is set, in which case ``rng`` drives the noise.
    """
    F, Q = cv_model(cfg.dt, cfg.motion.sigma_v2)
    if cfg.truth.process_noise and rng is None:
        rng = np.random.default_rng(cfg.seed)
    out = []
    for t in cfg.truth.targets:
        n = t.death - t.birth + 1
        states = np.empty((n, 4))
        states[0] = t.state
        for j in range(1, n):
            states[j] = F @ states[j - 1]
            if cfg.truth.process_noise:
                states[j] += rng.multivariate_normal(np.zeros(4), Q)
        extent = heading_extent(t.extent_axes, t.state[2:]) if t.kind == "extended" else None
        rate = float(t.rate) if t.kind == "extended" else 0.0
        out.append(GroundTruthTarget(t.kind, t.birth, t.death, states, extent, rate))
    return out


def generate_measurements(truth, cfg, rng):
    """Measurement sets for steps ``1..duration`` as a list of ``(m, 2)`` arrays.

    Draw order per step: targets in list order, then clutter. Point targets
    are detected with probability pD and emit one N(Hx, R) return; extended
    targets are detected with probability pD and emit Poisson(rate) returns
    spread by their extent matrix. Clutter is Poisson(lambda_c) uniform on the
    region.
    """
    pD = cfg.sensor.p_detect
    R = cfg.sensor.sigma_eps2 * np.eye(2)
    region = np.asarray(cfg.region, dtype=float)
    lo, hi = region[:, 0], region[:, 1]
    scans = []
    for k in range(1, cfg.duration + 1):
        pts = []
        for tgt in truth:
            if not tgt.alive(k):
                continue
            pos = tgt.at(k)[:2]
            if rng.random() >= pD:
                continue
            if tgt.kind == "point":
                pts.append(rng.multivariate_normal(pos, R)[None])
            else:
                n = rng.poisson(tgt.rate)
                if n:
                    pts.append(rng.multivariate_normal(pos, tgt.extent, size=n))
        n_c = rng.poisson(cfg.sensor.clutter_rate)
        if n_c:
            pts.append(lo + (hi - lo) * rng.random((n_c, 2)))
        scans.append(np.vstack(pts) if pts else np.zeros((0, 2)))
    return scans


def run_rng(seed, run):
    """Independent generator for Monte Carlo run ``run`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(run)]))


# -- measurement records -----------------------------------------------------
# One line per scan: "<step> x1 y1 x2 y2 ...". Lines starting with '#' are
# comments. Floats are written with repr so a round trip is exact.


def format_measurements(scans, first_step=1):
    lines = ["# gtphd.measurements/1: step x1 y1 x2 y2 ..."]
    for k, z in enumerate(scans, start=first_step):
        vals = " ".join(repr(float(v)) for v in np.asarray(z).ravel())
        lines.append(f"{k} {vals}".rstrip())
    return "\n".join(lines) + "\n"


def parse_measurements(text):
    """Inverse of :func:`format_measurements`; returns ``(first_step, scans)``.

    Steps must be consecutive.
    """
    steps, scans = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            k = int(parts[0])
            vals = np.array([float(p) for p in parts[1:]])
        except ValueError as exc:
            raise StructureError(f"line {lineno}: {exc}") from exc
        if vals.size % 2:
            raise StructureError(f"line {lineno}: odd number of coordinates")
        if steps and k != steps[-1] + 1:
            raise StructureError(f"line {lineno}: step {k} does not follow {steps[-1]}")
        steps.append(k)
        scans.append(vals.reshape(-1, 2))
    return (steps[0] if steps else 1), scans


def save_measurements(scans, path, first_step=1):
    with open(path, "w") as fh:
        fh.write(format_measurements(scans, first_step))


def load_measurements(path):
    with open(path) as fh:
        return parse_measurements(fh.read())
