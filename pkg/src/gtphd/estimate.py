"""Trajectory estimates extracted from a posterior mixture."""

from dataclasses import dataclass

import numpy as np

from .models import GgiwComponent, total_mass


@dataclass
class TrajectoryEstimate:
    birth_time: int
    states: np.ndarray  # (i, n_x)
    kind: str  # "point" or "extended"
    weight: float
    extent: np.ndarray | None = None
    rate: float | None = None

    @property
    def end_time(self):
        return self.birth_time + len(self.states) - 1


def extract(mix, rule="round", threshold=0.5):
    """Estimated trajectories, heaviest components first.

    ``rule="round"`` keeps the ``round(total mass)`` heaviest components;
    ``rule="threshold"`` keeps every component with weight above ``threshold``.
    Ties in weight are broken by position in the mixture, point list first.
    """
    comps = mix.components()
    if not comps:
        return []
    weights = np.array([c.weight for c in comps])
    order = np.argsort(-weights, kind="stable")
    if rule == "round":
        n_hat = int(np.floor(total_mass(mix) + 0.5))
        chosen = order[:n_hat]
    elif rule == "threshold":
        chosen = [i for i in order if weights[i] > threshold]
    else:
        raise ValueError(f"unknown extraction rule {rule!r}")
    out = []
    for i in chosen:
        c = comps[i]
        ext = isinstance(c, GgiwComponent)
        out.append(
            TrajectoryEstimate(
                birth_time=c.birth_time,
                states=c.states(mix.n_x),
                kind="extended" if ext else "point",
                weight=c.weight,
                extent=c.extent_mean() if ext else None,
                rate=c.rate_mean() if ext else None,
            )
        )
    return out


def extent_width(X):
    """Full axis widths ``2*sqrt(eigenvalue)`` of an extent matrix, largest first."""
    vals = np.linalg.eigvalsh(np.asarray(X, dtype=float))
    return tuple(sorted((2.0 * np.sqrt(vals)).tolist(), reverse=True))
