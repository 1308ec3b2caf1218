"""Candidate measurement partitions from a DBSCAN distance sweep.

A cell is a sorted tuple of measurement indices and a partition is a tuple of
cells ordered by their smallest index. Both are plain hashable tuples.
"""

import numpy as np

from . import _kernels


def sweep_thresholds(gamma_min, gamma_max, step):
    """Distance thresholds ``gamma_min, gamma_min+step, ..., gamma_max`` (both ends included)."""
    if step <= 0:
        raise ValueError("step must be positive")
    if gamma_max < gamma_min:
        raise ValueError("gamma_max must be >= gamma_min")
    n = int(np.floor((gamma_max - gamma_min) / step + 1e-9)) + 1
    return gamma_min + step * np.arange(n)


def labels_to_partition(labels):
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(i)
    return tuple(sorted(tuple(g) for g in groups.values()))


def dbscan_sweep(z, gamma_min=0.1, gamma_max=8.0, step=0.1):
    """Unique partitions produced by DBSCAN (``min_samples=1``) over a threshold sweep.

    With one point per core region, DBSCAN reduces to single-linkage connected
    components of the graph joining measurements at distance ``<= eps``.
    Partitions are returned in order of the first threshold producing them.
    """
    z = np.asarray(z, dtype=float)
    if z.size == 0:
        return [()]
    z = z.reshape(len(z), -1)
    labels = _kernels.linkage_labels(z, sweep_thresholds(gamma_min, gamma_max, step))
    seen = {}
    for row in labels:
        key = row.tobytes()
        if key not in seen:
            seen[key] = labels_to_partition(row)
    return list(seen.values())


def unique_cells(proposals):
    """Every distinct cell across the proposals, in order of first appearance."""
    return list(dict.fromkeys(cell for partition in proposals for cell in partition))


def singleton_partition(n):
    return tuple((i,) for i in range(n))


def is_partition(partition, n):
    flat = [i for cell in partition for i in cell]
    return all(len(cell) > 0 for cell in partition) and sorted(flat) == list(range(n))


def exhaustive_partitions(n):
    """All set partitions of ``range(n)`` in canonical tuple form (``n <= 10``)."""
    from .oracles import enumerate_partitions

    return [tuple(sorted(tuple(sorted(c)) for c in p)) for p in enumerate_partitions(n)]
