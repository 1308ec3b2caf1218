"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both backends are checked for agreement before timing. The first numba call
(compilation or cache load) is excluded.
"""

import argparse
import time

import numpy as np

from gtphd import _kernels
from gtphd.partition import sweep_thresholds


def _spd(rng, n, k, scale=1.0):
    A = rng.normal(size=(n, k, k))
    return scale * (A @ A.transpose(0, 2, 1) / k + 0.1 * np.eye(k))


def cases(rng):
    thr = sweep_thresholds(0.1, 8.0, 0.1)
    pts = rng.uniform(0, 40, size=(30, 2))
    C, J = 400, 20
    sizes = rng.integers(1, 15, size=C)
    ggiw = (
        sizes,
        rng.normal(size=(C, 2)) * 5,
        _spd(rng, C, 2) * sizes[:, None, None],
        rng.normal(size=(J, 2)) * 5,
        _spd(rng, J, 2),
        rng.uniform(2, 20, J),
        rng.uniform(0.5, 3, J),
        rng.uniform(10, 100, J),
        _spd(rng, J, 2, 10.0),
    )
    gauss = (rng.normal(size=(40, 2)), rng.normal(size=(60, 2)), _spd(rng, 60, 2))
    return {
        "linkage_labels (m=30, 80 thresholds)": (_kernels.linkage_labels, (pts, thr)),
        "ggiw_loglik (400 cells x 20 comps)": (_kernels.ggiw_loglik, ggiw),
        "gaussian_loglik (40 meas x 60 comps)": (_kernels.gaussian_loglik, gauss),
    }


def timeit(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable (or GTPHD_DISABLE_NUMBA set); nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    prev = _kernels.backend()
    print(f"{'kernel':40s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    try:
        for name, (fn, fargs) in cases(rng).items():
            _kernels.set_backend("numpy")
            ref = fn(*fargs)
            t_np = timeit(fn, fargs, args.repeat)
            _kernels.set_backend("numba")
            got = fn(*fargs)  # warm-up
            if not np.allclose(ref, got, rtol=1e-10, atol=0):
                raise SystemExit(f"{name}: backends disagree")
            t_nb = timeit(fn, fargs, args.repeat)
            print(f"{name:40s} {1e3 * t_np:11.3f} {1e3 * t_nb:11.3f} {t_np / t_nb:7.1f}x")
    finally:
        _kernels.set_backend(prev)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
