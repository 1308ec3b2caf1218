"""Monte Carlo orchestration and result files.

Output directory layout (all CSVs start with a ``# schema`` comment line):

``estimates.csv``   run, step, track_id, birth, class, weight, x, y, vx, vy, X11, X12, X22, rate
``trajectories.csv`` full estimated trajectories at the last step:
                    run, track_id, birth, class, step, x, y, vx, vy
``cardinality.csv`` run, step, n_true, n_hat, mass
``metric_time.csv`` run, step, total, loc, miss, false, switch
``metrics.csv``     run, total, loc, miss, false, switch (time averages of the above)
``summary.json``    per-step RMS over runs, their time averages and wall clock
``diagnostics/``    per-run JSON lines of update diagnostics (optional)

At step ``k`` the metric compares the true trajectories up to ``k`` with the
trajectories estimated at ``k`` over the window ``1..k``; with
``metric.normalize`` the cost is divided by ``k``. The summary's time
averages of the per-step RMS values form the Table-IV style row.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import dataclass, field
from multiprocessing import get_context

import numpy as np

from .filter import VARIANTS, build_setup, run_filter
from .metrics import MetricConfig, MetricResult, Track, rms_over_runs, trajectory_metric
from .simulate import generate_measurements, generate_truth, run_rng

CSV_VERSION = "1"
ESTIMATE_FIELDS = ["run", "step", "track_id", "birth", "class", "weight", "x", "y", "vx", "vy", "X11", "X12", "X22", "rate"]
TRAJECTORY_FIELDS = ["run", "track_id", "birth", "class", "step", "x", "y", "vx", "vy"]
CARDINALITY_FIELDS = ["run", "step", "n_true", "n_hat", "mass"]
METRIC_TIME_FIELDS = ["run", "step", "total", "loc", "miss", "false", "switch"]
METRIC_FIELDS = ["run", "total", "loc", "miss", "false", "switch"]


@dataclass
class RunManifest:
    config: object  # ScenarioConfig
    variant: str = "g-tphd"
    lscan: object = "config"
    runs: int = 1
    seed: int | None = None
    out: str | None = None
    threads: int = 1
    emit_diagnostics: bool = False
    config_path: str | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.seed is None:
            self.seed = self.config.seed


@dataclass
class RunResult:
    run: int
    estimate_rows: list
    trajectory_rows: list
    cardinality_rows: list
    metric_time: list  # MetricResult per step
    masses: list  # (prior, predicted, birth, posterior) per step
    diagnostics: list = field(default_factory=list)
    seconds: float = 0.0


def truth_tracks(truth, k):
    """True position tracks truncated at step ``k``."""
    out = []
    for t in truth:
        if t.birth > k:
            continue
        last = min(t.death, k)
        out.append(Track(t.birth, t.states[: last - t.birth + 1, :2]))
    return out


def estimate_tracks(estimates):
    return [Track(e.birth_time, e.states[:, :2]) for e in estimates]


def evaluate_run(truth, steps, mcfg, normalize=True):
    """Per-step metric of one filter run."""
    return [
        trajectory_metric(
            truth_tracks(truth, rec.step),
            estimate_tracks(rec.estimates),
            mcfg,
            window=(1, rec.step),
            normalize=normalize,
        )
        for rec in steps
    ]


def _fmt(x):
    return "" if x is None else repr(float(x))


def simulate_and_filter(cfg, variant, lscan, seed, run, keep_diagnostics=False):
    """Run one Monte Carlo trial; returns a :class:`RunResult`."""
    t0 = time.perf_counter()
    rng = run_rng(seed, run)
    truth = generate_truth(cfg, rng)
    scans = generate_measurements(truth, cfg, rng)
    setup = build_setup(cfg, variant, lscan)
    fr = run_filter(scans, setup, keep_diagnostics=keep_diagnostics)
    m = cfg.metric
    mcfg = MetricConfig(p=m.p, c=m.c, switch=m.switch)
    metric_time = evaluate_run(truth, fr.steps, mcfg, m.normalize)
    est_rows, card_rows = [], []
    for rec in fr.steps:
        for i, e in enumerate(rec.estimates):
            x = e.states[-1]
            X = e.extent if e.extent is not None else None
            est_rows.append(
                [run, rec.step, i, e.birth_time, e.kind, _fmt(e.weight), *map(_fmt, x[:4]),
                 _fmt(X[0, 0] if X is not None else None),
                 _fmt(X[0, 1] if X is not None else None),
                 _fmt(X[1, 1] if X is not None else None),
                 _fmt(e.rate)]
            )
        n_true = sum(t.alive(rec.step) for t in truth)
        card_rows.append([run, rec.step, n_true, len(rec.estimates), _fmt(rec.posterior_mass)])
    traj_rows = []
    if fr.steps:
        for i, e in enumerate(fr.steps[-1].estimates):
            for j, x in enumerate(e.states):
                traj_rows.append([run, i, e.birth_time, e.kind, e.birth_time + j, *map(_fmt, x[:4])])
    diags = [rec.diagnostics.to_json() for rec in fr.steps] if keep_diagnostics else []
    return RunResult(
        run=run,
        estimate_rows=est_rows,
        trajectory_rows=traj_rows,
        cardinality_rows=card_rows,
        metric_time=metric_time,
        masses=[(r.prior_mass, r.predicted_mass, r.birth_mass, r.posterior_mass) for r in fr.steps],
        diagnostics=diags,
        seconds=time.perf_counter() - t0,
    )


def _worker(args):
    return simulate_and_filter(*args)


def _write_csv(path, name, header, rows):
    buf = io.StringIO()
    buf.write(f"# schema: gtphd.{name}/{CSV_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def run_experiment(manifest):
    """Run all trials of ``manifest`` and write result files if ``manifest.out`` is set.

    Returns ``(results, summary)``. Files are written by the coordinator after
    all runs finish, in run order, so outputs do not depend on ``threads``.
    """
    cfg = manifest.config
    t0 = time.perf_counter()
    jobs = [(cfg, manifest.variant, manifest.lscan, manifest.seed, r, manifest.emit_diagnostics) for r in range(manifest.runs)]
    if manifest.threads > 1 and manifest.runs > 1:
        with get_context("spawn").Pool(manifest.threads) as pool:
            results = pool.map(_worker, jobs)
    else:
        results = [_worker(j) for j in jobs]
    wall = time.perf_counter() - t0
    summary = summarize(results, manifest, wall)
    if manifest.out:
        write_outputs(results, summary, manifest)
    return results, summary


def summarize(results, manifest, wall):
    n_steps = len(results[0].metric_time)
    per_step = [rms_over_runs(r.metric_time[k] for r in results) for k in range(n_steps)]
    arr = np.array([p.as_tuple() for p in per_step]) if per_step else np.zeros((0, 5))
    mean = arr.mean(axis=0) if len(arr) else np.zeros(5)
    card = np.array([[row[3] for row in r.cardinality_rows] for r in results], dtype=float)
    return {
        "schema": "gtphd.summary/1",
        "variant": manifest.variant,
        "lscan": manifest.lscan if manifest.lscan != "config" else manifest.config.filter.lscan,
        "runs": manifest.runs,
        "seed": manifest.seed,
        "rms_mean": dict(zip(["total", "loc", "miss", "false", "switch"], map(float, mean))),
        "rms_time": [dict(zip(["step", "total", "loc", "miss", "false", "switch"], [k + 1, *map(float, row)])) for k, row in enumerate(arr)],
        "mean_cardinality": card.mean(axis=0).tolist() if card.size else [],
        "wall_clock_s": wall,
        "run_seconds": [r.seconds for r in results],
    }


def write_outputs(results, summary, manifest):
    out = manifest.out
    try:
        os.makedirs(out, exist_ok=True)
        _write_csv(os.path.join(out, "estimates.csv"), "estimates", ESTIMATE_FIELDS, [row for r in results for row in r.estimate_rows])
        _write_csv(os.path.join(out, "trajectories.csv"), "trajectories", TRAJECTORY_FIELDS, [row for r in results for row in r.trajectory_rows])
        _write_csv(os.path.join(out, "cardinality.csv"), "cardinality", CARDINALITY_FIELDS, [row for r in results for row in r.cardinality_rows])
        _write_csv(
            os.path.join(out, "metric_time.csv"),
            "metric_time",
            METRIC_TIME_FIELDS,
            [[r.run, k + 1, *map(_fmt, m.as_tuple())] for r in results for k, m in enumerate(r.metric_time)],
        )
        rows = []
        for r in results:
            arr = np.array([m.as_tuple() for m in r.metric_time])
            rows.append([r.run, *map(_fmt, arr.mean(axis=0))])
        _write_csv(os.path.join(out, "metrics.csv"), "metrics", METRIC_FIELDS, rows)
        with open(os.path.join(out, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
        if manifest.emit_diagnostics:
            ddir = os.path.join(out, "diagnostics")
            os.makedirs(ddir, exist_ok=True)
            for r in results:
                with open(os.path.join(ddir, f"run{r.run:04d}.jsonl"), "w") as fh:
                    fh.write("\n".join(r.diagnostics) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {out}: {exc}") from exc


def format_summary(summary):
    m = summary["rms_mean"]
    return (
        f"{summary['variant']:>7}  runs={summary['runs']}  "
        f"total={m['total']:.2f} loc={m['loc']:.2f} miss={m['miss']:.2f} "
        f"false={m['false']:.2f} switch={m['switch']:.3f}  ({summary['wall_clock_s']:.1f} s)"
    )
