"""Command line entry point.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

import argparse
import logging
import sys

from .config import load_config
from .exceptions import ConfigError
from .experiment import RunManifest, format_summary, run_experiment
from .filter import VARIANTS

log = logging.getLogger("gtphd")


def _lscan(text):
    if text.lower() == "config":
        return "config"
    if text.lower() in ("none", "inf", "full"):
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid L-scan value {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("L-scan must be >= 1")
    return value


def build_parser():
    p = argparse.ArgumentParser(prog="gtphd", description="Monte Carlo runs of the trajectory PHD filter.")
    p.add_argument("--config", help="scenario YAML file (defaults to the built-in traffic scenario)")
    p.add_argument("--variant", choices=VARIANTS, default="g-tphd")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--lscan", type=_lscan, default="config", help="L-scan length, 'none' for full trajectories, 'config' (default) for the config value")
    p.add_argument("--out", help="output directory for CSV and summary files")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--emit-diagnostics", action="store_true", help="write per-step update diagnostics")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config)
        if args.runs < 1:
            raise ConfigError("runs", "must be >= 1")
        if args.threads < 1:
            raise ConfigError("threads", "must be >= 1")
        manifest = RunManifest(
            config=cfg,
            variant=args.variant,
            lscan=args.lscan,
            runs=args.runs,
            seed=args.seed,
            out=args.out,
            threads=args.threads,
            emit_diagnostics=args.emit_diagnostics,
            config_path=args.config,
        )
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        _, summary = run_experiment(manifest)
    except Exception as exc:  # surfaced as a runtime failure
        log.debug("run failed", exc_info=True)
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    print(format_summary(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
