"""``eit-mimic`` command line entry point."""

from __future__ import annotations

import argparse
import logging
import sys

from .checks import evaluate_checks
from .config import EXPERIMENTS, ConfigError, load_config, with_overrides
from .experiments import RUNNERS
from .outputs import emit_outputs

EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 2, 3

log = logging.getLogger("eit_mimic")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eit-mimic",
        description="Convergence experiments for electrode-based approximations of relative EIT data.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, help="TOML experiment file (see docs/config.md)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the sweep cells")
    p.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    p.add_argument("--no-timing", action="store_true",
                   help="leave the runtime column empty so outputs are byte-reproducible")
    p.add_argument("--check", action="store_true",
                   help="evaluate the [check] gates; exit 3 if any fails")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = with_overrides(load_config(args.config, args.experiment), args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    log.info("running %s with %d job(s)", cfg.experiment, args.jobs)
    result = RUNNERS[cfg.experiment](cfg, args.jobs)
    checks = evaluate_checks(result, cfg) if args.check else None
    paths = emit_outputs(result, cfg.out_dir, cfg.stem, timing=not args.no_timing, checks=checks)
    for path in paths:
        print(f"wrote {path}")
    if checks is None:
        return EXIT_OK
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
