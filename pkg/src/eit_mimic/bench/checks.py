"""Numerical acceptance gates for ``--check`` runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .experiments import RunResult


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def evaluate_checks(result: RunResult, cfg: ExperimentConfig) -> list[CheckResult]:
    chk = cfg.checks
    out = []
    for label, target in chk.slope_targets.items():
        for n in cfg.modes:
            slope = result.slopes.get((label, n))
            ok = slope is not None and abs(slope - target) <= chk.slope_tol
            shown = "n/a" if slope is None else f"{slope:.3f}"
            out.append(CheckResult(f"slope {label} n={n}", ok,
                                   f"{shown} vs {target} +/- {chk.slope_tol}"))
    for label, target in chk.threshold_electrodes.items():
        M = result.thresholds.get(label)
        count = None if M is None else 2 * M + 1
        ok = count is not None and abs(count - target) <= chk.threshold_rtol * target
        out.append(CheckResult(f"threshold {label}", ok,
                               f"{count} electrodes vs {target} +/- {chk.threshold_rtol:.0%}"))
    if chk.max_err_at_top is not None:
        top = max(cfg.M_values)
        worst = max(r.err for r in result.records if r.M == top)
        out.append(CheckResult(f"err at M={top}", worst < chk.max_err_at_top,
                               f"max {worst:.3e} vs {chk.max_err_at_top:.1e}"))
    if chk.concave:
        for (label, n), slopes in result.successive_slopes.items():
            ok = bool(np.all(np.diff(slopes) < 0))
            out.append(CheckResult(f"concave {label} n={n}", ok,
                                   "slopes " + ", ".join(f"{s:.2f}" for s in slopes)))
    if chk.d_slope_target is not None and "d_slope" in result.summary:
        slope = result.summary["d_slope"]
        out.append(CheckResult("discrepancy d-slope", abs(slope - chk.d_slope_target) <= chk.d_slope_tol,
                               f"{slope:.3f} vs {chk.d_slope_target} +/- {chk.d_slope_tol}"))
    if "zero_contrast_max" in result.summary:
        v = result.summary["zero_contrast_max"]
        out.append(CheckResult("discrepancy at kappa=1", v < chk.zero_row_tol,
                               f"{v:.2e} vs {chk.zero_row_tol:.0e}"))
    return out
