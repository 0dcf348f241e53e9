"""Convergence sweeps over (series, M, n) cells, slope fits and threshold scans."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..cem import discrepancy_opnorm
from ..forward import ConcentricConductivity, err_rel
from .config import ExperimentConfig

PEM_SERIES = "pem"


@dataclass(frozen=True)
class ConvergenceRecord:
    M: int
    n: int
    err: float
    runtime_s: float
    series: str = PEM_SERIES

    def __post_init__(self):
        if not self.err >= 0:
            raise ValueError(f"relative error must be non-negative, got {self.err}")


@dataclass(frozen=True)
class DiscrepancyRecord:
    sweep: str
    M: int
    d: float
    kappa: float
    norm: float
    runtime_s: float


@dataclass
class RunResult:
    experiment: str
    records: list = field(default_factory=list)
    scan_records: list = field(default_factory=list)
    slopes: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    successive_slopes: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def series(self) -> list[str]:
        return sorted({r.series for r in self.records}, key=_series_order(self.records))

    def curve(self, series: str, n: int) -> tuple[np.ndarray, np.ndarray]:
        rows = sorted((r.M, r.err) for r in self.records if r.series == series and r.n == n)
        return np.array([m for m, _ in rows], dtype=float), np.array([e for _, e in rows])


def _series_order(records):
    first = {}
    for i, r in enumerate(records):
        first.setdefault(r.series, i)
    return lambda s: first[s]


# -- fitting -------------------------------------------------------------------

def fit_loglog_slope(x, y, window: tuple[float, float] | None = None) -> float:
    """
    Least-squares slope of ``log y`` against ``log x``.

    Without ``window`` the upper half of the range on the log scale is used,
    i.e. ``x >= sqrt(min(x) * max(x))``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is None:
        keep = x >= math.sqrt(x.min() * x.max()) * (1 - 1e-12)
    else:
        keep = (x >= window[0]) & (x <= window[1])
    keep &= y > 0
    if keep.sum() < 2:
        raise ValueError("need at least two positive points to fit a slope")
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


def successive_slopes(x, y) -> np.ndarray:
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    return np.diff(ly) / np.diff(lx)


def is_concave(x, y) -> bool:
    """Successive log-log slopes strictly decreasing."""
    return bool(np.all(np.diff(successive_slopes(x, y)) < 0))


# -- cells ---------------------------------------------------------------------

def _err_cell(cell):
    geometry, model, n, M, width, z, N = cell
    t0 = time.perf_counter()
    err = err_rel(n, M, geometry, model, width=width, z=z, N=N)
    return err, time.perf_counter() - t0


def _disc_cell(cell):
    M, d, c, z, N = cell
    t0 = time.perf_counter()
    value = discrepancy_opnorm(M, d, c, z, N)
    return value, time.perf_counter() - t0


def _map(func, cells, jobs: int):
    """Evaluate cells, returning results in input order whatever the completion order."""
    if jobs <= 1 or len(cells) <= 1:
        return [func(c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, cells))


def _series_specs(cfg: ExperimentConfig):
    if cfg.model == "pem":
        return [(PEM_SERIES, None)]
    return cfg.widths()


def _sweep(cfg: ExperimentConfig, Ms, jobs: int) -> list[ConvergenceRecord]:
    keys, cells = [], []
    for label, law in _series_specs(cfg):
        for M in Ms:
            width = None if law is None else law(M)
            for n in cfg.modes:
                keys.append((label, M, n))
                cells.append((cfg.geometry, cfg.model, n, M, width, cfg.z, cfg.N))
    results = _map(_err_cell, cells, jobs)
    return [ConvergenceRecord(M, n, err, rt, label)
            for (label, M, n), (err, rt) in zip(keys, results)]


def _threshold_scan(cfg: ExperimentConfig, records, jobs: int):
    """Smallest integer M with every mode below the threshold, refined between grid points."""
    limit = cfg.checks.threshold_err
    thresholds, extra = {}, []
    for label, law in _series_specs(cfg):
        passing = [M for M in cfg.M_values
                   if all(r.err < limit for r in records if r.series == label and r.M == M)]
        if not passing:
            thresholds[label] = None
            continue
        hit = passing[0]
        lower = max([M for M in cfg.M_values if M < hit], default=0)
        found = hit
        for M in range(lower + 1, hit):
            width = None if law is None else law(M)
            cells = [(cfg.geometry, cfg.model, n, M, width, cfg.z, cfg.N) for n in cfg.modes]
            res = _map(_err_cell, cells, jobs)
            extra += [ConvergenceRecord(M, n, e, rt, label) for n, (e, rt) in zip(cfg.modes, res)]
            if all(e < limit for e, _ in res):
                found = M
                break
        thresholds[label] = found
    return thresholds, extra


def run_convergence(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    """Shared driver for fig1, fig3 and custom sweeps."""
    records = _sweep(cfg, cfg.M_values, jobs)
    result = RunResult(cfg.experiment, records)
    window = cfg.checks.slope_window
    for label in result.series():
        for n in cfg.modes:
            x, y = result.curve(label, n)
            try:
                result.slopes[(label, n)] = fit_loglog_slope(x, y, window)
            except ValueError:
                pass  # fewer than two usable points in the window
            if x.size >= 3 and np.all(y > 0):
                result.successive_slopes[(label, n)] = successive_slopes(x, y)
    if cfg.threshold_scan:
        result.thresholds, result.scan_records = _threshold_scan(cfg, records, jobs)
    return result


def run_fig1(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    if not isinstance(cfg.geometry, ConcentricConductivity):
        raise ValueError("fig1 needs a concentric conductivity")
    return run_convergence(cfg, jobs)


def run_fig3(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    return run_convergence(cfg, jobs)


def run_discrepancy(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    c = cfg.geometry
    M0 = cfg.d_sweep_M
    keys, cells = [], []
    contrasts = [c] + ([ConcentricConductivity(1.0, c.R)] if cfg.zero_contrast_row else [])
    for cc in contrasts:
        for d in cfg.d_values:
            keys.append(("d-sweep", M0, d, cc.kappa))
            cells.append((M0, d, cc, cfg.z, cfg.N))
    for label, law in cfg.widths():
        for M in cfg.M_values:
            keys.append((f"M-sweep:{label}", M, law(M), c.kappa))
            cells.append((M, law(M), c, cfg.z, cfg.N))
    results = _map(_disc_cell, cells, jobs)
    records = [DiscrepancyRecord(sweep, M, d, kappa, v, rt)
               for (sweep, M, d, kappa), (v, rt) in zip(keys, results)]
    result = RunResult("discrepancy", records)

    main = [r for r in records if r.sweep == "d-sweep" and r.kappa == c.kappa]
    d = np.array([r.d for r in main])
    v = np.array([r.norm for r in main])
    result.summary["d_slope"] = fit_loglog_slope(d, v, (d.min(), d.max()))
    # envelope constant from the d-sweep, then tested on the M-sweep
    C = float(np.max(v / (M0 * d ** 2)))
    result.summary["envelope_C"] = C
    zero = [r.norm for r in records if r.sweep == "d-sweep" and r.kappa == 1.0]
    if zero:
        result.summary["zero_contrast_max"] = float(max(zero))
    for label, _ in cfg.widths():
        rows = [r for r in records if r.sweep == f"M-sweep:{label}"]
        ratios = [r.norm / (C * r.M * r.d ** 2) for r in rows]
        Ms = np.array([r.M for r in rows], dtype=float)
        scaled = np.array([r.norm / r.d ** 2 for r in rows])
        result.summary[f"M_sweep:{label}"] = {
            "envelope_ratio_max": float(max(ratios)),
            "M_growth_slope": fit_loglog_slope(Ms, scaled, (Ms.min(), Ms.max())),
        }
    return result


RUNNERS = {
    "fig1": run_fig1,
    "fig3": run_fig3,
    "custom": run_convergence,
    "discrepancy": run_discrepancy,
}
