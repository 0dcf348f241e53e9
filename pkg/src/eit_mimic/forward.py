"""
Relative measurements on the unit disk with a concentric inclusion.

For the conductivity equal to ``kappa`` inside ``|x| < R`` and 1 elsewhere, the
relative Neumann-to-Dirichlet map is diagonal in the Fourier basis. This
module provides that map, point-electrode (PEM) measurements at arbitrary
boundary angles, and the electrode pipeline that mimics the continuum map
from ``2M+1`` equiangular point electrodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .interp import (
    check_zero_sum,
    demean,
    interpolate_QM,
    lift_hatQM,
    nodes,
    point_eval_FM,
    recenter_GM,
)
from .spectral import TrigCoeffs, evaluate, project_mean_free, sobolev_norm

__all__ = [
    "ConcentricConductivity",
    "relative_eigenvalue",
    "apply_relative_ND",
    "pem_measure",
    "current_pattern",
    "mimic_pipeline",
    "mimic_pipeline_operator",
    "relative_l2_error",
    "err_rel",
]

TAIL_RTOL = 1e-16
MAX_TRUNCATION = 200_000


def _require_mean_free(f: TrigCoeffs, rtol: float = 1e-12) -> None:
    scale = max(float(np.max(np.abs(f.coeffs))), np.finfo(float).tiny)
    if abs(f[0]) > rtol * scale:
        raise ValueError(f"input current density is not mean-free (g_hat(0) = {f[0]:.3e})")


@dataclass(frozen=True)
class ConcentricConductivity:
    """Conductivity ``kappa`` in the disk of radius ``R``, unit background."""

    kappa: float
    R: float

    def __post_init__(self):
        if not np.real(self.kappa) > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not 0 < self.R < 1:
            raise ValueError(f"inclusion radius must lie in (0, 1), got {self.R}")

    @property
    def mu(self) -> float:
        return (1 - self.kappa) / (1 + self.kappa)

    def eigenvalues(self, n) -> np.ndarray:
        """``lambda_n`` for an integer array, with ``lambda_0 := 0``."""
        n = np.abs(np.asarray(n))
        x = self.mu * self.R ** (2.0 * n)
        safe = np.where(n == 0, 1, n)
        return np.where(n == 0, 0.0, 2.0 / safe * x / (1 - x))

    def truncation(self, current_l1: float, current_l2: float, tol: float = TAIL_RTOL) -> int:
        """Smallest ``N`` with ``|lambda_N| * sum|I| / (2 pi) < tol * |I|``."""
        if current_l2 == 0 or self.mu == 0:
            return 1
        N = 1
        while abs(relative_eigenvalue(N, self)) * current_l1 / (2 * np.pi) >= tol * current_l2:
            N += 1
            if N > MAX_TRUNCATION:
                raise ValueError("no admissible truncation order; inclusion too close to the boundary")
        return N

    def relative_nd(self, f: TrigCoeffs) -> TrigCoeffs:
        return apply_relative_ND(f, self)

    def pem_potential(self, I, source_angles, eval_angles, N: int | None = None,
                      tol: float = TAIL_RTOL) -> np.ndarray:
        """
        Relative potential of ``sum_m I_m delta_{source_m}`` at ``eval_angles``,
        without grounding. ``I`` may carry several patterns as columns.
        """
        I = np.asarray(I, dtype=complex)
        l1 = float(np.sum(np.abs(I)))
        l2 = float(np.linalg.norm(I))
        if N is None:
            N = self.truncation(l1, l2, tol)
        else:
            tail = abs(relative_eigenvalue(N, self)) * l1 / (2 * np.pi) if self.mu != 0 else 0.0
            if tail >= tol * l2 and l2 > 0:
                raise ValueError(f"truncation N={N} too small: tail estimate {tail:.2e} exceeds tolerance")
        k = np.arange(1, N + 1)
        lam = self.eigenvalues(k)
        diff = np.subtract.outer(np.asarray(eval_angles, dtype=float),
                                 np.asarray(source_angles, dtype=float))
        # lambda_{-k} = lambda_k, so the kernel is a cosine series
        kernel = np.cos(np.multiply.outer(diff, k)) @ lam / np.pi
        return kernel @ I


def relative_eigenvalue(n: int, c: ConcentricConductivity) -> float:
    if n == 0:
        raise ValueError("the relative map has no eigenvalue for the constant mode")
    x = c.mu * c.R ** (2 * abs(n))
    return 2.0 / abs(n) * x / (1 - x)


def apply_relative_ND(f: TrigCoeffs, c: ConcentricConductivity) -> TrigCoeffs:
    _require_mean_free(f)
    return TrigCoeffs(c.eigenvalues(f.indices) * f.coeffs, mean_free=True)


def pem_measure(I, c, N: int | None = None, tol: float = TAIL_RTOL) -> np.ndarray:
    """
    Grounded PEM voltages for equiangular point electrodes.

    ``c`` is any conductivity exposing ``pem_potential`` (concentric or an
    off-center inclusion).
    """
    I = check_zero_sum(I, "current")
    L = I.shape[0]
    if L % 2 != 1:
        raise ValueError("the number of electrodes must be odd")
    theta = nodes(L // 2)
    return demean(c.pem_potential(I, theta, theta, N, tol))


def current_pattern(f: TrigCoeffs, M: int) -> np.ndarray:
    """Electrode currents that mimic the current density ``f`` (node samples, demeaned, weighted)."""
    samples = np.asarray(evaluate(f, nodes(M)))
    return 2 * np.pi / (2 * M + 1) * (samples - samples.mean())


def mimic_pipeline(f: TrigCoeffs, M: int, c, N: int | None = None) -> TrigCoeffs:
    """Electrode route: current pattern, PEM measurement, interpolation of the voltages."""
    _require_mean_free(f)
    U = pem_measure(current_pattern(f, M), c, N)
    return lift_hatQM(U)


def mimic_pipeline_operator(f: TrigCoeffs, M: int, c: ConcentricConductivity,
                            N: int | None = None) -> TrigCoeffs:
    """Operator route: mean-free part of ``Q_M Upsilon F_M G_M f`` in coefficient space."""
    _require_mean_free(f)
    recentered = recenter_GM(f, M)
    if N is None:
        weights = np.asarray(evaluate(recentered, nodes(M))) * 2 * np.pi / (2 * M + 1)
        N = c.truncation(float(np.sum(np.abs(weights))), float(np.linalg.norm(weights)))
    N = max(N, M)
    deltas = project_mean_free(point_eval_FM(recentered, M, N))
    potential = apply_relative_ND(deltas, c)
    return project_mean_free(interpolate_QM(evaluate(potential, nodes(M))))


def relative_l2_error(exact: TrigCoeffs, approx: TrigCoeffs) -> float:
    denom = sobolev_norm(exact, 0.0)
    if denom == 0:
        raise ValueError("relative error undefined: exact output vanishes")
    return sobolev_norm(exact - approx, 0.0) / denom


def err_rel(n: int, M: int, geometry, model: str = "pem", *, width: float | None = None,
            z=1.0, N: int | None = None) -> float:
    """
    Relative L2 discrepancy between the continuum output for ``exp(i n theta)``
    and its electrode-based approximation.

    ``geometry`` is a :class:`ConcentricConductivity` or a
    :class:`~eit_mimic.conformal.DiskInclusion`; ``model`` is ``"pem"`` or
    ``"cem"`` (the latter needs ``width`` and a concentric geometry).
    """
    if n == 0:
        raise ValueError("mode n must be nonzero")
    f = TrigCoeffs.monomial(n)
    exact = geometry.relative_nd(f)
    if model == "pem":
        approx = mimic_pipeline(f, M, geometry, N)
    elif model == "cem":
        from .cem import hat_upsilon_M

        if width is None:
            raise ValueError("the CEM model needs an electrode width")
        approx = hat_upsilon_M(f, M, width, geometry, z=z, N=N)
    else:
        raise ValueError(f"unknown model {model!r}")
    return relative_l2_error(exact, approx)
