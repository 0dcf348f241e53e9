"""
Complete electrode model on the unit disk by a boundary-spectral Galerkin method.

The potential is expanded as ``u = sum_{|n|<=N} b_n w_n`` where ``w_n`` is the
exact transmission solution for the concentric conductivity with boundary
trace ``exp(i n theta)``. The stiffness block is then the diagonal
``2 pi d_n`` with the DtN coefficients ``d_n``, and the electrodes enter only
through closed-form moments of ``exp(i p theta)`` over each arc. The
electrode potentials are grounded (``sum U = 0``) with a Lagrange multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conformal import MobiusMap, mimic_general
from .forward import ConcentricConductivity, pem_measure
from .interp import check_zero_sum, demean, nodes
from .spectral import TrigCoeffs

__all__ = [
    "CemLayout",
    "CemSolution",
    "dtn_coefficient",
    "electrode_integral",
    "default_truncation",
    "solve_cem",
    "upsilon_CEM",
    "hat_upsilon_M",
    "discrepancy_opnorm",
    "mean_free_basis",
]


@dataclass(frozen=True, eq=False)
class CemLayout:
    """
    Electrodes ``E_m = (theta_m - d/2, theta_m + d/2)`` with contact impedances ``z_m``.

    Parameters
    ----------
    midpoints : array_like
        Midpoint angles in radians, in electrode order.
    width : float
        Common arclength ``d`` of every electrode.
    z : complex or array_like
        Contact impedances, ``Re z_m > 0``.
    """

    midpoints: np.ndarray
    width: float
    z: np.ndarray = 1.0

    def __post_init__(self):
        mid = np.asarray(self.midpoints, dtype=float).ravel()
        z = np.broadcast_to(np.asarray(self.z, dtype=complex), mid.shape).copy()
        if not self.width > 0:
            raise ValueError(f"electrode width must be positive, got {self.width}")
        if np.any(z.real <= 0):
            raise ValueError("contact impedances need positive real parts")
        if mid.size > 1:
            ordered = np.sort(np.mod(mid, 2 * np.pi))
            gaps = np.diff(np.append(ordered, ordered[0] + 2 * np.pi))
            if self.width >= gaps.min():
                raise ValueError(f"electrodes of width {self.width:.4g} overlap "
                                 f"(smallest midpoint gap {gaps.min():.4g})")
        mid.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "midpoints", mid)
        object.__setattr__(self, "z", z)

    @classmethod
    def equiangular(cls, M: int, width: float, z=1.0) -> "CemLayout":
        return cls(nodes(M), width, z)

    @property
    def n_electrodes(self) -> int:
        return self.midpoints.size


@dataclass(frozen=True, eq=False)
class CemSolution:
    """Boundary trace coefficients ``b`` (columns per current pattern) and grounded voltages ``U``."""

    b: np.ndarray
    U: np.ndarray
    N: int
    residual: float

    @property
    def trace(self) -> TrigCoeffs:
        if self.b.ndim != 1:
            raise ValueError("trace is only defined for a single current pattern")
        return TrigCoeffs(self.b)


def dtn_coefficient(n, c: ConcentricConductivity):
    """``|n| (1 - mu R^{2|n|}) / (1 + mu R^{2|n|})``; scalar or array ``n``."""
    n = np.abs(np.asarray(n))
    x = c.mu * c.R ** (2.0 * n)
    out = n * (1 - x) / (1 + x)
    return float(out) if out.ndim == 0 else out


def electrode_integral(n, center, width):
    """``int_{center-width/2}^{center+width/2} exp(i n theta) d theta`` (broadcasts)."""
    n = np.asarray(n, dtype=float)
    # width * sinc(n width / 2pi) == 2 sin(n width / 2) / n, and width at n = 0
    return np.exp(1j * n * center) * width * np.sinc(n * width / (2 * np.pi))


def default_truncation(M: int) -> int:
    return max(8 * M, 256)


def _assemble(layout: CemLayout, c: ConcentricConductivity, N: int) -> np.ndarray:
    L = layout.n_electrodes
    d = layout.width
    inv_z = 1.0 / layout.z
    modes = np.arange(-N, N + 1)
    lags = np.arange(-2 * N, 2 * N + 1)
    # moments[p, m] = int_{E_m} exp(i p theta)
    moments = electrode_integral(lags[:, None], layout.midpoints[None, :], d)
    toeplitz = moments @ inv_z
    K = 2 * N + 1
    size = K + L + 1
    A = np.zeros((size, size), dtype=complex)
    # A[k, n] = sum_m z_m^-1 int_{E_m} exp(i (n - k) theta), plus the stiffness diagonal
    A[:K, :K] = toeplitz[(modes[None, :] - modes[:, None]) + 2 * N]
    A[np.arange(K), np.arange(K)] += 2 * np.pi * dtn_coefficient(modes, c)
    mode_moments = moments[modes + 2 * N]  # int_{E_m} exp(i n theta), shape (K, L)
    A[:K, K:K + L] = -np.conj(mode_moments) * inv_z[None, :]
    A[K:K + L, :K] = -(mode_moments * inv_z[None, :]).T
    A[K + np.arange(L), K + np.arange(L)] = d * inv_z
    A[K:K + L, -1] = 1.0
    A[-1, K:K + L] = 1.0
    return A


def solve_cem(I, layout: CemLayout, c: ConcentricConductivity, N: int | None = None) -> CemSolution:
    """
    Solve the CEM forward problem for current pattern(s) ``I``.

    ``I`` has one row per electrode; several patterns may be stacked as columns
    and share one factorization.
    """
    I = check_zero_sum(I, "current")
    L = layout.n_electrodes
    if I.shape[0] != L:
        raise ValueError(f"{I.shape[0]} currents for {L} electrodes")
    M = L // 2
    N = default_truncation(M) if N is None else N
    if N < 4 * M:
        raise ValueError(f"Galerkin truncation N={N} below the minimum 4M={4 * M}")
    A = _assemble(layout, c, N)
    K = 2 * N + 1
    rhs = np.zeros((A.shape[0],) + I.shape[1:], dtype=complex)
    rhs[K:K + L] = I
    try:
        x = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - Re z > 0 makes A nonsingular
        raise RuntimeError("singular CEM Galerkin system") from exc
    residual = float(np.linalg.norm(A @ x - rhs) / max(np.linalg.norm(rhs), np.finfo(float).tiny))
    U = x[K:K + L]
    # the grounding row holds sum U = 0 to rounding; remove the residue exactly
    U = U - U.mean(axis=0)
    return CemSolution(b=x[:K], U=U, N=N, residual=residual)


def upsilon_CEM(I, layout: CemLayout, c: ConcentricConductivity, N: int | None = None) -> np.ndarray:
    """Relative CEM data ``R(sigma) I - R(1) I``."""
    background = ConcentricConductivity(1.0, c.R)
    # both terms are grounded, but their difference is much smaller than either
    return demean(solve_cem(I, layout, c, N).U - solve_cem(I, layout, background, N).U)


def hat_upsilon_M(f: TrigCoeffs, M: int, width: float, c: ConcentricConductivity, z=1.0,
                  phi: MobiusMap | None = None, N: int | None = None) -> TrigCoeffs:
    """CEM-based approximation of the continuum relative map, electrodes of common ``width``."""
    phi = MobiusMap() if phi is None else phi

    def measure(I, angles):
        return upsilon_CEM(I, CemLayout(angles, width, z), c, N)

    return mimic_general(f, M, phi, measure)


def mean_free_basis(M: int) -> np.ndarray:
    """Orthonormal discrete-Fourier basis of the zero-sum vectors, as columns."""
    k = np.concatenate([np.arange(-M, 0), np.arange(1, M + 1)])
    return np.exp(1j * np.outer(nodes(M), k)) / np.sqrt(2 * M + 1)


def discrepancy_opnorm(M: int, d: float, c: ConcentricConductivity, z=1.0,
                       N: int | None = None) -> float:
    """Spectral norm of ``Upsilon_CEM - Upsilon_PEM`` on the zero-sum subspace."""
    B = mean_free_basis(M)
    layout = CemLayout.equiangular(M, d, z)
    diff = upsilon_CEM(B, layout, c, N) - pem_measure(B, c)
    return float(np.linalg.norm(diff, 2))
