"""
Moebius automorphisms of the unit disk and the conformally mapped pipeline.

An off-center disk inclusion is sent to a concentric one by a disk
automorphism ``Xi``; relative continuum and point-electrode data for the
inclusion are then simulated with the diagonal concentric map. Boundary
current densities pick up the factor ``|Theta'|`` (``Theta = Xi^{-1}``),
point currents are only moved.

The same map family doubles as the conformal parametrization ``Phi`` of a
(disk-shaped) domain with non-equiangular electrodes ``y_m = Psi(x_m)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .forward import ConcentricConductivity, TAIL_RTOL, _require_mean_free
from .interp import check_zero_sum, demean, lift_hatQM, nodes
from .spectral import TrigCoeffs, coeffs_from_samples, evaluate

__all__ = [
    "MobiusMap",
    "DiskInclusion",
    "mobius_for_inclusion",
    "resample_on_circle",
    "push_current",
    "pull_potential",
    "pem_measure_general",
    "mimic_general",
    "upsilon_M_general",
]


@dataclass(frozen=True)
class MobiusMap:
    """``Xi(w) = rot * (w - a) / (1 - conj(a) w)`` with ``|a| < 1``, ``|rot| = 1``."""

    a: complex = 0j
    rot: complex = 1 + 0j

    def __post_init__(self):
        if not abs(self.a) < 1:
            raise ValueError(f"|a| must be < 1, got {abs(self.a)}")
        if abs(abs(self.rot) - 1) > 1e-12:
            raise ValueError("rotation factor must have unit modulus")

    @classmethod
    def rotation(cls, alpha: float) -> "MobiusMap":
        return cls(0j, np.exp(1j * alpha))

    @property
    def is_identity(self) -> bool:
        return self.a == 0 and self.rot == 1

    def then_rotate(self, alpha: float) -> "MobiusMap":
        """The map ``exp(i alpha) * Xi``."""
        return MobiusMap(self.a, self.rot * np.exp(1j * alpha))

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        return self.rot * (w - self.a) / (1 - np.conj(self.a) * w)

    def inverse(self, zeta):
        t = np.asarray(zeta, dtype=complex) / self.rot
        return (t + self.a) / (1 + np.conj(self.a) * t)

    def derivative(self, w):
        w = np.asarray(w, dtype=complex)
        return self.rot * (1 - abs(self.a) ** 2) / (1 - np.conj(self.a) * w) ** 2

    def inverse_derivative(self, zeta):
        t = np.asarray(zeta, dtype=complex) / self.rot
        return (1 - abs(self.a) ** 2) / (self.rot * (1 + np.conj(self.a) * t) ** 2)

    def boundary_angle(self, theta):
        """``arg Xi(exp(i theta))``."""
        return np.angle(self(np.exp(1j * np.asarray(theta, dtype=float))))

    def inverse_boundary_angle(self, phi):
        return np.angle(self.inverse(np.exp(1j * np.asarray(phi, dtype=float))))


@dataclass(frozen=True)
class DiskInclusion:
    """
    Conductivity ``kappa`` in the disk ``|x - center| < radius``, unit elsewhere.

    ``gauge`` rotates the concentric image; observables do not depend on it.
    """

    center: complex
    radius: float
    kappa: float
    gauge: float = 0.0
    concentrizing_map: tuple[MobiusMap, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("inclusion radius must be positive")
        if not abs(self.center) + self.radius < 1:
            raise ValueError("inclusion must lie strictly inside the unit disk")
        if not np.real(self.kappa) > 0:
            raise ValueError("kappa must be positive")
        xi, R = mobius_for_inclusion(self)
        if self.gauge:
            xi = xi.then_rotate(self.gauge)
        object.__setattr__(self, "concentrizing_map", (xi, R))

    @property
    def mobius(self) -> MobiusMap:
        return self.concentrizing_map[0]

    @property
    def concentric(self) -> ConcentricConductivity:
        return ConcentricConductivity(self.kappa, self.concentrizing_map[1])

    def relative_nd(self, f: TrigCoeffs) -> TrigCoeffs:
        """Continuum relative ND map, simulated through the concentric image."""
        _require_mean_free(f)
        pushed = push_current(f, self.mobius)
        potential = self.concentric.relative_nd(pushed)
        return pull_potential(potential, self.mobius)

    def pem_potential(self, I, source_angles, eval_angles, N: int | None = None,
                      tol: float = TAIL_RTOL) -> np.ndarray:
        xi = self.mobius
        if xi.is_identity:
            return self.concentric.pem_potential(I, source_angles, eval_angles, N, tol)
        return self.concentric.pem_potential(I, xi.boundary_angle(source_angles),
                                             xi.boundary_angle(eval_angles), N, tol)


def mobius_for_inclusion(inc: DiskInclusion) -> tuple[MobiusMap, float]:
    """
    Disk automorphism sending the inclusion onto a concentric disk of radius ``R``.

    The center is first rotated onto the positive real axis ``r = |c|``; the
    zero ``a`` of the real map is the smaller root of
    ``a^2 - a (1 + r^2 - rho^2) / r + 1 = 0`` (the other root is ``1/a``).
    """
    r = abs(inc.center)
    rho = inc.radius
    if r == 0:
        return MobiusMap(), rho
    # smaller root in the cancellation-free form; B may overflow to inf for tiny r
    with np.errstate(over="ignore", divide="ignore"):
        B = np.float64(1 + r * r - rho * rho) / r
        a = 2.0 / (B + np.sqrt((B - 2.0) * (B + 2.0)))
    R = (r + rho - a) / (1 - a * (r + rho))
    beta = np.angle(inc.center)
    return MobiusMap(a * np.exp(1j * beta), np.exp(-1j * beta)), float(R)


def resample_on_circle(func: Callable[[np.ndarray], np.ndarray], n_start: int,
                       rtol: float = 1e-14, max_samples: int = 2 ** 18) -> TrigCoeffs:
    """
    Fourier coefficients of a smooth periodic function by trapezoid sampling.

    Starts at ``n_start`` samples and doubles until the upper half of the
    resolved spectrum falls below ``rtol`` relative to the largest coefficient.
    Returns order ``K/4`` coefficients.
    """
    K = max(16, int(n_start))
    while True:
        theta = 2 * np.pi * np.arange(K) / K
        c = coeffs_from_samples(np.asarray(func(theta), dtype=complex), (K - 1) // 2)
        scale = float(np.max(np.abs(c.coeffs)))
        tail = np.abs(c.coeffs[np.abs(c.indices) > K // 4])
        if scale == 0 or float(np.max(tail)) <= rtol * scale:
            return c.padded(K // 4)
        if 2 * K > max_samples:
            raise RuntimeError(f"spectrum not resolved with {K} samples")
        K *= 2


def push_current(f: TrigCoeffs, xi: MobiusMap, rtol: float = 1e-14) -> TrigCoeffs:
    """
    Coefficients of ``|Theta'| (f o Theta)`` on the image circle, ``Theta = Xi^{-1}``.

    A mean-free ``f`` stays mean-free (change of variables); the constant mode
    is checked and then zeroed exactly.
    """
    _require_mean_free(f)
    if xi.is_identity:
        return f

    def density(phi):
        zeta = np.exp(1j * phi)
        w = xi.inverse(zeta)
        return np.abs(xi.inverse_derivative(zeta)) * evaluate(f, np.angle(w))

    out = resample_on_circle(density, 8 * (f.support_order() + 16), rtol)
    scale = float(np.linalg.norm(out.coeffs))
    if abs(out[0]) > 1e-12 * max(scale, 1.0):
        raise RuntimeError(f"mean not preserved by the pushed current ({abs(out[0]):.2e})")
    return TrigCoeffs(out.coeffs, mean_free=True)


def pull_potential(h: TrigCoeffs, xi: MobiusMap, rtol: float = 1e-14) -> TrigCoeffs:
    """Mean-free part of ``h o Xi`` on the original circle (potentials carry no weight)."""
    if xi.is_identity:
        return TrigCoeffs(h.coeffs, mean_free=True)
    out = resample_on_circle(lambda t: evaluate(h, xi.boundary_angle(t)),
                             8 * (h.support_order() + 16), rtol)
    return TrigCoeffs(out.coeffs, mean_free=True)


def pem_measure_general(I, positions, cond, N: int | None = None) -> np.ndarray:
    """Grounded PEM voltages for point electrodes at boundary angles ``positions``."""
    I = check_zero_sum(I, "current")
    positions = np.asarray(positions, dtype=float)
    return demean(cond.pem_potential(I, positions, positions, N))


def mimic_general(f: TrigCoeffs, M: int, phi: MobiusMap,
                  measure: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> TrigCoeffs:
    """
    Conformally mapped mimicking pipeline with a pluggable measurement.

    ``measure(I, angles)`` returns grounded electrode voltages for currents
    ``I`` at electrodes placed at boundary ``angles`` of the domain.
    """
    _require_mean_free(f)
    L = 2 * M + 1
    if phi.is_identity:
        y_angles = nodes(M)
        weights = np.ones(L)
    else:
        x = np.exp(1j * nodes(M))
        y_angles = np.angle(phi.inverse(x))
        weights = np.abs(phi.inverse_derivative(x))
    weighted = weights * np.asarray(evaluate(f, y_angles))
    I = 2 * np.pi / L * (weighted - weighted.mean())
    g_disk = lift_hatQM(measure(I, y_angles))
    if phi.is_identity:
        return g_disk
    return pull_potential(g_disk, phi)


def upsilon_M_general(f: TrigCoeffs, M: int, phi: MobiusMap, cond,
                      N: int | None = None) -> TrigCoeffs:
    """PEM-based approximation of the continuum relative map on the domain parametrized by ``phi``."""
    return mimic_general(f, M, phi, lambda I, ang: pem_measure_general(I, ang, cond, N))
