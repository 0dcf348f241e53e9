"""
Equidistant interpolation, trapezoid quadrature and point-evaluation operators.

All operators here use the ``2M+1`` nodes ``theta_m = 2 pi m / (2M+1)``,
``|m| <= M``. Electrode vectors are plain complex arrays indexed ``-M..M``
(array position ``m + M``).
"""

from __future__ import annotations

import math

import numpy as np

from .spectral import TrigCoeffs, coeffs_from_samples, evaluate

__all__ = [
    "ZERO_SUM_RTOL",
    "nodes",
    "boundary_points",
    "demean",
    "check_zero_sum",
    "basis_phi",
    "interpolate_QM",
    "lift_hatQM",
    "sample_hatQM_inverse",
    "trapezoid_inner",
    "delta_combination",
    "point_eval_FM",
    "recenter_GM",
    "constant_Cs",
]

ZERO_SUM_RTOL = 1e-13


def nodes(M: int) -> np.ndarray:
    if M < 0:
        raise ValueError("order M must be non-negative")
    return 2 * np.pi * np.arange(-M, M + 1) / (2 * M + 1)


def boundary_points(M: int) -> np.ndarray:
    """Equiangular point-electrode positions ``exp(i theta_m)`` on the unit circle."""
    return np.exp(1j * nodes(M))


def _order(v: np.ndarray) -> int:
    if v.ndim != 1 or v.size % 2 != 1:
        raise ValueError(f"electrode vector must have odd length 2M+1, got shape {v.shape}")
    return v.size // 2


def demean(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return v - v.mean(axis=0)


def check_zero_sum(v, what: str = "current", rtol: float = ZERO_SUM_RTOL) -> np.ndarray:
    """
    Return ``v`` as a complex array, raising if its components do not sum to
    zero. Two-dimensional input is checked column by column.
    """
    v = np.asarray(v, dtype=complex)
    total = np.abs(v.sum(axis=0))
    bound = rtol * np.linalg.norm(v, axis=0)
    bad = (total > bound) & (total > 0)
    if np.any(bad):
        worst = float(np.max(np.atleast_1d(total)))
        raise ValueError(f"{what} vector violates the zero-sum condition (|sum| = {worst:.3e})")
    return v


def basis_phi(m: int, M: int) -> TrigCoeffs:
    """Lagrange basis polynomial of the node ``theta_m``."""
    if abs(m) > M:
        raise IndexError(f"node index {m} outside [-{M}, {M}]")
    n = np.arange(-M, M + 1)
    theta_m = 2 * np.pi * m / (2 * M + 1)
    return TrigCoeffs(np.exp(-1j * n * theta_m) / (2 * M + 1))


def interpolate_QM(samples) -> TrigCoeffs:
    """The unique degree-``M`` trigonometric polynomial through node samples."""
    v = np.asarray(samples, dtype=complex)
    M = _order(v)
    # node m sits at FFT slot m mod (2M+1)
    return coeffs_from_samples(np.fft.ifftshift(v), M)


def lift_hatQM(v, strict: bool = True) -> TrigCoeffs:
    """
    Map a zero-sum electrode vector to ``sum_m v_m phi_m`` in the mean-free
    polynomials. With ``strict=False`` any vector is accepted and the constant
    mode is kept.
    """
    v = np.asarray(v, dtype=complex)
    if strict:
        check_zero_sum(v)
    return TrigCoeffs(interpolate_QM(v).coeffs, mean_free=strict)


def sample_hatQM_inverse(g: TrigCoeffs, M: int) -> np.ndarray:
    if g.support_order() > M:
        raise ValueError(f"function has modes beyond order M={M}")
    scale = max(np.max(np.abs(g.coeffs)), np.finfo(float).tiny)
    if abs(g[0]) > ZERO_SUM_RTOL * scale:
        raise ValueError("function is not mean-free")
    return np.asarray(evaluate(g, nodes(M)))


def trapezoid_inner(f: TrigCoeffs, g: TrigCoeffs, M: int) -> complex:
    theta = nodes(M)
    return complex(2 * np.pi / (2 * M + 1) * np.sum(evaluate(f, theta) * np.conj(evaluate(g, theta))))


def delta_combination(weights, angles, N: int) -> TrigCoeffs:
    """Coefficients of ``sum_m w_m delta_{angles_m}`` truncated at order ``N``."""
    w = np.asarray(weights, dtype=complex)
    n = np.arange(-N, N + 1)
    phase = np.exp(-1j * np.outer(n, np.asarray(angles, dtype=float)))
    return TrigCoeffs(phase @ w / (2 * np.pi))


def _alias_extend(q: TrigCoeffs, M: int, N: int) -> TrigCoeffs:
    # coefficients of a node-supported delta combination are (2M+1)-periodic in n
    n = np.arange(-N, N + 1)
    return TrigCoeffs(q.coeffs[(n + M) % (2 * M + 1)])


def point_eval_FM(g: TrigCoeffs, M: int, N: int) -> TrigCoeffs:
    """
    ``(2 pi/(2M+1)) sum_m g(theta_m) delta_{theta_m}``, truncated at order ``N``.

    The delta combination has an infinite, periodic spectrum; ``N`` is the
    caller's choice.
    """
    samples = np.asarray(evaluate(g, nodes(M)))
    return _alias_extend(interpolate_QM(samples), M, N)


def recenter_GM(g: TrigCoeffs, M: int) -> TrigCoeffs:
    """Subtract the node average of ``g`` from its constant mode."""
    node_mean = np.mean(evaluate(g, nodes(M)))
    return g - node_mean


def constant_Cs(s: float, tol: float = 1e-12) -> float:
    """
    ``(sum_{n>=0} max(1,n)^(-2s))^(1/2) = (1 + zeta(2s))^(1/2)`` to absolute ``tol``.

    The tail after ``K`` terms is bracketed by the trapezoid and midpoint
    integral bounds (valid because ``x^(-2s)`` is convex and decreasing);
    ``K`` doubles until the bracket is narrower than ``tol``.
    """
    if not s > 0.5:
        raise ValueError(f"C_s requires s > 1/2 (got s={s}); the series diverges")
    p = 2.0 * s

    def tail_integral(a):
        return a ** (1.0 - p) / (p - 1.0)

    K = 64
    while True:
        n = np.arange(1, K + 1, dtype=float)
        partial = 1.0 + math.fsum(n[::-1] ** -p)
        lower = tail_integral(K) - 0.5 * K ** -p
        upper = tail_integral(K + 0.5)
        # d sqrt(x) / dx <= 1/2 for x >= 1
        if 0.25 * (upper - lower) < tol:
            break
        if K >= 2 ** 24:
            raise RuntimeError(f"C_s did not reach tol={tol} for s={s}")
        K *= 2
    return math.sqrt(partial + 0.5 * (lower + upper))
