"""
Centered Fourier coefficients of 2*pi-periodic functions and distributions.

A :class:`TrigCoeffs` stores the coefficients ``g_hat(n)`` for ``|n| <= N`` in a
dense array whose middle entry is ``n = 0``, so that

    g(theta) = sum_{|n| <= N} g_hat(n) exp(i n theta).

Every operator used elsewhere in the package is diagonal or banded in this
basis, which is why no FFT ordering is exposed publicly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "TrigCoeffs",
    "sobolev_weights",
    "delta_coeffs",
    "sobolev_norm",
    "sobolev_inner",
    "project_PM",
    "project_mean_free",
    "evaluate",
    "coeffs_from_samples",
]


def _centered_indices(N: int) -> np.ndarray:
    return np.arange(-N, N + 1)


@dataclass(frozen=True, eq=False)
class TrigCoeffs:
    """
    Truncated Fourier series ``sum_{|n|<=N} c[n+N] exp(i n theta)``.

    Parameters
    ----------
    coeffs : array_like
        Complex coefficients of odd length ``2N+1`` in ascending index order.
    real : bool
        Require the Hermitian symmetry ``g_hat(-n) = conj(g_hat(n))``.
    mean_free : bool
        Set ``g_hat(0)`` to exactly zero on construction.
    """

    coeffs: np.ndarray
    real: bool = False
    mean_free: bool = False
    N: int = field(init=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size % 2 != 1:
            raise ValueError(f"coefficient vector must have odd length, got {c.size}")
        N = c.size // 2
        if self.mean_free:
            c[N] = 0.0
        if self.real:
            mirror = np.conj(c[::-1])
            scale = max(np.max(np.abs(c), initial=0.0), 1.0)
            if np.max(np.abs(c - mirror), initial=0.0) > 1e-12 * scale:
                raise ValueError("coefficients are not Hermitian-symmetric")
            c = 0.5 * (c + mirror)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "N", N)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, N: int) -> "TrigCoeffs":
        return cls(np.zeros(2 * N + 1, dtype=complex))

    @classmethod
    def monomial(cls, n: int, N: int | None = None) -> "TrigCoeffs":
        """The trigonometric monomial ``exp(i n theta)``."""
        N = abs(n) if N is None else N
        if abs(n) > N:
            raise ValueError(f"|n|={abs(n)} exceeds truncation order N={N}")
        c = np.zeros(2 * N + 1, dtype=complex)
        c[n + N] = 1.0
        return cls(c)

    @classmethod
    def from_dict(cls, mapping: dict[int, complex], N: int | None = None) -> "TrigCoeffs":
        N = max((abs(k) for k in mapping), default=0) if N is None else N
        c = np.zeros(2 * N + 1, dtype=complex)
        for k, v in mapping.items():
            c[k + N] = v
        return cls(c)

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], N: int,
                      n_samples: int | None = None) -> "TrigCoeffs":
        """
        Coefficients of a smooth periodic function by trapezoid sampling.

        Accurate to rounding when ``func`` is analytic and ``n_samples`` resolves
        its spectrum; defaults to ``max(4N + 5, 256)`` samples.
        """
        K = max(4 * N + 5, 256) if n_samples is None else n_samples
        theta = 2 * np.pi * np.arange(K) / K
        return coeffs_from_samples(np.asarray(func(theta), dtype=complex), N)

    # -- accessors ----------------------------------------------------------

    @property
    def indices(self) -> np.ndarray:
        return _centered_indices(self.N)

    def __getitem__(self, n: int) -> complex:
        if abs(n) > self.N:
            return 0j
        return complex(self.coeffs[n + self.N])

    def padded(self, N: int) -> "TrigCoeffs":
        """Same function, stored to truncation order ``N`` (may drop modes)."""
        if N == self.N:
            return self
        if N < self.N:
            return TrigCoeffs(self.coeffs[self.N - N:self.N + N + 1])
        c = np.zeros(2 * N + 1, dtype=complex)
        c[N - self.N:N + self.N + 1] = self.coeffs
        return TrigCoeffs(c)

    def support_order(self, tol: float = 0.0) -> int:
        """Largest ``|n|`` with ``|g_hat(n)| > tol``."""
        nz = np.nonzero(np.abs(self.coeffs) > tol)[0]
        if nz.size == 0:
            return 0
        return int(np.max(np.abs(nz - self.N)))

    def conj_function(self) -> "TrigCoeffs":
        """Coefficients of the pointwise complex conjugate."""
        return TrigCoeffs(np.conj(self.coeffs[::-1]))

    # -- arithmetic ---------------------------------------------------------

    def _binary(self, other, op):
        if not isinstance(other, TrigCoeffs):
            return NotImplemented
        N = max(self.N, other.N)
        return TrigCoeffs(op(self.padded(N).coeffs, other.padded(N).coeffs))

    def __add__(self, other):
        if np.isscalar(other):
            c = np.array(self.coeffs)
            c[self.N] += other
            return TrigCoeffs(c)
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        if np.isscalar(other):
            return self + (-other)
        return self._binary(other, np.subtract)

    def __neg__(self):
        return TrigCoeffs(-self.coeffs)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return TrigCoeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return TrigCoeffs(self.coeffs / scalar)

    def __call__(self, theta):
        return evaluate(self, theta)

    def __repr__(self):
        return f"TrigCoeffs(N={self.N}, coeffs={np.array2string(self.coeffs, precision=4)})"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({"N": self.N,
                           "re": self.coeffs.real.tolist(),
                           "im": self.coeffs.imag.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "TrigCoeffs":
        data = json.loads(text)
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
        if re.shape != im.shape or re.size != 2 * int(data["N"]) + 1:
            raise ValueError("malformed TrigCoeffs JSON: lengths do not match N")
        return cls(re + 1j * im)


def sobolev_weights(N: int, s: float) -> np.ndarray:
    """``max(1, |n|)**(2s)`` for ``|n| <= N``, computed as ``exp(2s log n)``."""
    n = np.maximum(1, np.abs(_centered_indices(N))).astype(float)
    return np.exp(2.0 * s * np.log(n))


def delta_coeffs(theta0: float, N: int) -> TrigCoeffs:
    """Fourier coefficients ``exp(-i n theta0) / (2 pi)`` of the periodic Dirac delta."""
    if N < 0:
        raise ValueError("truncation order must be non-negative")
    theta0 = float(np.angle(np.exp(1j * theta0)))
    n = _centered_indices(N)
    return TrigCoeffs(np.exp(-1j * n * theta0) / (2 * np.pi))


def sobolev_norm(g: TrigCoeffs, s: float) -> float:
    w = sobolev_weights(g.N, s)
    return float(np.sqrt(2 * np.pi * np.sum(w * np.abs(g.coeffs) ** 2)))


def sobolev_inner(f: TrigCoeffs, g: TrigCoeffs, s: float) -> complex:
    N = max(f.N, g.N)
    fc, gc = f.padded(N).coeffs, g.padded(N).coeffs
    return complex(2 * np.pi * np.sum(sobolev_weights(N, s) * fc * np.conj(gc)))


def project_PM(g: TrigCoeffs, M: int) -> TrigCoeffs:
    """Orthogonal projection onto trigonometric polynomials of degree <= M."""
    if M < 0:
        raise ValueError("projection order must be non-negative")
    if M >= g.N:
        return g
    c = np.array(g.coeffs)
    idx = np.abs(g.indices) > M
    c[idx] = 0.0
    return TrigCoeffs(c)


def project_mean_free(g: TrigCoeffs) -> TrigCoeffs:
    return TrigCoeffs(g.coeffs, mean_free=True)


def evaluate(g: TrigCoeffs, theta):
    """Finite Fourier synthesis at scalar or array ``theta``."""
    theta = np.asarray(theta, dtype=float)
    phase = np.exp(1j * np.multiply.outer(theta, g.indices))
    out = phase @ g.coeffs
    return complex(out) if out.ndim == 0 else out


def coeffs_from_samples(samples: np.ndarray, N: int) -> TrigCoeffs:
    """
    Coefficients ``(1/K) sum_j v_j exp(-i n theta_j)`` from ``K`` samples at
    ``theta_j = 2 pi j / K``, ``j = 0..K-1``, kept for ``|n| <= N``.

    Requires ``K >= 2N + 1``; modes beyond ``K/2`` alias.
    """
    samples = np.asarray(samples, dtype=complex)
    K = samples.size
    if K < 2 * N + 1:
        raise ValueError(f"{K} samples cannot resolve order {N}")
    spec = np.fft.fft(samples) / K
    n = _centered_indices(N)
    return TrigCoeffs(spec[n % K])
