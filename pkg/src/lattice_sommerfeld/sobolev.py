"""Discrete Fourier transform and discrete Sobolev norms on eps*Z.

    u^F(xi) = sum_j u_j exp(-i j xi),
    ||u||_s^2 = (eps / 2pi) int_{-pi}^{pi} w_eps(xi)^{2s} |u^F(xi)|^2 dxi,
    w_eps(xi) = sqrt(1 + 4 sin^2(xi/2) / eps^2).

The integral is evaluated with the periodic trapezoid rule, which for a
trigonometric polynomial times the smooth weight converges spectrally; the
node count is a power of two at least 2**14 and at least four times the
support length.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORDERS = (-0.5, 0.0, 0.5)
MIN_NODES = 1 << 14


@dataclass(frozen=True)
class GridSeq:
    """Values u_j for j = start, start+1, ..., start+len(data)-1; zero elsewhere."""

    eps: float
    data: np.ndarray
    start: int = 0

    @property
    def indices(self) -> np.ndarray:
        return self.start + np.arange(len(self.data))

    @property
    def points(self) -> np.ndarray:
        return self.eps * self.indices

    @classmethod
    def from_half_line(cls, seq) -> "GridSeq":
        """Embed a HalfLineSeq (j = -1..-N) in Z with explicit zero extension."""
        data = np.asarray(seq.data)[::-1]
        return cls(seq.eps, data, -len(data))

    def __sub__(self, other: "GridSeq") -> "GridSeq":
        if self.eps != other.eps:
            raise ValueError("spacing mismatch")
        lo = min(self.start, other.start)
        hi = max(self.start + len(self.data), other.start + len(other.data))
        out = np.zeros(hi - lo, dtype=complex)
        out[self.start - lo:self.start - lo + len(self.data)] += self.data
        out[other.start - lo:other.start - lo + len(other.data)] -= other.data
        return GridSeq(self.eps, out, lo)


def _as_grid(u, eps=None) -> GridSeq:
    if isinstance(u, GridSeq):
        return u
    if hasattr(u, "data") and hasattr(u, "eps"):
        return GridSeq.from_half_line(u)
    if eps is None:
        raise TypeError("plain arrays need an explicit eps")
    return GridSeq(eps, np.asarray(u))


def dft(u: GridSeq):
    """Return xi -> u^F(xi), evaluated by direct summation."""
    u = _as_grid(u)
    j = u.indices
    data = np.asarray(u.data, dtype=complex)

    def transform(xi):
        xi = np.asarray(xi, dtype=float)
        return np.exp(-1j * np.multiply.outer(xi, j)) @ data

    return transform


def dft_samples(u: GridSeq, M: int):
    """u^F at xi_m = 2 pi m / M, m = 0..M-1 (M >= support length), via FFT."""
    u = _as_grid(u)
    if M < len(u.data):
        raise ValueError("M must cover the support")
    xi = 2 * np.pi * np.arange(M) / M
    return xi, np.fft.fft(u.data, M) * np.exp(-1j * u.start * xi)


def idft(samples, M: int, start: int, length: int, eps: float) -> GridSeq:
    """Inverse of :func:`dft_samples`: u_j = (1/2pi) int u^F e^{ij xi} dxi on
    the trapezoid grid, for j = start..start+length-1."""
    xi = 2 * np.pi * np.arange(M) / M
    data = np.fft.ifft(np.asarray(samples) * np.exp(1j * start * xi))[:length]
    return GridSeq(eps, data, start)


def weight(xi, eps):
    """w_eps(xi) = sqrt(1 + 4 eps^-2 sin^2(xi/2))."""
    return np.sqrt(1 + 4 / eps ** 2 * np.sin(np.asarray(xi) / 2) ** 2)


def _nodes(length):
    need = max(MIN_NODES, 4 * length)
    return 1 << int(np.ceil(np.log2(need)))


def norm_s(u, s: float, eps: float | None = None) -> float:
    """Discrete Sobolev norm of order s in {-1/2, 0, 1/2}."""
    if s not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}")
    u = _as_grid(u, eps)
    M = _nodes(len(u.data))
    xi = 2 * np.pi * np.fft.fftfreq(M)
    U = np.fft.fft(u.data, M)  # shift phase has unit modulus
    w = weight(xi, u.eps) ** (2 * s)
    return float(np.sqrt(u.eps / M * np.sum(w * np.abs(U) ** 2)))


def restrict(f, eps: float, N: int) -> GridSeq:
    """Samples f(j eps) for j = -N..-1 as a GridSeq."""
    j = -N + np.arange(N)
    return GridSeq(eps, np.asarray(f(eps * j), dtype=complex), -N)


def restrict_half_line(f, eps: float, N: int):
    """Samples f(j eps) for j = -1..-N as a HalfLineSeq."""
    from .kernels import HalfLineSeq

    j = -1 - np.arange(N)
    return HalfLineSeq(eps, np.asarray(f(eps * j), dtype=complex))


def prolong(u):
    """Piecewise-linear interpolant of the zero-extended sequence on eps*Z."""
    u = _as_grid(u)
    t = np.concatenate([[u.points[0] - u.eps], u.points, [u.points[-1] + u.eps]])
    v = np.concatenate([[0], np.asarray(u.data, dtype=complex), [0]])

    def interpolant(x):
        x = np.asarray(x, dtype=float)
        return np.interp(x, t, v.real, left=0, right=0) + 1j * np.interp(x, t, v.imag,
                                                                        left=0, right=0)

    return interpolant


def relative_error(x_disc, x_ref, s_num: float = -0.5, s_den: float | None = None) -> float:
    """||x_disc - x_ref||_{s_num} / ||x_ref||_{s_den} for aligned sequences."""
    s_den = s_num if s_den is None else s_den
    a, b = _as_grid(x_disc), _as_grid(x_ref)
    return norm_s(a - b, s_num) / norm_s(b, s_den)
