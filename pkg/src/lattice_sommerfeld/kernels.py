"""Wiener-Hopf kernel symbols, their zeros, Fourier coefficients and forcing.

Notation (z on or near the unit circle, w2 = (eps*omega)**2)::

    Q = 4 - z - 1/z - w2,   H = Q - 2,   R = Q + 2,
    h = sqrt(H),  r = sqrt(R),  L_k = h/r,  L_c = r*h/Q.

Both roots are principal.  Since Im H == Im R, sgn Im h == sgn Im r holds
automatically wherever neither H nor R is on the negative real axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import BranchViolation, DegenerateRoot, TailNotConverged, WindowTooSmall
from .lattice import BoundaryKind, ProblemConfig


@dataclass(frozen=True)
class SymbolEval:
    Q: np.ndarray
    H: np.ndarray
    R: np.ndarray
    h: np.ndarray
    r: np.ndarray

    @property
    def L_k(self):
        return self.h / self.r

    @property
    def L_c(self):
        return self.r * self.h / self.Q


def _on_negative_axis(v, rtol=1e-14):
    return (np.abs(v.imag) <= rtol * np.maximum(np.abs(v), 1.0)) & (v.real <= 0)


def eval_symbols(z, w2, check=True) -> SymbolEval:
    """Evaluate Q, H, R, h, r at ``z`` (scalar or array) with branch checks."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise BranchViolation("z = 0 is not admissible")
    Q = 4 - z - 1 / z - w2
    H = Q - 2
    R = Q + 2
    if check and (np.any(_on_negative_axis(H)) or np.any(_on_negative_axis(R))):
        raise BranchViolation("H or R on the non-positive real axis")
    h = np.sqrt(H)
    r = np.sqrt(R)
    if check:
        ok = (h.real > 0) & (r.real > 0) & (np.sign(h.imag) == np.sign(r.imag))
        if not np.all(ok):
            raise BranchViolation("branch conditions violated")
    return SymbolEval(Q, H, R, h, r)


def _inner_root(a, b, c):
    """Root of a z^2 + b z + c = 0 inside the unit circle (the other is outside
    for our quadratics, whose roots multiply to 1)."""
    d = np.sqrt(b * b - 4 * a * c)
    z1 = (-b + d) / (2 * a)
    z2 = (-b - d) / (2 * a)
    return z1 if abs(z1) < abs(z2) else z2


def zero_h(w2) -> complex:
    """Zero of H = 2 - z - 1/z - w2 inside the unit circle."""
    return complex(_inner_root(1.0, -(2 - w2), 1.0))


def zero_r(w2) -> complex:
    """Zero of R = 6 - z - 1/z - w2 inside the unit circle."""
    return complex(_inner_root(1.0, -(6 - w2), 1.0))


def zero_q(w2) -> complex:
    """Zero of Q = 4 - z - 1/z - w2 inside the unit circle."""
    return complex(_inner_root(1.0, -(4 - w2), 1.0))


@dataclass(frozen=True)
class KernelZeros:
    z_h: complex
    z_r: complex
    z_q: complex

    @property
    def radius_Lk(self) -> float:
        """L_k is analytic on radius_Lk < |z| < 1/radius_Lk."""
        return max(abs(self.z_h), abs(self.z_r))

    @property
    def radius_Lc(self) -> float:
        return max(self.radius_Lk, abs(self.z_q))

    @property
    def decay_rate(self) -> float:
        return -math.log(self.radius_Lk)


def kernel_zeros(w2, tol=1e-10) -> KernelZeros:
    zs = KernelZeros(zero_h(w2), zero_r(w2), zero_q(w2))
    for name in ("z_h", "z_r", "z_q"):
        if abs(getattr(zs, name)) > 1 - tol:
            raise DegenerateRoot(f"{name} lies on the unit circle (w2={w2})")
    return zs


@dataclass(frozen=True)
class KernelCoeffs:
    """Even coefficient sequence c_j (stored for j = 0..J) and its scaling."""

    eps: float
    kind: BoundaryKind
    c_half: np.ndarray

    @property
    def J(self) -> int:
        return len(self.c_half) - 1

    @property
    def scale(self) -> float:
        return 0.5 * self.eps if self.kind is BoundaryKind.DIRICHLET else -1.0 / self.eps

    @property
    def k_half(self) -> np.ndarray:
        """Scaled kernel k^eps_j for j = 0..J."""
        return self.scale * self.c_half

    def c(self, j):
        j = np.abs(np.asarray(j))
        if np.any(j > self.J):
            raise WindowTooSmall(f"offset beyond J={self.J}")
        return self.c_half[j]

    def two_sided(self) -> np.ndarray:
        """c_j for j = -J..J."""
        return np.concatenate([self.c_half[:0:-1], self.c_half])

    def partial_sum(self, xi, J=None):
        """sum_{|j| <= J} c_j exp(i j xi), i.e. the symbol series at z = exp(-i xi)."""
        J = self.J if J is None else J
        xi = np.asarray(xi, dtype=float)
        j = np.arange(1, J + 1)
        return self.c_half[0] + 2 * np.cos(np.multiply.outer(xi, j)) @ self.c_half[1:J + 1]


def kernel_coeffs(cfg: ProblemConfig, J: int, greens) -> KernelCoeffs:
    """Coefficients from Green's function values: c_j = delta_j - 2 G[j, 1] (D)
    or delta_j - 2 (G[j, 1] - G[j, 0]) (N)."""
    if greens.x_max < J or greens.y_max < 1:
        raise WindowTooSmall(f"Green table ({greens.x_max}, {greens.y_max}) "
                             f"does not cover J={J}")
    if not np.isclose(greens.w2, cfg.w2, rtol=1e-14, atol=0):
        raise ValueError("Green table built for a different w2")
    g1 = greens.row(1, J + 1)
    if cfg.kind is BoundaryKind.DIRICHLET:
        c = -2 * g1
    else:
        c = -2 * (g1 - greens.row(0, J + 1))
    c = np.array(c)
    c[0] += 1
    c.setflags(write=False)
    return KernelCoeffs(cfg.eps, cfg.kind, c)


def discrete_symbol(cfg: ProblemConfig):
    """Closed-form symbol of the scaled kernel, as a function of xi in [-pi, pi].

    D: eps/(2 L_c(z)),  N: -L_k(z)/eps,  with z = exp(-i xi).
    """
    w2, eps, kind = cfg.w2, cfg.eps, cfg.kind

    def symbol(xi):
        s = eval_symbols(np.exp(-1j * np.asarray(xi, dtype=float)), w2)
        if kind is BoundaryKind.DIRICHLET:
            return 0.5 * eps / s.L_c
        return -s.L_k / eps

    return symbol


def symbol_bounds(cfg: ProblemConfig, n: int = 4096, weighted: bool = False):
    """(min Re, max |.|) of the discrete symbol on an n-point xi grid.

    With ``weighted`` the symbol is multiplied by w_eps(xi) (D) or by
    1/w_eps(xi) (N), the scaling appearing in the Sobolev pairing.
    """
    from .sobolev import weight

    xi = -np.pi + 2 * np.pi * np.arange(n) / n
    sym = discrete_symbol(cfg)(xi)
    if weighted:
        w = weight(xi, cfg.eps)
        sym = sym * (w if cfg.kind is BoundaryKind.DIRICHLET else 1 / w)
    return float(np.min(sym.real)), float(np.max(np.abs(sym)))


@dataclass(frozen=True)
class HalfLineSeq:
    """Values at j = -1, -2, ..., -N (``data[0]`` is j = -1)."""

    eps: float
    data: np.ndarray

    @property
    def N(self) -> int:
        return len(self.data)

    @property
    def indices(self) -> np.ndarray:
        return -1 - np.arange(self.N)

    @property
    def points(self) -> np.ndarray:
        return self.eps * self.indices

    def truncate(self, n: int) -> "HalfLineSeq":
        return HalfLineSeq(self.eps, self.data[:n])


def tail_length(cfg: ProblemConfig, c_max: float = 1.0, tol: float = 1e-12) -> int:
    """Number of extra lattice sites needed beyond the window so the truncated
    forcing sums have a geometric tail bound below ``tol``.

    Terms decay like |c_{x-j}| |u_j| <= c_max exp(-(rho + a)|j| + rho N) with
    rho the coefficient decay rate and a = Im kappa_x the incident decay.
    """
    rho = kernel_zeros(cfg.w2).decay_rate
    rate = rho + min(float(np.imag(cfg.kappa_x)), 0.0)
    if rate <= 0:
        raise TailNotConverged(f"forcing tail does not decay (rate {rate:.3g})")
    bound = c_max / (-math.expm1(-rate))
    return max(8, int(math.ceil(math.log(bound / tol) / rate)))


def forcing_window(cfg: ProblemConfig, N: int, tol: float = 1e-12) -> int:
    """Coefficient window J needed by :func:`build_forcing` for N unknowns."""
    return N + tail_length(cfg, c_max=10.0, tol=tol) + 1


def _lattice_sum(coeffs: KernelCoeffs, ui: np.ndarray, N: int) -> np.ndarray:
    """S_x = sum_{j<=-1} (delta_{xj} - c_{x-j}) u_j for x = -1..-N."""
    K = len(ui)
    cc = coeffs.two_sided()[coeffs.J - K: coeffs.J + K + 1]  # offsets -K..K
    corr = fftconvolve(ui, cc[::-1])
    return ui[:N] - corr[K:K + N]


def build_forcing(cfg: ProblemConfig, N: int, coeffs: KernelCoeffs, u00: complex = 0.0,
                  tol: float = 1e-12) -> HalfLineSeq:
    """Right-hand side f^eps on j = -1..-N.

    D: f_x = G[x+1, 1] u00 / 2 + u^i_{x,0}/2 + (D_y/4) S_x,  D_y = -4 sin^2(ky/2)
    N: f_x = -(1 - exp(i ky)) S_x / (2 eps)
    where S_x is the lattice sum above, truncated by a geometric tail bound.
    The Dirichlet tip factor uses G[n, 1] = (delta_n - c_n)/2.
    """
    if coeffs.kind is not cfg.kind:
        raise ValueError("coefficient kind does not match config")
    cmax = float(np.max(np.abs(coeffs.c_half[1:]))) if coeffs.J else 1.0
    K = N + tail_length(cfg, c_max=max(cmax, 1e-300), tol=tol)
    if coeffs.J < K:
        raise WindowTooSmall(f"coefficient window J={coeffs.J} < required {K}")
    j = -1 - np.arange(K)
    ui = np.exp(-1j * cfg.kappa_x * j)
    S = _lattice_sum(coeffs, ui, N)
    ky = cfg.kappa_y
    if cfg.kind is BoundaryKind.DIRICHLET:
        dy = -4 * np.sin(ky / 2) ** 2
        f = 0.5 * ui[:N] + 0.25 * dy * S
        if u00 != 0:
            n = np.abs(j[:N] + 1)
            g1 = 0.5 * ((n == 0) - coeffs.c(n))
            f = f + 0.5 * g1 * u00
    else:
        f = -0.5 / cfg.eps * (1 - np.exp(1j * ky)) * S
    return HalfLineSeq(cfg.eps, f)
