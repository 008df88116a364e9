"""Continuum Sommerfeld half-plane references on the half-line t < 0.

The Wiener-Hopf equation on R^- is  (kern * x)(t) = f(t)  with symbols

    D:  K(xi) = (i/2) / sqrt(k^2 - xi^2),   f = exp(-i kx t)/2,
    N:  K(xi) = (i/2) * sqrt(k^2 - xi^2),   f = i ky exp(-i kx t)/2,

(Fourier convention X(xi) = int x(t) exp(-i xi t) dt).  Factoring
K = K_plus K_minus with K_plus = e^{i pi/4}/sqrt(2) (k + xi)^{-/+1/2}
(analytic above the branch point -k) and K_minus the mirror factor, and
removing the single forcing pole additively, gives

    X_D(xi) = sqrt(k + xi) sqrt(k + kx) / (xi + kx),
    X_N(xi) = i ky / ((xi + kx) sqrt(k + kx) sqrt(k + xi)).

Both are analytic above Im xi = -Im kx, so x vanishes on t > 0.  Their
inverse transforms are expressed with the Faddeeva function.  With
tau = -t, b = k - kx, c = -i b:

    E(tau)  = exp(c tau) erf(sqrt(c tau)),
    core    = -i e^{-i pi/4} E / sqrt(c),
    x_D     = sqrt(k + kx) e^{i k tau} (e^{-i pi/4}/sqrt(pi tau) + b core),
    x_N     = i ky / sqrt(k + kx) e^{i k tau} core.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.special as sps
from scipy.integrate import IntegrationWarning, quad

from .errors import FactorizationInconsistent, OnCut, QuadratureFailure
from .lattice import BoundaryKind

_PHASE = np.exp(-1j * np.pi / 4)


def _kind(kind) -> BoundaryKind:
    return BoundaryKind.parse(kind)


def _sqrt_k2_minus(xi, k):
    xi = np.asarray(xi, dtype=complex)
    for branch in (k + xi, k - xi):
        if np.any((np.abs(branch.imag) <= 1e-14 * np.maximum(1, np.abs(branch)))
                  & (branch.real <= 0)):
            raise OnCut("evaluation point on a branch cut of sqrt(k^2 - xi^2)")
    return np.sqrt(k - xi) * np.sqrt(k + xi)


def continuum_symbol(xi, k, kind):
    """Fourier symbol of the continuum kernel."""
    g = _sqrt_k2_minus(xi, k)
    return 0.5j / g if _kind(kind) is BoundaryKind.DIRICHLET else 0.5j * g


def plus_factor(xi, k, kind):
    """Factor analytic (and zero-free) above the branch point -k."""
    p = -0.5 if _kind(kind) is BoundaryKind.DIRICHLET else 0.5
    return np.exp(0.25j * np.pi) / math.sqrt(2) * (k + np.asarray(xi, dtype=complex)) ** p


def minus_factor(xi, k, kind):
    """Factor analytic below the branch point +k."""
    p = -0.5 if _kind(kind) is BoundaryKind.DIRICHLET else 0.5
    return np.exp(0.25j * np.pi) / math.sqrt(2) * (k - np.asarray(xi, dtype=complex)) ** p


def transform(xi, k, theta, kind):
    """Closed-form Fourier transform X(xi) of the half-line trace."""
    xi = np.asarray(xi, dtype=complex)
    kx, ky = k * np.cos(theta), k * np.sin(theta)
    if _kind(kind) is BoundaryKind.DIRICHLET:
        return np.sqrt(k + xi) * np.sqrt(k + kx) / (xi + kx)
    return 1j * ky / ((xi + kx) * np.sqrt(k + kx) * np.sqrt(k + xi))


def _parts(t, k, theta):
    tau = -np.asarray(t, dtype=float)
    if np.any(tau <= 0):
        raise ValueError("trace is only defined for t < 0")
    kx = k * np.cos(theta)
    b = k - kx
    c = -1j * b
    sc = np.sqrt(c)
    E = np.exp(c * tau) - sps.wofz(1j * sc * np.sqrt(tau))
    return tau, kx, b, c, sc, E


def trace_values(t, k, theta, kind):
    """x(t) for t < 0."""
    tau, kx, b, c, sc, E = _parts(t, k, theta)
    core = -1j * _PHASE * E / sc
    ph = np.exp(1j * k * tau)
    if _kind(kind) is BoundaryKind.DIRICHLET:
        return np.sqrt(k + kx) * ph * (_PHASE / np.sqrt(np.pi * tau) + b * core)
    ky = k * np.sin(theta)
    return 1j * ky / np.sqrt(k + kx) * ph * core


def trace_derivative(t, k, theta, kind):
    """dx/dt for t < 0 (Neumann only; the Dirichlet trace is not needed)."""
    if _kind(kind) is not BoundaryKind.NEUMANN:
        raise NotImplementedError("derivative implemented for the Neumann trace")
    tau, kx, b, c, sc, E = _parts(t, k, theta)
    ky = k * np.sin(theta)
    pref = 1j * ky / np.sqrt(k + kx) * (-1j * _PHASE / sc)
    dE = c * E + sc / np.sqrt(np.pi * tau)
    dtau = pref * np.exp(1j * k * tau) * (1j * k * E + dE)
    return -dtau


def continuum_forcing(t, k, theta, kind):
    kx, ky = k * np.cos(theta), k * np.sin(theta)
    base = 0.5 * np.exp(-1j * kx * np.asarray(t))
    return base if _kind(kind) is BoundaryKind.DIRICHLET else 1j * ky * base


@dataclass(frozen=True)
class ContinuumTrace:
    """Samples of the half-line trace plus the closed form behind them.

    ``modulation`` multiplies the closed form by 1 + amp*cos(freq*t); it
    exists to build perturbed traces for residual sanity checks.
    """

    kind: BoundaryKind
    k: complex
    theta: float
    grid: np.ndarray
    values: np.ndarray
    modulation: tuple[float, float] = (0.0, 0.0)

    def __call__(self, t):
        amp, fr = self.modulation
        v = trace_values(t, self.k, self.theta, self.kind)
        return v * (1 + amp * np.cos(fr * np.asarray(t))) if amp else v

    def derivative(self, t):
        amp, fr = self.modulation
        d = trace_derivative(t, self.k, self.theta, self.kind)
        if not amp:
            return d
        t = np.asarray(t)
        v = trace_values(t, self.k, self.theta, self.kind)
        return d * (1 + amp * np.cos(fr * t)) - v * amp * fr * np.sin(fr * t)

    def perturbed(self, amp=0.01, freq=3.0) -> "ContinuumTrace":
        m = (amp, freq)
        vals = self.values * (1 + amp * np.cos(freq * self.grid))
        return ContinuumTrace(self.kind, self.k, self.theta, self.grid, vals, m)

    def zero(self) -> "ContinuumTrace":
        return ContinuumTrace(self.kind, self.k, self.theta, self.grid,
                              np.zeros_like(self.values), (-1.0, 0.0))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["x", "re", "im"])
            for t, v in zip(self.grid, self.values):
                wr.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])


def check_factorization(k, kind, n=64, tol=1e-12) -> float:
    """max relative mismatch of K_plus*K_minus against K on the real line."""
    xi = np.linspace(-5 * abs(k), 5 * abs(k), n)
    prod = plus_factor(xi, k, kind) * minus_factor(xi, k, kind)
    ref = continuum_symbol(xi, k, kind)
    err = float(np.max(np.abs(prod - ref) / np.abs(ref)))
    if err > tol:
        raise FactorizationInconsistent(f"factor product mismatch {err:.2e}")
    return err


def cauchy_reconstruction_error(func, rect, points, order=64, pieces=16) -> float:
    """max |f(z0) - (1/2 pi i) oint f(z)/(z - z0) dz| for z0 in ``points``.

    Small values confirm that ``func`` is analytic inside the rectangle
    ``rect = (x0, x1, y0, y1)``; a branch point inside spoils the identity.
    """
    x0, x1, y0, y1 = rect
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    s, w = np.polynomial.legendre.leggauss(order)
    zs, dz = [], []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        edges = np.linspace(0, 1, pieces + 1)
        for u0, u1 in zip(edges[:-1], edges[1:]):
            za, zb = a + (b - a) * u0, a + (b - a) * u1
            zs.append(0.5 * (za + zb) + 0.5 * (zb - za) * s)
            dz.append(0.5 * (zb - za) * w)
    zs, dz = np.concatenate(zs), np.concatenate(dz)
    fz = func(zs)
    errs = []
    for p in np.atleast_1d(points):
        val = np.sum(fz * dz / (zs - p)) / (2j * np.pi)
        errs.append(abs(val - func(np.array([p]))[0]))
    return float(max(errs))


def solve_continuum_trace(k, theta, kind, grid) -> ContinuumTrace:
    """Half-line trace on ``grid`` (points t < 0) from the factorized solution."""
    kind = _kind(kind)
    if not complex(k).imag > 0:
        raise ValueError("Im k must be positive")
    check_factorization(k, kind)
    grid = np.asarray(grid, dtype=float)
    return ContinuumTrace(kind, complex(k), float(theta), grid,
                          trace_values(grid, k, theta, kind))


def _green(r, k):
    return 0.25j * sps.hankel1(0, k * r)


def _cquad(f, a, b, **kw):
    val, err = quad(f, a, b, complex_func=True, limit=400, epsabs=1e-13, epsrel=1e-11, **kw)
    return val


def _rquad_cauchy(f, a, b, c):
    # QAWC reports spurious roundoff warnings near 1e-13 absolute accuracy
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        return _rquad_cauchy_raw(f, a, b, c)


def _rquad_cauchy_raw(f, a, b, c):
    re = quad(lambda t: f(t).real, a, b, weight="cauchy", wvar=c, limit=400,
              epsabs=1e-13, epsrel=1e-11)[0]
    im = quad(lambda t: f(t).imag, a, b, weight="cauchy", wvar=c, limit=400,
              epsabs=1e-13, epsrel=1e-11)[0]
    return re + 1j * im


def _segments(lo, hi, step):
    n = max(1, int(math.ceil((hi - lo) / step)))
    edges = np.linspace(lo, hi, n + 1)
    return list(zip(edges[:-1], edges[1:]))


def _tail_length(k, x0, tol=1e-14):
    return abs(x0) + math.log(1 / tol) / complex(k).imag


def single_layer(trace, x0, k) -> complex:
    """int_{-inf}^0 G(|x0 - t|) x(t) dt with G = (i/4) H0(k r)."""
    L = _tail_length(k, x0)
    total = _cquad(lambda t: _green(abs(x0 - t), k) * trace(t), x0, 0.0)
    for a, b in _segments(-L, x0, 4.0):
        total += _cquad(lambda t: _green(abs(x0 - t), k) * trace(t), a, b)
    return total


def _neumann_operator(trace, x0, k) -> complex:
    """(d^2/dx^2 + k^2) of the single layer at x0, using x(0) = 0:
    d/dx0 int G(x0 - t) x'(t) dt  is a principal value integral."""
    L = _tail_length(k, x0)
    d = min(abs(x0) / 2, 1.0)

    def h(t):
        r = abs(x0 - t)
        rh = r * sps.hankel1(1, k * r) if r > 0 else -2j / (np.pi * k)
        return 0.25j * k * rh * trace.derivative(t)

    def plain(t):
        return h(t) / (t - x0)

    pv = _rquad_cauchy(h, x0 - d, x0 + d, x0)
    pv += _cquad(plain, x0 + d, 0.0)
    for a, b in _segments(-L, x0 - d, 4.0):
        pv += _cquad(plain, a, b)
    return pv + k * k * single_layer(trace, x0, k)


def continuum_residual(trace: ContinuumTrace, k=None, theta=None, points=None) -> float:
    """Relative residual ||K x - f|| / ||f|| over collocation points t < 0."""
    k = trace.k if k is None else k
    theta = trace.theta if theta is None else theta
    points = np.linspace(-8.0, -0.5, 7) if points is None else np.asarray(points)
    f = continuum_forcing(points, k, theta, trace.kind)
    op = single_layer if trace.kind is BoundaryKind.DIRICHLET else _neumann_operator
    try:
        kx = np.array([op(trace, float(p), k) for p in points])
    except Exception as exc:  # quad raises on pathological integrands
        raise QuadratureFailure(str(exc)) from exc
    return float(np.linalg.norm(kx - f) / np.linalg.norm(f))


def fourier_transform_numeric(trace, xi, length=None) -> complex:
    """int_{-L}^0 x(t) exp(-i xi t) dt by adaptive quadrature (oracle for
    :func:`transform`)."""
    k = complex(trace.k)
    kx = k * np.cos(trace.theta)
    L = length or math.log(1e14) / max(kx.imag, 1e-3)
    total = _cquad(lambda t: trace(t) * np.exp(-1j * xi * t), -1.0, 0.0)
    for a, b in _segments(-L, -1.0, 8.0):
        total += _cquad(lambda t: trace(t) * np.exp(-1j * xi * t), a, b)
    return total


# --- Nystrom oracle for the Dirichlet equation -------------------------------

def _smooth_part(r, k):
    """G(r) + J0(k r) log(r) / (2 pi), smooth in r."""
    r = np.asarray(r, dtype=float)
    out = np.empty(r.shape, dtype=complex)
    small = r < 1e-12
    rr = r[~small]
    out[~small] = _green(rr, k) + sps.jv(0, k * rr) * np.log(rr) / (2 * np.pi)
    out[small] = 0.25j - (np.log(k / 2) + np.euler_gamma) / (2 * np.pi)
    return out


def _log_moments(a, n):
    """I_m(a) = int_{-1}^{1} log|a - s| P_m(s) ds for m = 0..n-1 (vectorized in a)."""
    a = np.asarray(a, dtype=float)
    q = np.empty((n + 1,) + a.shape)
    q[0] = np.log(np.abs((a + 1) / (a - 1)))
    q[1] = a * q[0] - 2
    for m in range(1, n):
        q[m + 1] = ((2 * m + 1) * a * q[m] - m * q[m - 1]) / (m + 1)
    I = np.empty((n,) + a.shape)
    I[0] = (a + 1) * np.log(np.abs(a + 1)) - (a - 1) * np.log(np.abs(a - 1)) - 2
    for m in range(1, n):
        I[m] = (q[m + 1] - q[m - 1]) / (2 * m + 1)
    return I


def _lagrange_matrix(nodes, targets):
    """Interpolation matrix from values at ``nodes`` to ``targets``."""
    wb = np.array([1 / np.prod(nodes[j] - np.delete(nodes, j)) for j in range(len(nodes))])
    diff = targets[:, None] - nodes[None, :]
    exact = np.isclose(diff, 0, atol=1e-15)
    diff[exact] = 1.0
    M = wb / diff
    M /= M.sum(axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    M[rows] = exact[rows].astype(float)
    return M


@dataclass(frozen=True)
class NystromSolution:
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray


def nystrom_dirichlet(k, theta, length=150.0, panel=2.0, order=16, levels=40,
                      near=1.2, mid=4.0, fine_order=64) -> NystromSolution:
    """Independent solution of the Dirichlet half-line equation.

    Composite Gauss-Legendre panels, geometrically graded towards the edge
    t = 0 where x ~ |t|^{-1/2}.  The log singularity of the kernel is handled
    by product integration against Legendre moments on the source panel and
    its neighbours; moderately close panels are upsampled.
    """
    k = complex(k)
    edges = [-(2.0 ** -m) for m in range(levels, -1, -1)]  # -2^-levels .. -1
    far = list(np.arange(-1.0 - panel, -length - 1e-12, -panel))
    bps = np.array(sorted(far + edges + [0.0]))
    s, w = np.polynomial.legendre.leggauss(order)
    sf, wf = np.polynomial.legendre.leggauss(fine_order)
    up = _lagrange_matrix(s, sf)
    P = np.polynomial.legendre.legvander(s, order - 1)  # P_m(s_j)
    alpha = (2 * np.arange(order) + 1) / 2 * (w[:, None] * P)  # (node j, degree m)

    mids = 0.5 * (bps[1:] + bps[:-1])
    halves = 0.5 * (bps[1:] - bps[:-1])
    t = (mids[:, None] + halves[:, None] * s).ravel()
    wt = (halves[:, None] * w).ravel()
    n = t.size
    A = np.empty((n, n), dtype=complex)
    for p, (m, h) in enumerate(zip(mids, halves)):
        cols = slice(p * order, (p + 1) * order)
        tj = t[cols]
        a = (t - m) / h
        r = np.abs(t[:, None] - tj[None, :])
        block = _green(np.maximum(r, 1e-300), k) * wt[cols]
        close = np.abs(a) < near
        if np.any(close):
            ac = a[close]
            I = _log_moments(ac, order)  # (m, targets)
            wlog = h * (np.log(h) * w[None, :] + (alpha @ I).T)  # (targets, j)
            rc = r[close]
            block[close] = (-sps.jv(0, k * rc) / (2 * np.pi) * wlog
                            + _smooth_part(rc, k) * wt[cols])
        medium = (~close) & (np.abs(a) < mid)
        if np.any(medium):
            tf = m + h * sf
            rf = np.abs(t[medium][:, None] - tf[None, :])
            block[medium] = (_green(rf, k) * (h * wf)) @ up
        A[:, cols] = block
    f = 0.5 * np.exp(-1j * k * np.cos(theta) * t)
    x = sla.solve(A, f)
    return NystromSolution(t, wt, x)
