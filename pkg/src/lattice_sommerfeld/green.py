"""Square lattice Green's function for complex frequency.

``green_quadrature`` is the slow oracle: the defining double integral on the
torus with a tensor trapezoid rule.  ``green_reduced`` and ``GreenTable`` use
the one-dimensional form obtained by integrating out the y wavenumber,

    G[x, y] = -(1/2pi) * int cos(x xi) lam(xi)**|y| / s(xi) dxi,

with Qt = 4 - 2 cos xi - w2, s = sqrt(Qt - 2) * sqrt(Qt + 2) and
lam = (Qt - s)/2, |lam| < 1.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchFailure, QuadratureFailure, WindowTooSmall


def _check_w2(w2):
    if complex(w2).imag == 0:
        raise ValueError("w2 must have a non-zero imaginary part")


def _reduced_integrand_parts(xi, w2):
    qt = 4 - 2 * np.cos(xi) - w2
    s = np.sqrt(qt - 2) * np.sqrt(qt + 2)
    lam = 0.5 * (qt - s)
    if np.any(np.abs(lam) >= 1):
        raise BranchFailure("|lambda| >= 1 on the quadrature grid")
    return lam, s


def green_quadrature_many(sites, w2, tol=1e-12, n_start=64, n_max=8192, block=256):
    """Oracle values of G at several sites sharing one tensor grid.

    The integrand is even in both variables, so the trapezoid rule on
    [0, pi]^2 with half-weighted endpoints reproduces the periodic rule on the
    full torus.  The node count doubles until successive estimates agree.
    """
    _check_w2(w2)
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    xs, ys = sites[:, 0], sites[:, 1]
    prev = None
    n = n_start
    while n <= n_max:
        t = np.pi * np.arange(n + 1) / n
        w = np.full(n + 1, 1.0 / n)
        w[[0, -1]] *= 0.5
        A = np.cos(np.outer(t, xs)) * w[:, None]
        B = np.cos(np.outer(t, ys)) * w[:, None]
        ct = 2 * np.cos(t)
        acc = np.zeros(len(xs), dtype=complex)
        for i0 in range(0, n + 1, block):
            sig = (w2 - 4) + ct[i0:i0 + block, None] + ct[None, :]
            acc += np.sum(A[i0:i0 + block] * ((1.0 / sig) @ B), axis=0)
        cur = acc
        if prev is not None and np.max(np.abs(cur - prev)) < tol:
            return cur
        prev = cur
        n *= 2
    raise QuadratureFailure(f"torus quadrature not converged with {n_max} nodes per axis")


def green_quadrature(x: int, y: int, w2: complex, tol: float = 1e-12) -> complex:
    """G[x, y] from the defining double integral (slow oracle)."""
    return complex(green_quadrature_many([(x, y)], w2, tol=tol)[0])


def green_reduced(x: int, y: int, w2: complex, tol: float = 1e-13,
                  n_start: int = 256, n_max: int = 1 << 20) -> complex:
    """G[x, y] from the one-dimensional reduced integral (fast path)."""
    _check_w2(w2)
    ay = abs(int(y))
    prev = None
    n = n_start
    while n <= n_max:
        xi = 2 * np.pi * np.arange(n) / n
        lam, s = _reduced_integrand_parts(xi, w2)
        cur = -np.mean(np.cos(x * xi) * lam ** ay / s)
        if prev is not None and abs(cur - prev) < tol:
            return complex(cur)
        prev = cur
        n *= 2
    raise QuadratureFailure("reduced Green integral not converged")


def decay_rate(w2) -> float:
    """-log of the largest kernel zero modulus; sets the exponential decay of
    G along the lattice axes and of the kernel coefficients."""
    from .kernels import kernel_zeros

    return kernel_zeros(w2).decay_rate


def _fft_size(x_max, rho, safety=40.0, minimum=256):
    need = max(4 * (x_max + 1), x_max + safety / rho, minimum)
    return 1 << int(math.ceil(math.log2(need)))


@dataclass(frozen=True)
class GreenTable:
    """G[x, y] for 0 <= x <= x_max, 0 <= y <= y_max; other sites by symmetry."""

    w2: complex
    values: np.ndarray  # shape (y_max + 1, x_max + 1)
    n_nodes: int

    @property
    def x_max(self) -> int:
        return self.values.shape[1] - 1

    @property
    def y_max(self) -> int:
        return self.values.shape[0] - 1

    def __call__(self, x, y) -> complex:
        ax, ay = abs(int(x)), abs(int(y))
        if ax <= self.x_max and ay <= self.y_max:
            return complex(self.values[ay, ax])
        if ay <= self.x_max and ax <= self.y_max:
            return complex(self.values[ax, ay])
        raise WindowTooSmall(f"site ({x}, {y}) outside table window "
                             f"({self.x_max}, {self.y_max})")

    def row(self, y: int, n: int | None = None) -> np.ndarray:
        """Values G[0..n-1, y] (read-only view)."""
        ay = abs(int(y))
        if ay > self.y_max:
            raise WindowTooSmall(f"row {y} outside table (y_max={self.y_max})")
        n = self.x_max + 1 if n is None else n
        if n > self.x_max + 1:
            raise WindowTooSmall(f"need {n} columns, table has {self.x_max + 1}")
        return self.values[ay, :n]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["x", "y", "re", "im"])
            for y in range(self.y_max + 1):
                for x in range(self.x_max + 1):
                    v = self.values[y, x]
                    wr.writerow([x, y, repr(float(v.real)), repr(float(v.imag))])


def build_green_table(w2: complex, x_max: int, y_max: int = 1) -> GreenTable:
    """Fill a GreenTable from the reduced integral with one shared FFT grid.

    For each row y the periodic trapezoid rule on M nodes is a single inverse
    FFT.  M is chosen from the decay rate so the aliasing error, of order
    exp(-rho*(M - x_max)), is far below double precision.
    """
    _check_w2(w2)
    from .kernels import kernel_zeros

    rho = kernel_zeros(w2).decay_rate
    m = _fft_size(x_max, rho)
    xi = 2 * np.pi * np.arange(m) / m
    lam, s = _reduced_integrand_parts(xi, w2)
    vals = np.empty((y_max + 1, x_max + 1), dtype=complex)
    f = -1.0 / s
    for y in range(y_max + 1):
        vals[y] = np.fft.ifft(f)[: x_max + 1]
        f = f * lam
    vals.setflags(write=False)
    return GreenTable(complex(w2), vals, m)


def delta_identity_residual(table: GreenTable, extent: int = 20) -> float:
    """max |Lap G + w2 G - delta| over the sites |x|, |y| < extent."""
    if table.x_max < extent or table.y_max < extent:
        raise WindowTooSmall("table too small for the requested residual window")
    full = np.empty((2 * extent + 1, 2 * extent + 1), dtype=complex)
    idx = np.abs(np.arange(-extent, extent + 1))
    full[:] = table.values[np.ix_(idx, idx)]
    c = full[1:-1, 1:-1]
    lap = full[2:, 1:-1] + full[:-2, 1:-1] + full[1:-1, 2:] + full[1:-1, :-2] - 4 * c
    res = lap + table.w2 * c
    res[extent - 1, extent - 1] -= 1
    return float(np.max(np.abs(res)))
