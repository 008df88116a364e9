"""Truncated half-line Wiener-Hopf (Toeplitz) solves.

The system on j = -1..-N reads sum_j k_{x-j} x_j = f_x.  Because c_j is even
the matrix is symmetric Toeplitz (complex, not Hermitian).  Note that
``scipy.linalg.toeplitz(c)`` conjugates ``c`` to build the first row; we
always pass the row explicitly.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import SingularSystem, WindowTooSmall
from .green import GreenTable, build_green_table
from .kernels import (HalfLineSeq, KernelCoeffs, build_forcing, discrete_symbol,
                      forcing_window, kernel_coeffs)
from .lattice import BoundaryKind, ProblemConfig

DENSE_LIMIT = 4000


@dataclass(frozen=True)
class ToeplitzSystem:
    column: np.ndarray  # kernel values at offsets 0..N-1
    rhs: HalfLineSeq

    @property
    def N(self) -> int:
        return len(self.column)

    def matrix(self) -> np.ndarray:
        return sla.toeplitz(self.column, self.column)

    def matvec(self, x):
        return sla.matmul_toeplitz((self.column, self.column), x)

    def residual(self, x) -> float:
        f = self.rhs.data
        return float(np.linalg.norm(self.matvec(x) - f) / max(np.linalg.norm(f), 1e-300))


def assemble_system(coeffs: KernelCoeffs, f: HalfLineSeq) -> ToeplitzSystem:
    N = f.N
    if coeffs.J < N - 1:
        raise WindowTooSmall(f"coefficient window J={coeffs.J} < N-1={N - 1}")
    return ToeplitzSystem(coeffs.k_half[:N].copy(), f)


@dataclass
class SolveReport:
    solution: HalfLineSeq
    residual_norm: float
    condition_estimate: float
    kind: BoundaryKind
    method: str
    u00: complex | None = None
    extra: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.solution.N

    @property
    def eps(self) -> float:
        return self.solution.eps

    def to_dict(self) -> dict:
        x = self.solution.data
        return {
            "kind": self.kind.value,
            "eps": self.eps,
            "N": self.N,
            "method": self.method,
            "residual_norm": self.residual_norm,
            "condition_estimate": self.condition_estimate,
            "u00": None if self.u00 is None else [self.u00.real, self.u00.imag],
            "solution_re": x.real.tolist(),
            "solution_im": x.imag.tolist(),
            **self.extra,
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict())
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_json(cls, text: str) -> "SolveReport":
        d = json.loads(text)
        x = np.array(d["solution_re"]) + 1j * np.array(d["solution_im"])
        u00 = None if d["u00"] is None else complex(*d["u00"])
        return cls(HalfLineSeq(d["eps"], x), d["residual_norm"], d["condition_estimate"],
                   BoundaryKind.parse(d["kind"]), d["method"], u00)


class _Factored:
    """Solve T y = b repeatedly for one symmetric Toeplitz T."""

    def __init__(self, column, method):
        self.column = column
        self.N = len(column)
        if method == "auto":
            method = "dense" if self.N <= DENSE_LIMIT else "levinson"
        self.method = method
        if method == "dense":
            try:
                with warnings.catch_warnings():
                    # exact singularity is reported below as SingularSystem
                    warnings.simplefilter("ignore", sla.LinAlgWarning)
                    self.lu = sla.lu_factor(sla.toeplitz(column, column), check_finite=True)
            except (ValueError, np.linalg.LinAlgError) as exc:
                raise SingularSystem(str(exc)) from exc
            if np.any(np.diag(self.lu[0]) == 0):
                raise SingularSystem("exactly singular Toeplitz matrix")
        elif method != "levinson":
            raise ValueError(f"unknown method {method!r}")

    def solve(self, b):
        try:
            if self.method == "dense":
                y = sla.lu_solve(self.lu, b)
            else:
                y = sla.solve_toeplitz((self.column, self.column), b)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise SingularSystem(str(exc)) from exc
        if not np.all(np.isfinite(y)):
            raise SingularSystem("non-finite solution")
        return y

    def condition(self, cfg: ProblemConfig | None) -> float:
        if self.method == "dense":
            anorm = np.linalg.norm(sla.toeplitz(self.column, self.column), 1)
            gecon = sla.get_lapack_funcs("gecon", (self.lu[0],))
            rcond, info = gecon(self.lu[0], anorm, norm="1")
            return float(1 / rcond) if rcond > 0 else math.inf
        if cfg is None:
            return math.nan
        # for large N the symbol range bounds the condition number
        mod = np.abs(_symbol_on_grid(cfg))
        return float(np.max(mod) / np.min(mod))


def _symbol_on_grid(cfg, n=4096):
    xi = -np.pi + 2 * np.pi * np.arange(n) / n
    return discrete_symbol(cfg)(xi)


def solve_half_line(cfg: ProblemConfig, coeffs: KernelCoeffs, f: HalfLineSeq,
                    method: str = "auto") -> SolveReport:
    """Solve the truncated Toeplitz system K x = f."""
    system = assemble_system(coeffs, f)
    fac = _Factored(system.column, method)
    x = fac.solve(f.data)
    res = system.residual(x)
    if fac.method == "levinson" and res > 1e-10:
        fac = _Factored(system.column, "dense")
        x = fac.solve(f.data)
        res = system.residual(x)
    return SolveReport(HalfLineSeq(f.eps, x), res, fac.condition(cfg), coeffs.kind, fac.method)


def solve_dirichlet_with_tip(cfg: ProblemConfig, coeffs: KernelCoeffs, greens: GreenTable,
                             N: int | None = None, tip="coupled", direct=None,
                             method: str = "auto", tol: float = 1e-12) -> SolveReport:
    """Dirichlet solve including the tip displacement u00 = u^t_{0,0}.

    ``tip`` selects where u00 comes from:

    ``"coupled"``
        Append the lattice Helmholtz equation at the origin to the Toeplitz
        rows.  With u^t_{0,1} = u^t_{0,-1} and the scattered field written as a
        single layer on the constraint, it reads

            u00 (1 - G[1,0]) - 2 eps sum_j G[j,0] x_j = 1 + D_y sum_j G[j,0] u^i_{j,0}.

        The bordered system is solved by a Schur complement (two Toeplitz
        solves and one scalar equation).
    ``"direct"``
        Take u00 from a direct lattice simulation (``direct`` may hold a
        precomputed :class:`DirectField`).
    ``"zero"``
        Drop the tip term (u00 = 0).
    a complex number
        Use that value.
    """
    if cfg.kind is not BoundaryKind.DIRICHLET:
        raise ValueError("solve_dirichlet_with_tip needs a Dirichlet config")
    N = cfg.n_window if N is None else N
    if isinstance(tip, str) and tip == "direct":
        from .direct import extract_traces, solve_direct

        field_ = direct if direct is not None else solve_direct(cfg)
        tip = extract_traces(field_, cfg)[1]
    if not (isinstance(tip, str) and tip == "coupled"):
        u00 = 0.0 if (isinstance(tip, str) and tip == "zero") else complex(tip)
        f = build_forcing(cfg, N, coeffs, u00, tol=tol)
        rep = solve_half_line(cfg, coeffs, f, method=method)
        rep.u00 = complex(u00)
        return rep

    f0 = build_forcing(cfg, N, coeffs, 0.0, tol=tol)
    n = np.arange(N)  # |x + 1| for x = -1..-N
    g_tip = 0.5 * 0.5 * ((n == 0) - coeffs.c(n))  # G[x+1, 1] / 2
    system = assemble_system(coeffs, f0)
    fac = _Factored(system.column, method)
    Y = fac.solve(np.stack([f0.data, g_tip], axis=1))
    y0, y1 = Y[:, 0], Y[:, 1]

    K = coeffs.J
    g0 = greens.row(0, K + 1)
    j = -1 - np.arange(K)
    ui = np.exp(-1j * cfg.kappa_x * j)
    dy = -4 * np.sin(cfg.kappa_y / 2) ** 2
    tip_rhs = 1 + dy * np.sum(g0[1:K + 1] * ui)
    gj = 2 * cfg.eps * g0[1:N + 1]
    denom = (1 - g0[1]) - gj @ y1
    if denom == 0:
        raise SingularSystem("tip equation degenerate")
    u00 = (tip_rhs + gj @ y0) / denom
    x = y0 + u00 * y1

    # residual of the full bordered system
    r_rows = system.matvec(x) - (f0.data + u00 * g_tip)
    r_tip = u00 * (1 - g0[1]) - gj @ x - tip_rhs
    scale = math.sqrt(np.linalg.norm(f0.data) ** 2 + abs(tip_rhs) ** 2)
    res = float(math.sqrt(np.linalg.norm(r_rows) ** 2 + abs(r_tip) ** 2) / scale)
    return SolveReport(HalfLineSeq(cfg.eps, x), res, fac.condition(cfg), cfg.kind,
                       fac.method, complex(u00))


@dataclass(frozen=True)
class Prepared:
    cfg: ProblemConfig
    greens: GreenTable
    coeffs: KernelCoeffs


def prepare(cfg: ProblemConfig, N: int, tol: float = 1e-12) -> Prepared:
    """Green table and kernel coefficients sized for N unknowns."""
    J = forcing_window(cfg, N, tol=tol)
    greens = build_green_table(cfg.w2, J, 1)
    return Prepared(cfg, greens, kernel_coeffs(cfg, J, greens))


def solve_problem(cfg: ProblemConfig, N: int | None = None, tip="coupled",
                  method: str = "auto", tol: float = 1e-12) -> SolveReport:
    """Full discrete pipeline for one configuration: Green table, kernel
    coefficients, forcing and Toeplitz solve."""
    N = cfg.n_window if N is None else N
    p = prepare(cfg, N, tol=tol)
    if cfg.kind is BoundaryKind.DIRICHLET:
        return solve_dirichlet_with_tip(cfg, p.coeffs, p.greens, N, tip=tip, method=method,
                                        tol=tol)
    f = build_forcing(cfg, N, p.coeffs, tol=tol)
    return solve_half_line(cfg, p.coeffs, f, method=method)
