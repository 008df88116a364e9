"""Convergence study, kernel report and solver cross-validation."""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .continuum import continuum_forcing, trace_values
from .direct import default_radius, extract_traces, solve_direct
from .errors import LatticeSommerfeldError
from .green import build_green_table
from .kernels import build_forcing, eval_symbols, kernel_coeffs, kernel_zeros
from .lattice import BoundaryKind, ProblemConfig
from .sobolev import norm_s, restrict_half_line
from .toeplitz import prepare, solve_dirichlet_with_tip, solve_half_line

DEFAULT_EPS = (0.4, 0.2, 0.1, 0.05)


@dataclass
class ConvergenceRecord:
    eps: float
    N: int
    e_eps: float
    norm_disc: float
    norm_restr: float
    forcing_err: float
    forcing_norm: float
    u00: complex | None
    kind: str
    theta: float
    config_hash: str
    norm_order: float
    timings: dict = field(default_factory=dict)
    status: str = "ok"
    error: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["u00"] = None if self.u00 is None else [self.u00.real, self.u00.imag]
        return d


def error_order(kind: BoundaryKind, pairing: str) -> float:
    """Sobolev order of the error norm: -1/2 for both kinds by default, or the
    energy pairing (-1/2 Dirichlet, +1/2 Neumann)."""
    if pairing == "minus":
        return -0.5
    if pairing == "paired":
        return -0.5 if kind is BoundaryKind.DIRICHLET else 0.5
    raise ValueError(f"unknown norm pairing {pairing!r}")


def forcing_order(kind: BoundaryKind) -> float:
    return 0.5 if kind is BoundaryKind.DIRICHLET else -0.5


def default_pad(cfg: ProblemConfig, tol: float = 1e-7) -> float:
    """Extra physical length solved beyond the error window, so the
    truncation edge does not reach it."""
    rate = kernel_zeros(cfg.w2).decay_rate / cfg.eps
    return max(10.0, math.log(1 / tol) / rate)


def convergence_point(cfg: ProblemConfig, pad: float | None = None, pairing: str = "minus",
                      tip="coupled") -> ConvergenceRecord:
    """One entry of the convergence sweep at ``cfg.eps``."""
    timings = {}
    t0 = time.perf_counter()
    nx = cfg.n_window
    pad = default_pad(cfg) if pad is None else pad
    N = max(nx, int(math.floor((cfg.extent + pad) / cfg.eps)))
    p = prepare(cfg, N)
    timings["prepare"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if cfg.kind is BoundaryKind.DIRICHLET:
        rep = solve_dirichlet_with_tip(cfg, p.coeffs, p.greens, N, tip=tip)
        u00 = rep.u00
    else:
        rep = solve_half_line(cfg, p.coeffs, build_forcing(cfg, N, p.coeffs))
        u00 = None
    timings["solve"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    s = error_order(cfg.kind, pairing)
    xe = rep.solution.truncate(nx)
    xr = restrict_half_line(lambda t: trace_values(t, cfg.k, cfg.theta, cfg.kind), cfg.eps, nx)
    diff = type(xe)(cfg.eps, xe.data - xr.data)
    norm_restr = norm_s(xr, s)
    e = norm_s(diff, s) / norm_restr

    sf = forcing_order(cfg.kind)
    f = build_forcing(cfg, nx, p.coeffs, 0.0 if u00 is None else u00)
    rf = restrict_half_line(lambda t: continuum_forcing(t, cfg.k, cfg.theta, cfg.kind),
                            cfg.eps, nx)
    ferr = norm_s(type(f)(cfg.eps, f.data - rf.data), sf)
    timings["norms"] = time.perf_counter() - t0
    return ConvergenceRecord(cfg.eps, nx, float(e), norm_s(xe, s), norm_restr, ferr,
                             norm_s(f, sf), u00, cfg.kind.value, cfg.theta,
                             cfg.config_hash(), s, timings)


def _point_or_failure(args):
    cfg, pad, pairing, tip = args
    try:
        return convergence_point(cfg, pad, pairing, tip)
    except LatticeSommerfeldError as exc:
        nan = float("nan")
        return ConvergenceRecord(cfg.eps, cfg.n_window, nan, nan, nan, nan, nan, None,
                                 cfg.kind.value, cfg.theta, cfg.config_hash(),
                                 error_order(cfg.kind, pairing), {}, "failed",
                                 f"{type(exc).__name__}: {exc}")


def run_convergence(cfg_base: ProblemConfig, eps_list=DEFAULT_EPS, X: float | None = None,
                    pad: float | None = None, pairing: str = "minus", tip="coupled",
                    workers: int = 1) -> list[ConvergenceRecord]:
    """e(eps) for each spacing; records sorted by decreasing eps.

    Failures are recorded (``status == "failed"``) and the sweep continues.
    """
    eps_list = sorted((float(e) for e in eps_list), reverse=True)
    X = cfg_base.extent if X is None else X
    jobs = [(cfg_base.with_(eps=e, extent=X), pad, pairing, tip) for e in eps_list]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_point_or_failure, jobs))
    else:
        records = [_point_or_failure(j) for j in jobs]
    return sorted(records, key=lambda r: -r.eps)


def convergence_checks(records) -> dict:
    """The qualitative acceptance checks on one sweep."""
    e = np.array([r.e_eps for r in records])
    ok = all(r.status == "ok" for r in records)
    return {
        "all_ok": ok,
        "strictly_decreasing": bool(ok and np.all(np.diff(e) < 0)),
        "halved": bool(ok and e[-1] < 0.5 * e[0]),
    }


def fitted_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# --- file output --------------------------------------------------------------

def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                         for v in row])


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "lattice-sommerfeld"
    return plt


def _save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})


def write_records(records, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "convergence.jsonl", "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
    _write_csv(out / "convergence.csv",
               ["eps", "N", "e_eps", "norm_disc", "norm_restr", "forcing_err", "forcing_norm"],
               [[r.eps, r.N, r.e_eps, r.norm_disc, r.norm_restr, r.forcing_err,
                 r.forcing_norm] for r in records])
    plt = _figure()
    fig, ax = plt.subplots(figsize=(5, 4))
    eps = [r.eps for r in records]
    ax.loglog(eps, [r.e_eps for r in records], "o-")
    ax.set_xlabel("eps")
    ax.set_ylabel("e(eps)")
    ax.grid(True, which="both", alpha=0.3)
    _save_svg(fig, out / "convergence.svg")
    plt.close(fig)


def emit_kernel_report(cfg: ProblemConfig, out_dir, J: int = 40, partial=(4, 8, 16, 32, 64),
                       n_xi: int = 1024) -> dict:
    """CSV and SVG data for the kernel symbols, coefficients and partial sums.

    Returns the sup-norm partial-sum errors keyed by kind and J.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    xi = -np.pi + 2 * np.pi * np.arange(n_xi) / n_xi
    s = eval_symbols(np.exp(-1j * xi), cfg.w2)
    symbols = {"Lc": s.L_c, "Lk": s.L_k}
    for name, v in symbols.items():
        _write_csv(out / f"symbol_{name}.csv", ["xi", "re", "im", "abs"],
                   zip(xi, v.real, v.imag, np.abs(v)))

    Jmax = max(J, max(partial))
    greens = build_green_table(cfg.w2, Jmax, 1)
    errors = {}
    coeffs = {}
    for kind in BoundaryKind:
        c = kernel_coeffs(cfg.with_(kind=kind), Jmax, greens)
        coeffs[kind] = c
        j = np.arange(-J, J + 1)
        cj = c.c(j)
        _write_csv(out / f"coeffs_{kind.value}.csv", ["j", "re", "im", "abs"],
                   zip(j, cj.real, cj.imag, np.abs(cj)))
        exact = 1 / s.L_c if kind is BoundaryKind.DIRICHLET else s.L_k
        header = ["xi", "exact_re", "exact_im", "exact_abs"]
        cols = [xi, exact.real, exact.imag, np.abs(exact)]
        for n in partial:
            ps = c.partial_sum(xi, n)
            header += [f"S{n}_re", f"S{n}_im", f"S{n}_abs"]
            cols += [ps.real, ps.imag, np.abs(ps)]
            errors[(kind.value, n)] = float(np.max(np.abs(ps - exact)))
        _write_csv(out / f"partial_sum_{kind.value}.csv", header, zip(*cols))
    _write_csv(out / "partial_sum_error.csv", ["kind", "J", "sup_error"],
               [[k, n, v] for (k, n), v in sorted(errors.items())])

    plt = _figure()
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for ax, (name, v) in zip(axes, symbols.items()):
        ax.plot(xi, v.real, label="Re")
        ax.plot(xi, v.imag, label="Im")
        ax.plot(xi, np.abs(v), "k--", label="|.|")
        ax.set_title(name)
        ax.set_xlabel("xi")
        ax.legend()
    _save_svg(fig, out / "symbols.svg")
    plt.close(fig)

    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    j = np.arange(-J, J + 1)
    for ax, kind in zip(axes, BoundaryKind):
        ax.stem(j, np.abs(coeffs[kind].c(j)))
        ax.set_yscale("log")
        ax.set_title(f"|c_j| ({kind.value})")
        ax.set_xlabel("j")
    _save_svg(fig, out / "coeffs.svg")
    plt.close(fig)

    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for ax, kind in zip(axes, BoundaryKind):
        exact = 1 / s.L_c if kind is BoundaryKind.DIRICHLET else s.L_k
        ax.plot(xi, np.abs(exact), "k", lw=2, label="closed form")
        for n in partial:
            ax.plot(xi, np.abs(coeffs[kind].partial_sum(xi, n)), lw=0.8, label=f"J={n}")
        ax.set_title(f"partial sums ({kind.value})")
        ax.set_xlabel("xi")
        ax.legend(fontsize=7)
    _save_svg(fig, out / "partial_sums.svg")
    plt.close(fig)
    return errors


def validate_cross(cfg: ProblemConfig, R: int | None = None, window: int = 50,
                   doubling: bool = False, tol: float = 1e-10) -> dict:
    """Compare the Toeplitz solution with the direct lattice simulation.

    The Toeplitz system is solved on a long half-line (so that its own
    truncation is negligible); traces are compared on the first ``window``
    sites next to the edge.
    """
    R = default_radius(cfg, tol) if R is None else R
    t0 = time.perf_counter()
    N = max(window, 2 * R)
    p = prepare(cfg, N)
    if cfg.kind is BoundaryKind.DIRICHLET:
        rep = solve_dirichlet_with_tip(cfg, p.coeffs, p.greens, N)
    else:
        rep = solve_half_line(cfg, p.coeffs, build_forcing(cfg, N, p.coeffs))
    t_toep = time.perf_counter() - t0

    t0 = time.perf_counter()
    fld = solve_direct(cfg, R, tol=tol, check_truncation=False)
    xd, u00d = extract_traces(fld, cfg, window)
    t_dir = time.perf_counter() - t0
    xt = rep.solution.data[:window]
    report = {
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "R": int(R),
        "N": int(N),
        "window": int(window),
        "trace_diff": float(np.linalg.norm(xt - xd.data) / np.linalg.norm(xd.data)),
        "u00_toeplitz": None if rep.u00 is None else [rep.u00.real, rep.u00.imag],
        "u00_direct": None if u00d is None else [u00d.real, u00d.imag],
        "u00_diff": None if u00d is None else abs(rep.u00 - u00d),
        "toeplitz_residual": rep.residual_norm,
        "timings": {"toeplitz": t_toep, "direct": t_dir},
    }
    if doubling:
        fld2 = solve_direct(cfg, 2 * R, tol=tol, check_truncation=False)
        x2, _ = extract_traces(fld2, cfg, window)
        report["doubling_diff"] = float(np.linalg.norm(x2.data - xd.data)
                                        / np.linalg.norm(x2.data))
    return report


def intact_smoke(cfg: ProblemConfig, R: int = 30) -> float:
    """Largest scattered-field value on an intact lattice (should be ~0)."""
    fld = solve_direct(cfg, R, defect=False, check_truncation=False)
    return float(np.max(np.abs(fld.u)))
