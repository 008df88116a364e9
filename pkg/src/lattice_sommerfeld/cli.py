"""Command-line driver.

Subcommands write their artefacts into ``--out-dir`` and print a JSON
summary on stdout.  With ``--check`` the exit status is 1 when any of the
subcommand's acceptance checks fails.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .errors import LatticeSommerfeldError
from .green import build_green_table, delta_identity_residual
from .harness import (convergence_checks, emit_kernel_report, intact_smoke, run_convergence,
                      validate_cross, write_records)
from .lattice import Frequency, ProblemConfig, load_config
from .toeplitz import solve_problem


def _parse_eps_list(text):
    return [float(v) for v in text.replace(",", " ").split()]


def _parse_angle(text):
    """Angle in radians; also accepts forms like 'pi/3'."""
    t = text.strip().lower().replace(" ", "")
    if "pi" in t:
        num, _, den = t.partition("/")
        num = num.replace("*", "").replace("pi", "") or "1"
        return float(num) * math.pi / (float(den) if den else 1.0)
    return float(t)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key=value problem file")
    common.add_argument("--eps", type=float, help="lattice spacing")
    common.add_argument("--omega1", type=float, help="real part of the frequency")
    common.add_argument("--omega2", type=float, help="imaginary part of the frequency")
    common.add_argument("--theta", type=_parse_angle, help="incidence angle (rad, or 'pi/3')")
    common.add_argument("--kind", choices=["d", "n", "D", "N"], help="Dirichlet or Neumann")
    common.add_argument("--extent", type=float, help="half-line length X")
    common.add_argument("--out-dir", type=Path, default=Path("out"))
    common.add_argument("--check", action="store_true",
                        help="exit non-zero if an acceptance check fails")

    p = argparse.ArgumentParser(prog="lattice-sommerfeld", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("green", parents=[common], help="tabulate the lattice Green's function")
    g.add_argument("--xmax", type=int, default=20)
    g.add_argument("--ymax", type=int, default=20)

    k = sub.add_parser("kernel", parents=[common], help="kernel symbol/coefficient report")
    k.add_argument("--J", type=int, default=40)

    s = sub.add_parser("solve", parents=[common], help="one truncated Toeplitz solve")
    s.add_argument("--tip", choices=["coupled", "direct", "zero"], default="coupled")

    c = sub.add_parser("converge", parents=[common], help="convergence study e(eps)")
    c.add_argument("--eps-list", type=_parse_eps_list, default=[0.4, 0.2, 0.1, 0.05])
    c.add_argument("--pairing", choices=["minus", "paired"], default="minus")
    c.add_argument("--workers", type=int, default=1)

    v = sub.add_parser("validate", parents=[common], help="Toeplitz vs direct simulation")
    v.add_argument("--radius", type=int, help="direct-simulation box half-width")
    v.add_argument("--window", type=int, default=50)
    v.add_argument("--doubling", action="store_true")
    return p


_DEFAULTS = {
    "green": dict(eps=0.1, omega1=1.0, omega2=0.1),
    "kernel": dict(eps=1.0, omega1=0.5, omega2=0.05),
}


def config_from_args(args) -> ProblemConfig:
    base = load_config(args.config).to_dict() if args.config else {}
    d = {"eps": 0.2, "omega_re": 1.0, "omega_im": 0.1, "theta": math.pi / 3, "kind": "D",
         "extent_X": 76.0}
    for key, val in _DEFAULTS.get(args.command, {}).items():
        d[{"omega1": "omega_re", "omega2": "omega_im"}.get(key, key)] = val
    d.update(base)
    overrides = {"eps": args.eps, "omega_re": args.omega1, "omega_im": args.omega2,
                 "theta": args.theta, "kind": args.kind, "extent_X": args.extent}
    d.update({k: v for k, v in overrides.items() if v is not None})
    if isinstance(d["kind"], str):
        d["kind"] = d["kind"].upper()
    return ProblemConfig.from_dict(d)


def _cmd_green(cfg, args):
    n = max(args.xmax, args.ymax)
    table = build_green_table(cfg.w2, n, n)
    table.to_csv(args.out_dir / "green_table.csv")
    ext = min(20, n - 1)
    res = delta_identity_residual(table, ext)
    sym = float(np.max(np.abs(table.values - table.values.T)))
    summary = {"w2": [cfg.w2.real, cfg.w2.imag], "delta_residual": res, "symmetry": sym,
               "fft_nodes": table.n_nodes}
    return summary, {"delta_identity": res < 1e-9, "symmetry": sym < 1e-12}


def _cmd_kernel(cfg, args):
    errors = emit_kernel_report(cfg, args.out_dir, J=args.J)
    checks = {}
    for kind in ("D", "N"):
        seq = [v for (k, _), v in sorted(errors.items(), key=lambda kv: kv[0][1]) if k == kind]
        checks[f"partial_sums_decrease_{kind}"] = bool(np.all(np.diff(seq) < 0))
    summary = {"sup_errors": {f"{k}{n}": v for (k, n), v in sorted(errors.items())}}
    return summary, checks


def _cmd_solve(cfg, args):
    tip = args.tip if cfg.kind.value == "D" else "zero"
    rep = solve_problem(cfg, tip=tip)
    rep.extra["config_hash"] = cfg.config_hash()
    rep.to_json(args.out_dir / "solve_report.json")
    summary = {"N": rep.N, "residual_norm": rep.residual_norm,
               "condition_estimate": rep.condition_estimate, "method": rep.method,
               "u00": None if rep.u00 is None else [rep.u00.real, rep.u00.imag]}
    return summary, {"residual": rep.residual_norm < 1e-10}


def _cmd_converge(cfg, args):
    recs = run_convergence(cfg, args.eps_list, pairing=args.pairing, workers=args.workers)
    write_records(recs, args.out_dir)
    for r in recs:
        print(json.dumps(r.to_dict(), sort_keys=True))
    return {"e_eps": [r.e_eps for r in recs]}, convergence_checks(recs)


def _cmd_validate(cfg, args):
    rep = validate_cross(cfg, R=args.radius, window=args.window, doubling=args.doubling)
    rep["intact_max"] = intact_smoke(cfg)
    (args.out_dir / "validate.json").write_text(json.dumps(rep, indent=2, sort_keys=True))
    checks = {"trace_diff": rep["trace_diff"] < 1e-6, "intact": rep["intact_max"] < 1e-12}
    if rep.get("u00_diff") is not None:
        checks["u00"] = rep["u00_diff"] < 1e-6
    if "doubling_diff" in rep:
        checks["doubling"] = rep["doubling_diff"] < 1e-8
    return rep, checks


COMMANDS = {"green": _cmd_green, "kernel": _cmd_kernel, "solve": _cmd_solve,
            "converge": _cmd_converge, "validate": _cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        args.out_dir.mkdir(parents=True, exist_ok=True)
        summary, checks = COMMANDS[args.command](cfg, args)
    except LatticeSommerfeldError as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}), file=sys.stderr)
        return 2
    summary = {"command": args.command, "config": cfg.to_dict(),
               "config_hash": cfg.config_hash(), **summary, "checks": checks}
    print(json.dumps(summary, sort_keys=True, default=str))
    if args.check and not all(checks.values()):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
