import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_sommerfeld import HalfLineSeq, build_forcing, eval_symbols, kernel_coeffs
from lattice_sommerfeld.errors import BranchViolation, DegenerateRoot, WindowTooSmall
from lattice_sommerfeld.green import build_green_table
from lattice_sommerfeld.kernels import (discrete_symbol, forcing_window, kernel_zeros,
                                        symbol_bounds, tail_length, zero_q, zero_r)

EPS_SWEEP = (0.4, 0.2, 0.1, 0.05)


def test_zeros_at_zero_frequency():
    assert zero_q(0.0) == pytest.approx(2 - math.sqrt(3), abs=1e-15)
    assert zero_r(0.0) == pytest.approx(3 - 2 * math.sqrt(2), abs=1e-15)
    with pytest.raises(DegenerateRoot):
        kernel_zeros(0.0)  # z_h = 1


@pytest.mark.parametrize("w2", [0.0099 + 0.002j, 0.25 + 0.1j, 1.2 + 0.05j])
def test_zeros_are_roots_inside_disc(w2):
    zs = kernel_zeros(w2)
    s = eval_symbols(np.array([zs.z_h, zs.z_r, zs.z_q]), w2, check=False)
    assert abs(s.H[0]) < 1e-13 and abs(s.R[1]) < 1e-13 and abs(s.Q[2]) < 1e-13
    assert max(abs(zs.z_h), abs(zs.z_r), abs(zs.z_q)) < 1
    assert zs.radius_Lk == max(abs(zs.z_h), abs(zs.z_r))


def test_branch_conditions_on_annulus(make_cfg, rng):
    cfg = make_cfg(eps=0.2)
    zs = kernel_zeros(cfg.w2)
    a = zs.radius_Lc
    rad = np.exp(rng.uniform(np.log(a), -np.log(a), 10_000) * 0.999)
    z = rad * np.exp(1j * rng.uniform(-np.pi, np.pi, 10_000))
    s = eval_symbols(z, cfg.w2)
    assert np.all(s.h.real > 0) and np.all(s.r.real > 0)
    assert np.all(np.sign(s.h.imag) == np.sign(s.r.imag))


def test_branch_violation_on_cut():
    # real w2: H = -w2 < 0 at z = 1
    with pytest.raises(BranchViolation):
        eval_symbols(1.0, 0.5)
    with pytest.raises(BranchViolation):
        eval_symbols(0.0, 0.1 + 0.1j)


def test_symbol_product_identity():
    w2 = 0.04 + 0.01j
    z = np.exp(1j * np.linspace(-3, 3, 50))
    s = eval_symbols(z, w2)
    assert np.allclose(s.L_c * s.L_k, s.H / s.Q)
    assert np.allclose(s.h ** 2, s.R - 4)


@pytest.fixture(scope="module")
def coeff_setup():
    from lattice_sommerfeld import Frequency, ProblemConfig

    cfg = ProblemConfig(0.2, Frequency(1.0, 0.1), math.pi / 3)
    g = build_green_table(cfg.w2, 2000, 1)
    return cfg, g


def test_coefficients_even_and_neumann_identity(coeff_setup):
    cfg, g = coeff_setup
    cN = kernel_coeffs(cfg.with_(kind="N"), 100, g)
    assert cN.c(5) == cN.c(-5)
    two = cN.two_sided()
    assert np.array_equal(two, two[::-1])
    k0 = cN.k_half[0]
    assert abs(k0 - (-(1 + cfg.w2 * g(0, 0)) / (2 * cfg.eps))) < 1e-13
    cD = kernel_coeffs(cfg, 100, g)
    n = np.arange(6)
    assert np.allclose(g.row(1, 6), 0.5 * ((n == 0) - cD.c(n)), atol=1e-15)
    assert cD.k_half[3] == pytest.approx(0.5 * cfg.eps * cD.c(3))


@pytest.mark.parametrize("kind", ["D", "N"])
def test_partial_sum_matches_closed_form(coeff_setup, kind):
    cfg, g = coeff_setup
    c = kernel_coeffs(cfg.with_(kind=kind), 1200, g)
    s = eval_symbols(np.exp(-1j), cfg.w2)
    exact = 1 / s.L_c if kind == "D" else s.L_k
    assert abs(c.partial_sum(1.0) - exact) < 1e-10


def test_coefficient_window(coeff_setup):
    cfg, g = coeff_setup
    c = kernel_coeffs(cfg, 10, g)
    with pytest.raises(WindowTooSmall):
        c.c(11)
    with pytest.raises(WindowTooSmall):
        kernel_coeffs(cfg, 5000, g)
    with pytest.raises(ValueError):
        kernel_coeffs(cfg.with_(eps=0.1), 10, g)


def test_symbol_signs_and_scaled_bounds_stable():
    from lattice_sommerfeld import Frequency, ProblemConfig

    xi = np.linspace(-np.pi, np.pi, 4096)
    lows, highs = [], []
    for e in EPS_SWEEP:
        cfg = ProblemConfig(e, Frequency(1.0, 0.1), 1.0)
        assert np.min(discrete_symbol(cfg)(xi).real) > 0
        assert np.max(discrete_symbol(cfg.with_(kind="N"))(xi).real) < 0
        lo, hi = symbol_bounds(cfg, weighted=True)
        lows.append(lo)
        highs.append(hi)
    # Sobolev-weighted bounds do not drift with eps
    assert max(highs) / min(highs) < 1.05
    assert max(lows) / min(lows) < 1.1


@settings(max_examples=30, deadline=None)
@given(eps=st.floats(0.05, 0.8), w2i=st.floats(0.02, 0.5))
def test_neumann_symbol_real_part_negative(eps, w2i):
    from lattice_sommerfeld import Frequency, ProblemConfig

    cfg = ProblemConfig(eps, Frequency(1.0, w2i), 1.0, "N")
    lo, hi = symbol_bounds(cfg, n=512)
    assert hi > 0
    sym = discrete_symbol(cfg)(np.linspace(-np.pi, np.pi, 512))
    assert np.all(sym.real < 0)


def test_tail_length_and_forcing(coeff_setup):
    cfg, g = coeff_setup
    L = tail_length(cfg, tol=1e-12)
    rho = kernel_zeros(cfg.w2).decay_rate
    assert L * (rho + min(cfg.kappa_x.imag, 0)) > math.log(1e12)
    N = 50
    J = forcing_window(cfg, N)
    for kind in "DN":
        c = kernel_coeffs(cfg.with_(kind=kind), J, g)
        f = build_forcing(cfg.with_(kind=kind), N, c)
        assert isinstance(f, HalfLineSeq) and f.N == N
        assert np.all(np.isfinite(f.data))
    with pytest.raises(WindowTooSmall):
        build_forcing(cfg, N, kernel_coeffs(cfg, 60, g))
    with pytest.raises(ValueError):
        build_forcing(cfg, N, kernel_coeffs(cfg.with_(kind="N"), J, g))


def test_half_line_sequence():
    s = HalfLineSeq(0.5, np.arange(4.0))
    assert s.indices.tolist() == [-1, -2, -3, -4]
    assert s.points.tolist() == [-0.5, -1.0, -1.5, -2.0]
    assert s.truncate(2).N == 2
