import math

import numpy as np
import pytest

from lattice_sommerfeld.continuum import (cauchy_reconstruction_error, check_factorization,
                                          continuum_residual, continuum_symbol,
                                          fourier_transform_numeric, minus_factor,
                                          nystrom_dirichlet, plus_factor,
                                          solve_continuum_trace, trace_derivative,
                                          trace_values, transform)
from lattice_sommerfeld.errors import OnCut

K = 1 + 0.1j
THETA = math.pi / 3
GRID = -np.linspace(0.05, 20, 400)

# Nystrom (graded Gauss panels) value at one of its nodes, k = 1 + 0.1i, theta = pi/3
NYSTROM_NODE = -2.0950125098376375
NYSTROM_VALUE = 0.649547294744099 - 0.23321389467303674j


def test_symbol_product_is_minus_quarter():
    xi = np.linspace(-4, 4, 81)
    prod = continuum_symbol(xi, K, "D") * continuum_symbol(xi, K, "N")
    assert np.allclose(prod, -0.25, atol=1e-15)


@pytest.mark.parametrize("kind", ["D", "N"])
def test_factorization_consistent(kind):
    assert check_factorization(K, kind) < 1e-13


@pytest.mark.parametrize("kind", ["D", "N"])
def test_factors_analytic_in_their_half_planes(kind):
    # plus factor: branch point at -k lies below the strip; minus factor: mirror image
    rect_up = (-3.0, 3.0, -0.05, 2.0)
    pts_up = [0.3 + 0.5j, -1.0 + 1.0j]
    assert cauchy_reconstruction_error(lambda z: plus_factor(z, K, kind), rect_up,
                                       pts_up) < 1e-8
    rect_dn = (-3.0, 3.0, -2.0, 0.05)
    pts_dn = [0.3 - 0.5j, -1.0 - 1.0j]
    assert cauchy_reconstruction_error(lambda z: minus_factor(z, K, kind), rect_dn,
                                       pts_dn) < 1e-8
    # a branch point inside the contour is detected
    assert cauchy_reconstruction_error(lambda z: plus_factor(z, K, kind), rect_dn,
                                       pts_dn) > 1e-3


def test_on_cut_raises():
    with pytest.raises(OnCut):
        continuum_symbol(np.array([-2.0]), 1.0 + 0j, "D")


@pytest.mark.parametrize("kind", ["D", "N"])
@pytest.mark.parametrize("xi", [0.0, 0.7, -1.3])
def test_closed_form_transform_matches_numeric(kind, xi):
    tr = solve_continuum_trace(K, THETA, kind, GRID)
    num = fourier_transform_numeric(tr, xi)
    assert abs(num - transform(xi, K, THETA, kind)) < 1e-9 * max(1, abs(num))


def test_neumann_derivative_matches_finite_difference():
    t = np.array([-0.7, -3.0, -9.0])
    h = 1e-5
    fd = (trace_values(t + h, K, THETA, "N") - trace_values(t - h, K, THETA, "N")) / (2 * h)
    assert np.allclose(trace_derivative(t, K, THETA, "N"), fd, rtol=1e-8)


def test_trace_edge_behaviour():
    t = -np.array([1e-6, 1e-8])
    d = trace_values(t, K, THETA, "D")
    n = trace_values(t, K, THETA, "N")
    # Dirichlet ~ tau^{-1/2}, Neumann ~ tau^{1/2}
    assert abs(d[1] / d[0]) == pytest.approx(10, rel=1e-3)
    assert abs(n[0] / n[1]) == pytest.approx(10, rel=1e-3)
    with pytest.raises(ValueError):
        trace_values(np.array([0.1]), K, THETA, "D")


@pytest.mark.slow
@pytest.mark.parametrize("kind,perturbed_min", [("D", 1e-3), ("N", 1e-2)])
def test_residual_exact_perturbed_zero(kind, perturbed_min):
    tr = solve_continuum_trace(K, THETA, kind, GRID)
    assert continuum_residual(tr) < 1e-10
    assert continuum_residual(tr.perturbed()) > perturbed_min
    assert continuum_residual(tr.zero()) == pytest.approx(1.0)


def test_nystrom_reference():
    sol = nystrom_dirichlet(K, THETA)
    i = int(np.argmin(np.abs(sol.nodes - NYSTROM_NODE)))
    assert abs(sol.values[i] - NYSTROM_VALUE) < 1e-12
    # independent of the closed form: same trace from a boundary integral solve
    mask = (sol.nodes > -10) & (sol.nodes < -0.5)
    exact = trace_values(sol.nodes[mask], K, THETA, "D")
    err = np.linalg.norm(sol.values[mask] - exact) / np.linalg.norm(exact)
    assert err < 1e-9  # observed 7e-12


def test_solve_rejects_undamped(tmp_path):
    with pytest.raises(ValueError):
        solve_continuum_trace(1.0 + 0j, THETA, "D", GRID)
    tr = solve_continuum_trace(K, THETA, "N", GRID[:5])
    tr.to_csv(tmp_path / "t.csv")
    assert len((tmp_path / "t.csv").read_text().splitlines()) == 6
