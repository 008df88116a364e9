import numpy as np
import pytest

from lattice_sommerfeld.errors import WindowTooSmall
from lattice_sommerfeld.green import (build_green_table, decay_rate, delta_identity_residual,
                                      green_quadrature, green_reduced)

W2 = (0.1 * (1 + 0.1j)) ** 2

# torus trapezoid oracle, converged to 1e-14
FROZEN = {
    (0, 0): -0.6421080789474074 - 0.23456830095050793j,
    (1, 0): -0.390636145602488 - 0.23366669036618157j,
    (5, 3): -0.08555842980180874 - 0.2108600120076959j,
}


@pytest.mark.parametrize("site", sorted(FROZEN))
def test_reduced_matches_frozen_oracle(site):
    assert abs(green_reduced(*site, W2) - FROZEN[site]) < 1e-12


def test_quadrature_oracle_reproducible():
    assert abs(green_quadrature(1, 0, W2) - FROZEN[(1, 0)]) < 1e-11


def test_table_matches_reduced_and_symmetries():
    t = build_green_table(W2, 30, 30)
    for x, y in [(0, 0), (7, 2), (-4, 9), (12, -12)]:
        assert abs(t(x, y) - green_reduced(x, y, W2)) < 1e-13
    v = t.values
    assert np.max(np.abs(v - v.T)) < 1e-14
    assert t(-3, 5) == t(3, -5)
    assert abs(t(3, 5) - t(5, 3)) < 1e-14


def test_delta_identity_other_frequency():
    t = build_green_table((0.5 * (0.7 + 0.3j)) ** 2, 25, 25)
    assert delta_identity_residual(t, 20) < 1e-12


def test_exponential_decay_along_axis():
    w2 = (0.4 * (1 + 0.1j)) ** 2
    rho = decay_rate(w2)
    t = build_green_table(w2, 400, 0)
    x = np.arange(100, 400)
    slope = np.polyfit(x, np.log(np.abs(t.values[0, 100:400])), 1)[0]
    # algebraic prefactor biases the fit slightly
    assert slope == pytest.approx(-rho, rel=0.1)


def test_window_errors():
    t = build_green_table(W2, 10, 1)
    with pytest.raises(WindowTooSmall):
        t(20, 20)
    with pytest.raises(WindowTooSmall):
        t.row(2)
    with pytest.raises(WindowTooSmall):
        delta_identity_residual(t, 5)


def test_real_w2_rejected():
    with pytest.raises(ValueError):
        green_reduced(0, 0, 0.01)


def test_csv_export(tmp_path):
    t = build_green_table(W2, 3, 1)
    t.to_csv(tmp_path / "g.csv")
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "x,y,re,im" and len(lines) == 1 + 8
