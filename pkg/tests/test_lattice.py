import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_sommerfeld import (BoundaryKind, Frequency, LatticeSite, ProblemConfig,
                                dispersion_sigma, incident_wave, load_config,
                                macroscopic_coords, solve_wavenumber)
from lattice_sommerfeld.errors import ConfigError
from lattice_sommerfeld.lattice import dump_config

# mpmath findroot at 30 digits, omega = 1 + 0.05i, theta = pi/3, eps = 0.1
KAPPA_REF = 0.100025863587623073919039125896 + 0.00500390739303007055822937344222j


def test_wavenumber_matches_high_precision_root():
    kap = solve_wavenumber(Frequency(1.0, 0.05), math.pi / 3, 0.1)
    assert abs(kap - KAPPA_REF) < 1e-14


def test_wavenumber_small_eps_limit():
    # kappa / eps -> omega as eps -> 0
    om = Frequency(1.0, 0.1)
    errs = [abs(solve_wavenumber(om, math.pi / 5, e) / e - om.value) for e in (0.1, 0.05)]
    assert errs[1] < errs[0] / 3


@settings(max_examples=40, deadline=None)
@given(eps=st.floats(0.02, 1.0), w1=st.floats(0.2, 1.5), w2=st.floats(0.01, 0.6),
       theta=st.floats(0.05, math.pi / 2))
def test_wavenumber_solves_dispersion(eps, w1, w2, theta):
    cfg = ProblemConfig(eps, Frequency(w1, w2), theta)
    res = dispersion_sigma(cfg.kappa_x, cfg.kappa_y, cfg.w2)
    assert abs(res) < 1e-12
    assert cfg.kappa.imag > 0 and cfg.kappa.real > 0


def test_dispersion_symmetries():
    w2 = 0.01 + 0.002j
    kx, ky = 0.3 + 0.01j, 0.2 - 0.02j
    v = dispersion_sigma(kx, ky, w2)
    assert dispersion_sigma(ky, kx, w2) == pytest.approx(v)
    assert dispersion_sigma(-kx, ky, w2) == pytest.approx(v)
    assert dispersion_sigma(kx + 2 * np.pi, ky, w2) == pytest.approx(v)


def test_incident_wave_solves_lattice_helmholtz(make_cfg):
    cfg = make_cfg(eps=0.3, theta=0.7)
    x, y = np.meshgrid(np.arange(-5, 6), np.arange(-5, 6))
    u = lambda a, b: incident_wave(cfg, (a, b))
    lap = u(x + 1, y) + u(x - 1, y) + u(x, y + 1) + u(x, y - 1) - 4 * u(x, y)
    assert np.max(np.abs((lap + cfg.w2 * u(x, y)) / u(x, y))) < 1e-13
    assert incident_wave(cfg, LatticeSite(0, 0)) == 1


def test_boundary_kind_parse():
    assert BoundaryKind.parse("neumann") is BoundaryKind.NEUMANN
    assert BoundaryKind.parse("d") is BoundaryKind.DIRICHLET
    with pytest.raises(ConfigError):
        BoundaryKind.parse("robin")


@pytest.mark.parametrize("eps,w1", [(0.0, 1.0), (1.0, 3.0), (1.0, 2.0), (2.0, 1.0005)])
def test_config_rejects_bad_parameters(eps, w1):
    with pytest.raises(ConfigError):
        ProblemConfig(eps, Frequency(w1, 0.1), 1.0)


def test_frequency_requires_damping():
    with pytest.raises(ConfigError):
        Frequency(1.0, 0.0)


def test_theta_outside_domain_warns():
    with pytest.warns(UserWarning):
        ProblemConfig(0.2, Frequency(1.0, 0.1), 2.0)


def test_config_roundtrip_and_hash(tmp_path, make_cfg):
    cfg = make_cfg(eps=0.1, kind="N", theta=math.pi / 6)
    path = tmp_path / "p.cfg"
    dump_config(cfg, path)
    back = load_config(path)
    assert back == cfg
    assert back.config_hash() == cfg.config_hash()
    assert cfg.with_(eps=0.05).config_hash() != cfg.config_hash()
    assert len(cfg.config_hash()) == 16


def test_load_config_missing_key(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("theta = 1.0\n")
    with pytest.raises(ConfigError):
        load_config(p)


def test_window_and_macroscopic_coords(make_cfg):
    cfg = make_cfg(eps=0.1, extent=76.0)
    assert cfg.n_window == 760
    assert cfg.k == pytest.approx(cfg.kappa / 0.1)
    assert macroscopic_coords(LatticeSite(-3, 0), cfg) == pytest.approx((-0.3, 0.0))
    assert macroscopic_coords(LatticeSite(-3, 0), cfg.with_(kind="N")) == \
        pytest.approx((-0.3, 0.05))
