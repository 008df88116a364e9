import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lattice_sommerfeld import HalfLineSeq
from lattice_sommerfeld.sobolev import (GridSeq, dft, dft_samples, idft, norm_s, prolong,
                                        relative_error, restrict, restrict_half_line, weight)

complex_arrays = arrays(np.complex128, st.integers(1, 60),
                        elements=st.complex_numbers(max_magnitude=1e3, allow_nan=False,
                                                    allow_infinity=False))


def test_impulse_transform_and_norm():
    u = GridSeq(0.1, np.array([1.0 + 0j]))
    xi = np.linspace(-np.pi, np.pi, 9)
    assert np.allclose(dft(u)(xi), 1)
    assert norm_s(u, 0.0) == pytest.approx(math.sqrt(0.1), rel=1e-14)


def test_shift_theorem(rng):
    data = rng.normal(size=12) + 1j * rng.normal(size=12)
    xi = np.linspace(-np.pi, np.pi, 33)
    a = dft(GridSeq(0.2, data, -5))(xi)
    b = dft(GridSeq(0.2, data, -4))(xi)
    assert np.allclose(b, a * np.exp(-1j * xi), atol=1e-13)


def test_fft_samples_agree_with_direct_sum_and_invert(rng):
    u = GridSeq(0.3, rng.normal(size=20) + 1j * rng.normal(size=20), -20)
    xi, U = dft_samples(u, 64)
    assert np.allclose(U, dft(u)(xi), atol=1e-12)
    back = idft(U, 64, -20, 20, 0.3)
    assert np.max(np.abs(back.data - u.data)) < 1e-13


@settings(max_examples=50, deadline=None)
@given(data=complex_arrays, eps=st.floats(0.01, 1.0))
def test_parseval_and_monotonicity(data, eps):
    n0 = math.sqrt(eps * np.sum(np.abs(data) ** 2))
    m, z, p = (norm_s(data, s, eps) for s in (-0.5, 0.0, 0.5))
    assert z == pytest.approx(n0, rel=1e-13, abs=1e-300)
    assert m <= z * (1 + 1e-13) and z <= p * (1 + 1e-13)
    # equivalence constants from the weight extremes
    wmax = math.sqrt(1 + 4 / eps ** 2)
    assert p <= wmax ** 0.5 * z * (1 + 1e-13)
    assert m >= z / wmax ** 0.5 * (1 - 1e-13)


def test_weight_values():
    assert weight(0.0, 0.1) == 1
    assert weight(np.pi, 0.1) == pytest.approx(math.sqrt(1 + 400))


@pytest.mark.parametrize("eps", [0.4, 0.05])
def test_weight_sandwich(eps):
    xi = np.linspace(-np.pi, np.pi, 10_001)
    w = weight(xi, eps)
    b = np.sqrt(1 + xi ** 2 / eps ** 2)
    assert np.all(w <= b * (1 + 1e-15))
    assert np.all(w >= 2 / np.pi * b)
    inner = np.abs(xi) > 1e-3
    assert np.all(w[inner] ** 0.5 < b[inner] ** 0.5)


def test_restrict_and_prolong():
    r = restrict(lambda t: np.full_like(t, 3.0), 0.25, 8)
    assert np.all(r.data == 3) and r.indices.tolist() == list(range(-8, 0))
    lin = restrict(lambda t: 2 * t + 1, 0.25, 8)
    p = prolong(lin)
    t = np.linspace(-2.0, -0.25, 41)
    assert np.allclose(p(t), 2 * t + 1)
    # idempotence at nodes
    again = restrict(p, 0.25, 8)
    assert np.allclose(again.data, lin.data)
    h = restrict_half_line(lambda t: t, 0.5, 3)
    assert isinstance(h, HalfLineSeq) and h.data.tolist() == [-0.5, -1.0, -1.5]


def test_prolong_restrict_approximates_identity():
    f = lambda t: np.exp(-(t + 3) ** 2) * np.exp(2j * t)
    t = np.linspace(-6, -0.5, 2001)
    errs = []
    for eps in (0.2, 0.1, 0.05):
        p = prolong(restrict(f, eps, int(8 / eps)))
        errs.append(np.max(np.abs(p(t) - f(t))))
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] / errs[2] == pytest.approx(4, rel=0.2)


def test_restricted_norms_bounded_in_eps():
    f = lambda t: np.exp(-(t + 3) ** 2) * np.exp(1j * t)
    for s in (-0.5, 0.0, 0.5):
        vals = [norm_s(restrict(f, e, int(10 / e)), s) for e in (0.4, 0.2, 0.1, 0.05)]
        assert max(vals) / min(vals) < 1.2


def test_half_line_embedding_and_relative_error():
    h = HalfLineSeq(0.1, np.array([1.0, 2.0, 3.0], dtype=complex))
    g = GridSeq.from_half_line(h)
    assert g.start == -3 and g.data.tolist() == [3, 2, 1]
    assert norm_s(h, 0.0) == pytest.approx(norm_s(g, 0.0))
    assert relative_error(h, h) == 0
    with pytest.raises(ValueError):
        norm_s(h, 1.0)
    with pytest.raises(TypeError):
        norm_s(np.ones(3), 0.0)
    with pytest.raises(ValueError):
        GridSeq(0.1, np.ones(2)) - GridSeq(0.2, np.ones(2))
