import math

import mpmath as mp
import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings
from hypothesis import strategies as st

from roughcyl import specfun
from roughcyl.errors import DomainError

mp.mp.dps = 40


def _mp_bessel(x):
    x = mp.mpf(x)
    return tuple(complex(v) for v in (mp.besselj(0, x), mp.besselj(1, x),
                                      mp.bessely(0, x), mp.bessely(1, x)))


# points straddle every regime boundary of the implementation
SAMPLE_X = [1e-8, 1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 3.7, 5.0, 7.999, 8.0, 8.001, 11.3,
            17.0, 24.999, 25.0, 25.001, 40.0, 99.5, 300.0, 1234.5, 1e4]


@pytest.mark.parametrize("x", SAMPLE_X)
def test_bessel01_against_arbitrary_precision(x):
    got = specfun.bessel01(np.array([x]))
    want = _mp_bessel(x)
    for g, w in zip(got, want):
        w = w.real
        # absolute error relative to the local envelope covers points near zeros
        envelope = max(abs(w), min(1.0, math.sqrt(2 / (math.pi * x))))
        assert abs(g[0] - w) <= 1e-12 * envelope


@pytest.mark.parametrize("x", SAMPLE_X)
def test_hankel2_0_relative_accuracy(x):
    want = complex(mp.hankel2(0, x))
    assert abs(specfun.hankel2_0(x) - want) <= 1e-10 * abs(want)


def test_hankel2_0_small_argument_form():
    x = 1e-6
    approx = 1 - (2j / np.pi) * np.log(specfun.GAMMA_EXP * x / 2)
    h = specfun.hankel2_0(x)
    assert abs(h - approx) <= 1e-6 * abs(h)


def test_gamma_exp_constant():
    assert specfun.GAMMA_EXP == pytest.approx(1.781072417990198, rel=1e-15)
    assert round(specfun.GAMMA_EXP, 5) == 1.78107


def test_hankel2_0_at_first_j0_zero_is_imaginary():
    h = specfun.hankel2_0(2.404825557695773)
    assert abs(h.real) < 1e-14
    assert abs(h.imag) > 0.5


def test_hankel2_0_prime_at_first_j1_zero():
    assert abs(specfun.hankel2_0_prime(3.8317059702075123).real) < 1e-14


def test_hankel2_0_prime_small_argument_limit():
    x = 1e-5
    assert specfun.hankel2_0_prime(x) == pytest.approx(-2j / (np.pi * x), rel=1e-6)


def test_values_at_one_and_two():
    j0, j1, y0, y1 = _mp_bessel(1.0)
    assert specfun.hankel2_0(1.0) == pytest.approx(j0 - 1j * y0, rel=1e-14)
    assert specfun.hankel1_1(1.0) == pytest.approx(j1 + 1j * y1, rel=1e-14)
    j0, j1, y0, y1 = _mp_bessel(2.0)
    assert specfun.hankel2_0_prime(2.0) == pytest.approx(-(j1 - 1j * y1), rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-6, max_value=1e3))
def test_derivative_identity(x):
    d = specfun.hankel2_0_prime(x)
    h1 = specfun.hankel2_1(x)
    assert abs(d + h1) <= 1e-10 * abs(h1)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3))
def test_wronskian_order_zero(x):
    j0, j1, y0, y1 = specfun.bessel01(np.array([x]))
    w = (j1 * y0 - j0 * y1)[0]
    assert w == pytest.approx(2 / (np.pi * x), rel=1e-10)


def test_wronskian_order_one_at_2_5():
    x = 2.5
    j0, j1, y0, y1 = (v[0] for v in specfun.bessel01(np.array([x])))
    # J1' = J0 - J1/x, Y1' = Y0 - Y1/x
    w = j1 * (y0 - y1 / x) - (j0 - j1 / x) * y1
    assert abs(w - 2 / (np.pi * x)) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-4, max_value=1e4))
def test_hankel_conjugate_pair(x):
    assert specfun.hankel1_1(x) == pytest.approx(np.conj(specfun.hankel2_1(x)), rel=1e-15)
    assert specfun.hankel1_0(x) == pytest.approx(np.conj(specfun.hankel2_0(x)), rel=1e-15)


@pytest.mark.parametrize("x", [0.3, 1.0, 6.0, 12.0, 31.0])
def test_hankel1_1_prime(x):
    want = complex(mp.diff(lambda t: mp.hankel1(1, t), x))
    assert specfun.hankel1_1_prime(x) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("x", [50.0, 80.0, 500.0, 5000.0])
def test_large_argument_asymptotics(x):
    approx = np.sqrt(2 / (np.pi * x)) * np.exp(-1j * (x - np.pi / 4))
    h = specfun.hankel2_0(x)
    assert abs(h - approx) <= 0.01 * abs(h)


def test_vectorised_shapes():
    x = np.linspace(0.5, 40, 12).reshape(3, 4)
    assert specfun.hankel2_0(x).shape == (3, 4)
    assert np.ndim(specfun.hankel2_0(3.0)) == 0


@pytest.mark.parametrize("bad", [0.0, -1.0, np.nan, np.inf])
def test_domain_errors(bad):
    for f in (specfun.hankel2_0, specfun.hankel2_0_prime, specfun.hankel1_1,
              specfun.hankel1_1_prime):
        with pytest.raises(DomainError):
            f(bad)


def test_complex_arguments_delegate():
    z = 3.0 - 0.4j
    assert specfun.hankel2_0(z) == pytest.approx(sc.hankel2(0, z), rel=1e-14)
    assert specfun.hankel2_0_prime(z) == pytest.approx(-sc.hankel2(1, z), rel=1e-14)


def test_elliptic_values():
    assert specfun.elliptic_paper_E(0.0) == pytest.approx(np.pi / 2, rel=1e-15)
    assert specfun.elliptic_paper_E(0.5) == pytest.approx(1.8540746773013719, rel=1e-12)


@pytest.mark.parametrize("chi", [0.1, 0.5, 0.9, 0.999, 1 - 1e-9])
def test_elliptic_against_defining_integral(chi):
    want = mp.quad(lambda b: 1 / mp.sqrt(1 - chi * mp.sin(b) ** 2), [0, mp.pi / 2])
    assert specfun.elliptic_paper_E(chi) == pytest.approx(float(want), rel=1e-12)


def test_elliptic_strictly_increasing():
    chi = np.linspace(0, 1 - 1e-12, 2001)
    assert np.all(np.diff(specfun.elliptic_paper_E(chi)) > 0)


def test_elliptic_complement_matches_parameter_form():
    m1 = np.logspace(-14, 0, 30)
    want = sc.ellipkm1(m1)
    assert np.allclose(specfun.elliptic_k_complement(m1), want, rtol=1e-13, atol=0)


@pytest.mark.parametrize("chi", [-0.1, 1.0, 1 - 1e-16, 2.0, np.nan])
def test_elliptic_domain(chi):
    with pytest.raises(DomainError):
        specfun.elliptic_paper_E(chi)
