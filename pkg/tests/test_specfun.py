import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyprad.quadrature import QuadConfig
from hyprad.specfun import (
    Hyp2F1Args,
    beta_fn,
    gamma_ln,
    gauss_2f1,
    gr_integral_closed,
    gr_integral_numeric,
    legendre_p,
    sphere_area,
)

TIGHT = QuadConfig(rel_tol=1e-12, abs_tol=1e-300)


# reference values from mpmath at 30 digits
@pytest.mark.parametrize("x, expected", [
    (1.0, 0.0),
    (0.5, 0.572364942924700087071713675677),
    (10.0, math.log(362880.0)),
    (1e-3, 6.90717888538385366168368145865),
    (1e3, 5905.22042320918121182607691236),
    (3.7, 1.42807232666538812920049835255),
])
def test_gamma_ln(x, expected):
    assert gamma_ln(x) == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_gamma_ln_rejects_nonpositive():
    with pytest.raises(ValueError):
        gamma_ln(0.0)


@given(st.floats(1e-3, 170.0))
def test_gamma_ln_matches_math(x):
    assert gamma_ln(x) == pytest.approx(math.lgamma(x), rel=1e-12, abs=1e-13)


def test_beta_exact_values():
    assert beta_fn(1, 1) == pytest.approx(1.0, abs=1e-14)
    assert beta_fn(2, 1) == pytest.approx(0.5, abs=1e-14)


def test_sphere_area():
    assert sphere_area(0) == 1.0
    assert sphere_area(1) == pytest.approx(2.0)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


@pytest.mark.parametrize("args, expected", [
    ((0, 1, 3, 0.7), 1.0),
    ((-1, 2, 4, 0.5), 0.75),
    ((0.5, 0.5, 1.5, 0.5), math.pi * math.sqrt(2) / 4),
    ((-2, 3, 2.5, 0.3), 0.403428571428571446081231702660),
    ((1.2, 0.3, 2.1, 0.9), 1.32902470478784378947921937399),
    ((0.4, 1.7, 3.2, -0.6), 0.898389475376088780908269535989),
])
def test_gauss_2f1_values(args, expected):
    assert gauss_2f1(Hyp2F1Args(*args)) == pytest.approx(expected, rel=1e-12)


def test_gauss_2f1_arcsin_identity_by_direct_sum():
    z = 0.5
    direct, term = 0.0, 1.0
    for n in range(200):
        direct += term
        term *= (0.5 + n) ** 2 / ((1.5 + n) * (n + 1)) * z
    assert gauss_2f1(Hyp2F1Args(0.5, 0.5, 1.5, z)) == pytest.approx(direct, rel=1e-14)


def test_gauss_2f1_domain_errors():
    with pytest.raises(ValueError):
        gauss_2f1(Hyp2F1Args(0.5, 0.5, -1.0, 0.2))
    with pytest.raises(ValueError):
        gauss_2f1(Hyp2F1Args(0.5, 0.5, 1.5, 1.0))
    # polynomial case is fine anywhere
    assert gauss_2f1(Hyp2F1Args(-1, 2, 4, 3.0)) == pytest.approx(1 - 2 * 3.0 / 4)


@pytest.mark.parametrize("mu", [0, -2, -4, -6, -8])
def test_kernel_2f1_is_polynomial_of_degree(mu):
    # 2F1(mu/2, 1 - mu/2; c; z) has degree -mu/2: the next finite difference vanishes
    deg = -mu // 2
    c = 2.5
    z = np.linspace(0.1, 0.9, deg + 4)
    vals = np.array([gauss_2f1(Hyp2F1Args(mu / 2, 1 - mu / 2, c, zi)) for zi in z])
    diff = np.diff(vals, deg + 1)
    assert np.max(np.abs(diff)) <= 1e-10 * np.max(np.abs(vals))
    if deg:
        assert abs(np.diff(vals, deg)[0]) > 1e-6


def test_legendre_trivial():
    assert legendre_p(0, 0, 0.3) == pytest.approx(1.0, abs=1e-15)
    assert legendre_p(0, 1, 0.3) == pytest.approx(0.3, rel=1e-14)


@pytest.mark.parametrize("order, degree, y, expected", [
    (-0.5, 0.5, 0.0, math.sqrt(2 / math.pi)),
    (0.3, 0.7, 0.2, 0.190855686302273531049481364302),
    (-0.25, 1.3, -0.4, -0.392422863998503913339124738139),
])
def test_legendre_values(order, degree, y, expected):
    assert legendre_p(order, degree, y) == pytest.approx(expected, rel=1e-10)


def test_legendre_domain():
    with pytest.raises(ValueError):
        legendre_p(0, 0, 1.0)


@pytest.mark.parametrize("mu, nu, s, expected", [
    (1, 1, 0, math.pi / 2),
    (1, 1, 1, 3.75981751691724018456294070826),
    (2, 2.5, -0.7, 0.129500332542369247790150106668),
    (1.5, 2, 0.4, 1.13745369410050779227939340830),
])
def test_gr_closed_and_numeric(mu, nu, s, expected):
    assert gr_integral_closed(mu, nu, s) == pytest.approx(expected, rel=1e-10)
    assert gr_integral_numeric(mu, nu, s, TIGHT) == pytest.approx(expected, rel=1e-10)


def test_gr_numeric_standard_integrals():
    assert gr_integral_numeric(1, 1, 0) == pytest.approx(math.pi / 2, abs=1e-10)
    assert gr_integral_numeric(1, 2, 0) == pytest.approx(math.pi / 4, abs=1e-10)


def test_gr_numeric_stable_under_refinement():
    a = gr_integral_numeric(1.5, 2, 0.4, QuadConfig(rel_tol=1e-10))
    b = gr_integral_numeric(1.5, 2, 0.4, QuadConfig(rel_tol=5e-11))
    assert a == pytest.approx(b, rel=1e-13)


def test_gr_domain():
    with pytest.raises(ValueError):
        gr_integral_closed(2.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        gr_integral_numeric(0.0, 1.0, 0.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.2, 4.0), st.floats(-2.0, 2.0))
def test_gr_identity_fuzz(mu, extra, s):
    nu = mu / 2 + extra
    closed = gr_integral_closed(mu, nu, s)
    numeric = gr_integral_numeric(mu, nu, s, TIGHT)
    assert closed == pytest.approx(numeric, rel=1e-8)
