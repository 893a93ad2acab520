import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyprad.model_functions import bump_profile, point_function, psi_qd1_point, psi_tilde
from hyprad.quadrature import QuadConfig
from hyprad.spaces import SpaceParams, derive_constants, enumerate_series
from hyprad.transforms import (
    ConvergenceError,
    GridSeries,
    abel,
    apply_D_downstairs,
    laplacian_profile,
    radial_laplacian,
    radon_full,
    radon_reduced,
    radon_reduced_series,
    sphere_factor,
)

P104 = SpaceParams(1, 0, 4)
P204 = SpaceParams(2, 0, 4)
P102 = SpaceParams(1, 0, 2)


def test_grid_series_validation():
    with pytest.raises(ValueError):
        GridSeries(np.array([0.0, 0.0]), np.zeros(2), np.zeros(2))
    with pytest.raises(ValueError):
        GridSeries(np.array([0.0, 1.0]), np.zeros(3), np.zeros(2))
    assert GridSeries(np.linspace(0, 1, 11), np.zeros(11), np.zeros(11)).spacing() == pytest.approx(0.1)
    with pytest.raises(ValueError):
        GridSeries(np.array([0.0, 0.1, 0.3]), np.zeros(3), np.zeros(3)).spacing()


def test_reduced_exact_value_real():
    # at s = 0 the integral is int_0^inf 2v (1 + v^2)^(-3/2) dv = 2
    assert radon_reduced(P104, psi_tilde(P104, 1), 0.0) == pytest.approx(2.0, rel=1e-12)


def test_reduced_exact_value_complex():
    # int int 8 v^3 (1 + v^2 + z^2)^(-4) dv dz = pi / 6
    assert radon_reduced(P204, psi_tilde(P204, 3), 0.0) == pytest.approx(math.pi / 6, rel=1e-11)


def test_reduced_mu_zero_is_pure_exponential():
    prof = psi_tilde(P104, 1)
    ratios = [radon_reduced(P104, prof, s) / math.exp(-s) for s in (-1.0, 0.0, 1.0)]
    assert max(ratios) - min(ratios) <= 1e-6 * ratios[1]


def test_reduced_mpmath_oracle():
    # mpmath: e^-0.7 int_{-sinh 0.7}^inf (1 + v^2)^(-3/2) dv
    assert radon_reduced(P102, psi_tilde(P102, 2), 0.7) == pytest.approx(0.796705459992875046594335520749, rel=1e-10)


def test_reduced_rejects_p_geq_q():
    with pytest.raises(ValueError):
        radon_reduced(SpaceParams(1, 2, 1), bump_profile(1.0), 0.0)


def test_reduced_rejects_weak_certificate():
    with pytest.raises(ConvergenceError):
        radon_reduced(P104, psi_tilde(P104, 1, N=2), 0.0)


def test_full_matches_reduced():
    prof = psi_tilde(P102, 2)
    full = radon_full(P102, point_function(prof), 0.7)
    assert full == pytest.approx(2 * math.pi * 0.796705459992875046594335520749, rel=1e-8)
    assert sphere_factor(P102) == pytest.approx(2 * math.pi)


def test_full_dimension_limit():
    with pytest.raises(ValueError):
        radon_full(SpaceParams(2, 0, 3), lambda x: 0.0 * x.coords[..., 0], 0.0)


def test_full_support_example():
    f = point_function(bump_profile(0.5))
    assert radon_full(SpaceParams(1, 2, 1), f, 1.0, support_radius=0.5) == 0.0


def test_full_bump_inside_support_positive():
    f = point_function(bump_profile(1.0))
    assert radon_full(SpaceParams(1, 2, 1), f, 0.3, support_radius=1.0) > 0.0


def test_cuspidal_generating_function():
    params = SpaceParams(1, 1, 1)
    ser = [s for s in enumerate_series(params, 1) if s.lam > 0][0]
    val = radon_full(params, psi_qd1_point(params, ser), 0.0)
    ref = radon_full(params, psi_qd1_point(params, ser, absolute=True), 0.0)
    assert abs(val) <= 1e-6 * ref
    assert ref == pytest.approx(math.pi, rel=1e-9)


def test_abel():
    assert abel(P104, 3.0, 0.0) == 3.0
    prof = psi_tilde(P104, 1)
    a0 = abel(P104, radon_reduced(P104, prof, 0.0), 0.0)
    for s in (-0.8, 0.6, 1.3):
        assert abel(P104, radon_reduced(P104, prof, s), s) / a0 == pytest.approx(math.exp(s), rel=1e-6)


def test_deterministic_and_order_stable():
    prof = bump_profile(1.5, 2)
    s = np.linspace(-1.0, 1.0, 5)
    first = radon_reduced_series(P204, prof, s)
    again = radon_reduced_series(P204, prof, s, workers=3)
    assert np.array_equal(first.values, again.values)
    assert np.array_equal(first.error_estimates, again.error_estimates)


def test_radial_laplacian_constant():
    assert radial_laplacian(P104, lambda s: np.ones_like(s), 0.7) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("params, lam, s", [(P104, 1, 0.7), (P204, 3, 0.5), (P204, 3, 0.0)])
def test_radial_laplacian_eigen(params, lam, s):
    rho = float(derive_constants(params).rho_q)

    def phi(x):
        return np.cosh(x) ** (-lam - rho)

    assert radial_laplacian(params, phi, s) == pytest.approx((lam ** 2 - rho ** 2) * phi(s), rel=1e-6)


def test_radial_laplacian_underflow():
    with pytest.raises(ValueError):
        radial_laplacian(P104, np.cosh, 1e20, h_step=1e-6)


def test_laplacian_profile_mode_zero_only():
    with pytest.raises(ValueError):
        laplacian_profile(P104, bump_profile(1.0, 2))


def _series(f, h=0.01, n=201, lo=-1.0):
    s = lo + h * np.arange(n)
    return GridSeries(s, f(s), np.zeros(n))


def test_D_annihilates_noncuspidal_exponential():
    out = apply_D_downstairs(P104, _series(lambda s: np.exp(s)))
    assert np.max(np.abs(out.values)) <= 1e-5 * math.exp(1.0)


def test_D_annihilates_constants():
    out = apply_D_downstairs(P104, _series(lambda s: 3.0 + 0 * s))
    assert np.max(np.abs(out.values)) <= 1e-8


def test_D_on_doubled_exponential():
    out = apply_D_downstairs(P104, _series(lambda s: np.exp(2 * s)))
    expected = 12.0 * np.exp(2 * out.s_values)
    assert np.allclose(out.values, expected, rtol=1e-4)


def test_D_trims_by_stride():
    series = _series(lambda s: np.exp(2 * s))
    out = apply_D_downstairs(P104, series, stride=3)
    assert len(out) == len(series) - 2 * 2 * 3 * 2


def test_D_grid_checks():
    with pytest.raises(ValueError):
        apply_D_downstairs(P104, _series(np.exp, h=0.05, n=101))
    with pytest.raises(ValueError):
        apply_D_downstairs(P104, _series(np.exp, n=8))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 2.5), st.floats(-2.0, 2.0))
def test_D_kills_every_listed_exponent(lam, sign):
    series = _series(lambda s: np.exp(math.copysign(lam, sign) * s))
    out = apply_D_downstairs(P104, series, lambdas=[lam])
    # exact up to rounding amplified by the fourth-order difference stencil
    assert np.max(np.abs(out.values)) <= 1e-5 * np.max(np.abs(series.values))


def test_intertwining_spot_check():
    params = P104
    prof = bump_profile(1.0)
    lap = laplacian_profile(params, prof)
    quad = QuadConfig(adaptive=False, panels=64)
    rho = float(derive_constants(params).rho_q)
    h = 0.01

    def A(p, s):
        return abel(params, radon_reduced(params, p, s, quad), s)

    for s in (-0.4, 0.3):
        vals = np.array([A(prof, s + k * h) for k in (-2, -1, 0, 1, 2)])
        d2 = np.dot([-1, 16, -30, 16, -1], vals) / (12 * h * h)
        assert A(lap, s) == pytest.approx(d2 - rho ** 2 * vals[2], rel=1e-5)
