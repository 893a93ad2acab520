import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyprad.geometry import (
    NStarCoords,
    Point,
    conj,
    form,
    hyperboloid_point,
    k_theta_a_t,
    nstar_embed,
    polar_coords,
    reduced_coords,
)
from hyprad.spaces import SpaceParams, derive_constants
from hyprad.verify import chart_norms


def zero_n(params):
    return nstar_embed(params, np.zeros(derive_constants(params).nstar_dim))


def test_conj():
    assert conj(np.array([1.0, 2.0, 3.0, 4.0]), 2).tolist() == [1, -2, 3, -4]
    assert conj(np.array([1.0, 2.0]), 1).tolist() == [1, 2]


def test_base_point():
    params = SpaceParams(2, 1, 2)
    x = hyperboloid_point(params, 0.0, zero_n(params))
    expected = np.zeros(2 * 5)
    expected[-2] = 1.0
    assert np.allclose(x.coords, expected, atol=0)


def test_pure_translation():
    params = SpaceParams(1, 1, 2)
    x = hyperboloid_point(params, 0.8, zero_n(params))
    expected = np.zeros(5)
    expected[0], expected[-1] = math.sinh(0.8), math.cosh(0.8)
    assert np.allclose(x.coords, expected, rtol=1e-15, atol=0)


def test_free_vector_example():
    params = SpaceParams(1, 0, 2)
    n = nstar_embed(params, np.array([math.sqrt(2), 0.0]))
    x = hyperboloid_point(params, 0.0, n)
    cosh2 = np.sum(x.second_block ** 2)
    assert cosh2 == pytest.approx(1 + 0.25 * 2 ** 2, rel=1e-14)


def test_embed_p_geq_q():
    n = nstar_embed(SpaceParams(1, 2, 1), np.array([0.7, -1.3]))
    assert n.v.tolist() == [0.7]
    assert n.u.tolist() == [-0.7, -1.3]
    n0 = nstar_embed(SpaceParams(1, 2, 1), np.zeros(2))
    assert not np.any(n0.u) and not np.any(n0.v)


def test_embed_p_less_q_complex():
    n = nstar_embed(SpaceParams(2, 0, 1), np.array([0.2, 0.5, 0.9]))
    assert n.u.shape == (0,)
    assert n.v.tolist() == [0.2, 0.5]
    assert n.w.tolist() == [0.9]


def test_embed_coupling_is_conjugate_reversal():
    params = SpaceParams(2, 2, 3)
    free = np.arange(1.0, derive_constants(params).nstar_dim + 1)
    n = nstar_embed(params, free)
    # u = (u1, u2) in C^2, v = (-conj(u2), -conj(u1), v')
    assert n.v[:4].tolist() == [-3.0, 4.0, -1.0, 2.0]


def test_embed_length_check():
    with pytest.raises(ValueError):
        nstar_embed(SpaceParams(1, 0, 2), np.zeros(3))


def test_hyperboloid_dimension_check():
    with pytest.raises(ValueError):
        hyperboloid_point(SpaceParams(1, 0, 2), 0.0, NStarCoords(np.zeros(1), np.zeros(2), np.zeros(0)))


def test_polar_base_point():
    params = SpaceParams(1, 1, 1)
    pol = polar_coords(hyperboloid_point(params, 0.0, zero_n(params)))
    assert pol.t == pytest.approx(0.0, abs=1e-15)
    assert pol.theta == pytest.approx(0.0, abs=1e-15)


def test_polar_round_trip():
    params = SpaceParams(2, 1, 2)
    pol = polar_coords(k_theta_a_t(params, math.pi / 3, 1.2))
    assert pol.t == pytest.approx(1.2, abs=1e-12)
    assert pol.theta == pytest.approx(math.pi / 3, abs=1e-12)


def test_polar_non_projective_keeps_sign():
    params = SpaceParams(1, 1, 1, projective=False)
    pol = polar_coords(k_theta_a_t(params, 2.5, 0.7))
    assert pol.theta == pytest.approx(2.5, abs=1e-12)
    assert pol.t == pytest.approx(0.7, abs=1e-12)


def test_polar_chart_example():
    params = SpaceParams(1, 0, 2)
    n = nstar_embed(params, np.array([0.9, 0.0]))
    x = hyperboloid_point(params, 0.5, n)
    pol = polar_coords(x)
    cos_cosh2 = (math.cos(pol.theta) * math.cosh(pol.t)) ** 2
    assert cos_cosh2 == pytest.approx((math.cosh(0.5) - 0.5 * math.exp(0.5) * 0.81) ** 2, rel=1e-12)


def test_reduced_trivial():
    red = reduced_coords(SpaceParams(1, 0, 2), 0.0, 0.0, 0.0, 0.0)
    assert (red.v, red.cosh2_t, red.cos2_cosh2) == (0.0, 1.0, 1.0)


def test_reduced_hand_example():
    red = reduced_coords(SpaceParams(1, 0, 2), 1.0, 0.0, 1.0, 0.0)
    v = -math.sinh(1) + math.e / 2
    assert red.v == pytest.approx(0.183939720585721160797761885081, rel=1e-14)
    assert red.cosh2_t == pytest.approx(1 + v * v, rel=1e-14)


def test_reduced_non_projective_signs():
    params = SpaceParams(1, 0, 2, projective=False)
    s, y = 0.4, 1.1
    n = nstar_embed(params, np.array([y, 0.0]))
    x = hyperboloid_point(params, s, n)
    red = reduced_coords(params, s, 0.0, y, 0.0)
    assert red.cos_cosh == pytest.approx(x.last[0], rel=1e-13)
    assert red.sinh_t == pytest.approx(x.coords[0], rel=1e-13)


all_spaces = st.sampled_from([
    SpaceParams(1, 0, 2), SpaceParams(2, 1, 3), SpaceParams(4, 0, 1), SpaceParams(1, 1, 4),
    SpaceParams(1, 2, 1), SpaceParams(2, 1, 1), SpaceParams(4, 2, 1), SpaceParams(1, 3, 3),
    SpaceParams(8, 0, 1),
])


@settings(max_examples=60, deadline=None)
@given(all_spaces, st.floats(-2.0, 2.0), st.integers(0, 2**32 - 1))
def test_form_and_chart_consistency(params, s, seed):
    free = np.random.default_rng(seed).normal(size=(5, derive_constants(params).nstar_dim))
    x = hyperboloid_point(params, s, nstar_embed(params, free))
    assert np.max(np.abs(form(x) + 1.0)) < 1e-10
    pol = polar_coords(x)
    red = reduced_coords(params, s, *chart_norms(params, s, free))
    cosh2 = np.cosh(pol.t) ** 2
    assert np.allclose(red.cosh2_t, cosh2, rtol=1e-10, atol=0)
    assert np.allclose(red.cos2_cosh2, (np.cos(pol.theta) * np.cosh(pol.t)) ** 2, rtol=1e-10, atol=1e-10)
    assert np.allclose(np.sum(x.second_block ** 2, axis=-1), cosh2, rtol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([SpaceParams(1, 2, 1), SpaceParams(2, 1, 1), SpaceParams(1, 3, 3)]),
       st.floats(-2.0, 2.0), st.integers(0, 2**32 - 1))
def test_support_inequality(params, s, seed):
    free = np.random.default_rng(seed).normal(size=(8, derive_constants(params).nstar_dim))
    x = hyperboloid_point(params, s, nstar_embed(params, free))
    assert np.all(np.sum(x.second_block ** 2, axis=-1) >= math.cosh(s) ** 2 * (1 - 1e-12))
