from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hyprad.spaces import (
    InvalidSpaceError,
    SpaceParams,
    derive_constants,
    enumerate_series,
    mu_of,
    noncuspidal_parameters,
)


def test_constants_real_rank_one():
    dc = derive_constants(SpaceParams(1, 0, 3))
    assert dc.rho_q == Fraction(3, 2)
    assert dc.rho_1 == Fraction(3, 2)
    assert dc.beta == 2
    assert dc.k0 == 1


def test_constants_octonionic():
    dc = derive_constants(SpaceParams(8, 0, 1))
    assert (dc.rho_q, dc.rho_1, dc.beta, dc.k0) == (11, 11, 7, 3)


def test_constants_p_equals_q():
    dc = derive_constants(SpaceParams(2, 3, 3))
    assert (dc.rho_q, dc.rho_1, dc.nstar_dim) == (7, 1, 7)
    assert dc.beta is None and dc.k0 is None


@pytest.mark.parametrize("bad", [(3, 0, 1), (1, 0, 0), (1, -1, 2), (8, 1, 1), (2, 0, 1, False)])
def test_invalid_spaces(bad):
    with pytest.raises(InvalidSpaceError):
        SpaceParams(*bad)


def test_series_complex_four():
    series = enumerate_series(SpaceParams(2, 0, 4), 6)
    assert [s.lam for s in series] == [1, 3, 5]
    assert [s.mu for s in series] == [-2, 0, 2]
    assert [(s.spherical, s.exceptional, s.cuspidal) for s in series] == [
        (True, True, False), (True, False, False), (False, False, True)]


def test_series_octonionic():
    spherical = [(s.lam, s.mu) for s in enumerate_series(SpaceParams(8, 0, 1), 4) if s.spherical]
    assert spherical == [(1, -2), (3, 0)]


def test_series_q_d_one():
    series = enumerate_series(SpaceParams(1, 1, 1), 3)
    assert [s.lam for s in series] == [-3, -1, 1, 3]
    assert all(s.cuspidal and not s.spherical for s in series)
    assert [s.m for s in series] == [-4, -2, 2, 4]


def test_noncuspidal_examples():
    assert noncuspidal_parameters(SpaceParams(8, 0, 1)) == [3, 1]
    assert noncuspidal_parameters(SpaceParams(1, 0, 2)) == []
    assert noncuspidal_parameters(SpaceParams(1, 0, 6)) == [2]


def test_non_projective_odd_series():
    params = SpaceParams(1, 0, 6, projective=False)
    series = enumerate_series(params, 4)
    assert [s.lam for s in series] == [1, 2, 3, 4]
    odd = series[0]
    assert odd.mu == -1 and not odd.spherical and not odd.cuspidal
    assert noncuspidal_parameters(params) == [2, 1]


spaces = st.builds(
    lambda d, p, q: SpaceParams(d, p, q),
    st.sampled_from([1, 2, 4]),
    st.integers(0, 4),
    st.integers(1, 4),
).filter(lambda s: s.p + s.q <= 8)


@given(spaces)
def test_cuspidal_xor_spherical(params):
    for s in enumerate_series(params, 12):
        assert s.cuspidal != s.spherical
        if params.real_q1:
            assert (abs(s.lam) + derive_constants(params).rho_q) % 2 == 0
            continue
        assert s.lam == Fraction(params.d * (params.q - params.p), 2) - 1 + s.mu


@given(spaces)
def test_spherical_iff_large_gap(params):
    has = any(s.spherical for s in enumerate_series(params, 40))
    assert has == (params.d * (params.q - params.p) > 2)


@given(spaces)
def test_noncuspidal_matches_spherical(params):
    spherical = sorted(s.lam for s in enumerate_series(params, 40) if s.spherical)
    assert sorted(noncuspidal_parameters(params)) == spherical


@given(spaces)
def test_rho_difference(params):
    dc = derive_constants(params)
    assert dc.rho_q - dc.rho_1 == min(params.d * params.p, params.d * params.q)


@given(spaces)
def test_exponent_identity(params):
    dc = derive_constants(params)
    for s in enumerate_series(params, 12):
        if s.spherical:
            assert dc.rho_1 - params.d + mu_of(params, s.lam) == s.lam


@given(spaces)
def test_nstar_dim(params):
    dc = derive_constants(params)
    d, p, q = params.d, params.p, params.q
    expected = d * q + d * (p - q) + d - 1 if p >= q else d * p + d * (q - p) + d - 1
    assert dc.nstar_dim == expected
