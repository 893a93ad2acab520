"""Space parameters, structural constants and discrete-series bookkeeping.

A space is the triple ``(d, p, q)`` with ``d = dim_R F`` for F in
{R, C, H, O}.  All discrete-series parameters are kept as exact
:class:`fractions.Fraction` values (every parameter is an integer or a
half-integer), so classification never suffers from float drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

__all__ = [
    "InvalidSpaceError",
    "SpaceParams",
    "DerivedConstants",
    "SeriesParam",
    "derive_constants",
    "enumerate_series",
    "noncuspidal_parameters",
]

FIELD_DIMS = (1, 2, 4, 8)


class InvalidSpaceError(ValueError):
    """Raised for a (d, p, q, projective) combination that names no supported space."""


@dataclass(frozen=True)
class SpaceParams:
    d: int
    p: int
    q: int
    projective: bool = True

    def __post_init__(self):
        if self.d not in FIELD_DIMS:
            raise InvalidSpaceError(f"d must be one of {FIELD_DIMS}, got {self.d}")
        if self.p < 0:
            raise InvalidSpaceError(f"p must be >= 0, got {self.p}")
        if self.q < 1:
            raise InvalidSpaceError(f"q must be >= 1, got {self.q}")
        if self.d == 8 and (self.p, self.q) != (0, 1):
            raise InvalidSpaceError("the octonionic space exists only for (p, q) = (0, 1)")
        if not self.projective and self.d != 1:
            raise InvalidSpaceError("the non-projective variant is only defined for d = 1")

    @property
    def p_less_q(self) -> bool:
        return self.p < self.q

    @property
    def real_q1(self) -> bool:
        """True for the q = d = 1 family, which has its own series parametrization."""
        return self.d == 1 and self.q == 1

    def __str__(self):
        tag = "" if self.projective else ", non-projective"
        return f"X({self.p + 1},{self.q + 1};d={self.d}{tag})"


@dataclass(frozen=True)
class DerivedConstants:
    """Half-sums of roots and the integration exponents of the reduced Radon integral.

    ``beta`` and ``k0`` are ``None`` unless ``p < q``.  ``block_dims`` gives the
    real dimensions of the (coupled-source, free, imaginary) blocks of the N*
    chart: ``(v, u', w)`` when ``p >= q`` and ``(u, v', w)`` when ``p < q``.
    """

    rho_q: Fraction
    rho_1: Fraction
    alpha: int
    beta: Optional[int]
    k0: Optional[int]
    nstar_dim: int
    block_dims: tuple

    @property
    def delta(self) -> Optional[Fraction]:
        """Exponent ``(beta - 1)/2`` of the kernel ``1 + 2 z v - z^2``."""
        return None if self.beta is None else Fraction(self.beta - 1, 2)


def derive_constants(params: SpaceParams) -> DerivedConstants:
    d, p, q = params.d, params.p, params.q
    rho_q = Fraction(d * p + d * q + 2 * (d - 1), 2)
    rho_1 = Fraction(abs(d * p - d * q) + 2 * (d - 1), 2)
    alpha = d * p - 1
    beta = k0 = None
    if p < q:
        beta = d * (q - p) - 1
        # largest integer strictly below (beta - 1)/2 + 1
        k0 = math.ceil(Fraction(beta - 1, 2) + 1) - 1
    if p >= q:
        block_dims = (d * q, d * (p - q), d - 1)
    else:
        block_dims = (d * p, d * (q - p), d - 1)
    return DerivedConstants(
        rho_q=rho_q,
        rho_1=rho_1,
        alpha=alpha,
        beta=beta,
        k0=k0,
        nstar_dim=sum(block_dims),
        block_dims=block_dims,
    )


@dataclass(frozen=True)
class SeriesParam:
    """One discrete-series parameter with its classification.

    ``mu`` is ``None`` for the q = d = 1 family, where the series is not
    parametrized through ``mu``; there ``m`` holds the character exponent
    ``lam +- rho_q`` (sign of ``lam``) of the generating function.
    """

    lam: Fraction
    mu: Optional[int]
    spherical: bool
    exceptional: bool
    cuspidal: bool
    m: Optional[Fraction] = None

    @property
    def value(self) -> float:
        return float(self.lam)

    def as_dict(self) -> dict:
        return {
            "lambda": _frac_str(self.lam),
            "mu": self.mu,
            "spherical": self.spherical,
            "exceptional": self.exceptional,
            "cuspidal": self.cuspidal,
            "m": None if self.m is None else _frac_str(self.m),
        }


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _base_lambda(params: SpaceParams) -> Fraction:
    """``lambda`` at ``mu = 0``: ``d(q - p)/2 - 1``."""
    return Fraction(params.d * (params.q - params.p), 2) - 1


def mu_of(params: SpaceParams, lam) -> Fraction:
    """``mu_lambda = lambda - (dq - dp)/2 + 1`` (exact when ``lam`` is exact)."""
    return Fraction(lam) - _base_lambda(params)


def enumerate_series(params: SpaceParams, lambda_max) -> list:
    """All discrete-series parameters with ``0 < lambda <= lambda_max``.

    In the q = d = 1 family both signs of ``lambda`` are returned and the
    bound applies to ``|lambda|``.  The result is sorted ascending.
    """
    lam_max = Fraction(lambda_max).limit_denominator(10**9)
    if lam_max <= 0:
        raise ValueError("lambda_max must be positive")
    rho_q = derive_constants(params).rho_q

    if params.real_q1:
        # |lambda| + rho_q in 2Z (projective) or in Z (non-projective)
        step = 2 if params.projective else 1
        out = []
        k = 0
        while True:
            a = step * k - rho_q
            k += 1
            if a <= 0:
                continue
            if a > lam_max:
                break
            for lam in (-a, a):
                out.append(SeriesParam(lam, None, False, False, True, m=lam + rho_q if lam > 0 else lam - rho_q))
        return sorted(out, key=lambda sp: sp.lam)

    base = _base_lambda(params)
    step = 2 if params.projective else 1
    # smallest mu in the lattice step*Z with base + mu > 0
    mu = 0
    while base + mu - step > 0:
        mu -= step
    while base + mu <= 0:
        mu += step
    out = []
    while base + mu <= lam_max:
        lam = base + mu
        spherical = mu <= 0 and mu % 2 == 0
        if params.projective:
            cuspidal = not spherical
        else:
            cuspidal = mu > 0
        out.append(
            SeriesParam(
                lam=lam,
                mu=int(mu),
                spherical=spherical,
                exceptional=spherical and mu < 0,
                cuspidal=cuspidal,
            )
        )
        mu += step
    return out


def noncuspidal_parameters(params: SpaceParams) -> list:
    """Parameters ``d(q-p)/2 - 1 - 2j > 0`` of the non-cuspidal series, descending.

    For the non-projective variant the step is 1, which adds the odd
    ``mu < 0`` series that are non-cuspidal without being spherical.
    """
    if params.real_q1:
        return []
    base = _base_lambda(params)
    step = 2 if params.projective else 1
    out = []
    lam = base
    while lam > 0:
        out.append(lam)
        lam -= step
    return out
