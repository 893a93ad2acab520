"""Closed-form reference values and the Taylor machinery near ``s = +inf``.

Radon transforms of generating functions have the closed shape

    e^(-ds) (1 + e^(-2s))^(-mu/2) 2F1(mu/2, 1 - mu/2; (mu + dq - dp)/2; 1/(1 + e^(-2s)))

up to a positive constant ``C_lambda``, recovered here by fitting.  Near
``s = +inf`` the function ``F(z) = e^(ds) R h(s)``, ``z = e^-s``, has a
Taylor expansion whose coefficients are integrals of z-derivatives of

    S(z) = ((v - z)^2 + u^2)^(m/2) (1 + 2 z v - z^2)^delta,

computed exactly as polynomials in ``A = (v - z)^2 + u^2``, ``w = v - z``
and ``B = 1 + 2 z v - z^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .model_functions import RadialProfile, psi_tilde
from .quadrature import Piece, QuadConfig, nested_integrate
from .spaces import SpaceParams, derive_constants, mu_of
from .specfun import Hyp2F1Args, gauss_2f1
from .transforms import GridSeries, ConvergenceError, radon_reduced, sphere_factor

__all__ = [
    "FitError",
    "TaylorReport",
    "radon_shape_closed",
    "fit_C_lambda",
    "lemma_derivative_terms",
    "lemma_derivative",
    "s_derivative_lemma_check",
    "fornberg_weights",
    "taylor_coefficient",
    "taylor_exponents",
    "taylor_report",
    "reduction_target",
    "reduction_check",
]


class FitError(ArithmeticError):
    """A fitted constant is not positive or not constant across the validation grid."""


def radon_shape_closed(params: SpaceParams, lam, s) -> float:
    """Closed shape of the Radon transform of ``psi_tilde_lambda`` with ``C_lambda`` removed."""
    if not params.p_less_q:
        raise ValueError("closed form is for p < q")
    d, p, q = params.d, params.p, params.q
    mu = float(mu_of(params, lam))
    c = (mu + d * q - d * p) / 2.0
    s = float(s)
    z = 1.0 / (1.0 + math.exp(-2.0 * s))
    f = gauss_2f1(Hyp2F1Args(mu / 2.0, 1.0 - mu / 2.0, c, z))
    return math.exp(-d * s) * (1.0 + math.exp(-2.0 * s)) ** (-mu / 2.0) * f


def fit_C_lambda(params: SpaceParams, lam, quad: Optional[QuadConfig] = None, *,
                 validation: Sequence[float] = (-1.5, -0.5, 0.5, 1.5),
                 spread_tol: float = 1e-5) -> float:
    """``C_lambda = R psi_tilde(0) / shape(0)``, validated for constancy on a grid."""
    profile = psi_tilde(params, lam)
    c0 = radon_reduced(params, profile, 0.0, quad) / radon_shape_closed(params, lam, 0.0)
    if not c0 > 0:
        raise FitError(f"fitted C_lambda = {c0} is not positive")
    ratios = [radon_reduced(params, profile, s, quad) / radon_shape_closed(params, lam, s)
              for s in validation]
    spread = (max(ratios + [c0]) - min(ratios + [c0])) / c0
    if spread > spread_tol:
        raise FitError(f"C_lambda not constant: relative spread {spread:.3g} > {spread_tol:g}")
    return c0


# --- derivative structure of S(z) --------------------------------------------

def _check_lemma_args(m, delta):
    if m < 0 or m % 2:
        raise ValueError("m must be a nonnegative even integer")
    delta = Fraction(delta)
    if delta < 0 or delta.denominator not in (1, 2):
        raise ValueError("delta must be a nonnegative half-integer")
    return delta


def lemma_derivative_terms(m: int, delta, j: int) -> dict:
    """``d^j S / dz^j`` as ``{(a, b, c): coeff}`` meaning ``coeff * A^a w^b B^c``.

    Uses ``dA/dz = -2w``, ``dB/dz = 2w`` and ``dw/dz = -1``.  Defined for
    ``0 <= j < delta + 1``, where no negative power of ``B`` appears.
    """
    delta = _check_lemma_args(m, delta)
    if not 0 <= j < delta + 1:
        raise ValueError(f"derivative order {j} outside 0 <= j < delta + 1 = {delta + 1}")
    terms = {(Fraction(m, 2), 0, delta): Fraction(1)}
    for _ in range(j):
        nxt: dict = {}
        for (a, b, c), k in terms.items():
            for key, factor in (
                ((a - 1, b + 1, c), -2 * a),
                ((a, b - 1, c), -b),
                ((a, b + 1, c - 1), 2 * c),
            ):
                if factor:
                    nxt[key] = nxt.get(key, 0) + k * factor
        terms = {key: k for key, k in nxt.items() if k}
    return terms


def lemma_derivative(m: int, delta, j: int, v, u, z):
    """Evaluate ``d^j S / dz^j`` at ``(v, u, z)`` (array-friendly)."""
    terms = lemma_derivative_terms(m, delta, j)
    v, u, z = (np.asarray(t, dtype=float) for t in (v, u, z))
    w = v - z
    A = w * w + u * u
    B = 1.0 + 2.0 * z * v - z * z
    out = np.zeros(np.broadcast(v, u, z).shape)
    for (a, b, c), k in sorted(terms.items()):
        term = float(k) * np.ones_like(out)
        if a:
            term = term * A ** float(a)
        if b:
            term = term * w ** b
        if c:
            term = term * B ** float(c)
        out = out + term
    return out


def fornberg_weights(order: int, offsets) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at 0 on the given offsets."""
    x = np.asarray(offsets, dtype=float)
    n = len(x)
    if order >= n:
        raise ValueError("need more stencil points than the derivative order")
    c = np.zeros((n, order + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        for k in range(i):
            c3 = x[i] - x[k]
            c2 *= c3
            for jj in range(mn, -1, -1):
                prev = c[i - 1, jj - 1] if jj else 0.0
                c[i, jj] = c1 * (jj * prev - x[i - 1] * c[i - 1, jj]) / c2
            for jj in range(mn, -1, -1):
                prev = c[k, jj - 1] if jj else 0.0
                c[k, jj] = (x[i] * c[k, jj] - jj * prev) / c3
        c1 = c2
    return c[:, order]


def s_derivative_lemma_check(m: int, delta, v: float, u: float, j: int, z: float, *,
                             h: float = 1e-2, points: int = 9):
    """Analytic ``d^j S / dz^j`` against a centred finite difference; returns both.

    The stencil has ``points + j`` (made odd) nodes, so it is exact for
    polynomials of that degree.
    """
    analytic = float(lemma_derivative(m, delta, j, v, u, z))
    if j == 0:
        return analytic, analytic
    n = points + j
    n += 1 - n % 2
    offsets = np.arange(n) - n // 2
    wts = fornberg_weights(j, offsets * h)
    numeric = float(np.dot(wts, lemma_derivative(m, delta, 0, v, u, z + offsets * h)))
    return analytic, numeric


# --- Taylor coefficients -------------------------------------------------------

def taylor_exponents(params: SpaceParams) -> list:
    """Exponents ``rho_1 - d - j`` (j even, ``j < k0``) that stay positive, descending.

    These are the growth rates of ``c_j e^((rho_1 - d - j) s)`` in the Abel
    transform; odd ``j`` drop out because their coefficients vanish.
    """
    dc = derive_constants(params)
    if dc.k0 is None:
        return []
    base = dc.rho_1 - params.d
    return [base - j for j in range(0, dc.k0, 2) if base - j > 0]


def _coefficient_axes(params: SpaceParams, profile: RadialProfile):
    """Axes ``(u, x, v)`` of the coefficient integrals; ``v`` runs over the whole line."""
    d, p = params.d, params.p
    has_x, has_u = p > 0, d > 1
    compact = profile.compact
    rad2 = math.sinh(profile.support_radius) ** 2 if compact else math.inf

    def radial(*outer):
        n = len(outer[0]) if outer else 1
        if compact:
            r2 = sum(c * c for c in outer) if outer else np.zeros(1)
            return [Piece(np.zeros(n), np.sqrt(np.maximum(rad2 - r2, 0.0)))]
        return [Piece(np.zeros(n), np.full(n, math.inf))]

    def line(*outer):
        n = len(outer[0]) if outer else 1
        r2 = sum(c * c for c in outer) if outer else np.zeros(n)
        if compact:
            top = np.sqrt(np.maximum(rad2 - r2, 0.0))
            return [Piece(-top, top)]
        # mirror-image halves keep odd integrands cancelling to rounding level
        scale = np.sqrt(1.0 + r2)
        return [Piece(np.full(n, -math.inf), np.zeros(n), scale), Piece(np.zeros(n), np.full(n, math.inf), scale)]

    axes = ([radial] if has_u else []) + ([radial] if has_x else []) + [line]
    return axes, has_x, has_u


def taylor_coefficient(params: SpaceParams, profile: RadialProfile, j: int,
                       quad: Optional[QuadConfig] = None, scale: float = 0.0) -> float:
    """``c_j = (1/j!) int int int H(1 + x^2 + v^2 + u^2) S^(j)(0) x^alpha u^(d-2) dv dx du``.

    ``scale`` is a reference magnitude (typically ``|c_0|``); the absolute
    tolerance is raised to ``rel_tol * scale`` so coefficients that vanish
    by symmetry still converge.
    """
    dc = derive_constants(params)
    if dc.k0 is None:
        raise ValueError("Taylor machinery needs p < q")
    quad = quad or QuadConfig()
    if scale:
        quad = replace(quad, abs_tol=max(quad.abs_tol, quad.rel_tol * abs(scale)))
    m = profile.m
    delta = dc.delta
    d = params.d
    axes, has_x, has_u = _coefficient_axes(params, profile)

    def integrand(*coords):
        v = coords[-1]
        u = coords[0] if has_u else 0.0
        x = coords[-2] if has_x else 0.0
        val = profile(1.0 + x * x + v * v + u * u) * lemma_derivative(m, delta, j, v, u, 0.0)
        if has_x and dc.alpha:
            val = val * x ** dc.alpha
        if has_u and d > 2:
            val = val * u ** (d - 2)
        return val

    value, _ = nested_integrate(integrand, axes, quad)
    return value / math.factorial(j)


@dataclass(frozen=True)
class TaylorReport:
    """Taylor data of ``F(z) = e^(ds) R h(s)`` at ``z = e^-s -> 0``.

    ``remainder_samples`` holds ``(s, R_k0(e^-s))`` with
    ``R_k0 = (F(z) - sum_{j<k0} c_j z^j) / z^k0``; ``constant_term_estimate``
    is the limit of ``R_k0`` as ``s -> inf``.
    """

    coefficients: tuple
    remainder_samples: tuple
    constant_term_estimate: float
    k0: int
    exponents: tuple

    def remainder_deviation(self):
        """``[(s, |R_k0 - C|)]`` for the sampled ``s``."""
        return [(s, abs(r - self.constant_term_estimate)) for s, r in self.remainder_samples]

    def odd_coefficients_vanish(self, rel: float = 1e-8) -> bool:
        scale = max(abs(c) for c in self.coefficients) if self.coefficients else 0.0
        return all(abs(c) <= rel * scale for j, c in enumerate(self.coefficients) if j % 2)


def taylor_report(params: SpaceParams, profile: RadialProfile, quad: Optional[QuadConfig] = None,
                  s_max: float = 5.0, *, s_grid: Optional[Sequence[float]] = None) -> TaylorReport:
    """Coefficients ``c_j`` (``j < k0``), remainder samples and its constant term.

    The constant term is ``c_k0`` from the same coefficient integral when
    the profile is compactly supported (the remainder then tends to it);
    otherwise it is extrapolated linearly in ``z`` from the two largest
    sampled ``s``.
    """
    dc = derive_constants(params)
    if dc.k0 is None:
        raise ValueError("Taylor machinery needs p < q")
    if not profile.compact:
        _, n = profile.certificate(float(dc.rho_q))
        if n < dc.k0 + 3:
            raise ConvergenceError(f"decay certificate N={n} below k0 + 3 = {dc.k0 + 3}")
    quad = quad or QuadConfig()
    k0 = dc.k0
    c0 = taylor_coefficient(params, profile, 0, quad)
    coeffs = (c0,) + tuple(taylor_coefficient(params, profile, j, quad, scale=c0)
                           for j in range(1, k0))
    coeffs = coeffs[:k0]
    grid = list(s_grid) if s_grid is not None else [2.0, 3.0, 4.0, s_max]
    grid = sorted(s for s in grid if s <= s_max)
    samples = []
    for s in grid:
        z = math.exp(-s)
        F = math.exp(params.d * s) * radon_reduced(params, profile, s, quad)
        poly = sum(c * z ** j for j, c in enumerate(coeffs))
        samples.append((s, (F - poly) / z ** k0))
    if profile.compact and k0 < dc.delta + 1:
        const = taylor_coefficient(params, profile, k0, quad, scale=c0)
    elif len(samples) >= 2:
        (s1, r1), (s2, r2) = samples[-2], samples[-1]
        z1, z2 = math.exp(-s1), math.exp(-s2)
        const = r2 - z2 * (r1 - r2) / (z1 - z2)
    else:
        const = samples[-1][1]
    return TaylorReport(coefficients=coeffs, remainder_samples=tuple(samples),
                        constant_term_estimate=const, k0=k0,
                        exponents=tuple(taylor_exponents(params)))


# --- reduction to d = 1 -----------------------------------------------------------

def reduction_target(params: SpaceParams) -> SpaceParams:
    """The real space ``(1, p', q')`` with ``p' + 1 = d(p + 1)`` and ``q' + 1 = d(q + 1)``."""
    d, p, q = params.d, params.p, params.q
    return SpaceParams(1, d * (p + 1) - 1, d * (q + 1) - 1)


def reduction_check(params: SpaceParams, lam, s_grid: Sequence[float],
                    quad: Optional[QuadConfig] = None) -> GridSeries:
    """Ratios ``R^d psi_tilde(s) / (e^(-(d-1)s) R^1 psi_tilde(s))`` with sphere areas restored."""
    if params.d not in (2, 4):
        raise ValueError("reduction check is for d in {2, 4}")
    if not params.p_less_q:
        raise ValueError("reduction check needs p < q")
    target = reduction_target(params)
    prof_d = psi_tilde(params, lam)
    prof_1 = psi_tilde(target, lam)
    k_d, k_1 = sphere_factor(params), sphere_factor(target)
    s_vals = np.asarray(s_grid, dtype=float)
    ratios, errs = [], []
    for s in s_vals:
        a, ea = radon_reduced(params, prof_d, s, quad, full_output=True)
        b, eb = radon_reduced(target, prof_1, s, quad, full_output=True)
        num = k_d * a
        den = math.exp(-(params.d - 1) * s) * k_1 * b
        r = num / den
        ratios.append(r)
        errs.append(abs(r) * (ea / abs(a) + eb / abs(b)))
    return GridSeries(s_vals, np.array(ratios), np.array(errs))
