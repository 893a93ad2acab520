"""Radon and Abel transforms, the radial Laplacian and the downstairs operator D.

Normalization: :func:`radon_reduced` omits the sphere-area constants that
come from integrating out directions of the ``u``, ``v'`` and ``w``
blocks; :func:`sphere_factor` restores them, so
``radon_full == sphere_factor * radon_reduced``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import hyperboloid_point, nstar_embed
from .model_functions import RadialProfile
from .quadrature import Piece, QuadConfig, nested_integrate
from .spaces import SpaceParams, derive_constants, noncuspidal_parameters
from .specfun import sphere_area

__all__ = [
    "GridSeries",
    "ConvergenceError",
    "radon_reduced",
    "radon_reduced_series",
    "radon_full",
    "sphere_factor",
    "abel",
    "radial_laplacian",
    "laplacian_profile",
    "apply_D_downstairs",
    "MAX_FULL_DIM",
]

MAX_FULL_DIM = 4


class ConvergenceError(ValueError):
    """The profile's decay certificate does not guarantee a convergent integral."""


@dataclass(frozen=True)
class GridSeries:
    s_values: np.ndarray
    values: np.ndarray
    error_estimates: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s_values, dtype=float)
        v = np.asarray(self.values)
        e = np.asarray(self.error_estimates, dtype=float)
        if not (s.ndim == v.ndim == e.ndim == 1 and len(s) == len(v) == len(e)):
            raise ValueError("grid, values and errors must be 1-D of equal length")
        if len(s) > 1 and not np.all(np.diff(s) > 0):
            raise ValueError("s grid must be strictly increasing")
        object.__setattr__(self, "s_values", s)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "error_estimates", e)

    def __len__(self):
        return len(self.s_values)

    def spacing(self) -> float:
        """Common step of a uniform grid (raises if the grid is not uniform)."""
        if len(self) < 2:
            raise ValueError("need at least two points")
        steps = np.diff(self.s_values)
        h = float(np.mean(steps))
        if np.max(np.abs(steps - h)) > 1e-9 * max(h, 1.0):
            raise ValueError("grid is not uniform")
        return h


def sphere_factor(params: SpaceParams) -> float:
    """``Omega_{dp} Omega_{d(q-p)} Omega_{d-1}`` (absent axes contribute 1), for ``p < q``."""
    if not params.p_less_q:
        raise ValueError("sphere factor is defined for the p < q chart")
    d, p, q = params.d, params.p, params.q
    return sphere_area(d * p) * sphere_area(d * (q - p)) * sphere_area(d - 1)


def _check_convergence(params: SpaceParams, profile: RadialProfile):
    if profile.compact:
        return
    c, n = profile.certificate(float(derive_constants(params).rho_q))
    if not math.isfinite(c) or n < 3:
        raise ConvergenceError(
            f"decay certificate (C={c}, N={n}) of {profile.label or 'profile'} "
            "does not guarantee convergence (need finite C and N >= 3)"
        )


def _full(n, value):
    return np.full(n, value, dtype=float)


def radon_reduced(params: SpaceParams, profile: RadialProfile, s: float,
                  quad: Optional[QuadConfig] = None, *, full_output: bool = False):
    """Radon transform of the mode function of ``profile`` at ``a_s`` (p < q).

    e^(-ds) int int int H(1 + x^2 + v^2 + z^2) ((v - e^-s)^2 + z^2)^(m/2)
                         (1 + 2 e^-s v - e^-2s)^((beta-1)/2) x^alpha z^(d-2) dv dx dz

    over ``x, z >= 0`` and ``v >= -sinh s``; the ``x`` axis is absent for
    ``p = 0`` and the ``z`` axis for ``d = 1``.  Sphere areas are omitted.
    Axes are nested with ``v`` innermost.  Returns the value, or
    ``(value, error_estimate)`` with ``full_output``.
    """
    if not params.p_less_q:
        raise ValueError("the reduced integral needs p < q")
    _check_convergence(params, profile)
    quad = quad or QuadConfig()
    dc = derive_constants(params)
    d, p = params.d, params.p
    m = profile.m
    if m % 2 and params.projective:
        raise ValueError("odd modes only exist on the non-projective space")
    s = float(s)
    v0 = -math.sinh(s)
    e_ms = math.exp(-s)
    delta = float(dc.delta)
    half_int = Fraction(dc.delta).denominator != 1
    alpha = dc.alpha
    has_x, has_z = p > 0, d > 1
    compact = profile.compact
    rad2 = math.sinh(profile.support_radius) ** 2 if compact else math.inf

    def integrand(*coords):
        # axis order is (z, x, v) with absent axes skipped
        v, kern_arg = coords[-1]
        z = coords[0] if has_z else 0.0
        x = coords[-2] if has_x else 0.0
        w = 1.0 + x * x + v * v + z * z
        out = profile(w)
        if m:
            shifted = v - e_ms
            if params.projective:
                out = out * (shifted * shifted + z * z) ** (m // 2)
            else:
                out = out * (-shifted) ** m
        if delta:
            out = out * kern_arg ** delta
        if has_x and alpha:
            out = out * x ** alpha
        if has_z and d > 2:
            out = out * z ** (d - 2)
        return out

    def v_pieces(*outer):
        n = len(outer[0]) if outer else 1
        r2 = sum(c * c for c in outer) if outer else np.zeros(1)
        if compact:
            top = np.sqrt(np.maximum(rad2 - r2, 0.0))
            lo = np.maximum(v0, -top)
            hi = np.maximum(top, lo)
            if half_int:
                return [Piece(np.sqrt(lo - v0), np.sqrt(hi - v0), 1.0, _sigma_sub(v0, e_ms))]
            return [Piece(lo, hi, 1.0, _plain_sub(v0, e_ms))]
        scale = np.sqrt(1.0 + r2 + max(v0, 0.0) ** 2)
        if v0 < -0.5:
            first = (Piece(_full(n, 0.0), _full(n, math.sqrt(-v0)), 1.0, _sigma_sub(v0, e_ms)) if half_int
                     else Piece(_full(n, v0), _full(n, 0.0), 1.0, _plain_sub(v0, e_ms)))
            return [first, Piece(_full(n, 0.0), _full(n, math.inf), scale, _plain_sub(v0, e_ms))]
        if half_int:
            return [Piece(_full(n, 0.0), _full(n, math.inf), np.sqrt(scale), _sigma_sub(v0, e_ms))]
        return [Piece(_full(n, v0), _full(n, math.inf), scale, _plain_sub(v0, e_ms))]

    def radial_pieces(*outer):
        n = len(outer[0]) if outer else 1
        if compact:
            r2 = sum(c * c for c in outer) if outer else np.zeros(1)
            return [Piece(_full(n, 0.0), np.sqrt(np.maximum(rad2 - r2, 0.0)))]
        scale = math.sqrt(1.0 + max(v0, 0.0) ** 2)
        return [Piece(_full(n, 0.0), _full(n, math.inf), scale)]

    axes = []
    if has_z:
        axes.append(radial_pieces)
    if has_x:
        axes.append(radial_pieces)
    axes.append(v_pieces)
    # the innermost axis hands (v, v - v0) pairs to the integrand
    value, err = nested_integrate(integrand, axes, quad)
    scale = math.exp(-d * s)
    value *= scale
    err *= scale
    return (value, err) if full_output else value


def _plain_sub(v0, e_ms):
    def sub(t):
        return _VPair(t, 2.0 * e_ms * (t - v0)), 1.0
    return sub


def _sigma_sub(v0, e_ms):
    def sub(t):
        return _VPair(v0 + t * t, 2.0 * e_ms * t * t), 2.0 * t
    return sub


class _VPair:
    """Innermost coordinate: ``v`` together with the kernel argument ``2 e^-s (v - v0)``.

    Computing ``v - v0`` from the substitution variable keeps the kernel
    accurate next to the lower limit.
    """

    __slots__ = ("v", "kern")

    def __init__(self, v, kern):
        self.v = v
        self.kern = kern

    def __iter__(self):
        yield self.v
        yield self.kern


def radon_reduced_series(params: SpaceParams, profile: RadialProfile, s_values: Sequence[float],
                         quad: Optional[QuadConfig] = None, *, workers: int = 1) -> GridSeries:
    """:func:`radon_reduced` on a grid, optionally on a thread pool (order-stable)."""
    s_values = np.asarray(s_values, dtype=float)

    def one(s):
        return radon_reduced(params, profile, s, quad, full_output=True)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, s_values))
    else:
        results = [one(s) for s in s_values]
    return GridSeries(s_values, np.array([r[0] for r in results]), np.array([r[1] for r in results]))


def _support_box(params: SpaceParams, s: float, R: float):
    """Half-widths of a coordinate box containing the support of ``f(a_s n)``, or ``None``."""
    dc = derive_constants(params)
    n1, n2, n3 = dc.block_dims
    es, ems = math.exp(s), math.exp(-s)
    if params.p_less_q:
        gap = 2.0 * ems * (math.sinh(R) + math.sinh(s))
        if gap <= 0:
            return None
        b1, b2, b3 = math.sinh(R), math.sqrt(gap), ems * math.sinh(R)
    else:
        gap = 2.0 * ems * (math.cosh(R) - math.cosh(s))
        if gap <= 0:
            return None
        b1, b2, b3 = math.cosh(R), math.sqrt(gap), ems * math.cosh(R)
    return [b1] * n1 + [b2] * n2 + [b3] * n3


def radon_full(params: SpaceParams, f: Callable, s: float, quad: Optional[QuadConfig] = None, *,
               support_radius: Optional[float] = None, full_output: bool = False):
    """Brute-force ``int_{N*} f(a_s n x_0) dn`` over the free chart coordinates.

    ``f`` maps a batched :class:`~hyprad.geometry.Point` to real or complex
    values; complex integrands are integrated part by part.  With
    ``support_radius`` the integration box is shrunk to the support of
    ``f``; when that support misses the orbit the full space is integrated
    anyway, so a vanishing result is an honest zero of the integrand.
    """
    dim = derive_constants(params).nstar_dim
    if dim > MAX_FULL_DIM:
        raise ValueError(f"full Radon oracle limited to {MAX_FULL_DIM} dimensions, got {dim}")
    quad = quad or QuadConfig()
    s = float(s)
    if dim == 0:
        val = complex(np.asarray(f(hyperboloid_point(params, s, nstar_embed(params, np.zeros((1, 0)))))).ravel()[0])
        val = val if val.imag else val.real
        return (val, 0.0) if full_output else val
    box = _support_box(params, s, support_radius) if support_radius is not None else None

    def evaluate(*coords):
        free = np.stack(coords, axis=-1)
        return f(hyperboloid_point(params, s, nstar_embed(params, free)))

    def axis(k):
        def pieces(*outer):
            n = len(outer[0]) if outer else 1
            if box is None:
                return [Piece(_full(n, -math.inf), _full(n, math.inf))]
            return [Piece(_full(n, -box[k]), _full(n, box[k]))]
        return pieces

    axes = [axis(k) for k in range(dim)]
    probe = np.asarray(evaluate(*[np.zeros(1)] * dim))
    if np.iscomplexobj(probe):
        re, e1 = nested_integrate(lambda *c: np.real(evaluate(*c)), axes, quad)
        im, e2 = nested_integrate(lambda *c: np.imag(evaluate(*c)), axes, quad)
        value, err = complex(re, im), math.hypot(e1, e2)
    else:
        value, err = nested_integrate(evaluate, axes, quad)
    return (value, err) if full_output else value


def abel(params: SpaceParams, radon_value, s):
    """``A f(a_s) = e^(rho_1 s) R f(a_s)``."""
    rho_1 = float(derive_constants(params).rho_1)
    return np.exp(rho_1 * np.asarray(s, dtype=float)) * radon_value


def radial_laplacian(params: SpaceParams, phi: Callable, s, h_step: float = 2e-3):
    """``phi'' + ((dp + d - 1) coth s + (dq + d - 1) tanh s) phi'`` by finite differences.

    Central differences at steps ``h`` and ``h/2`` combined by Richardson
    extrapolation.  ``phi`` must accept arrays.  At ``s = 0`` the coth term
    is replaced by its limit ``(dp + d - 1) phi''(0)``, valid for even ``phi``.
    """
    s = np.asarray(s, dtype=float)
    h = float(h_step)
    if not h > 0 or np.any(s + 0.5 * h == s):
        raise ValueError(f"step {h_step} underflows at s")
    d, p, q = params.d, params.p, params.q
    a_coth = d * p + d - 1
    b_tanh = d * q + d - 1

    def diffs(step):
        fp, f0, fm = phi(s + step), phi(s), phi(s - step)
        return (fp - 2.0 * f0 + fm) / step ** 2, (fp - fm) / (2.0 * step)

    d2h, d1h = diffs(h)
    d2q, d1q = diffs(0.5 * h)
    d2 = (4.0 * d2q - d2h) / 3.0
    d1 = (4.0 * d1q - d1h) / 3.0
    tiny = np.abs(s) < 1e-8
    safe = np.where(tiny, 1.0, s)
    coth_term = np.where(tiny, d2, d1 / np.tanh(safe))
    return d2 + a_coth * coth_term + b_tanh * np.tanh(s) * d1


def laplacian_profile(params: SpaceParams, profile: RadialProfile, h_step: float = 2e-3) -> RadialProfile:
    """Profile of ``Delta f`` for a mode-0 profile ``f`` (radial Laplacian in ``t``)."""
    if profile.m:
        raise ValueError("laplacian_profile handles mode 0 only")

    def phi(t):
        ch = np.cosh(t)
        return profile(ch * ch)

    def H(w):
        t = np.arcsinh(np.sqrt(np.maximum(np.asarray(w, dtype=float) - 1.0, 0.0)))
        return radial_laplacian(params, phi, t, h_step)

    if profile.compact:
        # finite differences reach h past the support; keep the support radius honest
        return RadialProfile(H=lambda w: np.where(np.asarray(w) < math.cosh(profile.support_radius) ** 2, H(w), 0.0),
                             m=0, decay_C=math.inf, decay_N=profile.decay_N,
                             support_radius=profile.support_radius, label=f"laplacian({profile.label})")
    return RadialProfile(H=H, m=0, decay_C=math.inf, decay_N=0, rho_q=profile.rho_q,
                         label=f"laplacian({profile.label})")


def _second_difference(y, k):
    """``Q y = y[i+k] + y[i-k] - 2 y[i]`` on the interior (``k`` points trimmed per side)."""
    return y[2 * k:] + y[:-2 * k] - 2.0 * y[k:-k]


def _annihilator(y, lam, big_h, k):
    """Fourth-order ``d^2/ds^2 - lam^2`` that kills ``e^(+-lam s)`` exactly on the grid.

    ``(Q - q_lam)(1 - lam^2 H^2/12 - Q/12) / H^2`` with ``q_lam = 2 cosh(lam H) - 2``.
    """
    q_lam = 2.0 * math.cosh(lam * big_h) - 2.0
    first = _second_difference(y, k) - q_lam * y[k:-k]
    second = (1.0 - (lam * big_h) ** 2 / 12.0) * first[k:-k] - _second_difference(first, k) / 12.0
    return second / big_h ** 2


def apply_D_downstairs(params: SpaceParams, abel_series: GridSeries, *, stride: int = 1,
                       lambdas: Optional[Sequence] = None, max_spacing: float = 0.02) -> GridSeries:
    """Apply ``prod_j (d^2/ds^2 - lambda_j^2) o d^2/ds^2`` to a sampled Abel transform.

    ``lambda_j`` default to the non-cuspidal parameters of the space.  Each
    factor is an exact discrete annihilator of its exponentials, fourth-order
    accurate elsewhere, with stencil step ``stride * h``; a larger stride
    trades truncation error for less amplification of noise in the input.
    The result lives on the interior grid (``2 * stride`` points trimmed per
    side per factor).
    """
    h = abel_series.spacing()
    if h > max_spacing * (1.0 + 1e-9):
        raise ValueError(f"grid too coarse: spacing {h:g} > {max_spacing:g}")
    if stride < 1:
        raise ValueError("stride must be a positive integer")
    lams = [float(l) for l in (noncuspidal_parameters(params) if lambdas is None else lambdas)]
    factors = [0.0] + lams
    k = stride
    trim = 2 * k * len(factors)
    if len(abel_series) < 2 * trim + 1:
        raise ValueError(f"series of length {len(abel_series)} too short for {len(factors)} factors at stride {k}")
    big_h = k * h

    def apply(y):
        for lam in factors:
            y = _annihilator(y, lam, big_h, k)
        return y

    values = apply(np.asarray(abel_series.values, dtype=float))
    # error propagation through the absolute stencil weights
    weights = np.abs(_stencil(apply, trim))
    errs = np.convolve(np.asarray(abel_series.error_estimates, dtype=float), weights[::-1], mode="valid")
    return GridSeries(abel_series.s_values[trim:-trim], values, errs)


def _stencil(apply, trim):
    """Weights ``w`` with ``apply(y)[i] = sum_k w[k] y[i + k]`` (length ``2 trim + 1``)."""
    n = 2 * trim + 1
    out = np.empty(n)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        out[j] = apply(e)[0]
    return out
