"""Test functions: generating functions, mode functions and radial profiles.

A (K cap H)-invariant function of K-type mode ``m`` is written

    f(k_theta a_t) = (cos(theta) cosh(t))^m H(cosh^2 t),

so everything the transforms need is the radial profile ``H`` on
``[1, inf)`` plus ``m``.  Profiles carry a decay certificate

    |H(w)| <= C w^(-(rho_q + m)/2) (1 + log w)^(-N),

which is what makes the Radon integral converge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import Point
from .spaces import SeriesParam, SpaceParams, derive_constants, mu_of

__all__ = [
    "RadialProfile",
    "psi_tilde",
    "psi_combination",
    "radial_eigen_coefficients",
    "mode_function",
    "psi_qd1",
    "psi_qd1_point",
    "bump_profile",
    "point_function",
    "check_decay",
    "DECAY_GRID",
]

# w = 1, 2, 4, ..., 2^30
DECAY_GRID = 2.0 ** np.arange(31)


@dataclass(frozen=True)
class RadialProfile:
    """Radial profile ``H`` of a mode-``m`` function with its decay data.

    For non-compact profiles ``(decay_C, decay_N)`` certify the bound above
    for the stored ``rho_q``; ``decay_C = inf`` means no certificate.  For
    compactly supported profiles (``support_radius`` set, ``H(cosh^2 t) = 0``
    for ``t >= R``) ``decay_C`` bounds ``sup |H|`` and the certificate for a
    given ``rho_q`` follows from the support.
    """

    H: Callable[[np.ndarray], np.ndarray]
    m: int = 0
    decay_C: float = math.inf
    decay_N: int = 0
    support_radius: Optional[float] = None
    rho_q: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("mode m must be nonnegative")

    def __call__(self, w):
        return self.H(np.asarray(w, dtype=float))

    @property
    def compact(self) -> bool:
        return self.support_radius is not None

    def certificate(self, rho_q=None):
        """``(C, N)`` such that the decay bound holds with this ``rho_q``."""
        if rho_q is None and self.rho_q is None:
            raise ValueError("this profile needs an explicit rho_q for its certificate")
        rho = float(self.rho_q if rho_q is None else rho_q)
        if self.compact:
            ch = math.cosh(self.support_radius)
            c = self.decay_C * ch ** (rho + self.m) * (1.0 + 2.0 * math.log(ch)) ** self.decay_N
            return c, self.decay_N
        if self.rho_q is not None and rho_q is not None and float(rho_q) != float(self.rho_q):
            # a bound for a larger rho_q implies one for a smaller rho_q only
            if float(rho_q) > float(self.rho_q):
                return math.inf, self.decay_N
        return self.decay_C, self.decay_N

    def decay_bound(self, w, rho_q=None):
        c, n = self.certificate(rho_q)
        rho = float(self.rho_q if rho_q is None else rho_q)
        w = np.asarray(w, dtype=float)
        return c * w ** (-(rho + self.m) / 2.0) * (1.0 + np.log(w)) ** (-n)


def check_decay(profile: RadialProfile, rho_q=None, grid=DECAY_GRID) -> bool:
    """Check the certified decay bound on a sampled grid (default ``w = 2^k``, k <= 30)."""
    c, _ = profile.certificate(rho_q)
    if not math.isfinite(c):
        return False
    vals = np.abs(profile(grid))
    bound = profile.decay_bound(grid, rho_q)
    return bool(np.all(vals <= bound * (1.0 + 1e-12)))


def _power_certificate(lam: float, n: int) -> float:
    """Smallest C with ``w^(-lam/2) <= C (1 + log w)^(-n)`` on ``w >= 1``."""
    if lam < 0:
        return math.inf
    if n == 0:
        return 1.0
    if lam == 0:
        return math.inf
    peak = 2.0 * n / lam
    if peak <= 1.0:
        return 1.0
    return math.exp(lam / 2.0 - n) * peak ** n


def psi_tilde(params: SpaceParams, lam, N: int = 8) -> RadialProfile:
    """Generating function ``(cosh t)^(-lam - rho_q)`` as a mode-0 profile.

    The certificate uses ``N`` log factors.  It is finite only for ``lam > 0``, which is
    exactly when the Radon integral of this function converges.
    """
    rho = float(derive_constants(params).rho_q)
    lam = float(lam)
    if lam + rho <= 0:
        raise ValueError(f"psi_tilde needs lambda + rho_q > 0 (lambda={lam}, rho_q={rho})")
    expo = -(lam + rho) / 2.0

    def H(w):
        return np.asarray(w, dtype=float) ** expo

    n = N if lam > 0 else 0
    return RadialProfile(H=H, m=0, decay_C=_power_certificate(lam, n), decay_N=n,
                         rho_q=rho, label=f"psi_tilde(lambda={lam:g})")


def radial_eigen_coefficients(params: SpaceParams, lam) -> list:
    """Coefficients ``C_j`` of the K-invariant Laplace eigenfunction
    ``sum_j C_j (cosh t)^(-(lam + rho_q + 2j))`` with ``C_0 = 1``.

    Applying the radial Laplacian to ``(cosh t)^(-a)`` gives
    ``a(a - 2 rho_q) c^-a - a(a + 1 - B) c^(-a-2)`` with ``B = dq + d - 1``,
    so matching powers yields
    ``C_j = C_{j-1} a_{j-1} (a_{j-1} + 1 - B) / (4 j (lam + j))``,
    ``a_j = lam + rho_q + 2j``.  The sum terminates after ``-mu_lambda / 2``
    steps for spherical parameters.
    """
    mu = mu_of(params, lam)
    if mu > 0 or mu.denominator != 1 or mu % 2:
        raise ValueError(f"finite eigen-expansion needs even mu_lambda <= 0, got {mu}")
    dc = derive_constants(params)
    lam_f = Fraction(lam)
    b = params.d * params.q + params.d - 1
    coeffs = [Fraction(1)]
    for j in range(1, int(-mu) // 2 + 1):
        a_prev = lam_f + dc.rho_q + 2 * (j - 1)
        coeffs.append(coeffs[-1] * a_prev * (a_prev + 1 - b) / (4 * j * (lam_f + j)))
    return [float(c) for c in coeffs]


def psi_combination(params: SpaceParams, lam, coeffs: Sequence[float], N: int = 8) -> RadialProfile:
    """``sum_j coeffs[j] * psi_tilde_{lam + 2j}`` as a single mode-0 profile."""
    rho = float(derive_constants(params).rho_q)
    lam = float(lam)
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        raise ValueError("need at least one coefficient")
    expos = [-(lam + 2 * j + rho) / 2.0 for j in range(len(coeffs))]

    def H(w):
        w = np.asarray(w, dtype=float)
        out = np.zeros_like(w)
        for c, e in zip(coeffs, expos):
            out = out + c * w ** e
        return out

    n = N if lam > 0 else 0
    cert = sum(abs(c) * _power_certificate(lam + 2 * j, n) for j, c in enumerate(coeffs))
    return RadialProfile(H=H, m=0, decay_C=cert, decay_N=n, rho_q=rho,
                         label=f"psi_combination(lambda={lam:g}, terms={len(coeffs)})")


def bump_profile(R: float, m: int = 0, *, N: int = 8) -> RadialProfile:
    """Smooth profile supported in ``t < R``, flat to all orders at ``t = R``.

    ``H(w) = exp(1 - 1/(1 - tau))`` with ``tau = (w - 1)/(cosh^2 R - 1)``,
    so ``H(1) = 1`` and ``H = 0`` for ``tau >= 1``.
    """
    if not R > 0:
        raise ValueError("support radius must be positive")
    if m < 0 or m % 2:
        raise ValueError("bump modes must be even and nonnegative")
    span = math.sinh(R) ** 2

    def H(w):
        tau = (np.asarray(w, dtype=float) - 1.0) / span
        inside = tau < 1.0
        safe = np.where(inside, tau, 0.0)
        return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - safe)), 0.0)

    return RadialProfile(H=H, m=m, decay_C=1.0, decay_N=N, support_radius=float(R),
                         label=f"bump(R={R:g}, m={m})")


def mode_function(profile: RadialProfile):
    """``(theta, t) -> (cos(theta) cosh(t))^m H(cosh^2 t)``."""
    m = profile.m

    def f(theta, t):
        ch = np.cosh(np.asarray(t, dtype=float))
        c = np.cos(np.asarray(theta, dtype=float)) * ch
        return c ** m * profile(ch * ch)

    return f


def point_function(profile: RadialProfile):
    """The mode function read directly off hyperboloid coordinates.

    ``cosh^2 t`` is the squared norm of the second block and
    ``cos(theta) cosh(t)`` the norm of the last F-coordinate, so no angles
    are formed.
    """
    m = profile.m

    def f(x: Point):
        cosh2 = np.sum(x.second_block ** 2, axis=-1)
        last2 = np.sum(x.last ** 2, axis=-1)
        return last2 ** (m // 2) * profile(cosh2)

    return f


def _check_qd1(params: SpaceParams, series: SeriesParam):
    if not params.real_q1:
        raise ValueError("psi_qd1 is only defined for q = d = 1")
    if series.m is None:
        raise ValueError("series parameter lacks the character exponent m")


def psi_qd1(params: SpaceParams, series: SeriesParam):
    """``(theta, s) -> e^(i m theta) (cosh s)^(-|lambda| - rho_q)`` for the q = d = 1 family."""
    _check_qd1(params, series)
    m = float(series.m)
    expo = -abs(float(series.lam)) - float(derive_constants(params).rho_q)

    def f(theta, s):
        return np.exp(1j * m * np.asarray(theta, dtype=float)) * np.cosh(np.asarray(s, dtype=float)) ** expo

    return f


def psi_qd1_point(params: SpaceParams, series: SeriesParam, absolute: bool = False):
    """The same function evaluated on hyperboloid points.

    ``e^(i theta) = (x_last + i x_{p+2}) / cosh t``.  With ``absolute`` the
    modulus ``(cosh t)^(-|lambda| - rho_q)`` is returned instead.
    """
    _check_qd1(params, series)
    m = int(series.m)
    expo = -abs(float(series.lam)) - float(derive_constants(params).rho_q)

    def f(x: Point):
        cosh_t = np.sqrt(np.sum(x.second_block ** 2, axis=-1))
        radial = cosh_t ** expo
        if absolute:
            return radial
        phase = (x.last[..., 0] + 1j * x.second_block[..., 0]) / cosh_t
        return phase ** m * radial

    return f
