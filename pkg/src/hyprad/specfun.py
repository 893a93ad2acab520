"""Real special functions used by the closed-form Radon transforms.

Everything here works on real arguments only: log-gamma and beta, the Gauss
hypergeometric series 2F1 inside the unit interval (or as a terminating
polynomial), the Ferrers function P^M_L on (-1, 1) and the integral

    I(mu, nu, s) = int_0^inf (1 + x^2 - 2 tanh(s) x)^(-nu) x^(mu - 1) dx

in closed form and by brute-force quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .quadrature import QuadConfig, integrate

__all__ = [
    "Hyp2F1Args",
    "gamma_ln",
    "beta_fn",
    "gauss_2f1",
    "legendre_p",
    "gr_integral_closed",
    "gr_integral_numeric",
    "sphere_area",
]

# Lanczos approximation, g = 7, n = 9.  Coefficients from P. Godfrey's
# tabulation (the set used by Numerical Recipes 3rd ed. and many libms);
# absolute error of log-gamma below 1e-15 on x >= 0.5.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def gamma_ln(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0:
        raise ValueError(f"gamma_ln needs x > 0, got {x}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return math.log(math.pi / math.sin(math.pi * x)) - gamma_ln(1.0 - x)
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (x + k)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(acc)


def beta_fn(a: float, b: float) -> float:
    """Euler beta function B(a, b) for positive arguments."""
    return math.exp(gamma_ln(a) + gamma_ln(b) - gamma_ln(a + b))


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere in R^k (``2 pi^(k/2) / Gamma(k/2)``).

    ``k = 1`` gives 2 (the two points of S^0); ``k = 0`` is treated as an
    absent integration axis and returns 1.
    """
    if k < 0:
        raise ValueError("dimension must be nonnegative")
    if k == 0:
        return 1.0
    return 2.0 * math.pi ** (k / 2) / math.exp(gamma_ln(k / 2))


@dataclass(frozen=True)
class Hyp2F1Args:
    a: float
    b: float
    c: float
    z: float


def _nonpositive_int(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def gauss_2f1(args: Hyp2F1Args, *, stop: float = 1e-16, max_terms: int = 200_000) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z), real arguments.

    A nonpositive integer ``a`` or ``b`` makes the series terminate; the
    finite sum is then valid for every ``z``.  Otherwise the power series is
    summed for ``|z| < 1`` until the tail bound drops below ``stop`` relative
    to the partial sum.
    """
    a, b, c, z = float(args.a), float(args.b), float(args.c), float(args.z)
    terminating = [x for x in (a, b) if _nonpositive_int(x)]
    if terminating:
        n_max = int(-max(terminating))
        if _nonpositive_int(c) and -c < n_max:
            raise ValueError(f"2F1 undefined: c={c} hits a pole before the series terminates")
        total = 1.0
        term = 1.0
        for n in range(n_max):
            term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
            total += term
        return total

    if _nonpositive_int(c):
        raise ValueError(f"2F1 diverges for c={c}")
    if abs(z) >= 1.0:
        raise ValueError(f"2F1 series needs |z| < 1 in the non-terminating case, got z={z}")

    total = 1.0
    term = 1.0
    for n in range(max_terms):
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        term *= ratio
        total += term
        r = abs(ratio)
        # geometric tail bound once the term ratio has settled below 1
        if r < 1.0 and abs(term) * r / (1.0 - r) <= stop * abs(total):
            if n > abs(a) + abs(b) + abs(c):
                return total
    raise ArithmeticError(f"2F1 series did not converge in {max_terms} terms (z={z})")


def legendre_p(order: float, degree: float, y: float) -> float:
    """Ferrers function of the first kind P^order_degree(y) on (-1, 1).

    Uses ``P^M_L(y) = ((1+y)/(1-y))^(M/2) 2F1(-L, L+1; 1-M; (1-y)/2) / Gamma(1-M)``,
    restricted to ``1 - M > 0``, which covers every use with ``M = 1/2 - nu``,
    ``nu > 0``.
    """
    if not -1.0 < y < 1.0:
        raise ValueError(f"legendre_p needs |y| < 1, got {y}")
    c = 1.0 - order
    if c <= 0:
        raise ValueError("legendre_p implemented for order < 1 only")
    f = gauss_2f1(Hyp2F1Args(-degree, degree + 1.0, c, 0.5 - 0.5 * y))
    return ((1.0 + y) / (1.0 - y)) ** (0.5 * order) * f / math.exp(gamma_ln(c))


def _check_gr_domain(mu, nu):
    if not (mu > 0 and 2 * nu > mu):
        raise ValueError(f"integral diverges unless 0 < mu < 2 nu (mu={mu}, nu={nu})")


def gr_integral_closed(mu: float, nu: float, s: float) -> float:
    """Closed form of ``int_0^inf (1 + x^2 - 2 tanh(s) x)^(-nu) x^(mu-1) dx``.

    B(mu, 2nu - mu) (2 cosh(s) e^s)^(nu - 1/2)
        * 2F1(nu - mu + 1/2, mu - nu + 1/2; nu + 1/2; 1/(1 + e^(-2s)))
    """
    _check_gr_domain(mu, nu)
    z = 1.0 / (1.0 + math.exp(-2.0 * s))
    # 2 cosh(s) e^s = 1 + e^(2s)
    log_prefactor = (nu - 0.5) * math.log1p(math.exp(2.0 * s)) if s < 20 else (nu - 0.5) * 2.0 * s
    f = gauss_2f1(Hyp2F1Args(nu - mu + 0.5, mu - nu + 0.5, nu + 0.5, z))
    return beta_fn(mu, 2.0 * nu - mu) * math.exp(log_prefactor) * f


def gr_integral_numeric(mu: float, nu: float, s: float, quad: QuadConfig | None = None,
                        full_output: bool = False):
    """Brute-force quadrature of the same integral.

    The half-line is folded onto [0, 1] with ``x -> 1/x``; this maps the
    integral onto ``J(mu) + J(2 nu - mu)`` where
    ``J(a) = int_0^1 (1 + x^2 - 2 t x)^(-nu) x^(a-1) dx`` and ``t = tanh s``.
    Each piece is integrated in ``y = x^a``, which removes the endpoint
    power singularity.  With ``full_output`` returns ``(value, error)``.
    """
    _check_gr_domain(mu, nu)
    quad = quad or QuadConfig()
    t = math.tanh(s)

    def piece(a):
        inv_a = 1.0 / a

        def f(y):
            x = y ** inv_a
            return (1.0 + x * x - 2.0 * t * x) ** (-nu) * inv_a

        return integrate(f, 0.0, 1.0, quad, full_output=True)

    v1, e1 = piece(mu)
    v2, e2 = piece(2.0 * nu - mu)
    if full_output:
        return v1 + v2, e1 + e2
    return v1 + v2
