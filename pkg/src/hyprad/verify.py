"""Property and oracle checks behind ``hyprad verify``.

Each check returns a :class:`CheckResult` with the worst measured error,
the tolerance it is held to and its wall-clock runtime.  Checks are grouped
into suites by the module whose claims they exercise.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .geometry import form, hyperboloid_point, nstar_embed, polar_coords, reduced_coords
from .model_functions import (
    bump_profile,
    point_function,
    psi_combination,
    psi_qd1_point,
    psi_tilde,
    radial_eigen_coefficients,
)
from .quadrature import QuadConfig
from .reference import radon_shape_closed, reduction_check, taylor_exponents, taylor_report
from .spaces import SpaceParams, derive_constants, enumerate_series, mu_of, noncuspidal_parameters
from .specfun import gr_integral_closed, gr_integral_numeric
from .transforms import (
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

__all__ = ["CheckResult", "SUITES", "CRITERIA", "run_suite", "run_criterion"]

SEED = 20240611


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    runtime: float = 0.0
    budget: Optional[float] = None
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["measured"] = _finite_or_str(self.measured)
        return out

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: measured {self.measured:.3e} "
                f"(tol {self.tolerance:.1e}), {self.runtime:.1f} s")


def _finite_or_str(x):
    return x if math.isfinite(x) else str(x)


def _spread(values) -> float:
    """Relative spread ``(max - min) / |mean|``."""
    v = np.asarray(values, dtype=float)
    return float((v.max() - v.min()) / abs(v.mean()))


def _config(default: QuadConfig, tol: Optional[float]) -> QuadConfig:
    """``default`` with its relative tolerance overridden (adaptive rules only)."""
    if tol is None or not default.adaptive:
        return default
    return replace(default, rel_tol=float(tol))


def _timed(name, tol, budget, body) -> CheckResult:
    """Run ``body() -> (measured, details[, passed])`` under a wall-clock budget.

    Composite checks supply ``passed`` themselves and keep their
    sub-measurements in ``details``.
    """
    t0 = time.perf_counter()
    out = body()
    runtime = time.perf_counter() - t0
    measured, details = out[0], out[1]
    passed = bool(out[2]) if len(out) > 2 else bool(measured <= tol)
    if budget is not None and runtime > budget:
        passed = False
        details["over_budget"] = True
    return CheckResult(name, passed, float(measured), tol, runtime, budget, details)


# --- 1. special functions ----------------------------------------------------

def check_gr_identity(tol: Optional[float] = None, cases: int = 400) -> CheckResult:
    quad = _config(QuadConfig(rel_tol=1e-12, abs_tol=1e-300), tol)

    def body():
        rng = np.random.default_rng(SEED)
        worst, where = 0.0, None
        for _ in range(cases):
            mu = rng.uniform(0.2, 3.0)
            nu = rng.uniform(mu / 2 + 0.2, 4.0)
            s = rng.uniform(-2.0, 2.0)
            closed = gr_integral_closed(mu, nu, s)
            numeric = gr_integral_numeric(mu, nu, s, quad)
            err = abs(closed - numeric) / abs(numeric)
            if err > worst:
                worst, where = err, (mu, nu, s)
        return worst, {"cases": cases, "worst_case": where}

    return _timed("gr_identity", 1e-8, 60.0, body)


# --- 2. geometry ----------------------------------------------------------------

GEOMETRY_SPACES = {
    "p<q": [SpaceParams(1, 0, 2), SpaceParams(2, 1, 3), SpaceParams(4, 0, 1), SpaceParams(1, 1, 4)],
    "p>=q": [SpaceParams(1, 2, 1), SpaceParams(2, 1, 1), SpaceParams(4, 2, 1), SpaceParams(1, 3, 3)],
}


def chart_norms(params: SpaceParams, s, free):
    """``(x, y, z)`` of the reduced coordinates from chart coordinates.

    ``x`` is the norm of the coupled-source block, ``y`` of the free block
    and ``z = e^s |w|``.
    """
    n1, n2, _ = derive_constants(params).block_dims
    x = np.linalg.norm(free[..., :n1], axis=-1)
    y = np.linalg.norm(free[..., n1:n1 + n2], axis=-1)
    z = np.exp(s) * np.linalg.norm(free[..., n1 + n2:], axis=-1)
    return x, y, z


def check_geometry(tol: Optional[float] = None, samples: int = 1000) -> CheckResult:
    def body():
        rng = np.random.default_rng(SEED + 1)
        worst_form = worst_chart = 0.0
        for chart, spaces in GEOMETRY_SPACES.items():
            for k, params in enumerate(spaces):
                count = samples // len(spaces) + (k < samples % len(spaces))
                dim = derive_constants(params).nstar_dim
                s = rng.uniform(-2.0, 2.0, size=count)
                free = rng.normal(size=(count, dim))
                x = hyperboloid_point(params, s, nstar_embed(params, free))
                worst_form = max(worst_form, float(np.max(np.abs(form(x) + 1.0))))
                pol = polar_coords(x)
                cosh2 = np.cosh(pol.t) ** 2
                cos2 = (np.cos(pol.theta) * np.cosh(pol.t)) ** 2
                red = reduced_coords(params, s, *chart_norms(params, s, free))
                scale = np.maximum(cosh2, 1.0)
                err = max(np.max(np.abs(red.cosh2_t - cosh2) / scale),
                          np.max(np.abs(red.cos2_cosh2 - cos2) / scale))
                worst_chart = max(worst_chart, float(err))
        return max(worst_form, worst_chart), {"form": worst_form, "chart": worst_chart,
                                              "samples_per_chart": samples}

    return _timed("geometry_round_trip", 1e-10, 10.0, body)


# --- 3. closed-form Radon ----------------------------------------------------------

CLOSED_FORM_SPACES = (SpaceParams(1, 0, 4), SpaceParams(1, 0, 6), SpaceParams(2, 0, 4))
CLOSED_FORM_GRID = (-1.5, -0.5, 0.0, 0.5, 1.5)
EXPONENT_GRID = tuple(np.linspace(0.5, 2.5, 9))


def spherical_generating_profile(params: SpaceParams, lam):
    """``psi_lambda`` as a profile: ``psi_tilde_lambda`` plus its eigen-expansion tail."""
    coeffs = radial_eigen_coefficients(params, lam)
    if len(coeffs) == 1:
        return psi_tilde(params, lam)
    return psi_combination(params, lam, coeffs)


def fitted_abel_exponent(params: SpaceParams, profile, s_grid, quad: Optional[QuadConfig] = None) -> float:
    """Slope of the least-squares line through ``log |A f(s)|``."""
    s = np.asarray(s_grid, dtype=float)
    vals = np.array([abel(params, radon_reduced(params, profile, si, quad), si) for si in s])
    slope, _ = np.polyfit(s, np.log(np.abs(vals)), 1)
    return float(slope)


def check_closed_form(tol: Optional[float] = None) -> CheckResult:
    quad = _config(QuadConfig(), tol)

    def body():
        rows = []
        worst_spread = worst_exp = 0.0
        for params in CLOSED_FORM_SPACES:
            for ser in enumerate_series(params, 12):
                if not ser.spherical:
                    continue
                lam = ser.lam
                prof = psi_tilde(params, lam)
                ratios = [radon_reduced(params, prof, s, quad) / radon_shape_closed(params, lam, s)
                          for s in CLOSED_FORM_GRID]
                spread = _spread(ratios)
                slope = fitted_abel_exponent(params, spherical_generating_profile(params, lam),
                                             EXPONENT_GRID, quad)
                worst_spread = max(worst_spread, spread)
                worst_exp = max(worst_exp, abs(slope - float(lam)))
                rows.append({"space": str(params), "lambda": float(lam), "mu": ser.mu,
                             "ratio_spread": spread, "exponent": slope})
        ok = worst_spread <= 1e-5 and worst_exp <= 1e-4
        return worst_spread, {"rows": rows, "exponent_error": worst_exp, "exponent_tol": 1e-4}, ok

    return _timed("closed_form_radon", 1e-5, 300.0, body)


# --- 4. reduced vs full -------------------------------------------------------------

FULL_ORACLE_CASES = ((SpaceParams(1, 0, 2), 2), (SpaceParams(2, 0, 1), 2))
FULL_ORACLE_GRID = (-0.5, 0.0, 0.7)


def check_full_oracle(tol: Optional[float] = None) -> CheckResult:
    quad = _config(QuadConfig(), tol)

    def body():
        worst, rows = 0.0, []
        for params, lam in FULL_ORACLE_CASES:
            prof = psi_tilde(params, lam)
            f = point_function(prof)
            for s in FULL_ORACLE_GRID:
                full = radon_full(params, f, s, quad)
                red = sphere_factor(params) * radon_reduced(params, prof, s, quad)
                err = abs(full - red) / abs(red)
                worst = max(worst, err)
                rows.append({"space": str(params), "lambda": lam, "s": s, "rel_err": err})
        return worst, {"rows": rows}

    return _timed("reduced_vs_full", 1e-5, 180.0, body)


# --- 5. compact support -------------------------------------------------------------

SUPPORT_SPACES = (SpaceParams(1, 2, 1), SpaceParams(2, 1, 1))
SUPPORT_GRID = (-2.0, -1.5, -1.1, 1.1, 1.5, 2.0)


def check_compact_support(tol: Optional[float] = None) -> CheckResult:
    quad = _config(QuadConfig(), tol)

    def body():
        worst, rows = 0.0, []
        prof = bump_profile(1.0, 0)
        f = point_function(prof)
        inside_ok = True
        for params in SUPPORT_SPACES:
            for s in SUPPORT_GRID:
                val = radon_full(params, f, s, quad, support_radius=1.0)
                worst = max(worst, abs(val))
                rows.append({"space": str(params), "s": s, "value": val})
            # not identically zero inside the support
            inside = radon_full(params, f, 0.5, quad, support_radius=1.0)
            inside_ok &= inside > 0
            rows.append({"space": str(params), "s": 0.5, "value": inside})
        return worst, {"rows": rows}, worst == 0.0 and inside_ok

    return _timed("compact_support", 0.0, None, body)


# --- 6. cuspidality for q = d = 1 ----------------------------------------------------

def check_cuspidality(tol: Optional[float] = None) -> CheckResult:
    quad = _config(QuadConfig(rel_tol=1e-10), tol)
    params = SpaceParams(1, 1, 1)

    def body():
        worst, rows = 0.0, []
        for ser in enumerate_series(params, 1):
            f = psi_qd1_point(params, ser)
            g = psi_qd1_point(params, ser, absolute=True)
            for s in (-1.0, 0.0, 1.0):
                val = radon_full(params, f, s, quad)
                ref = radon_full(params, g, s, quad)
                ratio = abs(val) / ref
                worst = max(worst, ratio)
                rows.append({"lambda": float(ser.lam), "m": int(ser.m), "s": s,
                             "abs_radon": abs(val), "radon_of_abs": ref})
        return worst, {"rows": rows}

    return _timed("cuspidality_qd1", 1e-6, None, body)


# --- 7./8. Laplacian ---------------------------------------------------------------

EIGEN_CASES = ((SpaceParams(1, 0, 4), 1), (SpaceParams(2, 0, 4), 3))


def check_eigen_gate(tol: Optional[float] = None) -> CheckResult:
    def body():
        worst, rows = 0.0, []
        for params, lam in EIGEN_CASES:
            rho = float(derive_constants(params).rho_q)

            def phi(s, lam=lam, rho=rho):
                return np.cosh(s) ** (-lam - rho)

            for s in (0.4, 0.9, 1.5):
                lhs = radial_laplacian(params, phi, s)
                rhs = (lam ** 2 - rho ** 2) * phi(s)
                err = float(abs(lhs - rhs) / abs(rhs))
                worst = max(worst, err)
                rows.append({"space": str(params), "lambda": lam, "s": s, "rel_err": err})
        return worst, {"rows": rows}

    return _timed("radial_laplacian_eigen_gate", 1e-6, None, body)


# Both sides are finite-differenced in s, so the quadrature must be smooth in s.
INTERTWINING_QUAD = QuadConfig(adaptive=False, panels=64)
INTERTWINING_BUMP_RADIUS = 1.0


def check_intertwining(tol: Optional[float] = None, h: float = 0.01) -> CheckResult:
    params = SpaceParams(1, 0, 4)
    prof = bump_profile(INTERTWINING_BUMP_RADIUS, 0)
    lap = laplacian_profile(params, prof)
    quad = INTERTWINING_QUAD
    rho_q = float(derive_constants(params).rho_q)
    grid = np.round(np.arange(-1.5, 1.5 + 1e-9, 0.1), 12)
    # fourth-order central second difference
    offsets = np.array([-2, -1, 0, 1, 2])
    weights = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h * h)

    def A(profile, s):
        return abel(params, radon_reduced(params, profile, s, quad), s)

    def body():
        lhs = np.array([A(lap, s) for s in grid])
        rhs = []
        for s in grid:
            vals = np.array([A(prof, s + k * h) for k in offsets])
            rhs.append(weights @ vals - rho_q ** 2 * vals[2])
        rhs = np.array(rhs)
        scale = float(np.max(np.abs(rhs)))
        dev = float(np.max(np.abs(lhs - rhs))) / scale
        return dev, {"scale": scale, "points": len(grid), "h": h}

    return _timed("intertwining", 1e-4, 300.0, body)


# --- 9. Taylor machinery and the D surrogate -------------------------------------------

TAYLOR_SPACES = (SpaceParams(1, 0, 4), SpaceParams(2, 0, 4))
TAYLOR_QUAD = QuadConfig(rel_tol=1e-12, abs_tol=1e-15)
# D is a high-order difference operator; it needs values smooth in s
D_QUAD = QuadConfig(adaptive=False, panels=48)
D_STRIDE = 4
D_SPACING = 0.02
D_BUMP_RADIUS = 2.2


def d_surrogate_ratio(params: SpaceParams, m: int, *, R: float = D_BUMP_RADIUS, stride: int = D_STRIDE,
                      h: float = D_SPACING, quad: QuadConfig = D_QUAD, workers: int = 1):
    """``(max_[3,5] |D A f| / max_[1,2] |D A f|, max_[1,2], max_[3,5])`` for the bump of mode ``m``."""
    r = len(noncuspidal_parameters(params))
    trim = 2 * stride * (r + 1)
    lo = 1.0 - trim * h
    n = int(round((4.0 + 2 * trim * h) / h)) + 1
    s = lo + h * np.arange(n)
    prof = bump_profile(R, m)
    series = radon_reduced_series(params, prof, s, quad, workers=workers)
    A = GridSeries(s, abel(params, series.values, s), abel(params, series.error_estimates, s))
    out = apply_D_downstairs(params, A, stride=stride)
    sv, dv = out.s_values, np.abs(out.values)
    near = dv[(sv >= 1.0 - 1e-9) & (sv <= 2.0 + 1e-9)].max()
    far = dv[(sv >= 3.0 - 1e-9) & (sv <= 5.0 + 1e-9)].max()
    return float(far / near), float(near), float(far)


def check_taylor(tol: Optional[float] = None, workers: int = 1) -> CheckResult:
    tq = _config(TAYLOR_QUAD, tol)

    def body():
        rows = []
        odd_worst = d_worst = 0.0
        exponent_ok = True
        for params in TAYLOR_SPACES:
            exps = sorted(Fraction(e) for e in taylor_exponents(params))
            nc = sorted(Fraction(x) for x in noncuspidal_parameters(params))
            exponent_ok &= exps == nc
            lam0 = next(x for x in nc if mu_of(params, x) == 0)
            for prof in (bump_profile(1.0, 0), bump_profile(1.0, 2), psi_tilde(params, lam0)):
                rep = taylor_report(params, prof, tq)
                c = rep.coefficients
                odd = max([abs(c[j]) / abs(c[0]) for j in range(1, len(c), 2)], default=0.0)
                odd_worst = max(odd_worst, odd)
                rows.append({"space": str(params), "profile": prof.label, "k0": rep.k0,
                             "coefficients": list(c), "odd_rel": odd})
            for m in (0, 2):
                ratio, near, far = d_surrogate_ratio(params, m, workers=workers)
                d_worst = max(d_worst, ratio)
                rows.append({"space": str(params), "D_bump_mode": m, "max_1_2": near,
                             "max_3_5": far, "ratio": ratio})
        ok = odd_worst <= 1e-8 and d_worst <= 0.1 and exponent_ok
        return odd_worst, {"rows": rows, "exponents_match": exponent_ok,
                           "D_ratio_worst": d_worst, "D_ratio_tol": 0.1}, ok

    return _timed("taylor_machinery", 1e-8, 600.0, body)


# --- 10. reduction identity ------------------------------------------------------------

REDUCTION_GRID = (-1.0, -0.5, 0.0, 0.5, 1.0)


def check_reduction(tol: Optional[float] = None) -> CheckResult:
    params = SpaceParams(2, 0, 1)
    quad = _config(QuadConfig(), tol)

    def body():
        worst, rows = 0.0, []
        for lam in (2, 3):
            series = reduction_check(params, lam, REDUCTION_GRID, quad)
            spread = _spread(series.values)
            worst = max(worst, spread)
            rows.append({"lambda": lam, "ratios": series.values.tolist(), "spread": spread})
        return worst, {"rows": rows, "target": "X(2,4;d=1)"}

    return _timed("reduction_identity", 1e-5, 180.0, body)


CRITERIA: dict = {
    1: check_gr_identity,
    2: check_geometry,
    3: check_closed_form,
    4: check_full_oracle,
    5: check_compact_support,
    6: check_cuspidality,
    7: check_intertwining,
    8: check_eigen_gate,
    9: check_taylor,
    10: check_reduction,
}

# the eigen gate (8) precedes intertwining (7), which depends on it
SUITES = {
    "specfun": (1,),
    "geometry": (2,),
    "transforms": (8, 7, 4, 5, 6),
    "reference": (3, 9, 10),
}
SUITES["all"] = SUITES["specfun"] + SUITES["geometry"] + SUITES["transforms"] + SUITES["reference"]


def run_criterion(number: int, tol: Optional[float] = None) -> CheckResult:
    result = CRITERIA[number](tol=tol)
    result.details["criterion"] = number
    return result


def run_suite(name: str, tol: Optional[float] = None) -> list:
    """Run a suite in order; intertwining is reported as failed if the eigen gate fails."""
    if name not in SUITES:
        raise KeyError(name)
    results = []
    gate_ok = None
    for n in SUITES[name]:
        if n == 7:
            if gate_ok is None:
                gate_ok = run_criterion(8, tol).passed
            if not gate_ok:
                results.append(CheckResult("intertwining", False, math.inf, 1e-4,
                                           details={"criterion": 7, "skipped": "eigen gate failed"}))
                continue
        result = run_criterion(n, tol)
        if n == 8:
            gate_ok = result.passed
        results.append(result)
    return results
