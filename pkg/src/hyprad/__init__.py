"""Radon and Abel transforms on projective hyperbolic spaces X(p+1, q+1; F).

Submodules: ``spaces`` (parameters and discrete-series bookkeeping),
``specfun`` (special functions), ``geometry`` (hyperboloid model and
charts), ``model_functions`` (test functions), ``transforms`` (Radon,
Abel, Laplacian, the operator D), ``reference`` (closed forms and Taylor
machinery), ``verify`` and ``cli``.
"""

from .spaces import SpaceParams, SeriesParam, derive_constants, enumerate_series, noncuspidal_parameters
from .quadrature import QuadConfig
from .model_functions import RadialProfile, bump_profile, psi_tilde
from .transforms import GridSeries, abel, radon_full, radon_reduced

__version__ = "0.1.0"

__all__ = [
    "SpaceParams",
    "SeriesParam",
    "derive_constants",
    "enumerate_series",
    "noncuspidal_parameters",
    "QuadConfig",
    "RadialProfile",
    "bump_profile",
    "psi_tilde",
    "GridSeries",
    "abel",
    "radon_full",
    "radon_reduced",
]
