"""Hyperboloid model, N* charts and the (theta, t) polar coordinates.

A vector of F^n is stored as n consecutive real blocks of length d, the
first entry of each block being the real part.  Only conjugation, norms
and the imaginary block ``w`` enter the formulas, so no division-algebra
multiplication is needed.

Batched evaluation: every function accepts leading batch axes, i.e.
``Point.coords`` may have shape ``(..., d(p+q+2))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .spaces import SpaceParams, derive_constants

__all__ = [
    "Point",
    "NStarCoords",
    "PolarPoint",
    "ReducedCoords",
    "form",
    "conj",
    "hyperboloid_point",
    "nstar_embed",
    "polar_coords",
    "reduced_coords",
    "k_theta_a_t",
]


def conj(block: np.ndarray, d: int) -> np.ndarray:
    """Conjugate F-valued entries stored as trailing real blocks of length d."""
    out = np.array(block, dtype=float, copy=True)
    if d > 1 and out.shape[-1]:
        shaped = out.reshape(out.shape[:-1] + (-1, d))
        shaped[..., 1:] *= -1.0
        out = shaped.reshape(out.shape)
    return out


def _reverse_blocks(block: np.ndarray, d: int) -> np.ndarray:
    if not block.shape[-1]:
        return block
    shaped = block.reshape(block.shape[:-1] + (-1, d))
    return shaped[..., ::-1, :].reshape(block.shape)


@dataclass(frozen=True)
class Point:
    coords: np.ndarray
    params: SpaceParams

    def block(self, j: int) -> np.ndarray:
        """Real components of the j-th F-coordinate (1-based, as in x_1 ... x_{p+q+2})."""
        d = self.params.d
        return self.coords[..., (j - 1) * d: j * d]

    @property
    def first_block(self) -> np.ndarray:
        """Coordinates x_1 .. x_{p+1} (positive part of the form)."""
        return self.coords[..., : self.params.d * (self.params.p + 1)]

    @property
    def second_block(self) -> np.ndarray:
        """Coordinates x_{p+2} .. x_{p+q+2} (negative part of the form)."""
        return self.coords[..., self.params.d * (self.params.p + 1):]

    @property
    def last(self) -> np.ndarray:
        return self.block(self.params.p + self.params.q + 2)


def form(x: Point) -> np.ndarray:
    """The Hermitian form [x, x] (real-valued)."""
    return np.sum(x.first_block ** 2, axis=-1) - np.sum(x.second_block ** 2, axis=-1)


@dataclass(frozen=True)
class NStarCoords:
    """An element ``N_{u,v,w}`` of the Lie algebra of N*.

    ``u`` lives in F^p, ``v`` in F^q (both stored with v
    numbered right to left), ``w`` in Im F.
    """

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray


class PolarPoint(NamedTuple):
    t: np.ndarray
    theta: np.ndarray


class ReducedCoords(NamedTuple):
    """Output of :func:`reduced_coords`.

    ``cos_cosh`` is ``cos(theta) cosh(t)``: nonnegative in the projective
    case, equal to the (signed) last coordinate for the non-projective real
    variant.
    ``sinh_t`` is only signed for the non-projective ``p = 0`` case.
    """

    cosh2_t: np.ndarray
    cos2_cosh2: np.ndarray
    v: np.ndarray
    cos_cosh: np.ndarray
    sinh_t: np.ndarray


def nstar_embed(params: SpaceParams, free) -> NStarCoords:
    """Fill an N* element from its free real coordinates.

    Layout of ``free``: coupled-source block, free block, then ``w``.  For
    ``p >= q`` that is ``(v, u', w)`` with ``u = (-conj(v^r), u')``; for
    ``p < q`` it is ``(u, v', w)`` with ``v = (-conj(u^r), v')``.
    """
    dc = derive_constants(params)
    free = np.asarray(free, dtype=float)
    if free.shape[-1] != dc.nstar_dim:
        raise ValueError(f"expected {dc.nstar_dim} free coordinates, got {free.shape[-1]}")
    d = params.d
    n1, n2, _ = dc.block_dims
    src = free[..., :n1]
    rest = free[..., n1:n1 + n2]
    w = free[..., n1 + n2:]
    coupled = -conj(_reverse_blocks(src, d), d)
    if params.p >= params.q:
        v, u = src, np.concatenate([coupled, rest], axis=-1)
    else:
        u, v = src, np.concatenate([coupled, rest], axis=-1)
    return NStarCoords(u=u, v=v, w=w)


def hyperboloid_point(params: SpaceParams, s, n: NStarCoords) -> Point:
    """Coordinates of ``a_s exp(N_{u,v,w}) x_0``.

    (sinh s + e^s (|u|^2 - |v|^2)/2 + e^s w, conj(u); -conj(v),
     cosh s + e^s (|u|^2 - |v|^2)/2 + e^s w)
    """
    d, p, q = params.d, params.p, params.q
    u = np.asarray(n.u, dtype=float)
    v = np.asarray(n.v, dtype=float)
    w = np.asarray(n.w, dtype=float)
    if u.shape[-1] != d * p or v.shape[-1] != d * q or w.shape[-1] != d - 1:
        raise ValueError("N* coordinates do not match the space dimensions")
    batch = np.broadcast_shapes(u.shape[:-1], v.shape[:-1], w.shape[:-1], np.shape(s))
    s = np.broadcast_to(np.asarray(s, dtype=float), batch)
    u = np.broadcast_to(u, batch + (d * p,))
    v = np.broadcast_to(v, batch + (d * q,))
    w = np.broadcast_to(w, batch + (d - 1,))
    es = np.exp(s)
    half_diff = 0.5 * es * (np.sum(u * u, axis=-1) - np.sum(v * v, axis=-1))
    first = np.zeros(batch + (d,))
    last = np.zeros(batch + (d,))
    first[..., 0] = np.sinh(s) + half_diff
    last[..., 0] = np.cosh(s) + half_diff
    first[..., 1:] = es[..., None] * w
    last[..., 1:] = es[..., None] * w
    coords = np.concatenate([first, conj(u, d), -conj(v, d), last], axis=-1)
    return Point(coords, params)


def k_theta_a_t(params: SpaceParams, theta, t) -> Point:
    """The point ``k_theta a_t x_0 = (sinh t, 0...; sin(theta) cosh t, 0..., cos(theta) cosh t)``."""
    d, p, q = params.d, params.p, params.q
    theta, t = np.broadcast_arrays(np.asarray(theta, float), np.asarray(t, float))
    coords = np.zeros(theta.shape + (d * (p + q + 2),))
    coords[..., 0] = np.sinh(t)
    coords[..., d * (p + 1)] = np.sin(theta) * np.cosh(t)
    coords[..., d * (p + q + 1)] = np.cos(theta) * np.cosh(t)
    return Point(coords, params)


def polar_coords(x: Point) -> PolarPoint:
    """Recover ``(t, theta)`` with ``x ~ k a_t`` modulo K cap H.

    Projective spaces only see ``cos^2(theta)`` and report theta in
    [0, pi/2]; the non-projective real variant keeps the sign of the last
    coordinate and reports theta in [0, 2 pi) (with a signed ``t`` when
    ``p = 0``, where ``sinh t = x_1``).
    """
    params = x.params
    cosh2 = np.sum(x.second_block ** 2, axis=-1)
    cosh_t = np.sqrt(np.maximum(cosh2, 1.0))
    last = x.last
    if params.projective:
        t = np.arccosh(cosh_t)
        c = np.sqrt(np.sum(last ** 2, axis=-1)) / cosh_t
        theta = np.arccos(np.clip(c, 0.0, 1.0))
        return PolarPoint(t=t, theta=theta)
    # real non-projective: the sign of the last coordinate is meaningful
    if params.p == 0:
        t = np.arcsinh(x.coords[..., 0])
    else:
        t = np.arccosh(cosh_t)
    middle = x.second_block[..., :-1]
    if params.q == 1:
        sin_part = middle[..., 0]
    else:
        sin_part = np.sqrt(np.sum(middle ** 2, axis=-1))
    theta = np.mod(np.arctan2(sin_part, last[..., 0]), 2.0 * np.pi)
    return PolarPoint(t=t, theta=theta)


def reduced_coords(params: SpaceParams, s, x, y, z) -> ReducedCoords:
    """Invariants of ``a_s n`` from the block norms of ``n``.

    For ``p < q``: ``x = |u|``, ``y = |v'|``, ``z = e^s |w|`` and
    ``v = -sinh s + e^s y^2 / 2``, giving ``cosh^2 t = 1 + x^2 + v^2 + z^2``
    and ``cos^2(theta) cosh^2 t = (v - e^-s)^2 + z^2``.

    For ``p >= q`` (``x = |v|``, ``y = |u'|``, ``z = e^s |w|``) the analogous
    chart has ``v = cosh s + e^s y^2 / 2``, ``cosh^2 t = v^2 + x^2 + z^2`` and
    ``cos^2(theta) cosh^2 t = v^2 + z^2``.
    """
    s, x, y, z = (np.asarray(a, dtype=float) for a in (s, x, y, z))
    es = np.exp(s)
    if params.p < params.q:
        v = -np.sinh(s) + 0.5 * es * y * y
        cosh2 = 1.0 + x * x + v * v + z * z
        shifted = v - np.exp(-s)
    else:
        v = np.cosh(s) + 0.5 * es * y * y
        cosh2 = v * v + x * x + z * z
        shifted = v
    cos2 = shifted * shifted + z * z
    if params.projective:
        cos_cosh = np.sqrt(cos2)
        sinh_t = np.sqrt(np.maximum(cosh2 - 1.0, 0.0))
    else:
        # signed cos(theta) cosh(t) equals the last coordinate of the point
        cos_cosh = -shifted if params.p < params.q else shifted
        sinh_t = -v if params.p == 0 else np.sqrt(np.maximum(cosh2 - 1.0, 0.0))
    return ReducedCoords(cosh2_t=cosh2, cos2_cosh2=cos2, v=v, cos_cosh=cos_cosh, sinh_t=sinh_t)
