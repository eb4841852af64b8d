"""Line and area quadrature over polygonal regions."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np

from .polygon import MultiPolygon

ScalarField = Callable[[np.ndarray], np.ndarray]

# Symmetric triangle rules: (barycentric orbit generator, weight per point).
_TRI_RULES = {
    1: [((1 / 3, 1 / 3, 1 / 3), 1.0)],
    2: [((2 / 3, 1 / 6, 1 / 6), 1 / 3)],
    4: [((0.108103018168070, 0.445948490915965, 0.445948490915965), 0.223381589678011),
        ((0.816847572980459, 0.091576213509771, 0.091576213509771), 0.109951743655322)],
    6: [((0.501426509658179, 0.249286745170910, 0.249286745170910), 0.116786275726379),
        ((0.873821971016996, 0.063089014491502, 0.063089014491502), 0.050844906370207),
        ((0.053145049844817, 0.310352451033784, 0.636502499121399), 0.082851075618374)],
}


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def triangle_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric points ``(P, 3)`` and weights summing to one."""
    if order not in _TRI_RULES:
        raise ValueError(f"no triangle rule of order {order}; have {sorted(_TRI_RULES)}")
    pts, wts = [], []
    for gen, w in _TRI_RULES[order]:
        orbit = sorted(set(_perms(gen)))
        pts.extend(orbit)
        wts.extend([w] * len(orbit))
    return np.array(pts), np.array(wts)


def _perms(t):
    a, b, c = t
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


@lru_cache(maxsize=None)
def _subdivided_rule(order: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Rule on the reference triangle split uniformly into ``n * n`` pieces.

    Returned points are (s, t) coordinates so that a physical point is
    ``A + s (B - A) + t (C - A)``.
    """
    bary, w = triangle_rule(order)
    subs = []
    for i in range(n):
        for j in range(n - i):
            subs.append(((i, j), (i + 1, j), (i, j + 1)))
            if i + j <= n - 2:
                subs.append(((i + 1, j), (i + 1, j + 1), (i, j + 1)))
    corners = np.array(subs, dtype=float) / n           # (S, 3, 2)
    pts = np.einsum("pk,skd->spd", bary, corners).reshape(-1, 2)
    wts = np.tile(w / (n * n), len(subs))
    return pts, wts


def parametrize(segs: np.ndarray, order: int):
    """Quadrature points, unit outward normals and arc-length weights.

    Outward means to the right of the direction of travel, which is outward
    for counter-clockwise outer rings and clockwise holes.
    """
    t, w = gauss_legendre(order)
    p0 = segs[:, 0]
    d = segs[:, 1] - p0
    length = np.hypot(d[:, 0], d[:, 1])
    good = length > 0
    p0, d, length = p0[good], d[good], length[good]
    pts = p0[:, None, :] + t[None, :, None] * d[:, None, :]
    normal = np.stack([d[:, 1], -d[:, 0]], axis=1) / length[:, None]
    ds = length[:, None] * w[None, :]
    return pts.reshape(-1, 2), np.repeat(normal, len(t), axis=0), ds.reshape(-1)


def line_integral_vector(segs: np.ndarray, weight: ScalarField,
                         jacobian: Callable[[np.ndarray], np.ndarray] | None = None,
                         order: int = 3) -> np.ndarray:
    """Sum over edges of ``weight(q) * J(q)^T n(q) ds``; ``J`` defaults to identity."""
    if len(segs) == 0:
        return np.zeros(2)
    pts, n, ds = parametrize(np.asarray(segs, dtype=float), order)
    if len(pts) == 0:
        return np.zeros(2)
    wq = np.asarray(weight(pts), dtype=float) * ds
    if jacobian is None:
        vn = n
    else:
        vn = np.einsum("pij,pi->pj", jacobian(pts), n)
    return (wq[:, None] * vn).sum(axis=0)


def line_integral_scalar(segs: np.ndarray, weight: ScalarField,
                         velocity: Callable[[np.ndarray], np.ndarray],
                         order: int = 3) -> float:
    """Sum over edges of ``weight(q) * (v(q) . n(q)) ds``."""
    if len(segs) == 0:
        return 0.0
    pts, n, ds = parametrize(np.asarray(segs, dtype=float), order)
    if len(pts) == 0:
        return 0.0
    vn = np.einsum("pi,pi->p", velocity(pts), n)
    return float(np.sum(np.asarray(weight(pts), dtype=float) * vn * ds))


def area_integral(region: MultiPolygon, integrand: ScalarField, order: int = 4,
                  h_max: float | None = None) -> float:
    """Integral of ``integrand`` over ``region``.

    Each ring is fanned from its vertex mean into signed triangles, so holes
    (clockwise) subtract themselves and non-convex rings need no ear
    clipping.  ``h_max`` uniformly refines triangles whose longest side
    exceeds it.
    """
    total = 0.0
    for ring in region.rings():
        xy = ring.xy
        c = xy.mean(axis=0)
        A = np.broadcast_to(c, xy.shape)
        B = xy
        C = np.roll(xy, -1, axis=0)
        e1 = B - A
        e2 = C - A
        sarea = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        if h_max is None:
            nsub = np.ones(len(xy), dtype=int)
        else:
            longest = np.max(np.stack([np.hypot(*e1.T), np.hypot(*e2.T),
                                       np.hypot(*(C - B).T)]), axis=0)
            nsub = np.clip(np.ceil(longest / h_max), 1, 256).astype(int)
        for n in np.unique(nsub):
            sel = nsub == n
            st, w = _subdivided_rule(order, int(n))
            pts = (A[sel][:, None, :] + st[None, :, 0:1] * e1[sel][:, None, :]
                   + st[None, :, 1:2] * e2[sel][:, None, :])
            vals = np.asarray(integrand(pts.reshape(-1, 2)), dtype=float).reshape(pts.shape[:2])
            total += float(np.sum(sarea[sel] * (vals @ w)))
    return total

