"""Polygon types with per-edge provenance, plus transforms and measures.

A ``Ring`` stores its vertices as an ``(n, 2)`` array.  Edge ``k`` runs from
vertex ``k`` to vertex ``k + 1`` (cyclically) and carries two labels: the id of
the curve it lies on (``owner``, an agent id or ``REGION_BOUNDARY``) and the
base-pattern parameter values at its two ends (``anchor``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

EPS_GEOM = 1e-9
EPS_AREA = 1e-12

REGION_BOUNDARY = -1


@dataclass(frozen=True)
class EdgeLabel:
    """Provenance of a single edge."""

    origin: int
    param_anchor: float | None = None

    @property
    def is_region(self) -> bool:
        return self.origin == REGION_BOUNDARY


@dataclass(frozen=True, eq=False)
class Ring:
    xy: np.ndarray
    owner: np.ndarray
    anchor: np.ndarray

    def __post_init__(self):
        n = len(self.xy)
        if self.xy.shape != (n, 2) or self.owner.shape != (n,) or self.anchor.shape != (n, 2):
            raise ValueError("ring arrays have inconsistent shapes")

    def __len__(self) -> int:
        return len(self.xy)

    @property
    def signed_area(self) -> float:
        return signed_area(self.xy)

    @property
    def labels(self) -> list[EdgeLabel]:
        out = []
        for o, (k0, k1) in zip(self.owner, self.anchor):
            if o == REGION_BOUNDARY:
                out.append(EdgeLabel(REGION_BOUNDARY))
            else:
                out.append(EdgeLabel(int(o), float(0.5 * (k0 + k1))))
        return out

    def segments(self) -> np.ndarray:
        """Edges as a ``(n, 2, 2)`` array of (start, end) points."""
        return np.stack([self.xy, np.roll(self.xy, -1, axis=0)], axis=1)

    def reversed(self) -> "Ring":
        # edge k of the reversed ring is old edge n-2-k traversed backwards
        xy = self.xy[::-1]
        owner = np.roll(self.owner[::-1], -1)
        anchor = np.roll(self.anchor[::-1, ::-1], -1, axis=0)
        return Ring(xy.copy(), owner.copy(), anchor.copy())


@dataclass(frozen=True, eq=False)
class Polygon:
    outer: Ring
    holes: tuple[Ring, ...] = ()

    def rings(self) -> Iterator[Ring]:
        yield self.outer
        yield from self.holes


@dataclass(frozen=True, eq=False)
class MultiPolygon:
    polygons: tuple[Polygon, ...] = field(default_factory=tuple)

    @classmethod
    def empty(cls) -> "MultiPolygon":
        return cls(())

    @property
    def is_empty(self) -> bool:
        return not self.polygons

    def rings(self) -> Iterator[Ring]:
        for p in self.polygons:
            yield from p.rings()

    def segments(self) -> np.ndarray:
        segs = [r.segments() for r in self.rings()]
        if not segs:
            return np.zeros((0, 2, 2))
        return np.concatenate(segs)

    def owners(self) -> np.ndarray:
        owners = [r.owner for r in self.rings()]
        if not owners:
            return np.zeros(0, dtype=int)
        return np.concatenate(owners)

    def bounds(self) -> tuple[float, float, float, float]:
        if self.is_empty:
            return (np.inf, np.inf, -np.inf, -np.inf)
        pts = np.concatenate([p.outer.xy for p in self.polygons])
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        return (lo[0], lo[1], hi[0], hi[1])

    @property
    def n_vertices(self) -> int:
        return sum(len(r) for r in self.rings())


def signed_area(xy: np.ndarray) -> float:
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def make_ring(points: Sequence[Sequence[float]] | np.ndarray, owner: int = REGION_BOUNDARY,
              anchors: Sequence[float] | np.ndarray | None = None,
              period: float | None = None) -> Ring:
    """Build a ring whose edges all carry ``owner``.

    ``anchors`` are per-vertex parameter values; edge ``k`` gets the pair
    (anchor[k], anchor[k+1]).  When ``period`` is given the closing edge
    unwraps its end anchor by one period.
    """
    xy = np.asarray(points, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(xy)):
        raise ValueError("ring vertices must be finite")
    n = len(xy)
    if n < 3:
        raise ValueError("a ring needs at least 3 vertices")
    if anchors is None:
        anchor = np.full((n, 2), np.nan)
    else:
        k = np.asarray(anchors, dtype=float)
        k1 = np.roll(k, -1)
        if period is not None:
            k1[-1] += period
        anchor = np.stack([k, k1], axis=1)
    return Ring(xy.copy(), np.full(n, owner, dtype=int), anchor)


def polygon_from_points(points, owner: int = REGION_BOUNDARY) -> MultiPolygon:
    """Single-ring polygon, normalised to counter-clockwise orientation."""
    ring = make_ring(points, owner)
    if ring.signed_area < 0:
        ring = ring.reversed()
    return MultiPolygon((Polygon(ring),))


def is_convex(xy: np.ndarray, tol: float = EPS_GEOM) -> bool:
    """True for a counter-clockwise convex ring (collinear vertices allowed)."""
    d = np.roll(xy, -1, axis=0) - xy
    cr = d[:, 0] * np.roll(d[:, 1], -1) - d[:, 1] * np.roll(d[:, 0], -1)
    scale = np.max(np.linalg.norm(d, axis=1)) ** 2
    return bool(np.all(cr >= -tol * scale)) and signed_area(xy) > 0


def is_convex_polygon(p: MultiPolygon) -> bool:
    return (len(p.polygons) == 1 and not p.polygons[0].holes
            and is_convex(p.polygons[0].outer.xy))


def affine_transform(p: MultiPolygon, scale: float, rotation: float,
                     translation: Sequence[float]) -> MultiPolygon:
    """Map every vertex ``v`` to ``translation + R(rotation) @ (scale * v)``."""
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    c, s = np.cos(rotation), np.sin(rotation)
    m = scale * np.array([[c, -s], [s, c]])
    t = np.asarray(translation, dtype=float)

    def tr(r: Ring) -> Ring:
        return Ring(r.xy @ m.T + t, r.owner.copy(), r.anchor.copy())

    return MultiPolygon(tuple(Polygon(tr(poly.outer), tuple(tr(h) for h in poly.holes))
                              for poly in p.polygons))


def relabel(p: MultiPolygon, owner: int) -> MultiPolygon:
    def rl(r: Ring) -> Ring:
        return Ring(r.xy, np.full(len(r), owner, dtype=int), r.anchor)

    return MultiPolygon(tuple(Polygon(rl(q.outer), tuple(rl(h) for h in q.holes))
                              for q in p.polygons))


def area(p: MultiPolygon) -> float:
    """Shoelace area with holes subtracted."""
    return max(0.0, sum(r.signed_area for r in p.rings()))


def perimeter(p: MultiPolygon) -> float:
    segs = p.segments()
    return float(np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1).sum())


def points_in_segments(pts: np.ndarray, segs: np.ndarray) -> np.ndarray:
    """Even-odd crossing test of many points against a closed set of edges."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if len(segs) == 0:
        return np.zeros(len(pts), dtype=bool)
    x0, y0 = segs[:, 0, 0], segs[:, 0, 1]
    x1, y1 = segs[:, 1, 0], segs[:, 1, 1]
    px = pts[:, 0:1]
    py = pts[:, 1:2]
    straddle = (y0 > py) != (y1 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
    hit = straddle & (px < xc)
    return (np.count_nonzero(hit, axis=1) % 2) == 1


def distance_to_segments(pts: np.ndarray, segs: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if len(segs) == 0:
        return np.full(len(pts), np.inf)
    a = segs[:, 0]
    d = segs[:, 1] - a
    dd = np.einsum("ij,ij->i", d, d)
    w = pts[:, None, :] - a[None, :, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.clip(np.einsum("pij,ij->pi", w, d) / dd, 0.0, 1.0)
    s = np.where(dd > 0, s, 0.0)
    close = a[None] + s[..., None] * d[None]
    return np.linalg.norm(pts[:, None, :] - close, axis=2).min(axis=1)


def contains_points(p: MultiPolygon, pts, eps: float = EPS_GEOM) -> np.ndarray:
    """Vectorised point-in-polygon with holes; boundary points count as inside."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    segs = p.segments()
    inside = points_in_segments(pts, segs)
    if eps > 0 and len(segs):
        out = ~inside
        if out.any():
            inside[out] = distance_to_segments(pts[out], segs) <= eps
    return inside


def contains_point(p: MultiPolygon, q, eps: float = EPS_GEOM) -> bool:
    return bool(contains_points(p, np.asarray(q, dtype=float)[None], eps)[0])


def convex_contains(xy: np.ndarray, pts: np.ndarray, margin: float = 0.0) -> np.ndarray:
    """Points strictly deeper than ``margin`` inside a CCW convex ring."""
    a = xy
    d = np.roll(xy, -1, axis=0) - a
    length = np.linalg.norm(d, axis=1)
    w = pts[:, None, :] - a[None]
    # signed distance to the left of each edge
    sd = (d[None, :, 0] * w[..., 1] - d[None, :, 1] * w[..., 0]) / length[None]
    return sd.min(axis=1) > margin


def convex_separation(a: np.ndarray, b: np.ndarray) -> float:
    """Separating-axis overlap depth of two CCW convex rings.

    Negative or zero means the interiors are disjoint; positive values are
    the smallest projected overlap over all edge normals.
    """
    depth = np.inf
    for p, q in ((a, b), (b, a)):
        d = np.roll(p, -1, axis=0) - p
        nrm = np.stack([d[:, 1], -d[:, 0]], axis=1)
        nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
        pp = p @ nrm.T
        qq = q @ nrm.T
        ov = np.minimum(pp.max(axis=0), qq.max(axis=0)) - np.maximum(pp.min(axis=0), qq.min(axis=0))
        depth = min(depth, float(ov.min()))
    return depth


def project_to_convex(xy: np.ndarray, q) -> np.ndarray:
    """Euclidean projection of ``q`` onto a CCW convex ring's closed interior."""
    q = np.asarray(q, dtype=float)
    if convex_contains(xy, q[None], margin=0.0)[0]:
        return q.copy()
    a = xy
    d = np.roll(xy, -1, axis=0) - a
    s = np.clip(((q - a) * d).sum(axis=1) / (d * d).sum(axis=1), 0.0, 1.0)
    cand = a + s[:, None] * d
    k = int(np.argmin(np.linalg.norm(cand - q, axis=1)))
    return cand[k]


def iter_polygons(regions: Iterable[MultiPolygon]) -> Iterator[Polygon]:
    for r in regions:
        yield from r.polygons
