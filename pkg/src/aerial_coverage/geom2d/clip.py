"""Polygon booleans that keep track of which input edge every output edge came from.

General path: split both operands' edges at every mutual crossing and
vertex-on-edge contact, classify each piece against the other operand
(inside / outside / coincident same-way / coincident opposite-way), keep the
pieces the operation needs and link them back into rings.  Coincident pieces
are resolved in favour of the left operand.

Convex fast path: when both operands are single convex rings and the right
operand has few edges (the region of interest, typically), ``intersect``
clips the left operand by the right one's half-planes.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .polygon import (
    EPS_AREA,
    EPS_GEOM,
    MultiPolygon,
    Polygon,
    Ring,
    is_convex_polygon,
    points_in_segments,
    signed_area,
)

_INSIDE, _OUTSIDE, _SAME, _OPPOSITE = 0, 1, 2, 3

# half-plane clipping costs one pass per clip edge; beyond this the general path wins
_FAST_CLIP_EDGES = 24


class _Edges:
    """Flat edge table of a multipolygon."""

    __slots__ = ("p0", "p1", "owner", "anchor")

    def __init__(self, p0, p1, owner, anchor):
        self.p0 = p0
        self.p1 = p1
        self.owner = owner
        self.anchor = anchor

    @classmethod
    def of(cls, mp: MultiPolygon, snap_to: np.ndarray | None = None) -> "_Edges":
        p0s, p1s, owners, anchors = [], [], [], []
        for r in mp.rings():
            xy = r.xy
            if snap_to is not None and len(snap_to):
                xy = _snap(xy, snap_to)
            p0s.append(xy)
            p1s.append(np.roll(xy, -1, axis=0))
            owners.append(r.owner)
            anchors.append(r.anchor)
        if not p0s:
            z = np.zeros((0, 2))
            return cls(z, z, np.zeros(0, dtype=int), z)
        return cls(np.concatenate(p0s), np.concatenate(p1s),
                   np.concatenate(owners), np.concatenate(anchors))

    def __len__(self):
        return len(self.p0)


def _snap(xy: np.ndarray, targets: np.ndarray) -> np.ndarray:
    tree = cKDTree(targets)
    dist, idx = tree.query(xy, distance_upper_bound=EPS_GEOM)
    hit = np.isfinite(dist)
    if not hit.any():
        return xy
    out = xy.copy()
    out[hit] = targets[idx[hit]]
    return out


def _bbox_overlap(a: MultiPolygon, b: MultiPolygon, pad: float = EPS_GEOM) -> bool:
    ax0, ay0, ax1, ay1 = a.bounds()
    bx0, by0, bx1, by1 = b.bounds()
    return not (ax1 < bx0 - pad or bx1 < ax0 - pad or ay1 < by0 - pad or by1 < ay0 - pad)


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _vertex_on_edge(verts: np.ndarray, e: _Edges):
    """(edge index, param, vertex index) for vertices touching an edge interior."""
    d = e.p1 - e.p0
    length = np.hypot(d[:, 0], d[:, 1])
    # coarse bbox prefilter
    lo = np.minimum(e.p0, e.p1) - EPS_GEOM
    hi = np.maximum(e.p0, e.p1) + EPS_GEOM
    near = ((verts[:, None, 0] >= lo[None, :, 0]) & (verts[:, None, 0] <= hi[None, :, 0])
            & (verts[:, None, 1] >= lo[None, :, 1]) & (verts[:, None, 1] <= hi[None, :, 1]))
    vi, ei = np.nonzero(near)
    if len(vi) == 0:
        return np.zeros(0, dtype=int), np.zeros(0), np.zeros(0, dtype=int)
    w = verts[vi] - e.p0[ei]
    L = length[ei]
    s = (w[:, 0] * d[ei, 0] + w[:, 1] * d[ei, 1]) / (L * L)
    perp = np.abs(_cross(d[ei, 0], d[ei, 1], w[:, 0], w[:, 1])) / L
    ok = (perp <= EPS_GEOM) & (s * L > EPS_GEOM) & ((1 - s) * L > EPS_GEOM)
    return ei[ok], s[ok], vi[ok]


def _crossings(ea: _Edges, eb: _Edges):
    """Proper interior crossings between the two edge sets."""
    alo = np.minimum(ea.p0, ea.p1)
    ahi = np.maximum(ea.p0, ea.p1)
    blo = np.minimum(eb.p0, eb.p1)
    bhi = np.maximum(eb.p0, eb.p1)
    near = ((alo[:, None, 0] <= bhi[None, :, 0]) & (blo[None, :, 0] <= ahi[:, None, 0])
            & (alo[:, None, 1] <= bhi[None, :, 1]) & (blo[None, :, 1] <= ahi[:, None, 1]))
    ia, ib = np.nonzero(near)
    if len(ia) == 0:
        return ia, ib, np.zeros(0), np.zeros(0), np.zeros((0, 2))
    da = ea.p1[ia] - ea.p0[ia]
    db = eb.p1[ib] - eb.p0[ib]
    w = eb.p0[ib] - ea.p0[ia]
    den = _cross(da[:, 0], da[:, 1], db[:, 0], db[:, 1])
    La = np.hypot(da[:, 0], da[:, 1])
    Lb = np.hypot(db[:, 0], db[:, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        t = _cross(w[:, 0], w[:, 1], db[:, 0], db[:, 1]) / den
        u = _cross(w[:, 0], w[:, 1], da[:, 0], da[:, 1]) / den
    ok = ((np.abs(den) > 1e-300) & (t * La > EPS_GEOM) & ((1 - t) * La > EPS_GEOM)
          & (u * Lb > EPS_GEOM) & ((1 - u) * Lb > EPS_GEOM))
    ia, ib, t, u = ia[ok], ib[ok], t[ok], u[ok]
    pts = ea.p0[ia] + t[:, None] * (ea.p1[ia] - ea.p0[ia])
    # nearly parallel pairs sharing an endpoint give ill-conditioned solves whose
    # two parametric points disagree; such contacts are handled as vertex touches
    pts_b = eb.p0[ib] + u[:, None] * (eb.p1[ib] - eb.p0[ib])
    ok = np.hypot(*(pts - pts_b).T) <= EPS_GEOM
    return ia[ok], ib[ok], t[ok], u[ok], pts[ok]


class _Pieces:
    """Sub-edges after splitting: endpoint ids into a shared vertex table."""

    def __init__(self):
        self.start: list[np.ndarray] = []
        self.end: list[np.ndarray] = []
        self.owner: list[np.ndarray] = []
        self.anchor: list[np.ndarray] = []

    def arrays(self):
        if not self.start:
            z = np.zeros((0, 2))
            return z, z, np.zeros(0, dtype=int), z
        return (np.concatenate(self.start), np.concatenate(self.end),
                np.concatenate(self.owner), np.concatenate(self.anchor))


def _split(e: _Edges, splits: dict[int, list[tuple[float, np.ndarray]]]):
    """Break edges at their split parameters; returns point arrays and labels."""
    untouched = np.ones(len(e), dtype=bool)
    for k in splits:
        untouched[k] = False
    pieces = _Pieces()
    keep = np.nonzero(untouched)[0]
    pieces.start.append(e.p0[keep])
    pieces.end.append(e.p1[keep])
    pieces.owner.append(e.owner[keep])
    pieces.anchor.append(e.anchor[keep])
    for k, lst in splits.items():
        lst.sort(key=lambda item: item[0])
        params = [0.0] + [s for s, _ in lst] + [1.0]
        pts = [e.p0[k]] + [p for _, p in lst] + [e.p1[k]]
        k0, k1 = e.anchor[k]
        m = len(pts) - 1
        st = np.array(pts[:-1])
        en = np.array(pts[1:])
        par = np.array(params)
        anc = np.stack([k0 + (k1 - k0) * par[:-1], k0 + (k1 - k0) * par[1:]], axis=1)
        pieces.start.append(st)
        pieces.end.append(en)
        pieces.owner.append(np.full(m, e.owner[k], dtype=int))
        pieces.anchor.append(anc)
    return pieces.arrays()


def _vertex_ids(points: np.ndarray):
    """Cluster coincident points (within EPS_GEOM); returns ids and representatives."""
    uniq, inv = np.unique(points, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    pairs = cKDTree(uniq).query_pairs(EPS_GEOM, output_type="ndarray")
    if len(pairs) == 0:
        return inv, uniq
    n = len(uniq)
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = np.array([find(i) for i in range(n)])
    reps, ids = np.unique(roots, return_inverse=True)
    return ids.reshape(-1)[inv], uniq[reps]


def _classify(s_ids, e_ids, mids, other_keys, other_segs):
    cls = np.empty(len(s_ids), dtype=int)
    inside = points_in_segments(mids, other_segs) if len(mids) else np.zeros(0, dtype=bool)
    for k, (p, q) in enumerate(zip(s_ids, e_ids)):
        if (p, q) in other_keys:
            cls[k] = _SAME
        elif (q, p) in other_keys:
            cls[k] = _OPPOSITE
        else:
            cls[k] = _INSIDE if inside[k] else _OUTSIDE
    return cls


def _link(verts: np.ndarray, s: np.ndarray, e: np.ndarray, owner: np.ndarray,
          anchor: np.ndarray) -> list[Ring]:
    """Chain directed edges into closed rings, turning as far left as possible."""
    out_edges: dict[int, list[int]] = defaultdict(list)
    for k, p in enumerate(s):
        out_edges[int(p)].append(k)
    used = np.zeros(len(s), dtype=bool)
    rings: list[Ring] = []
    for start in range(len(s)):
        if used[start]:
            continue
        chain = [start]
        used[start] = True
        origin = int(s[start])
        cur = start
        closed = False
        while True:
            v = int(e[cur])
            if v == origin:
                closed = True
                break
            cands = [k for k in out_edges[v] if not used[k]]
            if not cands:
                break
            if len(cands) == 1:
                nxt = cands[0]
            else:
                din = verts[v] - verts[s[cur]]
                best, nxt = -math.inf, cands[0]
                for k in cands:
                    dout = verts[e[k]] - verts[v]
                    ang = math.atan2(din[0] * dout[1] - din[1] * dout[0],
                                     din[0] * dout[0] + din[1] * dout[1])
                    if e[k] == s[cur]:
                        ang = -math.pi
                    if ang > best:
                        best, nxt = ang, k
            used[nxt] = True
            chain.append(nxt)
            cur = nxt
        if not closed or len(chain) < 3:
            continue
        idx = np.array(chain)
        rings.append(Ring(verts[s[idx]].copy(), owner[idx].copy(), anchor[idx].copy()))
    return rings


def _assemble(rings: Sequence[Ring]) -> MultiPolygon:
    outers, holes = [], []
    for r in rings:
        a = r.signed_area
        if abs(a) < EPS_AREA:
            continue
        (outers if a > 0 else holes).append((a, r))
    if not outers:
        return MultiPolygon.empty()
    outers.sort(key=lambda item: item[0])
    assigned: list[list[Ring]] = [[] for _ in outers]
    for _, h in holes:
        seg = h.segments()
        lens = np.linalg.norm(seg[:, 1] - seg[:, 0], axis=1)
        k = int(np.argmax(lens))
        probe = 0.5 * (seg[k, 0] + seg[k, 1])
        for j, (_, o) in enumerate(outers):
            if points_in_segments(probe[None], o.segments())[0]:
                assigned[j].append(h)
                break
    polys = tuple(Polygon(o, tuple(hs)) for (_, o), hs in zip(outers, assigned))
    # largest first for a stable, readable ordering
    return MultiPolygon(polys[::-1])


def _boolean(a: MultiPolygon, b: MultiPolygon, op: str) -> MultiPolygon:
    a_verts = np.concatenate([r.xy for r in a.rings()])
    ea = _Edges.of(a)
    eb = _Edges.of(b, snap_to=a_verts)

    splits_a: dict[int, list] = defaultdict(list)
    splits_b: dict[int, list] = defaultdict(list)
    for k, s, vi in zip(*_vertex_on_edge(eb.p0, ea)):
        splits_a[int(k)].append((float(s), eb.p0[vi]))
    for k, s, vi in zip(*_vertex_on_edge(ea.p0, eb)):
        splits_b[int(k)].append((float(s), ea.p0[vi]))
    for ia, ib, t, u, p in zip(*_crossings(ea, eb)):
        splits_a[int(ia)].append((float(t), p))
        splits_b[int(ib)].append((float(u), p))

    sa0, sa1, oa, ka = _split(ea, splits_a)
    sb0, sb1, ob, kb = _split(eb, splits_b)
    na, nb = len(sa0), len(sb0)
    ids, verts = _vertex_ids(np.concatenate([sa0, sa1, sb0, sb1]))
    ia0, ia1 = ids[:na], ids[na:2 * na]
    ib0, ib1 = ids[2 * na:2 * na + nb], ids[2 * na + nb:]
    ga = ia0 != ia1
    gb = ib0 != ib1
    ia0, ia1, oa, ka = ia0[ga], ia1[ga], oa[ga], ka[ga]
    ib0, ib1, ob, kb = ib0[gb], ib1[gb], ob[gb], kb[gb]

    keys_a = set(zip(ia0.tolist(), ia1.tolist()))
    keys_b = set(zip(ib0.tolist(), ib1.tolist()))
    seg_a = np.stack([verts[ia0], verts[ia1]], axis=1)
    seg_b = np.stack([verts[ib0], verts[ib1]], axis=1)
    ca = _classify(ia0.tolist(), ia1.tolist(), seg_a.mean(axis=1), keys_b, seg_b)
    cb = _classify(ib0.tolist(), ib1.tolist(), seg_b.mean(axis=1), keys_a, seg_a)

    if op == "intersect":
        ma = (ca == _INSIDE) | (ca == _SAME)
        mb = cb == _INSIDE
        rev_b = False
    elif op == "union":
        ma = (ca == _OUTSIDE) | (ca == _SAME)
        mb = cb == _OUTSIDE
        rev_b = False
    elif op == "difference":
        ma = (ca == _OUTSIDE) | (ca == _OPPOSITE)
        mb = cb == _INSIDE
        rev_b = True
    else:
        raise ValueError(op)

    if rev_b:
        bs, be, bk = ib1[mb], ib0[mb], kb[mb][:, ::-1]
    else:
        bs, be, bk = ib0[mb], ib1[mb], kb[mb]
    s = np.concatenate([ia0[ma], bs])
    e = np.concatenate([ia1[ma], be])
    own = np.concatenate([oa[ma], ob[mb]])
    anc = np.concatenate([ka[ma], bk])
    return _assemble(_link(verts, s, e, own, anc))


def _clip_convex(subject: Ring, clip: Ring) -> MultiPolygon:
    """Half-plane clipping of a convex ring by a convex ring, labels preserved."""
    xy, owner, anchor = subject.xy, subject.owner, subject.anchor
    c0 = clip.xy
    c1 = np.roll(clip.xy, -1, axis=0)
    for k in range(len(c0)):
        d = c1[k] - c0[k]
        L = math.hypot(d[0], d[1])
        sd = (d[0] * (xy[:, 1] - c0[k, 1]) - d[1] * (xy[:, 0] - c0[k, 0])) / L
        inside = sd >= -EPS_GEOM
        if inside.all():
            continue
        if not inside.any():
            return MultiPolygon.empty()
        nxt_in = np.roll(inside, -1)
        sd1 = np.roll(sd, -1)
        cross = inside != nxt_in
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(cross, sd / (sd - sd1), 0.0)
        ip = xy + t[:, None] * (np.roll(xy, -1, axis=0) - xy)
        ik = anchor[:, 0] + t * (anchor[:, 1] - anchor[:, 0])
        # slot 2i holds vertex i, slot 2i+1 the crossing on edge i
        n = len(xy)
        keep = np.empty(2 * n, dtype=bool)
        keep[0::2] = inside
        keep[1::2] = cross
        pts = np.empty((2 * n, 2))
        pts[0::2] = xy
        pts[1::2] = ip
        own = np.empty(2 * n, dtype=int)
        own[0::2] = owner
        own[1::2] = np.where(inside, clip.owner[k], owner)
        anc = np.empty((2 * n, 2))
        anc[0::2, 0] = anchor[:, 0]
        anc[0::2, 1] = np.where(cross, ik, anchor[:, 1])
        anc[1::2] = np.where(inside[:, None], clip.anchor[k][None, :],
                             np.stack([ik, anchor[:, 1]], axis=1))
        xy, owner, anchor = pts[keep], own[keep], anc[keep]
        # drop vertices that coincide with their successor
        keep = np.linalg.norm(np.roll(xy, -1, axis=0) - xy, axis=1) > EPS_GEOM
        xy, owner, anchor = xy[keep], owner[keep], anchor[keep]
        if len(xy) < 3:
            return MultiPolygon.empty()
    if signed_area(xy) < EPS_AREA:
        return MultiPolygon.empty()
    return MultiPolygon((Polygon(Ring(xy.copy(), owner.copy(), anchor.copy())),))


def intersect(a: MultiPolygon, b: MultiPolygon) -> MultiPolygon:
    """Point-set intersection; edges keep the labels of the edge they came from."""
    if a.is_empty or b.is_empty or not _bbox_overlap(a, b):
        return MultiPolygon.empty()
    if b.n_vertices <= _FAST_CLIP_EDGES and is_convex_polygon(a) and is_convex_polygon(b):
        return _clip_convex(a.polygons[0].outer, b.polygons[0].outer)
    return _boolean(a, b, "intersect")


def difference(a: MultiPolygon, b: MultiPolygon) -> MultiPolygon:
    """Point set ``a \\ b``; a ``b`` strictly inside ``a`` becomes a hole."""
    if a.is_empty:
        return MultiPolygon.empty()
    if b.is_empty or not _bbox_overlap(a, b):
        return a
    return _boolean(a, b, "difference")


def union(a: MultiPolygon, b: MultiPolygon) -> MultiPolygon:
    if a.is_empty:
        return b
    if b.is_empty:
        return a
    if not _bbox_overlap(a, b):
        return MultiPolygon(a.polygons + b.polygons)
    return _boolean(a, b, "union")


def union_all(regions: Sequence[MultiPolygon]) -> MultiPolygon:
    out = MultiPolygon.empty()
    for r in regions:
        out = union(out, r)
    return out


def split_segments(segs: np.ndarray, cutters: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``segs`` wherever they cross or touch one of ``cutters``.

    Returns the pieces and, for each piece, the index of its parent segment.
    """
    segs = np.asarray(segs, dtype=float)
    if len(segs) == 0 or len(cutters) == 0:
        return segs, np.arange(len(segs))
    n = len(segs)
    e = _Edges(segs[:, 0], segs[:, 1], np.arange(n), np.zeros((n, 2)))
    c = _Edges(cutters[:, 0], cutters[:, 1], np.zeros(len(cutters), dtype=int),
               np.zeros((len(cutters), 2)))
    splits: dict[int, list] = defaultdict(list)
    for k, s, vi in zip(*_vertex_on_edge(c.p0, e)):
        splits[int(k)].append((float(s), c.p0[vi]))
    for ia, _, t, _, p in zip(*_crossings(e, c)):
        splits[int(ia)].append((float(t), p))
    if not splits:
        return segs, np.arange(n)
    p0, p1, parent, _ = _split(e, splits)
    order = np.argsort(parent, kind="stable")
    return np.stack([p0[order], p1[order]], axis=1), parent[order]
