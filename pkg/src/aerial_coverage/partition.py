"""Partition of the sensed part of the region into cells and tied regions.

A point covered by several agents belongs to whoever flies lowest (quality
falls strictly with altitude).  Points where the lowest coverers share an
altitude go to a tied region of that quality level and to nobody's cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .errors import ConsistencyError
from .geom2d import (
    EPS_AREA,
    EPS_GEOM,
    REGION_BOUNDARY,
    MultiPolygon,
    area,
    convex_contains,
    convex_separation,
    difference,
    intersect,
    union_all,
)
from .geom2d.clip import split_segments
from .sensing import AgentState, AltitudeBounds, BasePattern, footprint, quality

EPS_TIE = 1e-9
_SLIVER_DEPTH = 1e-4


@dataclass(frozen=True, eq=False)
class TiedRegion:
    region: MultiPolygon
    level: float
    members: frozenset[int]


@dataclass(eq=False)
class PartitionResult:
    cells: dict[int, MultiPolygon]
    tied_regions: list[TiedRegion]
    neighbors: dict[int, frozenset[int]]
    footprints: dict[int, MultiPolygon]
    region: MultiPolygon
    altitudes: dict[int, float] = field(default_factory=dict)

    @cached_property
    def neutral(self) -> MultiPolygon:
        """Part of the region covered by nobody."""
        covered = union_all(list(self.cells.values()) + [t.region for t in self.tied_regions])
        return difference(self.region, covered)

    def covered_area(self) -> float:
        return (sum(area(c) for c in self.cells.values())
                + sum(area(t.region) for t in self.tied_regions))

    def signature(self) -> tuple:
        """Coarse combinatorial shape, used to spot topology changes."""
        cells = tuple(sorted((i, len(c.polygons), sum(len(p.holes) for p in c.polygons))
                             for i, c in self.cells.items()))
        ties = tuple(sorted((tuple(sorted(t.members)), len(t.region.polygons))
                            for t in self.tied_regions))
        nbrs = tuple(sorted((i, tuple(sorted(n))) for i, n in self.neighbors.items()))
        return cells, ties, nbrs


@dataclass(eq=False)
class AgentBoundary:
    """Boundary of one cell split by what lies across each edge.

    Segments are ``(k, 2, 2)`` arrays oriented so the cell is on their left.
    """

    on_region: np.ndarray
    free_arc: np.ndarray
    shared_own_arc: dict[int, np.ndarray]
    foreign_arc: np.ndarray

    @classmethod
    def empty(cls) -> "AgentBoundary":
        z = np.zeros((0, 2, 2))
        return cls(z, z, {}, z)

    def length(self, which: str) -> float:
        if which == "shared_own_arc":
            return sum(_seg_length(s) for s in self.shared_own_arc.values())
        return _seg_length(getattr(self, which))

    @property
    def total_length(self) -> float:
        return sum(self.length(w) for w in ("on_region", "free_arc", "shared_own_arc",
                                            "foreign_arc"))


ClassifiedBoundary = dict[int, AgentBoundary]


def _seg_length(segs: np.ndarray) -> float:
    if len(segs) == 0:
        return 0.0
    return float(np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1).sum())


def compute_footprints(agents: Sequence[AgentState], base: BasePattern,
                       bounds: AltitudeBounds) -> dict[int, MultiPolygon]:
    return {a.id: footprint(a, base, bounds) for a in agents}


def _circumradius(fp: MultiPolygon, center) -> float:
    return float(np.max(np.linalg.norm(fp.polygons[0].outer.xy - center, axis=1)))


def neighbors_from_footprints(agents: Sequence[AgentState],
                              fps: Mapping[int, MultiPolygon]) -> dict[int, frozenset[int]]:
    nbrs: dict[int, set[int]] = {a.id: set() for a in agents}
    radius = {a.id: _circumradius(fps[a.id], a.position) for a in agents}
    for k, a in enumerate(agents):
        for b in agents[k + 1:]:
            if np.hypot(a.x - b.x, a.y - b.y) >= radius[a.id] + radius[b.id]:
                continue
            depth = convex_separation(fps[a.id].polygons[0].outer.xy,
                                      fps[b.id].polygons[0].outer.xy)
            if depth <= 0.0:
                continue
            # thin slivers are settled by the exact overlap area
            if depth > _SLIVER_DEPTH or area(intersect(fps[a.id], fps[b.id])) > EPS_AREA:
                nbrs[a.id].add(b.id)
                nbrs[b.id].add(a.id)
    return {i: frozenset(s) for i, s in nbrs.items()}


def compute_neighbors(agents: Sequence[AgentState], base: BasePattern,
                      bounds: AltitudeBounds) -> dict[int, frozenset[int]]:
    """Agents whose footprints overlap with positive area (symmetric)."""
    return neighbors_from_footprints(agents, compute_footprints(agents, base, bounds))


def _tie_groups(agents: Sequence[AgentState], nbrs) -> list[list[int]]:
    """Connected groups (by overlap) of agents at a common altitude."""
    order = sorted(agents, key=lambda a: (a.z, a.id))
    levels: list[list[AgentState]] = []
    for a in order:
        if levels and a.z - levels[-1][-1].z <= EPS_TIE:
            levels[-1].append(a)
        else:
            levels.append([a])
    groups = []
    for lvl in levels:
        if len(lvl) < 2:
            continue
        ids = {a.id for a in lvl}
        seen: set[int] = set()
        for a in lvl:
            if a.id in seen:
                continue
            comp, stack = [], [a.id]
            seen.add(a.id)
            while stack:
                i = stack.pop()
                comp.append(i)
                for j in nbrs[i]:
                    if j in ids and j not in seen:
                        seen.add(j)
                        stack.append(j)
            if len(comp) > 1:
                groups.append(sorted(comp))
    return groups


def compute_partition(agents: Sequence[AgentState], base: BasePattern, region: MultiPolygon,
                      bounds: AltitudeBounds) -> PartitionResult:
    agents = list(agents)
    fps = compute_footprints(agents, base, bounds)
    nbrs = neighbors_from_footprints(agents, fps)
    z = {a.id: a.z for a in agents}

    cells: dict[int, MultiPolygon] = {}
    for a in agents:
        cell = intersect(fps[a.id], region)
        # strictly better or tied neighbours take these points away
        for j in sorted(nbrs[a.id], key=lambda j: (z[j], j)):
            if cell.is_empty:
                break
            if z[j] <= a.z + EPS_TIE:
                cell = difference(cell, fps[j])
        cells[a.id] = cell

    tied: list[TiedRegion] = []
    for group in _tie_groups(agents, nbrs):
        gz = max(z[i] for i in group)
        pieces = [intersect(fps[i], fps[k])
                  for n, i in enumerate(group) for k in group[n + 1:] if k in nbrs[i]]
        wc = intersect(union_all(pieces), region)
        better = {j for i in group for j in nbrs[i] if z[j] < min(z[g] for g in group) - EPS_TIE}
        for j in sorted(better, key=lambda j: (z[j], j)):
            if wc.is_empty:
                break
            wc = difference(wc, fps[j])
        if not wc.is_empty:
            tied.append(TiedRegion(wc, quality(gz, bounds), frozenset(group)))

    return PartitionResult(cells, tied, nbrs, fps, region, z)


def classify_boundaries(part: PartitionResult, agents: Sequence[AgentState]) -> ClassifiedBoundary:
    """Split every cell boundary into region / free / shared-own / foreign pieces.

    Own-footprint edges are classified by which agents cover their midpoint:
    nobody (free arc), a single strictly higher agent ``j`` (shared with
    ``j``), or an agent tied with ``i`` or several tied higher agents
    (foreign, i.e. bordering a tied region).
    """
    z = {a.id: a.z for a in agents}
    omega = part.region.polygons[0].outer.xy
    rings = {j: fp.polygons[0].outer.xy for j, fp in part.footprints.items()}
    out: ClassifiedBoundary = {}
    for a in agents:
        i = a.id
        cell = part.cells.get(i)
        if cell is None or cell.is_empty:
            out[i] = AgentBoundary.empty()
            continue
        segs = cell.segments()
        owner = cell.owners()
        others = sorted(part.neighbors[i])
        own = owner == i
        if own.any() and others:
            # own edges may straddle a worse neighbour's boundary
            cutters = np.concatenate([part.footprints[j].segments() for j in others])
            pieces, _ = split_segments(segs[own], cutters)
            segs = np.concatenate([segs[~own], pieces])
            owner = np.concatenate([owner[~own], np.full(len(pieces), i)])
        region_mask = owner == REGION_BOUNDARY
        foreign_mask = (owner != i) & ~region_mask
        own = np.nonzero(owner == i)[0]
        shared: dict[int, list[int]] = {}
        free_idx: list[int] = []
        if len(own):
            mids = segs[own].mean(axis=1)
            on_omega = ~convex_contains(omega, mids, margin=EPS_GEOM)
            cover = np.array([convex_contains(rings[j], mids, margin=EPS_GEOM) for j in others])
            for k, e in enumerate(own):
                if on_omega[k]:
                    region_mask[e] = True
                    continue
                cov = [others[m] for m in range(len(others)) if cover[m, k]]
                if not cov:
                    free_idx.append(e)
                    continue
                zlow = min(z[j] for j in cov)
                if zlow < z[i] - EPS_TIE:
                    deep = [j for j in cov if z[j] == zlow
                            and convex_contains(rings[j], mids[k:k + 1], margin=1e-7)[0]]
                    if deep:
                        raise ConsistencyError(
                            f"edge of cell {i} lies inside the footprint of better agent {deep[0]}")
                    foreign_mask[e] = True
                    continue
                if zlow - z[i] <= EPS_TIE:
                    foreign_mask[e] = True
                    continue
                low = [j for j in cov if z[j] - zlow <= EPS_TIE]
                if len(low) > 1:
                    foreign_mask[e] = True
                else:
                    shared.setdefault(low[0], []).append(e)
        out[i] = AgentBoundary(
            on_region=segs[region_mask],
            free_arc=segs[np.array(free_idx, dtype=int)],
            shared_own_arc={j: segs[np.array(ix, dtype=int)] for j, ix in sorted(shared.items())},
            foreign_arc=segs[foreign_mask],
        )
    return out
