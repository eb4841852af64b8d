import numpy as np
import pytest
import shapely.geometry as sg

from aerial_coverage.geom2d import (
    area,
    contains_points,
    distance_to_segments,
    intersect,
    perimeter,
    polygon_from_points,
    union_all,
)
from aerial_coverage.partition import (
    EPS_TIE,
    classify_boundaries,
    compute_neighbors,
    compute_partition,
)
from aerial_coverage.sensing import AgentState, AltitudeBounds, BasePattern, footprint

from scenario_gen import random_scenario

B = AltitudeBounds(0.3, 2.3)
SQUARE = polygon_from_points([[0, 0], [4, 0], [4, 4], [0, 4]])
DISK = BasePattern.circle(0.2, 64)


def shp(mp):
    return sg.MultiPolygon([sg.Polygon(p.outer.xy, [h.xy for h in p.holes]) for p in mp.polygons])


def labels_by_dominance(part, agents, pts):
    """Independent label per point: agent id, 'tie' or None (uncovered)."""
    fps = {a.id: sg.Polygon(part.footprints[a.id].polygons[0].outer.xy) for a in agents}
    out = []
    for p in pts:
        P = sg.Point(p)
        cov = [a for a in agents if fps[a.id].contains(P)]
        if not cov:
            out.append(None)
            continue
        zl = min(a.z for a in cov)
        low = [a.id for a in cov if a.z - zl <= EPS_TIE]
        out.append(low[0] if len(low) == 1 else "tie")
    return out


def test_two_agents_lower_wins():
    lo = AgentState(1, (2.0, 2.0), 0.5)
    hi = AgentState(2, (2.3, 2.0), 0.8)
    part = compute_partition([lo, hi], DISK, SQUARE, B)
    f1, f2 = footprint(lo, DISK, B), footprint(hi, DISK, B)
    assert area(part.cells[1]) == pytest.approx(area(f1))
    assert area(part.cells[2]) == pytest.approx(shp(f2).difference(shp(f1)).area, abs=1e-12)
    assert part.tied_regions == []
    assert part.neighbors == {1: frozenset({2}), 2: frozenset({1})}


def test_containment_gives_hole():
    inner = AgentState(1, (2.0, 2.0), 0.4)
    outer = AgentState(2, (2.05, 2.0), 1.2)
    part = compute_partition([inner, outer], DISK, SQUARE, B)
    cell = part.cells[2]
    assert len(cell.polygons) == 1 and len(cell.polygons[0].holes) == 1
    assert area(cell) == pytest.approx(area(part.footprints[2]) - area(part.footprints[1]))


def test_tie_creates_common_region():
    a = AgentState(1, (2.0, 2.0), 0.6)
    b = AgentState(2, (2.4, 2.0), 0.6)
    part = compute_partition([a, b], DISK, SQUARE, B)
    lens = intersect(part.footprints[1], part.footprints[2])
    assert len(part.tied_regions) == 1
    tr = part.tied_regions[0]
    assert tr.members == frozenset({1, 2})
    assert area(tr.region) == pytest.approx(area(lens), rel=1e-12)
    for i in (1, 2):
        assert area(part.cells[i]) == pytest.approx(area(part.footprints[i]) - area(lens))


def test_near_tie_within_tolerance_is_a_tie():
    a = AgentState(1, (2.0, 2.0), 0.6)
    b = AgentState(2, (2.4, 2.0), 0.6 + 0.5 * EPS_TIE)
    assert len(compute_partition([a, b], DISK, SQUARE, B).tied_regions) == 1


def test_disjoint_agents_have_no_neighbors():
    a = AgentState(1, (1.0, 1.0), 0.5)
    b = AgentState(2, (3.0, 3.0), 0.5)
    assert compute_neighbors([a, b], DISK, B) == {1: frozenset(), 2: frozenset()}


def test_boundary_classification_lengths():
    lo = AgentState(1, (2.0, 0.1), 0.5)   # footprint crosses y = 0
    hi = AgentState(2, (2.3, 0.2), 0.8)
    agents = [lo, hi]
    part = compute_partition(agents, DISK, SQUARE, B)
    cb = classify_boundaries(part, agents)
    for a in agents:
        assert cb[a.id].total_length == pytest.approx(perimeter(part.cells[a.id]), rel=1e-12)
    # the lower agent's arc inside the higher footprint is shared with it
    assert set(cb[1].shared_own_arc) == {2}
    mids = cb[1].shared_own_arc[2].mean(axis=1)
    assert contains_points(part.footprints[2], mids).all()
    assert cb[1].length("on_region") > 0
    # the higher agent borders the lower footprint but does not own that arc
    assert cb[2].length("foreign_arc") > 0 and not cb[2].shared_own_arc


@pytest.mark.parametrize("seed", range(8))
def test_monte_carlo_dominance_and_area_budget(seed):
    rng = np.random.default_rng(seed)
    sc = random_scenario(rng, seed, n_vertices=60, ties=seed % 3 == 0)
    part = sc.partition()
    omega = area(sc.region)
    total = part.covered_area() + area(part.neutral)
    assert total == pytest.approx(omega, rel=1e-9)
    # cells and tied regions are pairwise disjoint
    pieces = [shp(c) for c in part.cells.values() if not c.is_empty]
    pieces += [shp(t.region) for t in part.tied_regions]
    assert sum(p.area for p in pieces) == pytest.approx(
        shp(union_all([c for c in part.cells.values()] + [t.region for t in part.tied_regions])).area,
        rel=1e-9)

    pts = rng.uniform([0, 0], [3, 3], size=(1500, 2))
    pts = pts[contains_points(sc.region, pts)]
    segs = np.concatenate([sc.region.segments()] + [f.segments() for f in part.footprints.values()])
    pts = pts[distance_to_segments(pts, segs) > 1e-9]
    expect = labels_by_dominance(part, sc.agents, pts)
    got = [None] * len(pts)
    for i, cell in part.cells.items():
        for k in np.nonzero(contains_points(cell, pts, eps=0.0))[0]:
            got[k] = i
    for t in part.tied_regions:
        for k in np.nonzero(contains_points(t.region, pts, eps=0.0))[0]:
            got[k] = "tie"
    agree = np.mean([g == e for g, e in zip(got, expect)])
    assert agree == 1.0


def test_signature_detects_neighbor_change():
    a = AgentState(1, (2.0, 2.0), 0.5)
    b = AgentState(2, (2.5, 2.0), 0.5001)
    c = b.moved(q=(3.5, 2.0))
    s1 = compute_partition([a, b], DISK, SQUARE, B).signature()
    s2 = compute_partition([a, c], DISK, SQUARE, B).signature()
    assert s1 != s2
