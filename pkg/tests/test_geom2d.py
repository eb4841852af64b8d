import math

import numpy as np
import pytest
import shapely.geometry as sg
from hypothesis import given, settings, strategies as st

from aerial_coverage.geom2d import (
    EPS_GEOM,
    REGION_BOUNDARY,
    MultiPolygon,
    affine_transform,
    area,
    area_integral,
    contains_points,
    convex_separation,
    difference,
    gauss_legendre,
    intersect,
    is_convex,
    line_integral_scalar,
    line_integral_vector,
    perimeter,
    polygon_from_points,
    project_to_convex,
    relabel,
    triangle_rule,
    union,
    union_all,
)
from aerial_coverage.geom2d.clip import split_segments


def regular(n, r=1.0, c=(0.0, 0.0), phase=0.0):
    k = phase + 2 * np.pi * np.arange(n) / n
    return np.stack([c[0] + r * np.cos(k), c[1] + r * np.sin(k)], axis=1)


def to_shapely(mp: MultiPolygon):
    polys = [sg.Polygon(p.outer.xy, [h.xy for h in p.holes]) for p in mp.polygons]
    return sg.MultiPolygon(polys) if polys else sg.MultiPolygon()


convex_polys = st.builds(
    lambda n, r, cx, cy, ph: regular(n, r, (cx, cy), ph),
    st.integers(3, 40), st.floats(0.2, 1.5), st.floats(-1, 1), st.floats(-1, 1),
    st.floats(0, 2 * np.pi),
)


def test_square_basics():
    sq = polygon_from_points([[0, 0], [0, 1], [1, 1], [1, 0]])  # clockwise input
    assert area(sq) == pytest.approx(1.0)
    assert perimeter(sq) == pytest.approx(4.0)
    assert sq.polygons[0].outer.signed_area > 0
    assert is_convex(sq.polygons[0].outer.xy)
    assert not is_convex(np.array([[0, 0], [2, 0], [1, 0.2], [1, 2]], float))


def test_affine_transform_scales_area():
    p = polygon_from_points(regular(30))
    q = affine_transform(p, 2.5, 0.7, (3.0, -1.0))
    assert area(q) == pytest.approx(area(p) * 2.5 ** 2)
    with pytest.raises(ValueError):
        affine_transform(p, 0.0, 0.0, (0, 0))


@settings(max_examples=60, deadline=None)
@given(convex_polys, convex_polys)
def test_booleans_match_shapely(a, b):
    A, B = polygon_from_points(a), polygon_from_points(b)
    sa, sb = to_shapely(A), to_shapely(B)
    assert area(intersect(A, B)) == pytest.approx(sa.intersection(sb).area, abs=1e-9)
    assert area(difference(A, B)) == pytest.approx(sa.difference(sb).area, abs=1e-9)
    assert area(union(A, B)) == pytest.approx(sa.union(sb).area, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(convex_polys, convex_polys)
def test_separation_agrees_with_overlap(a, b):
    inter = to_shapely(polygon_from_points(a)).intersection(to_shapely(polygon_from_points(b)))
    d = convex_separation(a, b)
    if inter.area > 1e-9:
        assert d > 0
    if d < -1e-9:
        assert inter.area == 0


def test_containment_difference_has_hole():
    outer = polygon_from_points(regular(24, 1.0))
    inner = polygon_from_points(regular(12, 0.3, (0.1, 0.0)))
    d = difference(outer, inner)
    assert len(d.polygons) == 1 and len(d.polygons[0].holes) == 1
    assert area(d) == pytest.approx(area(outer) - area(inner), abs=1e-12)
    assert d.polygons[0].holes[0].signed_area < 0
    pts = np.array([[0.1, 0.0], [0.8, 0.0]])
    assert list(contains_points(d, pts)) == [False, True]


def test_disjoint_and_empty():
    a = polygon_from_points(regular(6, 0.5))
    b = polygon_from_points(regular(6, 0.5, (3, 3)))
    assert intersect(a, b).is_empty
    assert area(difference(a, b)) == pytest.approx(area(a))
    assert difference(a, a).is_empty
    assert area(union_all([a, b])) == pytest.approx(2 * area(a))
    assert union_all([]).is_empty


def test_nearly_collinear_edges_meeting_at_a_vertex():
    # edges on opposite sides of a shared tip along almost the same line; an
    # ill-conditioned crossing solve used to invent a shared piece here
    tip = [0.6549072678188287, 2.163006781902334]
    a = polygon_from_points([[0.6472124730454031, 2.1543582513105948], tip,
                             [0.6359237041706233, 2.1593791097113817]])
    b = polygon_from_points([[0.6564732154514901, 2.164766821826064], tip,
                             [0.6558313600489054, 2.163183371701123]])
    assert area(difference(a, b)) == pytest.approx(area(a), rel=1e-12)
    assert area(union(a, b)) == pytest.approx(area(a) + area(b), rel=1e-12)
    assert intersect(a, b).is_empty


def test_shared_edge_union():
    a = polygon_from_points([[0, 0], [1, 0], [1, 1], [0, 1]])
    b = polygon_from_points([[1, 0], [2, 0], [2, 1], [1, 1]])
    u = union(a, b)
    assert area(u) == pytest.approx(2.0)
    assert len(u.polygons) == 1
    assert area(intersect(a, b)) == pytest.approx(0.0, abs=1e-12)


def test_edge_labels_survive_clipping():
    omega = polygon_from_points([[0, 0], [2, 0], [2, 2], [0, 2]])
    fp = relabel(polygon_from_points(regular(40, 0.5, (1.9, 1.0))), 7)
    cell = intersect(fp, omega)
    owners = set(cell.owners().tolist())
    assert owners == {7, REGION_BOUNDARY}
    # region-labelled edges lie on x = 2
    segs = cell.segments()[cell.owners() == REGION_BOUNDARY]
    assert np.allclose(segs[..., 0], 2.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=20))
def test_contains_and_projection(pts):
    hexa = regular(6, 1.0, (0.2, -0.1), 0.3)
    P = polygon_from_points(hexa)
    S = to_shapely(P).geoms[0]
    pts = np.asarray(pts)
    inside = contains_points(P, pts)
    for p, ins in zip(pts, inside):
        d = S.exterior.distance(sg.Point(p))
        if d > 1e-7:
            assert ins == S.contains(sg.Point(p))
        q = project_to_convex(P.polygons[0].outer.xy, p)
        assert S.buffer(1e-9).contains(sg.Point(q))
        assert np.linalg.norm(q - p) == pytest.approx(S.distance(sg.Point(p)), abs=1e-9)


def test_gauss_legendre_exactness():
    for n in range(1, 8):
        t, w = gauss_legendre(n)
        assert w.sum() == pytest.approx(1.0)
        for deg in range(2 * n):
            assert np.dot(w, t ** deg) == pytest.approx(1.0 / (deg + 1), rel=1e-12)


@pytest.mark.parametrize("order,degree", [(1, 1), (2, 2), (4, 4), (6, 6)])
def test_triangle_rules_exact_on_polynomials(order, degree):
    bary, w = triangle_rule(order)
    assert w.sum() == pytest.approx(1.0)
    # unit square made of two triangles: integral of x^a y^b = 1/((a+1)(b+1))
    sq = polygon_from_points([[0, 0], [1, 0], [1, 1], [0, 1]])
    for a in range(degree + 1):
        b = degree - a
        val = area_integral(sq, lambda p: p[:, 0] ** a * p[:, 1] ** b, order=order)
        assert val == pytest.approx(1.0 / ((a + 1) * (b + 1)), rel=1e-9)


def test_area_integral_refinement_and_holes():
    d = difference(polygon_from_points(regular(50, 1.0)), polygon_from_points(regular(20, 0.4)))

    def g(p):
        return np.exp(p[:, 0]) * np.cos(p[:, 1])

    coarse = area_integral(d, g, order=6)
    fine = area_integral(d, g, order=6, h_max=0.05)
    assert fine == pytest.approx(coarse, rel=1e-6)
    assert area_integral(d, lambda p: np.ones(len(p))) == pytest.approx(area(d), rel=1e-12)


def test_divergence_theorem_on_boundary_integrals():
    p = difference(polygon_from_points(regular(30, 1.0, (0.3, 0.2))),
                   polygon_from_points(regular(9, 0.25, (0.2, 0.1))))
    segs = p.segments()
    one = lambda q: np.ones(len(q))
    # closed boundary: integral of n vanishes, integral of q.n is twice the area
    assert np.allclose(line_integral_vector(segs, one), 0.0, atol=1e-12)
    assert line_integral_scalar(segs, one, lambda q: q) == pytest.approx(2 * area(p), rel=1e-12)


def test_split_segments_cuts_at_crossings():
    segs = np.array([[[0.0, 0.0], [2.0, 0.0]]])
    cutters = np.array([[[0.5, -1.0], [0.5, 1.0]], [[1.5, -1.0], [1.5, 1.0]]])
    pieces, parent = split_segments(segs, cutters)
    assert len(pieces) == 3
    assert np.all(parent == 0)
    assert np.allclose(sorted(pieces[:, 1, 0]), [0.5, 1.5, 2.0])
    assert np.linalg.norm(pieces[:, 1] - pieces[:, 0], axis=1).sum() == pytest.approx(2.0)


def test_eps_geom_value():
    assert EPS_GEOM == 1e-9
    assert math.isclose(area(polygon_from_points(regular(4, math.sqrt(0.5), phase=np.pi / 4))), 1.0)
