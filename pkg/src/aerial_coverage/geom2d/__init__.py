"""2-D polygon kernel: labelled rings, booleans, containment and quadrature."""

from .clip import difference, intersect, split_segments, union, union_all
from .polygon import (
    EPS_AREA,
    EPS_GEOM,
    REGION_BOUNDARY,
    EdgeLabel,
    MultiPolygon,
    Polygon,
    Ring,
    affine_transform,
    area,
    contains_point,
    contains_points,
    convex_contains,
    convex_separation,
    distance_to_segments,
    is_convex,
    is_convex_polygon,
    iter_polygons,
    make_ring,
    perimeter,
    points_in_segments,
    polygon_from_points,
    project_to_convex,
    relabel,
    signed_area,
)
from .quad import (
    area_integral,
    gauss_legendre,
    line_integral_scalar,
    line_integral_vector,
    parametrize,
    triangle_rule,
)

__all__ = [
    "EPS_AREA", "EPS_GEOM", "REGION_BOUNDARY", "affine_transform", "area", "area_integral",
    "contains_point", "contains_points", "convex_contains", "convex_separation",
    "difference", "distance_to_segments", "EdgeLabel", "gauss_legendre", "intersect",
    "is_convex", "is_convex_polygon", "iter_polygons", "line_integral_scalar",
    "line_integral_vector", "make_ring", "MultiPolygon", "parametrize", "perimeter",
    "points_in_segments", "Polygon", "polygon_from_points", "project_to_convex", "relabel",
    "Ring", "signed_area", "split_segments", "triangle_rule", "union", "union_all",
]
