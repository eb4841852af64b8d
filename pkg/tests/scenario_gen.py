"""Random scenario draws shared by the oracle tests."""

import numpy as np

from aerial_coverage.geom2d import convex_contains, polygon_from_points
from aerial_coverage.objective import DensityField
from aerial_coverage.scenario import Scenario
from aerial_coverage.sensing import AgentState, AltitudeBounds, BasePattern

REGION = np.array([[0, 0], [3, 0], [3, 2.5], [1.5, 3], [0, 2.5]], dtype=float)
BOUNDS = AltitudeBounds(0.3, 2.3)
GAUSS = DensityField.gaussian_mixture([(1.0, (1.5, 1.5), 0.5), (0.5, (0.5, 2.0), 0.3)], floor=0.05)


def random_scenario(rng: np.random.Generator, k: int, n_vertices: int = 120,
                    ties: bool = False, z_range=(0.4, 1.5)) -> Scenario:
    """2 to 5 agents with elliptical footprints, many of them crossing the region boundary.

    Even draws use a uniform density, odd draws a Gaussian mixture.  With
    ``ties`` some agents share an altitude exactly.
    """
    n = int(rng.integers(2, 6))
    agents = []
    zs = rng.uniform(*z_range, size=n)
    if ties and n >= 2:
        zs[1] = zs[0]
        if n >= 4:
            zs[3] = zs[2]
    for i in range(n):
        while True:
            q = rng.uniform([0.05, 0.05], [2.95, 2.95])
            if convex_contains(REGION, q[None], margin=0.02)[0]:
                break
        agents.append(AgentState(i + 1, (float(q[0]), float(q[1])), float(zs[i]),
                                 float(rng.uniform(-np.pi, np.pi))))
    phi = DensityField.uniform() if k % 2 == 0 else GAUSS
    return Scenario(tuple(agents), BasePattern.ellipse(0.2, 0.12, n_vertices),
                    polygon_from_points(REGION), BOUNDS, phi)


def grid_objective(sc: Scenario, part, n: int = 1000) -> float:
    """Midpoint-grid estimate of the integral of max_i f(z_i) * phi over the region.

    Point membership uses shapely, independently of the package's own
    containment and clipping code.
    """
    import shapely
    from aerial_coverage.sensing import quality

    lo = np.min(sc.region.polygons[0].outer.xy, axis=0)
    hi = np.max(sc.region.polygons[0].outer.xy, axis=0)
    h = (hi - lo) / n
    xs = lo[0] + h[0] * (np.arange(n) + 0.5)
    ys = lo[1] + h[1] * (np.arange(n) + 0.5)
    X, Y = np.meshgrid(xs, ys)
    X, Y = X.ravel(), Y.ravel()
    keep = shapely.contains_xy(shapely.Polygon(sc.region.polygons[0].outer.xy), X, Y)
    X, Y = X[keep], Y[keep]
    best = np.zeros(len(X))
    for a in sc.agents:
        ring = shapely.Polygon(part.footprints[a.id].polygons[0].outer.xy)
        inside = shapely.contains_xy(ring, X, Y)
        best = np.where(inside, np.maximum(best, quality(a.z, sc.bounds)), best)
    phi = sc.density(np.stack([X, Y], axis=1))
    return float(np.sum(best * phi) * h[0] * h[1])
