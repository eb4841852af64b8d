"""Camera footprints, coverage quality and boundary velocity fields.

A footprint is the base pattern scaled by ``z / z_min``, rotated by the yaw
and translated to the agent's ground position.  Differentiating that map
gives closed forms for how footprint boundary points move with each state
component; they depend only on ``q - q_i`` so they hold for any convex base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geom2d import (
    MultiPolygon,
    Polygon,
    Ring,
    affine_transform,
    convex_contains,
    is_convex,
    make_ring,
    relabel,
    signed_area,
)

# dR/dtheta = J R
ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class AltitudeBounds:
    z_min: float
    z_max: float

    def __post_init__(self):
        if not (0 < self.z_min < self.z_max) or not math.isfinite(self.z_max):
            raise ValueError(f"need 0 < z_min < z_max, got ({self.z_min}, {self.z_max})")

    @property
    def span(self) -> float:
        return self.z_max - self.z_min

    def clamp(self, z: float) -> float:
        return min(max(z, self.z_min), self.z_max)

    def check(self, z: float) -> None:
        if not (self.z_min <= z <= self.z_max):
            raise ValueError(f"altitude {z} outside [{self.z_min}, {self.z_max}]")


@dataclass(frozen=True)
class AgentState:
    id: int
    q: tuple[float, float]
    z: float
    theta: float = 0.0

    @property
    def x(self) -> float:
        return self.q[0]

    @property
    def y(self) -> float:
        return self.q[1]

    @property
    def position(self) -> np.ndarray:
        return np.array(self.q, dtype=float)

    def moved(self, q=None, z=None, theta=None) -> "AgentState":
        return AgentState(
            self.id,
            self.q if q is None else (float(q[0]), float(q[1])),
            self.z if z is None else float(z),
            self.theta if theta is None else float(theta),
        )


@dataclass(frozen=True, eq=False)
class BasePattern:
    """Footprint at ``z_min``, zero yaw, centred at the origin.

    ``kind`` is ``"ellipse"`` (``params = (a, b)``) or ``"polygon"``
    (``params`` = flattened vertices).  ``ring`` is the sampled boundary;
    vertex anchors are the parameter ``k`` of each sample (ellipse: angle in
    [0, 2 pi), polygon: vertex index with fractional progress along edges).
    """

    kind: str
    params: tuple[float, ...]
    ring: Ring
    r_b_min: float

    @classmethod
    def ellipse(cls, a: float, b: float, n_vertices: int = 60) -> "BasePattern":
        if a <= 0 or b <= 0:
            raise ValueError("ellipse semi-axes must be positive")
        if n_vertices < 8:
            raise ValueError("need at least 8 samples on an ellipse")
        k = 2 * np.pi * np.arange(n_vertices) / n_vertices
        xy = np.stack([a * np.cos(k), b * np.sin(k)], axis=1)
        ring = make_ring(xy, 0, anchors=k, period=2 * np.pi)
        return cls("ellipse", (float(a), float(b)), ring, float(min(a, b)))

    @classmethod
    def circle(cls, r: float, n_vertices: int = 60) -> "BasePattern":
        return cls.ellipse(r, r, n_vertices)

    @classmethod
    def polygon(cls, vertices: Sequence[Sequence[float]]) -> "BasePattern":
        xy = np.asarray(vertices, dtype=float)
        if signed_area(xy) < 0:
            xy = xy[::-1]
        if not is_convex(xy):
            raise ValueError("base pattern polygon must be convex")
        if not convex_contains(xy, np.zeros((1, 2)), margin=1e-12)[0]:
            raise ValueError("base pattern must contain the origin in its interior")
        n = len(xy)
        ring = make_ring(xy, 0, anchors=np.arange(n, dtype=float), period=float(n))
        d = np.roll(xy, -1, axis=0) - xy
        s = np.clip(-(xy * d).sum(axis=1) / (d * d).sum(axis=1), 0.0, 1.0)
        r_min = float(np.min(np.linalg.norm(xy + s[:, None] * d, axis=1)))
        return cls("polygon", tuple(xy.ravel().tolist()), ring, r_min)

    @property
    def is_circle(self) -> bool:
        return self.kind == "ellipse" and self.params[0] == self.params[1]

    @property
    def n_vertices(self) -> int:
        return len(self.ring)

    def as_multipolygon(self) -> MultiPolygon:
        return MultiPolygon((Polygon(self.ring),))

    def gamma(self, k: float) -> np.ndarray:
        """Boundary point at parameter ``k``."""
        if self.kind == "ellipse":
            a, b = self.params
            return np.array([a * math.cos(k), b * math.sin(k)])
        xy = np.asarray(self.params).reshape(-1, 2)
        n = len(xy)
        i = int(math.floor(k)) % n
        f = k - math.floor(k)
        return (1 - f) * xy[i] + f * xy[(i + 1) % n]


def inscribed_disk_pattern(base: BasePattern) -> BasePattern:
    """Largest origin-centred disk inside the base pattern."""
    n = base.n_vertices if base.kind == "ellipse" else 60
    return BasePattern.circle(base.r_b_min, n)


def footprint(agent: AgentState, base: BasePattern, bounds: AltitudeBounds) -> MultiPolygon:
    """Sensed region of ``agent``; every edge is labelled with the agent id.

    A circular base is the same set at every yaw, so its sampled polygon is
    not rotated (otherwise the sampling alone would make H depend on yaw).
    """
    bounds.check(agent.z)
    theta = 0.0 if base.is_circle else agent.theta
    fp = affine_transform(base.as_multipolygon(), agent.z / bounds.z_min, theta, agent.q)
    return relabel(fp, agent.id)


def quality(z: float, bounds: AltitudeBounds) -> float:
    """Uniform coverage quality: 1 at ``z_min``, 0 at ``z_max``."""
    bounds.check(z)
    s = z - bounds.z_min
    d = bounds.span
    return (s * s - d * d) ** 2 / d ** 4


def quality_derivative(z: float, bounds: AltitudeBounds) -> float:
    bounds.check(z)
    s = z - bounds.z_min
    d = bounds.span
    return 4.0 * s * (s * s - d * d) / d ** 4


def quality_derivative_min(bounds: AltitudeBounds) -> tuple[float, float]:
    """Most negative slope of the quality curve and the altitude where it occurs."""
    return -8.0 * math.sqrt(3.0) / (9.0 * bounds.span), bounds.z_min + bounds.span / math.sqrt(3.0)


def boundary_velocity_planar(q: np.ndarray, agent: AgentState) -> np.ndarray:
    """d(q)/d(q_i) for points on the agent's own footprint: the identity."""
    q = np.atleast_2d(q)
    return np.broadcast_to(np.eye(2), (len(q), 2, 2)).copy()


def boundary_velocity_altitude(q: np.ndarray, agent: AgentState) -> np.ndarray:
    """d(q)/d(z_i) = (q - q_i) / z_i."""
    return (np.atleast_2d(q) - agent.position) / agent.z


def boundary_velocity_yaw(q: np.ndarray, agent: AgentState) -> np.ndarray:
    """d(q)/d(theta_i) = J (q - q_i) with J the quarter-turn rotation."""
    return (np.atleast_2d(q) - agent.position) @ ROT90.T
