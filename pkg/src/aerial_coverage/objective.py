"""Importance densities and the coverage-quality objective."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import erf

from .geom2d import MultiPolygon, area, area_integral, gauss_legendre
from .partition import PartitionResult
from .sensing import AgentState, AltitudeBounds, quality

# edge quadrature for the Gaussian antiderivative: GL order and max piece length in sigmas
_GAUSS_EDGE_ORDER = 8
_GAUSS_EDGE_PIECE = 0.5


@dataclass(frozen=True)
class GaussianComponent:
    weight: float
    center: tuple[float, float]
    sigma: float

    def __post_init__(self):
        if not (self.weight > 0 and self.sigma > 0):
            raise ValueError("gaussian weight and sigma must be positive")


@dataclass(frozen=True)
class DensityField:
    """Either a positive constant or a mixture of isotropic Gaussians.

    A pure mixture is not strictly positive far from its centres, so
    ``floor`` (default 0) can add a constant background.
    """

    kind: str = "uniform"
    value: float = 1.0
    components: tuple[GaussianComponent, ...] = ()

    def __post_init__(self):
        if self.kind == "uniform":
            if not self.value > 0:
                raise ValueError("uniform density must be positive")
        elif self.kind == "gaussian_mixture":
            if not self.components:
                raise ValueError("gaussian mixture needs at least one component")
            if self.value < 0:
                raise ValueError("background value must be non-negative")
        else:
            raise ValueError(f"unknown density kind {self.kind!r}")

    @classmethod
    def uniform(cls, value: float = 1.0) -> "DensityField":
        return cls("uniform", float(value))

    @classmethod
    def gaussian_mixture(cls, components, floor: float = 0.0) -> "DensityField":
        comps = tuple(c if isinstance(c, GaussianComponent)
                      else GaussianComponent(float(c[0]), (float(c[1][0]), float(c[1][1])),
                                             float(c[2]))
                      for c in components)
        return cls("gaussian_mixture", float(floor), comps)

    @property
    def is_uniform(self) -> bool:
        return self.kind == "uniform"

    @property
    def min_sigma(self) -> float:
        return min((c.sigma for c in self.components), default=math.inf)

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "uniform":
            return np.full(len(pts), self.value)
        out = np.full(len(pts), self.value)
        for c in self.components:
            r2 = ((pts - np.asarray(c.center)) ** 2).sum(axis=1)
            out += c.weight * np.exp(-r2 / (2 * c.sigma ** 2)) / (2 * np.pi * c.sigma ** 2)
        return out

    def integral(self, region: MultiPolygon) -> float:
        """Integral of the density over ``region``.

        Gaussians are integrated in closed form along x (erf) and by
        Gauss-Legendre along the boundary, via Green's theorem.  This is
        accurate to round-off and smooth in the vertex positions, which the
        finite-difference gradient checks rely on.
        """
        if region.is_empty:
            return 0.0
        if self.kind == "uniform":
            return self.value * area(region)
        total = self.value * area(region)
        segs = region.segments()
        for c in self.components:
            total += _gaussian_boundary_integral(segs, c)
        return total


def _gaussian_boundary_integral(segs: np.ndarray, c: GaussianComponent) -> float:
    p0 = segs[:, 0]
    d = segs[:, 1] - p0
    L = np.hypot(d[:, 0], d[:, 1])
    npieces = np.maximum(1, np.ceil(L / (_GAUSS_EDGE_PIECE * c.sigma))).astype(int)
    t, w = gauss_legendre(_GAUSS_EDGE_ORDER)
    s2 = math.sqrt(2.0) * c.sigma
    scale = c.weight / (2.0 * c.sigma * math.sqrt(2.0 * math.pi))
    total = 0.0
    for n in np.unique(npieces):
        sel = npieces == n
        # nodes along each edge, n pieces of GL each
        u = ((np.arange(n)[:, None] + t[None, :]) / n).ravel()
        wu = np.tile(w / n, n)
        pts = p0[sel][:, None, :] + u[None, :, None] * d[sel][:, None, :]
        x = pts[..., 0] - c.center[0]
        y = pts[..., 1] - c.center[1]
        phi_x = scale * np.exp(-(y * y) / (s2 * s2)) * (1.0 + erf(x / s2))
        total += float(np.sum((phi_x @ wu) * d[sel][:, 1]))
    return total


@dataclass(frozen=True)
class Metrics:
    H: float
    covered_fraction: float
    per_agent_cell_area: tuple[float, ...]


def objective_value(part: PartitionResult, agents: Sequence[AgentState], phi: DensityField,
                    bounds: AltitudeBounds) -> float:
    """Sum of quality-weighted density over cells plus tied regions at their level."""
    H = 0.0
    for a in agents:
        cell = part.cells[a.id]
        if not cell.is_empty:
            H += quality(a.z, bounds) * phi.integral(cell)
    for t in part.tied_regions:
        H += t.level * phi.integral(t.region)
    return H


def evaluate_objective(part: PartitionResult, agents: Sequence[AgentState], phi: DensityField,
                       bounds: AltitudeBounds) -> Metrics:
    # cells and tied regions tile the covered part of the region, so their
    # areas add up to the union of clipped footprints
    covered = part.covered_area()
    total = area(part.region)
    return Metrics(
        H=objective_value(part, agents, phi, bounds),
        covered_fraction=min(1.0, covered / total) if total > 0 else 0.0,
        per_agent_cell_area=tuple(area(part.cells[a.id]) for a in agents),
    )


def density_eval(phi: DensityField, q) -> float:
    return float(phi(np.asarray(q, dtype=float)[None])[0])


def density_area_integral(region: MultiPolygon, phi: DensityField, order: int | None = None,
                          h_max: float | None = None) -> float:
    """Generic triangle quadrature of the density (used as a cross-check)."""
    if order is None:
        order = 4 if phi.is_uniform else 6
    return area_integral(region, phi, order=order, h_max=h_max)
