"""Gradient control laws for planar motion, altitude and yaw.

Each law is a boundary integral over the agent's free arcs (weight
``f_i * phi``) and over arcs it shares with worse neighbours (weight
``(f_i - f_j) * phi``).  Region-boundary and foreign arcs do not move with
the agent and contribute nothing.  The altitude law adds the rate at which
the cell's own quality drops.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import ConsistencyError
from .geom2d import EPS_GEOM, contains_point, line_integral_scalar, line_integral_vector
from .objective import DensityField
from .partition import AgentBoundary, ClassifiedBoundary, PartitionResult, classify_boundaries
from .scenario import Gains, Scenario
from .sensing import (
    AgentState,
    AltitudeBounds,
    boundary_velocity_altitude,
    boundary_velocity_yaw,
    quality,
    quality_derivative,
)

COMPONENTS = ("q_x", "q_y", "z", "theta")


@dataclass(frozen=True)
class ControlInput:
    u_q: tuple[float, float] = (0.0, 0.0)
    u_z: float = 0.0
    omega: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.u_q[0] ** 2 + self.u_q[1] ** 2 + self.u_z ** 2 + self.omega ** 2))

    def as_array(self) -> np.ndarray:
        return np.array([self.u_q[0], self.u_q[1], self.u_z, self.omega])


def _agent(agents: Sequence[AgentState], i: int) -> AgentState:
    for a in agents:
        if a.id == i:
            return a
    raise KeyError(i)


def _weighted_arcs(i: int, b: AgentBoundary, agents: Sequence[AgentState], phi: DensityField,
                   bounds: AltitudeBounds) -> Iterator[tuple[np.ndarray, float]]:
    """(segments, quality weight) pairs for the arcs that move with agent ``i``."""
    fi = quality(_agent(agents, i).z, bounds)
    if len(b.free_arc):
        yield b.free_arc, fi
    for j, segs in b.shared_own_arc.items():
        yield segs, fi - quality(_agent(agents, j).z, bounds)


def control_planar(i: int, cb: ClassifiedBoundary, agents: Sequence[AgentState],
                   phi: DensityField, bounds: AltitudeBounds, gains: Gains,
                   order: int = 3) -> np.ndarray:
    u = np.zeros(2)
    for segs, wf in _weighted_arcs(i, cb[i], agents, phi, bounds):
        u += wf * line_integral_vector(segs, phi, None, order)
    return gains.alpha_q * u


def control_altitude(i: int, cb: ClassifiedBoundary, part: PartitionResult,
                     agents: Sequence[AgentState], phi: DensityField, bounds: AltitudeBounds,
                     gains: Gains, order: int = 3) -> float:
    a = _agent(agents, i)
    cell = part.cells[i]
    u = 0.0
    if not cell.is_empty:
        u += quality_derivative(a.z, bounds) * phi.integral(cell)

    def vel(q):
        return boundary_velocity_altitude(q, a)

    for segs, wf in _weighted_arcs(i, cb[i], agents, phi, bounds):
        u += wf * line_integral_scalar(segs, phi, vel, order)
    return gains.alpha_z * u


def control_yaw(i: int, cb: ClassifiedBoundary, agents: Sequence[AgentState],
                phi: DensityField, bounds: AltitudeBounds, gains: Gains,
                order: int = 3) -> float:
    a = _agent(agents, i)

    def vel(q):
        return boundary_velocity_yaw(q, a)

    u = 0.0
    for segs, wf in _weighted_arcs(i, cb[i], agents, phi, bounds):
        u += wf * line_integral_scalar(segs, phi, vel, order)
    return gains.alpha_theta * u


def compute_inputs(scenario: Scenario, part: PartitionResult | None = None,
                   use_yaw: bool = True) -> dict[int, ControlInput]:
    """Control inputs of every agent from one snapshot."""
    part = scenario.partition() if part is None else part
    cb = classify_boundaries(part, scenario.agents)
    # rotating a circular footprint leaves it unchanged
    use_yaw = use_yaw and not scenario.base.is_circle
    args = (scenario.agents, scenario.density, scenario.bounds, scenario.gains)
    out = {}
    for a in scenario.agents:
        uq = control_planar(a.id, cb, *args, order=scenario.line_order)
        uz = control_altitude(a.id, cb, part, *args, order=scenario.line_order)
        w = control_yaw(a.id, cb, *args, order=scenario.line_order) if use_yaw else 0.0
        out[a.id] = ControlInput((float(uq[0]), float(uq[1])), float(uz), float(w))
    return out


def analytic_gradient(scenario: Scenario, part: PartitionResult | None = None) -> dict[int, np.ndarray]:
    """dH/d(q_x, q_y, z, theta) per agent, i.e. the control laws with unit gains."""
    unit = Scenario(scenario.agents, scenario.base, scenario.region, scenario.bounds,
                    scenario.density, Gains(), scenario.line_order)
    return {i: u.as_array() for i, u in compute_inputs(unit, part).items()}


def _perturb(a: AgentState, component: str, h: float) -> AgentState:
    if component == "q_x":
        return a.moved(q=(a.x + h, a.y))
    if component == "q_y":
        return a.moved(q=(a.x, a.y + h))
    if component == "z":
        return a.moved(z=a.z + h)
    if component == "theta":
        return a.moved(theta=a.theta + h)
    raise ValueError(f"unknown component {component!r}; expected one of {COMPONENTS}")


@dataclass(frozen=True)
class FDResult:
    value: float
    topology_changed: bool


def fd_gradient_check(i: int, component: str, scenario: Scenario, delta: float = 1e-5,
                      reference: PartitionResult | None = None) -> FDResult:
    """Central difference of H in one state component, rebuilding the partition each side."""
    vals, sigs = [], []
    for h in (delta, -delta):
        agents = [(_perturb(a, component, h) if a.id == i else a) for a in scenario.agents]
        moved = _agent(agents, i)
        if not (scenario.bounds.z_min <= moved.z <= scenario.bounds.z_max):
            raise ConsistencyError(f"perturbed altitude {moved.z} leaves the feasible range")
        if not contains_point(scenario.region, moved.q, EPS_GEOM):
            raise ConsistencyError(f"perturbed position {moved.q} leaves the region")
        sc = scenario.with_agents(agents)
        part = sc.partition()
        vals.append(sc.objective(part))
        sigs.append(part.signature())
    ref = scenario.partition().signature() if reference is None else reference.signature()
    changed = not (sigs[0] == sigs[1] == ref)
    return FDResult((vals[0] - vals[1]) / (2 * delta), changed)


def fd_gradient_oracle(i: int, component: str, scenario: Scenario, delta: float = 1e-5) -> float:
    return fd_gradient_check(i, component, scenario, delta).value
