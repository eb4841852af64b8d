"""The world a controller sees: agents, sensors, region and density."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .geom2d import MultiPolygon
from .objective import DensityField, Metrics, evaluate_objective, objective_value
from .partition import PartitionResult, compute_partition
from .sensing import AgentState, AltitudeBounds, BasePattern


@dataclass(frozen=True)
class Gains:
    alpha_q: float = 1.0
    alpha_z: float = 1.0
    alpha_theta: float = 1.0

    def __post_init__(self):
        for name in ("alpha_q", "alpha_z", "alpha_theta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True, eq=False)
class Scenario:
    agents: tuple[AgentState, ...]
    base: BasePattern
    region: MultiPolygon
    bounds: AltitudeBounds
    density: DensityField = DensityField.uniform()
    gains: Gains = Gains()
    line_order: int = 3

    def with_agents(self, agents: Sequence[AgentState]) -> "Scenario":
        return replace(self, agents=tuple(agents))

    def with_base(self, base: BasePattern) -> "Scenario":
        return replace(self, base=base)

    def partition(self) -> PartitionResult:
        return compute_partition(self.agents, self.base, self.region, self.bounds)

    def objective(self, part: PartitionResult | None = None) -> float:
        part = self.partition() if part is None else part
        return objective_value(part, self.agents, self.density, self.bounds)

    def metrics(self, part: PartitionResult | None = None) -> Metrics:
        part = self.partition() if part is None else part
        return evaluate_objective(part, self.agents, self.density, self.bounds)
