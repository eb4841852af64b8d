"""Closed-loop simulation with single-integrator agents.

Every step computes all control inputs from one snapshot, applies an Euler
update, projects positions back into the region and clamps altitudes.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .control import ControlInput, compute_inputs
from .objective import Metrics
from .partition import PartitionResult
from .scenario import Scenario
from .sensing import AgentState, inscribed_disk_pattern
from .geom2d import project_to_convex

log = logging.getLogger(__name__)


class Mode(enum.Enum):
    INSCRIBED_DISK = "inscribed"
    FIXED_YAW = "fixed-yaw"
    FULL = "full"


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-2
    max_steps: int = 3000
    convergence_tol: float = 1e-4
    mode: Mode = Mode.FULL
    ascent_eta: float = 1e-6

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be a positive integer")
        if self.convergence_tol < 0:
            raise ValueError("convergence_tol must be non-negative")


@dataclass(frozen=True)
class StepRecord:
    t: float
    states: tuple[AgentState, ...]
    inputs: tuple[ControlInput, ...]
    metrics: Metrics
    true_metrics: Metrics | None = None


@dataclass
class TrajectoryLog:
    mode: Mode
    config: SimConfig
    initial_states: tuple[AgentState, ...]
    initial_metrics: Metrics
    initial_true_metrics: Metrics | None = None
    records: list[StepRecord] = field(default_factory=list)
    violations: int = 0
    violation_steps: list[int] = field(default_factory=list)
    converged: bool = False

    @property
    def steps(self) -> int:
        return len(self.records)

    @property
    def final_states(self) -> tuple[AgentState, ...]:
        return self.records[-1].states if self.records else self.initial_states

    @property
    def final_metrics(self) -> Metrics:
        return self.records[-1].metrics if self.records else self.initial_metrics

    @property
    def final_true_metrics(self) -> Metrics:
        """Metrics of the real footprints (differs from ``final_metrics`` in disk mode)."""
        if self.records:
            rec = self.records[-1]
            return rec.true_metrics if rec.true_metrics is not None else rec.metrics
        return self.initial_true_metrics or self.initial_metrics

    def H_series(self) -> list[float]:
        return [self.initial_metrics.H] + [r.metrics.H for r in self.records]


@dataclass
class StepResult:
    states: tuple[AgentState, ...]
    inputs: tuple[ControlInput, ...]
    metrics: Metrics
    partition: PartitionResult
    true_metrics: Metrics | None = None


def control_scenario(scenario: Scenario, mode: Mode) -> Scenario:
    """Scenario the controller reasons about (disk footprints in disk mode)."""
    if mode is Mode.INSCRIBED_DISK:
        return scenario.with_base(inscribed_disk_pattern(scenario.base))
    return scenario


def step(states: Sequence[AgentState], config: SimConfig, scenario: Scenario,
         part: PartitionResult | None = None) -> StepResult:
    """One synchronous Euler step from ``states``.

    ``part`` may pass in the partition of ``states`` under the control
    scenario, saving a recomputation.
    """
    ctl = control_scenario(scenario, config.mode).with_agents(states)
    inputs = compute_inputs(ctl, part, use_yaw=config.mode is Mode.FULL)
    omega_xy = scenario.region.polygons[0].outer.xy
    bounds = scenario.bounds
    dt = config.dt
    new_states = []
    applied = []
    for a in states:
        u = inputs[a.id]
        if config.mode is not Mode.FULL:
            u = ControlInput(u.u_q, u.u_z, 0.0)
        q = project_to_convex(omega_xy, (a.x + dt * u.u_q[0], a.y + dt * u.u_q[1]))
        z = bounds.clamp(a.z + dt * u.u_z)
        new_states.append(a.moved(q=q, z=z, theta=a.theta + dt * u.omega))
        applied.append(u)
    new_ctl = ctl.with_agents(new_states)
    new_part = new_ctl.partition()
    metrics = new_ctl.metrics(new_part)
    true_metrics = None
    if config.mode is Mode.INSCRIBED_DISK:
        true_metrics = scenario.with_agents(new_states).metrics()
    return StepResult(tuple(new_states), tuple(applied), metrics, new_part, true_metrics)


def run(scenario: Scenario, config: SimConfig,
        callback: Callable[[int, StepResult], None] | None = None) -> TrajectoryLog:
    """Iterate ``step`` until inputs fall below ``convergence_tol`` or ``max_steps``.

    Steps where H drops by more than ``ascent_eta * |H|`` are counted in
    ``violations``; they are expected only for coarse time steps.
    """
    ctl = control_scenario(scenario, config.mode)
    part = ctl.partition()
    initial = ctl.metrics(part)
    initial_true = scenario.metrics() if config.mode is Mode.INSCRIBED_DISK else None
    trace = TrajectoryLog(config.mode, config, tuple(scenario.agents), initial, initial_true)
    states = tuple(scenario.agents)
    prev_H = initial.H
    for k in range(config.max_steps):
        res = step(states, config, scenario, part)
        t = (k + 1) * config.dt
        trace.records.append(StepRecord(t, res.states, res.inputs, res.metrics, res.true_metrics))
        if res.metrics.H - prev_H < -config.ascent_eta * abs(prev_H):
            trace.violations += 1
            trace.violation_steps.append(k + 1)
            log.info("objective decreased at step %d: %.9g -> %.9g", k + 1, prev_H, res.metrics.H)
        if callback is not None:
            callback(k + 1, res)
        prev_H = res.metrics.H
        states, part = res.states, res.partition
        if max(u.norm for u in res.inputs) < config.convergence_tol:
            trace.converged = True
            break
    return trace
