import math

import numpy as np
import pytest
from scipy.optimize import brentq

import aerial_coverage.sim as sim
from aerial_coverage.control import ControlInput
from aerial_coverage.geom2d import contains_point, polygon_from_points
from aerial_coverage.scenario import Scenario
from aerial_coverage.sensing import AgentState, AltitudeBounds, BasePattern
from aerial_coverage.sim import Mode, SimConfig, run, step

B = AltitudeBounds(0.3, 2.3)
SQUARE = polygon_from_points([[0, 0], [2, 0], [2, 2], [0, 2]])
ELL = BasePattern.ellipse(0.2, 0.1, 60)


def two_agents(base=ELL):
    agents = (AgentState(1, (0.8, 1.0), 0.6, 0.3), AgentState(2, (1.2, 1.1), 0.75, 1.1))
    return Scenario(agents, base, SQUARE, B)


def stationary_altitude(bounds):
    """Root of f'(z) z + 2 f(z) = 0, the single-agent balance for any star-shaped footprint."""
    d = bounds.span

    def g(z):
        s = z - bounds.z_min
        return 4 * s * (s * s - d * d) / d ** 4 * z + 2 * (s * s - d * d) ** 2 / d ** 4

    return brentq(g, bounds.z_min + 1e-9, bounds.z_max - 1e-9, xtol=1e-14)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(dt=0.0)
    with pytest.raises(ValueError):
        SimConfig(max_steps=0)
    with pytest.raises(ValueError):
        SimConfig(convergence_tol=-1.0)


def test_zero_inputs_leave_states_unchanged(monkeypatch):
    sc = two_agents()
    monkeypatch.setattr(sim, "compute_inputs",
                        lambda s, part=None, use_yaw=True: {a.id: ControlInput() for a in s.agents})
    res = step(sc.agents, SimConfig(dt=0.1), sc)
    assert res.states == sc.agents


def test_projection_and_clamp(monkeypatch):
    sc = two_agents()
    monkeypatch.setattr(sim, "compute_inputs",
                        lambda s, part=None, use_yaw=True:
                        {a.id: ControlInput((50.0, 0.0), 100.0, 1.0) for a in s.agents})
    res = step(sc.agents, SimConfig(dt=0.1, mode=Mode.FIXED_YAW), sc)
    for a, b in zip(sc.agents, res.states):
        assert b.z == B.z_max
        assert b.x == pytest.approx(2.0) and b.y == pytest.approx(a.y)
        assert b.theta == a.theta  # yaw frozen in this mode


def test_feasibility_with_large_steps():
    log = run(two_agents(), SimConfig(dt=0.5, max_steps=15))
    for r in log.records:
        for a in r.states:
            assert B.z_min <= a.z <= B.z_max
            assert contains_point(SQUARE, a.q)


def test_violations_are_counted_consistently():
    log = run(two_agents(), SimConfig(dt=0.5, max_steps=15))
    H = log.H_series()
    drops = [k for k in range(1, len(H)) if H[k] - H[k - 1] < -1e-6 * abs(H[k - 1])]
    assert log.violation_steps == drops
    assert log.violations == len(drops)


def test_small_step_ascent_and_improvement():
    log = run(two_agents(), SimConfig(dt=1e-2, max_steps=40))
    assert log.violations == 0
    assert log.final_metrics.H > log.initial_metrics.H
    assert np.all(np.diff(log.H_series()) >= -1e-6 * np.abs(log.H_series()[:-1]))


def test_runs_are_bit_identical():
    a = run(two_agents(), SimConfig(dt=1e-2, max_steps=5))
    b = run(two_agents(), SimConfig(dt=1e-2, max_steps=5))
    assert a.records == b.records


def test_inscribed_mode_reports_true_metrics_and_no_yaw():
    log = run(two_agents(), SimConfig(dt=1e-2, max_steps=5, mode=Mode.INSCRIBED_DISK))
    assert all(r.true_metrics is not None for r in log.records)
    assert all(u.omega == 0.0 for r in log.records for u in r.inputs)
    # disks are smaller than the ellipses they stand for
    assert log.final_metrics.covered_fraction < log.final_true_metrics.covered_fraction


def test_full_mode_rotates_agents():
    log = run(two_agents(), SimConfig(dt=1e-2, max_steps=3, mode=Mode.FULL))
    assert any(abs(u.omega) > 0 for u in log.records[0].inputs)


def test_single_agent_reaches_stationary_altitude():
    disk = BasePattern.circle(0.2, 64)
    big = polygon_from_points([[0, 0], [4, 0], [4, 4], [0, 4]])
    z_star = stationary_altitude(B)
    assert 3 * (z_star - 0.3) ** 2 + 0.6 * (z_star - 0.3) - 4 == pytest.approx(0.0, abs=1e-12)
    sc = Scenario((AgentState(1, (2.0, 2.0), 0.6),), disk, big, B)
    log = run(sc, SimConfig(dt=0.05, max_steps=2000, convergence_tol=1e-6))
    assert log.converged
    assert log.final_states[0].z == pytest.approx(z_star, abs=1e-3)


def test_converged_configuration_stops_at_first_step():
    disk = BasePattern.circle(0.2, 64)
    big = polygon_from_points([[0, 0], [4, 0], [4, 4], [0, 4]])
    sc = Scenario((AgentState(1, (2.0, 2.0), stationary_altitude(B)),), disk, big, B)
    log = run(sc, SimConfig(dt=0.05, max_steps=100))
    assert log.steps == 1 and log.converged
