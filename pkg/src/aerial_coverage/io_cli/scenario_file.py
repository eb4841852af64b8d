"""JSON scenario files: strict parsing, validation and a stable serializer.

Units are world units for lengths and radians for angles.  Every
validation failure names the offending field (``agents[2].z``) and why it
was rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import ScenarioError
from ..geom2d import EPS_GEOM, contains_point, is_convex, polygon_from_points, signed_area
from ..objective import DensityField, GaussianComponent
from ..scenario import Gains, Scenario
from ..sensing import AgentState, AltitudeBounds, BasePattern
from ..sim import Mode, SimConfig

MODES = {m.value: m for m in Mode}

_TOP_KEYS = {"name", "provenance", "region", "base_pattern", "bounds", "agents", "density",
             "gains", "sim"}


@dataclass(frozen=True)
class BaseSpec:
    kind: str
    a: float = 0.0
    b: float = 0.0
    n_vertices: int = 60
    vertices: tuple[tuple[float, float], ...] = ()

    def build(self) -> BasePattern:
        if self.kind == "ellipse":
            return BasePattern.ellipse(self.a, self.b, self.n_vertices)
        return BasePattern.polygon(self.vertices)


@dataclass(frozen=True)
class ScenarioFile:
    region: tuple[tuple[float, float], ...]
    base_pattern: BaseSpec
    bounds: AltitudeBounds
    agents: tuple[AgentState, ...]
    density: DensityField = DensityField.uniform()
    gains: Gains = Gains()
    sim: SimConfig = SimConfig()
    name: str = ""
    provenance: str = ""

    def to_scenario(self) -> Scenario:
        return Scenario(self.agents, self.base_pattern.build(), polygon_from_points(self.region),
                        self.bounds, self.density, self.gains)


# ---------------------------------------------------------------- helpers

def _fail(path: str, reason: str):
    raise ScenarioError(path, reason)


def _obj(v, path: str, allowed: set[str], required: set[str] = frozenset()) -> dict:
    if not isinstance(v, dict):
        _fail(path, f"expected an object, got {type(v).__name__}")
    for k in v:
        if k not in allowed:
            _fail(f"{path}.{k}", "unknown field")
    for k in sorted(required):
        if k not in v:
            _fail(f"{path}.{k}", "missing required field")
    return v


def _num(v, path: str, positive: bool = False, nonneg: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(path, f"expected a number, got {json.dumps(v)}")
    x = float(v)
    if not math.isfinite(x):
        _fail(path, "must be finite")
    if positive and not x > 0:
        _fail(path, f"must be positive, got {x!r}")
    if nonneg and x < 0:
        _fail(path, f"must be non-negative, got {x!r}")
    return x


def _int(v, path: str, minimum: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        else:
            _fail(path, f"expected an integer, got {json.dumps(v)}")
    if minimum is not None and v < minimum:
        _fail(path, f"must be >= {minimum}, got {v}")
    return v


def _point(v, path: str) -> tuple[float, float]:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        _fail(path, "expected a [x, y] pair")
    return (_num(v[0], f"{path}[0]"), _num(v[1], f"{path}[1]"))


def _ring(v, path: str, what: str) -> tuple[tuple[float, float], ...]:
    if not isinstance(v, list) or len(v) < 3:
        _fail(path, f"{what} needs at least 3 vertices")
    pts = [_point(p, f"{path}[{k}]") for k, p in enumerate(v)]
    xy = np.asarray(pts)
    a = signed_area(xy)
    if abs(a) <= EPS_GEOM:
        _fail(path, f"{what} is degenerate (zero area)")
    if a < 0:
        pts = pts[::-1]
        xy = xy[::-1]
    if not is_convex(xy):
        _fail(path, f"{what} must be convex")
    return tuple(pts)


# ---------------------------------------------------------------- sections

def _parse_base(v, path: str) -> BaseSpec:
    kind = _obj(v, path, {"kind", "a", "b", "n_vertices", "vertices"}, {"kind"})["kind"]
    if kind == "ellipse":
        _obj(v, path, {"kind", "a", "b", "n_vertices"}, {"a", "b"})
        n = _int(v.get("n_vertices", 60), f"{path}.n_vertices", minimum=8)
        return BaseSpec("ellipse", _num(v["a"], f"{path}.a", positive=True),
                        _num(v["b"], f"{path}.b", positive=True), n)
    if kind == "polygon":
        _obj(v, path, {"kind", "vertices"}, {"vertices"})
        verts = _ring(v["vertices"], f"{path}.vertices", "base pattern")
        spec = BaseSpec("polygon", vertices=verts)
        try:
            spec.build()
        except ValueError as e:
            _fail(f"{path}.vertices", str(e))
        return spec
    _fail(f"{path}.kind", f"expected 'ellipse' or 'polygon', got {json.dumps(kind)}")


def _parse_bounds(v, path: str) -> AltitudeBounds:
    _obj(v, path, {"z_min", "z_max"}, {"z_min", "z_max"})
    lo = _num(v["z_min"], f"{path}.z_min")
    hi = _num(v["z_max"], f"{path}.z_max")
    if not lo > 0:
        _fail(f"{path}.z_min", f"must be positive, got {lo!r}")
    if not lo < hi:
        _fail(path, f"z_min must be below z_max, got ({lo!r}, {hi!r})")
    return AltitudeBounds(lo, hi)


def _parse_agents(v, path: str, region, bounds: AltitudeBounds) -> tuple[AgentState, ...]:
    if not isinstance(v, list):
        _fail(path, "expected a list of agents")
    omega = polygon_from_points(region)
    out, seen = [], set()
    for k, a in enumerate(v):
        p = f"{path}[{k}]"
        if isinstance(a, dict) and ("z_min" in a or "z_max" in a):
            _fail(p, "per-agent altitude bounds are not supported; use the top-level bounds")
        _obj(a, p, {"id", "x", "y", "z", "theta"}, {"x", "y", "z"})
        i = _int(a.get("id", k + 1), f"{p}.id")
        if i in seen:
            _fail(f"{p}.id", f"duplicate agent id {i}")
        seen.add(i)
        x, y = _num(a["x"], f"{p}.x"), _num(a["y"], f"{p}.y")
        z = _num(a["z"], f"{p}.z")
        th = _num(a.get("theta", 0.0), f"{p}.theta")
        if not bounds.z_min <= z <= bounds.z_max:
            _fail(f"{p}.z", f"altitude {z!r} outside [{bounds.z_min!r}, {bounds.z_max!r}]")
        if not contains_point(omega, (x, y)):
            _fail(p, f"position ({x!r}, {y!r}) lies outside the region")
        out.append(AgentState(i, (x, y), z, th))
    return tuple(out)


def _parse_density(v, path: str) -> DensityField:
    kind = _obj(v, path, {"kind", "value", "floor", "components"}, {"kind"})["kind"]
    if kind == "uniform":
        _obj(v, path, {"kind", "value"})
        return DensityField.uniform(_num(v.get("value", 1.0), f"{path}.value", positive=True))
    if kind == "gaussian_mixture":
        _obj(v, path, {"kind", "floor", "components"}, {"components"})
        comps = v["components"]
        if not isinstance(comps, list) or not comps:
            _fail(f"{path}.components", "expected a non-empty list")
        out = []
        for k, c in enumerate(comps):
            p = f"{path}.components[{k}]"
            _obj(c, p, {"weight", "center", "sigma"}, {"weight", "center", "sigma"})
            out.append(GaussianComponent(_num(c["weight"], f"{p}.weight", positive=True),
                                         _point(c["center"], f"{p}.center"),
                                         _num(c["sigma"], f"{p}.sigma", positive=True)))
        floor = _num(v.get("floor", 0.0), f"{path}.floor", nonneg=True)
        return DensityField.gaussian_mixture(out, floor)
    _fail(f"{path}.kind", f"expected 'uniform' or 'gaussian_mixture', got {json.dumps(kind)}")


def _parse_gains(v, path: str) -> Gains:
    names = ("alpha_q", "alpha_z", "alpha_theta")
    _obj(v, path, set(names))
    return Gains(*(_num(v.get(n, 1.0), f"{path}.{n}", positive=True) for n in names))


def _parse_sim(v, path: str) -> SimConfig:
    _obj(v, path, {"dt", "max_steps", "convergence_tol", "mode"})
    d = SimConfig()
    mode = v.get("mode", d.mode.value)
    if mode not in MODES:
        _fail(f"{path}.mode", f"expected one of {sorted(MODES)}, got {json.dumps(mode)}")
    return SimConfig(
        dt=_num(v.get("dt", d.dt), f"{path}.dt", positive=True),
        max_steps=_int(v.get("max_steps", d.max_steps), f"{path}.max_steps", minimum=1),
        convergence_tol=_num(v.get("convergence_tol", d.convergence_tol),
                             f"{path}.convergence_tol", nonneg=True),
        mode=MODES[mode],
    )


# ---------------------------------------------------------------- public API

def scenario_from_dict(doc: Any) -> ScenarioFile:
    _obj(doc, "$", _TOP_KEYS, {"region", "base_pattern", "bounds", "agents"})
    region = _ring(doc["region"], "region", "region")
    bounds = _parse_bounds(doc["bounds"], "bounds")
    name = doc.get("name", "")
    prov = doc.get("provenance", "")
    for key, val in (("name", name), ("provenance", prov)):
        if not isinstance(val, str):
            _fail(key, "expected a string")
    return ScenarioFile(
        region=region,
        base_pattern=_parse_base(doc["base_pattern"], "base_pattern"),
        bounds=bounds,
        agents=_parse_agents(doc["agents"], "agents", region, bounds),
        density=_parse_density(doc.get("density", {"kind": "uniform"}), "density"),
        gains=_parse_gains(doc.get("gains", {}), "gains"),
        sim=_parse_sim(doc.get("sim", {}), "sim"),
        name=name,
        provenance=prov,
    )


def parse_scenario(path) -> ScenarioFile:
    """Read and validate a scenario JSON file.

    Raises ``ScenarioError`` on malformed or invalid content and ``OSError``
    when the file cannot be read.
    """
    path = Path(path)
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError("$", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")
    return scenario_from_dict(doc)


def scenario_to_dict(sf: ScenarioFile) -> dict:
    b = sf.base_pattern
    if b.kind == "ellipse":
        base = {"kind": "ellipse", "a": b.a, "b": b.b, "n_vertices": b.n_vertices}
    else:
        base = {"kind": "polygon", "vertices": [list(p) for p in b.vertices]}
    d = sf.density
    if d.is_uniform:
        dens = {"kind": "uniform", "value": d.value}
    else:
        dens = {"kind": "gaussian_mixture", "floor": d.value,
                "components": [{"weight": c.weight, "center": list(c.center), "sigma": c.sigma}
                               for c in d.components]}
    return {
        "name": sf.name,
        "provenance": sf.provenance,
        "region": [list(p) for p in sf.region],
        "base_pattern": base,
        "bounds": {"z_min": sf.bounds.z_min, "z_max": sf.bounds.z_max},
        "agents": [{"id": a.id, "x": a.x, "y": a.y, "z": a.z, "theta": a.theta}
                   for a in sf.agents],
        "density": dens,
        "gains": {"alpha_q": sf.gains.alpha_q, "alpha_z": sf.gains.alpha_z,
                  "alpha_theta": sf.gains.alpha_theta},
        "sim": {"dt": sf.sim.dt, "max_steps": sf.sim.max_steps,
                "convergence_tol": sf.sim.convergence_tol, "mode": sf.sim.mode.value},
    }


def serialize_scenario(sf: ScenarioFile) -> str:
    return json.dumps(scenario_to_dict(sf), indent=2) + "\n"


def write_scenario(sf: ScenarioFile, path) -> None:
    Path(path).write_text(serialize_scenario(sf))
