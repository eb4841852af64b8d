"""CSV trajectory/metrics tables and the run manifest.

Floats are written with ``repr`` so identical logs give identical bytes.
"""

from __future__ import annotations

import csv
import json
import platform
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from .. import __version__
from ..objective import Metrics
from ..sim import Mode, TrajectoryLog

TRAJECTORY_HEADER = ("t", "id", "x", "y", "z", "theta", "u_x", "u_y", "u_z", "omega")
METRICS_HEADER = ("t", "H", "covered_fraction")
MANIFEST_KEYS = ("package", "version", "dependencies", "scenario", "config", "steps",
                 "converged", "ascent_violations", "violation_steps", "initial_metrics",
                 "final_metrics", "files")


@dataclass(frozen=True)
class RunOutputs:
    directory: Path
    trajectory: Path
    metrics: Path
    manifest: Path
    metrics_elliptical: Path | None = None
    frames: tuple[Path, ...] = ()


def _f(x: float) -> str:
    return repr(float(x))


def _metrics_dict(m: Metrics) -> dict:
    return {"H": m.H, "covered_fraction": m.covered_fraction,
            "per_agent_cell_area": list(m.per_agent_cell_area)}


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_outputs(log: TrajectoryLog, directory, scenario: dict | None = None,
                  frames: tuple[Path, ...] = ()) -> RunOutputs:
    """Write ``trajectory.csv``, ``metrics.csv`` and ``manifest.json``.

    One trajectory row per step and agent (the initial state is echoed in
    the manifest instead).  Disk-mode runs also get
    ``metrics_elliptical.csv`` with metrics of the real footprints.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    traj = out / "trajectory.csv"
    rows = []
    for r in log.records:
        for a, u in zip(r.states, r.inputs):
            rows.append([_f(r.t), a.id, _f(a.x), _f(a.y), _f(a.z), _f(a.theta),
                         _f(u.u_q[0]), _f(u.u_q[1]), _f(u.u_z), _f(u.omega)])
    _write_csv(traj, TRAJECTORY_HEADER, rows)

    met = out / "metrics.csv"
    _write_csv(met, METRICS_HEADER,
               [[_f(r.t), _f(r.metrics.H), _f(r.metrics.covered_fraction)] for r in log.records])
    files = [traj.name, met.name]

    ell = None
    if log.mode is Mode.INSCRIBED_DISK:
        ell = out / "metrics_elliptical.csv"
        _write_csv(ell, METRICS_HEADER,
                   [[_f(r.t), _f(r.true_metrics.H), _f(r.true_metrics.covered_fraction)]
                    for r in log.records])
        files.append(ell.name)

    cfg = log.config
    manifest = {
        "package": "aerial-coverage",
        "version": __version__,
        "dependencies": {"python": platform.python_version(), "numpy": np.__version__,
                         "scipy": scipy.__version__},
        "scenario": scenario,
        "config": {"dt": cfg.dt, "max_steps": cfg.max_steps,
                   "convergence_tol": cfg.convergence_tol, "mode": cfg.mode.value,
                   "ascent_eta": cfg.ascent_eta},
        "steps": log.steps,
        "converged": log.converged,
        "ascent_violations": log.violations,
        "violation_steps": list(log.violation_steps),
        "initial_metrics": _metrics_dict(log.initial_metrics),
        "final_metrics": _metrics_dict(log.final_metrics),
        "files": files + [str(Path(p).relative_to(out)) for p in frames],
    }
    if log.mode is Mode.INSCRIBED_DISK:
        manifest["initial_metrics_elliptical"] = _metrics_dict(log.initial_true_metrics)
        manifest["final_metrics_elliptical"] = _metrics_dict(log.final_true_metrics)
    man = out / "manifest.json"
    man.write_text(json.dumps(manifest, indent=2) + "\n")
    return RunOutputs(out, traj, met, man, ell, tuple(frames))
