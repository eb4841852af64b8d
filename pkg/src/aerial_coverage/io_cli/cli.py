"""Command-line entry point: ``aerial-coverage run|check-gradient|metrics``.

Exit codes: 0 success, 1 invalid input (bad flags, unreadable or invalid
scenario), 2 internal consistency failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

from ..control import COMPONENTS, analytic_gradient, fd_gradient_check
from ..errors import ConsistencyError, ScenarioError
from ..sim import SimConfig, control_scenario, run
from .outputs import write_outputs
from .render import render_frame
from .scenario_file import MODES, ScenarioFile, parse_scenario, scenario_to_dict

log = logging.getLogger(__name__)

FD_REL_TOL = 1e-3
FD_ABS_TOL = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="aerial-coverage",
                description="Coverage control of a convex region by camera-carrying aerial agents.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="simulate a scenario and write CSV/JSON outputs")
    r.add_argument("scenario")
    r.add_argument("--out", default="results", help="output directory (default: results)")
    r.add_argument("--frames", type=int, default=0, metavar="N",
                   help="write an SVG frame every N steps (0 disables)")
    r.add_argument("--mode", choices=sorted(MODES), help="override the scenario's mode")
    r.add_argument("--dt", type=float, help="override the time step")
    r.add_argument("--steps", type=int, help="override the maximum number of steps")

    g = sub.add_parser("check-gradient", help="compare analytic and finite-difference gradients")
    g.add_argument("scenario")
    g.add_argument("--delta", type=float, default=1e-5, help="central-difference step")

    m = sub.add_parser("metrics", help="objective and coverage of the initial state")
    m.add_argument("scenario")
    return p


def resolve_scenario(name: str) -> Path:
    """A path on disk, or the name of a bundled scenario."""
    path = Path(name)
    if path.exists():
        return path
    bundled = resources.files("aerial_coverage") / "scenarios" / path.name
    if path.parent == Path(".") and bundled.is_file():
        return Path(str(bundled))
    return path


def _load(name: str) -> ScenarioFile:
    return parse_scenario(resolve_scenario(name))


def _cmd_run(args) -> int:
    sf = _load(args.scenario)
    cfg = sf.sim
    if args.mode:
        cfg = replace(cfg, mode=MODES[args.mode])
    if args.dt is not None:
        cfg = replace(cfg, dt=args.dt)
    if args.steps is not None:
        cfg = replace(cfg, max_steps=args.steps)
    cfg = SimConfig(cfg.dt, cfg.max_steps, cfg.convergence_tol, cfg.mode)
    if args.frames < 0:
        raise ScenarioError("--frames", "must be non-negative")
    sc = sf.to_scenario()
    out = Path(args.out)
    frames = []

    def snap(k, states, part):
        frames.append(render_frame(states, part, sc.region, k * cfg.dt,
                                   out / "frames" / f"frame_{k:06d}.svg"))

    callback = None
    if args.frames:
        snap(0, sc.agents, control_scenario(sc, cfg.mode).partition())

        def callback(k, res):
            if k % args.frames == 0:
                snap(k, res.states, res.partition)

    trace = run(sc, cfg, callback)
    doc = scenario_to_dict(sf)
    doc["sim"] = {"dt": cfg.dt, "max_steps": cfg.max_steps,
                  "convergence_tol": cfg.convergence_tol, "mode": cfg.mode.value}
    res = write_outputs(trace, out, doc, tuple(frames))
    fm = trace.final_true_metrics
    print(f"steps={trace.steps} converged={trace.converged} violations={trace.violations}")
    print(f"H: {trace.initial_metrics.H:.6f} -> {trace.final_metrics.H:.6f}")
    print(f"covered fraction (true footprints): {fm.covered_fraction:.6f}")
    print(f"outputs written to {res.directory}")
    return 0


def _cmd_check_gradient(args) -> int:
    sc = _load(args.scenario).to_scenario()
    part = sc.partition()
    grad = analytic_gradient(sc, part)
    ok = True
    print(f"{'agent':>5} {'comp':>6} {'analytic':>15} {'finite-diff':>15} {'abs err':>10}  status")
    for a in sc.agents:
        for c, comp in enumerate(COMPONENTS):
            fd = fd_gradient_check(a.id, comp, sc, args.delta, part)
            an = float(grad[a.id][c])
            err = abs(an - fd.value)
            tol = max(FD_REL_TOL * abs(fd.value), FD_ABS_TOL)
            if fd.topology_changed:
                status = "skipped (topology change)"
            elif err <= tol:
                status = "ok"
            else:
                status = "MISMATCH"
                ok = False
            print(f"{a.id:>5} {comp:>6} {an:>15.8e} {fd.value:>15.8e} {err:>10.2e}  {status}")
    if not ok:
        print("gradient check failed", file=sys.stderr)
        return 2
    return 0


def _cmd_metrics(args) -> int:
    sc = _load(args.scenario).to_scenario()
    m = sc.metrics()
    print(f"H {m.H!r}")
    print(f"covered_fraction {m.covered_fraction!r}")
    for a, ar in zip(sc.agents, m.per_agent_cell_area):
        print(f"cell_area[{a.id}] {ar!r}")
    return 0


COMMANDS = {"run": _cmd_run, "check-gradient": _cmd_check_gradient, "metrics": _cmd_metrics}


def cli_main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    except SystemExit as e:  # --help
        return 0 if e.code in (0, None) else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ScenarioError as e:
        print(f"invalid scenario: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ConsistencyError as e:
        print(f"internal consistency error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
