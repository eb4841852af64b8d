"""Scenario files, run outputs, SVG frames and the command line."""

from .outputs import METRICS_HEADER, TRAJECTORY_HEADER, RunOutputs, write_outputs
from .render import render_frame, render_svg
from .scenario_file import (
    BaseSpec,
    ScenarioFile,
    parse_scenario,
    scenario_from_dict,
    scenario_to_dict,
    serialize_scenario,
    write_scenario,
)

__all__ = [
    "BaseSpec", "METRICS_HEADER", "RunOutputs", "ScenarioFile", "TRAJECTORY_HEADER",
    "parse_scenario", "render_frame", "render_svg", "scenario_from_dict", "scenario_to_dict",
    "serialize_scenario", "write_outputs", "write_scenario",
]
