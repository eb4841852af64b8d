"""SVG snapshots of a partition.

Conventions: region outline in black, footprint boundaries dashed red,
cell boundaries solid black, tied regions filled gray, agents as dots with
their id.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from ..geom2d import MultiPolygon
from ..partition import PartitionResult
from ..sensing import AgentState

WIDTH = 600
MARGIN = 20


def _path_d(mp: MultiPolygon, tf) -> str:
    parts = []
    for ring in mp.rings():
        pts = tf(ring.xy)
        parts.append("M " + " L ".join(f"{x:.3f} {y:.3f}" for x, y in pts) + " Z")
    return " ".join(parts)


def render_svg(states: Sequence[AgentState], part: PartitionResult | None,
               region: MultiPolygon, t: float) -> str:
    b = np.array(region.bounds(), dtype=float)
    if part is not None:
        for fp in part.footprints.values():
            fb = fp.bounds()
            b = np.r_[np.minimum(b[:2], fb[:2]), np.maximum(b[2:], fb[2:])]
    lo, hi = b[:2], b[2:]
    span = max(float(np.max(hi - lo)), 1e-9)
    s = (WIDTH - 2 * MARGIN) / span
    height = int(np.ceil((hi[1] - lo[1]) * s)) + 2 * MARGIN

    def tf(xy):
        xy = np.atleast_2d(xy)
        return np.stack([MARGIN + (xy[:, 0] - lo[0]) * s,
                         height - MARGIN - (xy[:, 1] - lo[1]) * s], axis=1)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
           f'viewBox="0 0 {WIDTH} {height}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<path d="{_path_d(region, tf)}" fill="none" stroke="black" stroke-width="2"/>']
    if part is not None:
        for tr in part.tied_regions:
            out.append(f'<path class="tied" d="{_path_d(tr.region, tf)}" fill="gray" '
                       'fill-opacity="0.6" fill-rule="evenodd" stroke="none"/>')
        for i, cell in sorted(part.cells.items()):
            if not cell.is_empty:
                out.append(f'<path class="cell" data-id="{i}" d="{_path_d(cell, tf)}" '
                           'fill="#4a90d9" fill-opacity="0.15" fill-rule="evenodd" '
                           'stroke="black" stroke-width="1.2"/>')
        for i, fp in sorted(part.footprints.items()):
            out.append(f'<path class="footprint" data-id="{i}" d="{_path_d(fp, tf)}" '
                       'fill="none" stroke="red" stroke-width="1" stroke-dasharray="5,4"/>')
    for a in states:
        x, y = tf(a.position)[0]
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" fill="black"/>')
        out.append(f'<text x="{x + 4:.3f}" y="{y - 4:.3f}" font-size="11" '
                   f'font-family="sans-serif">{escape(str(a.id))}</text>')
    out.append(f'<text x="{MARGIN}" y="{MARGIN - 5}" font-size="12" '
               f'font-family="sans-serif">t = {t:.3f}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_frame(states: Sequence[AgentState], part: PartitionResult | None,
                 region: MultiPolygon, t: float, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(states, part, region, t))
    return path
