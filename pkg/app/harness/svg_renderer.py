"""
SVG rendering of a reconstruction run
Snapshots of the outer hull and of every witness band are logged while the engine
runs; the drawing is built from the regions and that log only.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import svgwrite

from app.config import settings
from app.geometry.disks import sample_boundary
from app.geometry.primitives import Point
from app.geometry.shapes import convex_hull_ccw
from app.regions.family import Family, RegionDesc, RegionKind
from app.classify.outer_hull import outer_hull
from app.strategies.base import ReconstructionEngine, RunReport, StepAction

logger = logging.getLogger("svg_renderer")

XY = Tuple[float, float]

REGION_STYLE = {"fill": "#dde8f5", "fill_opacity": 0.6, "stroke": "#4a6f9c", "stroke_width": 1}
BAND_STYLE = {"fill": "#f6c77b", "fill_opacity": 0.25, "stroke": "#c9822b",
              "stroke_width": 1, "stroke_dasharray": "4,3"}
SNAPSHOT_STYLE = {"fill": "none", "stroke": "#9aa5b1", "stroke_width": 1, "stroke_opacity": 0.7}
FINAL_STYLE = {"fill": "none", "stroke": "#c0392b", "stroke_width": 2.5}


@dataclass
class Snapshot:
    """Outer hull after one step and the band of the witness that step retrieved"""
    step: int
    hull: List[XY]
    labels: List[Tuple[XY, List[int]]]
    case: Optional[str] = None
    witness: Tuple[int, ...] = ()
    band: List[XY] = field(default_factory=list)
    retrieved: List[Tuple[int, XY]] = field(default_factory=list)


def _xy(p: Point) -> XY:
    return float(p.x), float(p.y)


def region_outline(desc: RegionDesc) -> List[XY]:
    if desc.kind == RegionKind.POINT:
        return [_xy(desc.point)]
    if desc.kind == RegionKind.POLYGON:
        return [_xy(v) for v in desc.vertices]
    return [tuple(row) for row in sample_boundary(desc.as_circle()).tolist()]


def witness_band(f: Family, witness: Tuple[int, ...]) -> List[XY]:
    """Convex hull of the original witness regions"""
    points = []
    for rid in witness:
        points.extend(Point(x, y) for x, y in region_outline(f.original[rid]))
    return [(float(x), float(y)) for x, y in convex_hull_ccw(points)]


class SnapshotLog:
    """Step observer collecting snapshots for the renderer"""

    def __init__(self):
        self.snapshots: List[Snapshot] = []

    def __call__(self, f: Family, action: Optional[StepAction]) -> None:
        chain = outer_hull(f)
        hull = [_xy(loc) for loc in chain.locations()]
        labels = [(_xy(node.location), sorted(node.record.regions))
                  for node in chain if not node.is_sentinel]
        snap = Snapshot(step=len(self.snapshots), hull=hull, labels=labels)
        if action is not None:
            snap.case = action.case.value
            snap.witness = tuple(action.witness)
            snap.band = witness_band(f, action.witness)
            snap.retrieved = [(rid, _xy(f.retrieved[rid])) for rid in action.retrieved_non_point]
        self.snapshots.append(snap)

    def to_dict(self) -> List[Dict[str, Any]]:
        return [
            {"step": s.step, "case": s.case, "witness": list(s.witness),
             "hull": [list(p) for p in s.hull], "band": [list(p) for p in s.band]}
            for s in self.snapshots
        ]


def record_run(engine: ReconstructionEngine) -> Tuple[RunReport, SnapshotLog]:
    log = SnapshotLog()
    report = engine.run(observer=log)
    return report, log


class SvgCanvas:
    """Maps plane coordinates onto the SVG canvas, y pointing up"""

    def __init__(self, points: List[XY], width: int, height: int, margin: int):
        xs = [p[0] for p in points] or [0.0]
        ys = [p[1] for p in points] or [0.0]
        self.min_x, self.max_y = min(xs), max(ys)
        span = max(max(xs) - self.min_x, self.max_y - min(ys), 1e-9)
        self.scale = min(width - 2 * margin, height - 2 * margin) / span
        self.margin = margin

    def __call__(self, p: XY) -> XY:
        return (self.margin + (p[0] - self.min_x) * self.scale,
                self.margin + (self.max_y - p[1]) * self.scale)


def render_run(f: Family, log: SnapshotLog, path: Optional[Union[str, Path]] = None,
               width: Optional[int] = None, height: Optional[int] = None) -> svgwrite.Drawing:
    """
    Draw regions, hull snapshots, witness bands and the final hull with its order labels

    Args:
        f: family the run started from (original regions are drawn)
        log: snapshots recorded during the run
        path: file to write, if any
        width, height: canvas size (settings.SVG_WIDTH / SVG_HEIGHT by default)

    Returns:
        svgwrite.Drawing: the drawing
    """
    width = width or settings.SVG_WIDTH
    height = height or settings.SVG_HEIGHT
    outlines = {rid: region_outline(f.original[rid]) for rid in f.ids}
    extent = [p for pts in outlines.values() for p in pts]
    canvas = SvgCanvas(extent, width, height, settings.SVG_MARGIN)

    dwg = svgwrite.Drawing(str(path) if path else "run.svg", size=(width, height), profile="full")
    regions = dwg.add(dwg.g(id="regions"))
    for rid, pts in outlines.items():
        desc = f.original[rid]
        if desc.kind == RegionKind.POINT:
            regions.add(dwg.circle(center=canvas(pts[0]), r=3, fill="#2c3e50"))
        elif desc.kind == RegionKind.DISK:
            regions.add(dwg.circle(center=canvas(_xy(desc.center)), r=float(desc.radius) * canvas.scale,
                                   **REGION_STYLE))
        else:
            regions.add(dwg.polygon([canvas(p) for p in pts], **REGION_STYLE))

    bands = dwg.add(dwg.g(id="bands"))
    hulls = dwg.add(dwg.g(id="snapshots"))
    for snap in log.snapshots[:-1]:
        if len(snap.hull) > 1:
            hulls.add(dwg.polyline([canvas(p) for p in snap.hull], **SNAPSHOT_STYLE))
    for snap in log.snapshots:
        if len(snap.band) > 2:
            bands.add(dwg.polygon([canvas(p) for p in snap.band], **BAND_STYLE))
        for _, p in snap.retrieved:
            bands.add(dwg.circle(center=canvas(p), r=3.5, fill="#c9822b"))

    final = dwg.add(dwg.g(id="final"))
    if log.snapshots:
        last = log.snapshots[-1]
        if len(last.hull) > 1:
            final.add(dwg.polyline([canvas(p) for p in last.hull], **FINAL_STYLE))
        for loc, ids in last.labels:
            x, y = canvas(loc)
            final.add(dwg.text(",".join(str(i) for i in ids), insert=(x + 4, y - 6),
                               font_size=11, font_family="Arial", fill="#c0392b"))

    if path:
        dwg.save()
        logger.info(f"🖼️ Wrote SVG with {len(log.snapshots)} snapshots to {path}")
    return dwg


__all__ = [
    "Snapshot",
    "SnapshotLog",
    "record_run",
    "region_outline",
    "witness_band",
    "SvgCanvas",
    "render_run",
]
