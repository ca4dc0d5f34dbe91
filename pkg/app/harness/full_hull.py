"""
Full hull from four upper-hull runs
The instance is rotated by 0, 90, 180 and 270 degrees counter-clockwise; each
rotated copy gives one side of the hull (top left to right, right top to bottom,
bottom right to left, left bottom to top) and the sides are stitched clockwise.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from app.geometry.primitives import Point
from app.regions.family import Family, Realization, RegionDesc, RegionKind, RetrievalOracle, build_family
from app.strategies.base import RunReport
from app.strategies.engine_selector import create_engine

logger = logging.getLogger("full_hull")


def rotate_point(p: Point, quarter_turns: int) -> Point:
    x, y = p
    for _ in range(quarter_turns % 4):
        x, y = -y, x
    return Point(x, y)


def rotate_desc(desc: RegionDesc, quarter_turns: int) -> RegionDesc:
    if desc.kind == RegionKind.POINT:
        return RegionDesc.point_region(desc.rid, rotate_point(desc.point, quarter_turns))
    if desc.kind == RegionKind.POLYGON:
        return RegionDesc.polygon(desc.rid, [rotate_point(v, quarter_turns) for v in desc.vertices])
    return RegionDesc.disk(desc.rid, rotate_point(desc.center, quarter_turns), desc.radius)


def rotate_family(f: Family, quarter_turns: int) -> Family:
    descs = [rotate_desc(f.original[rid], quarter_turns) for rid in f.ids]
    return build_family(descs, f.mode, f.k)


def rotate_realization(p: Realization, quarter_turns: int) -> Realization:
    return Realization({rid: rotate_point(q, quarter_turns) for rid, q in p.points.items()})


def stitch(sides: Sequence[Sequence[int]]) -> List[int]:
    """
    Clockwise cyclic order from four consecutive sides that share their end regions

    Each side starts where the previous one ended; the shared prefix is skipped,
    the wrap-around onto the first side is cut, and ids seen twice (degenerate
    hulls) keep their first position.
    """
    order: List[int] = list(sides[0]) if sides else []
    for side in sides[1:]:
        side = list(side)
        if order and order[-1] in side:
            order.extend(side[side.index(order[-1]) + 1:])
        else:
            order.extend(side)
    if order and order[0] in order[1:]:
        order = order[:order.index(order[0], 1)]
    seen = set()
    return [rid for rid in order if not (rid in seen or seen.add(rid))]


@dataclass
class FullHullReport:
    """Cyclic hull order plus the four upper-hull runs that produced it"""
    order: List[int]
    sides: List[List[int]]
    runs: List[RunReport] = field(default_factory=list)

    @property
    def retrieved(self) -> List[int]:
        ids = set()
        for run in self.runs:
            for step in run.steps:
                ids.update(step.retrieved_non_point)
        return sorted(ids)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "order": list(self.order),
            "sides": [list(s) for s in self.sides],
            "retrieved": self.retrieved,
            "runs": [run.to_dict() for run in self.runs],
        }


def full_hull(f: Family, hidden: Realization, engine: Optional[str] = None) -> FullHullReport:
    """
    Reconstruct the whole hull by running the upper-hull strategy on four rotations

    Args:
        f: family (its original regions are rotated; retrieval state is ignored)
        hidden: hidden realization of f
        engine: engine name, or None for the mode default

    Returns:
        FullHullReport: clockwise order starting at the top-left extreme region
    """
    sides: List[List[int]] = []
    runs: List[RunReport] = []
    for turns in range(4):
        rotated = rotate_family(f, turns)
        oracle = RetrievalOracle(rotate_realization(hidden, turns))
        report = create_engine(rotated, oracle, engine).run()
        runs.append(report)
        sides.append(list(report.order))
        logger.debug(f"Side after {90 * turns} degrees: {report.order}")
    order = stitch(sides)
    logger.info(f"✅ Full hull of {f.n} regions: {len(order)} on the hull")
    return FullHullReport(order=order, sides=sides, runs=runs)


__all__ = [
    "rotate_point",
    "rotate_desc",
    "rotate_family",
    "rotate_realization",
    "stitch",
    "FullHullReport",
    "full_hull",
]
