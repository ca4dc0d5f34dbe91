"""
Disk Reconstruction Engine
- Median cut decomposition keeps the outer hull of the live disks and points
- The root hull carries the event index; only edges changed by a batch of
  retrievals, and edges near the retrieved regions, are classified again
- Occupied edges are found by a descent that unfolds node hulls and prunes every
  node whose hull stays clear of the band
- Spanning chains have at most three edges and are tested in constant time
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence

from app.config import DISK_MODES, settings
from app.geometry.circle_chains import CircleChain
from app.geometry.disks import Circle, ternary_minimum
from app.geometry.shapes import PointShape, PolygonShape, SweepShape
from app.geometry.primitives import Point
from app.regions.family import Family, RetrievalOracle, VertexRecord
from app.classify.chains import ChainLabel, region_dips_below
from app.classify.edges import band_of, region_occupies
from app.classify.outer_hull import HullNode
from app.classify.witness import WitnessSet
from app.structures.mcd import MedianCutDecomposition, build_mcd
from app.structures.pht import RecourseStat
from app.strategies.base import ReconstructionEngine, RunReport

logger = logging.getLogger("disk_engine")


def disk_spanning_test(f: Family, nodes: Sequence[HullNode], chain: ChainLabel) -> bool:
    """
    The middle region of a disk candidate chain meets the open inside of the
    outer hull of its flanks

    Args:
        f: disk-mode family
        nodes: hull the chain lives on
        chain: candidate chain (q, block, t)

    Returns:
        bool: True when the chain is spanning
    """
    edges = sum(1 for i in range(chain.start, chain.end) if not nodes[i].arc_to_next)
    if edges > 3:
        logger.warning(f"⚠️ disk candidate chain with {edges} edges")
    a, b, c = chain.regions
    return region_dips_below(f, b, a, c)


def _band_floor(shape) -> Callable[[float], float]:
    """Lower boundary of a two-circle band, as the negated upper hull of the mirrored circles"""
    if isinstance(shape, PolygonShape):
        ends = shape.vertices()
        first, second = ends[0], ends[-1]
        circles = [Circle(0, float(first.x), -float(first.y), 0.0),
                   Circle(1, float(second.x), -float(second.y), 0.0)]
    else:
        circles = [Circle(i, c.cx, -c.cy, c.r) for i, c in enumerate((shape.first, shape.second))]
    mirrored = CircleChain.hull_of(circles).height_function()
    return lambda x: -mirrored(x)


def band_filter(shape) -> Callable[[CircleChain], bool]:
    """
    Predicate on hull chains: False only when nothing on or below the chain can
    come within the disk margin of the band

    Args:
        shape: band of the edge's two owners

    Returns:
        Callable[[CircleChain], bool]: pruning test for the decomposition descent
    """
    slack = settings.DISK_MARGIN
    s_lo, s_hi = (float(v) for v in shape.x_range())
    floor = None
    if not isinstance(shape, (SweepShape, PointShape)):
        floor = _band_floor(shape)

    def meets(chain: CircleChain) -> bool:
        lo, hi = max(chain.min_x, s_lo), min(chain.max_x, s_hi)
        if lo > hi + slack:
            return False
        if isinstance(shape, SweepShape):
            return True
        lo, hi = min(lo, hi), max(lo, hi)
        height = chain.height_function()
        if isinstance(shape, PointShape):
            return float(shape.point.y) <= height(float(shape.point.x)) + slack

        def gap(x: float) -> float:
            return floor(x) - height(x)

        _, value = ternary_minimum(gap, lo, hi)
        return min(value, gap(lo), gap(hi)) <= slack

    return meets


def disk_occupied_test(mcd: MedianCutDecomposition, s: VertexRecord,
                       t: VertexRecord) -> Optional[int]:
    """
    Smallest foreign region id occupying band(owner(s), owner(t)); the
    decomposition is searched top-down and only regions whose node and line
    tree hulls reach the band are tested exactly

    Args:
        mcd: decomposition over the current family
        s: left endpoint record
        t: right endpoint record

    Returns:
        Optional[int]: occupant, or None when the edge is not occupied
    """
    f = mcd.family
    a, b = s.owner, t.owner
    if a == b or (f.is_sentinel(a) and f.is_sentinel(b)):
        return None
    shape = band_of(f, a, b)
    excluded = {a, b, f.sentinel_left, f.sentinel_right}
    found = [rid for rid in mcd.regions_meeting(band_filter(shape))
             if rid not in excluded and region_occupies(f, shape, s, t, rid)]
    return min(found) if found else None


class DiskEngine(ReconstructionEngine):
    """
    Reconstruction engine for disjoint [1,k] disks and unit disks of bounded ply
    """

    name = "disk"
    supported_modes = DISK_MODES

    def __init__(self, family: Family, oracle: RetrievalOracle, audit: Optional[bool] = None):
        super().__init__(family, oracle, audit)
        self.mcd = build_mcd(family)
        self.events = self.mcd.track_events(self.occupied_test, disk_spanning_test)
        logger.debug(f"disk engine: MCD height {self.mcd.height()}, "
                     f"max slab chain {self.mcd.max_slab_edges()} edges")

    def occupied_test(self, s: VertexRecord, t: VertexRecord) -> Optional[int]:
        return disk_occupied_test(self.mcd, s, t)

    def next_witness(self) -> Optional[WitnessSet]:
        return self.events.top_event()

    def apply_retrievals(self, retrieved: Dict[int, Point]) -> None:
        for rid, p in sorted(retrieved.items()):
            stat = mcd_retrieve(self.mcd, rid, p)
            self.recourse.append(stat.changed_bridges)
        self.mcd.refresh_events(retrieved=sorted(retrieved))

    def hull_order(self) -> List[int]:
        return self.mcd.hull_chain().region_order()


def mcd_retrieve(mcd: MedianCutDecomposition, rid: int, p: Point) -> RecourseStat:
    """Replace a retrieved disk by its point inside the decomposition"""
    return mcd.retrieve(rid, p)


def run_disk(f: Family, oracle: RetrievalOracle) -> RunReport:
    return DiskEngine(f, oracle).run()


__all__ = [
    "disk_spanning_test",
    "band_filter",
    "disk_occupied_test",
    "mcd_retrieve",
    "DiskEngine",
    "run_disk",
]
