"""
Hull edge taxonomy: non-canonical, canonical but non-dividing, dividing (optionally occupied)
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

from app.config import settings
from app.exceptions import StructureError
from app.geometry.shapes import Containment, band, disk_penetrates, vertex_in_shape
from app.regions.family import Family, VertexRecord, vertex_set, vertically_separated
from app.classify.outer_hull import HullChain, HullEdge

logger = logging.getLogger("edges")


class EdgeClass(str, Enum):
    NON_CANONICAL = "nonCanonical"
    NON_DIVIDING = "canonicalNonDividing"
    DIVIDING = "dividing"


@dataclass(frozen=True)
class EdgeLabel:
    value: EdgeClass
    occupied_by: Optional[int] = None

    @property
    def occupied(self) -> bool:
        return self.occupied_by is not None


def edge_class(f: Family, s: VertexRecord, t: VertexRecord) -> EdgeClass:
    """Label of the edge (s, t) without the occupancy test"""
    if not s.is_canonical or not t.is_canonical:
        return EdgeClass.NON_CANONICAL
    a, b = s.owner, t.owner
    if a != b and not vertically_separated(f, a, b):
        return EdgeClass.NON_DIVIDING
    return EdgeClass.DIVIDING


def band_of(f: Family, a: int, b: int):
    return band(f.shape(a), f.shape(b))


def _near(p, q) -> bool:
    """Within epsilon of q; a sentinel (no location) is near nothing"""
    if q is None:
        return False
    return math.hypot(float(p.x) - float(q.x), float(p.y) - float(q.y)) <= settings.EPSILON


def region_occupies(f: Family, shape, s: VertexRecord, t: VertexRecord, rid: int) -> bool:
    """Disk-mode band test for one foreign region; contact within epsilon of s or t is ignored"""
    desc = f.region(rid)
    if desc.is_point:
        p = desc.point
        if _near(p, s.location) or _near(p, t.location):
            return False
        return vertex_in_shape(p, shape) != Containment.OUTSIDE
    return disk_penetrates(shape, desc.as_circle())


def _disk_occupant(f: Family, shape, s: VertexRecord, t: VertexRecord, excluded) -> Optional[int]:
    for rid in f.ids:
        if rid not in excluded and region_occupies(f, shape, s, t, rid):
            return rid
    return None


def occupied_witness(f: Family, s: VertexRecord, t: VertexRecord,
                     records: Optional[Iterable[VertexRecord]] = None) -> Optional[int]:
    """
    Smallest id of a region other than the owners with a vertex in band(owner(s), owner(t)),
    ignoring the locations s and t. None when the edge is not occupied.
    """
    a, b = s.owner, t.owner
    if a == b or (f.is_sentinel(a) and f.is_sentinel(b)):
        return None
    shape = band_of(f, a, b)
    excluded = {a, b, f.sentinel_left, f.sentinel_right}
    if f.is_disk_mode:
        return _disk_occupant(f, shape, s, t, excluded)

    best: Optional[int] = None
    for rec in (records if records is not None else vertex_set(f)):
        if rec.location == s.location or rec.location == t.location:
            continue
        foreign = rec.regions - excluded
        if not foreign:
            continue
        candidate = min(foreign)
        if best is not None and candidate >= best:
            continue
        if vertex_in_shape(rec.location, shape) != Containment.OUTSIDE:
            best = candidate
    return best


def classify_edge(f: Family, hull: HullChain, e: HullEdge,
                  records: Optional[Sequence[VertexRecord]] = None) -> EdgeLabel:
    """
    Classify a hull edge

    Args:
        f: family the hull was computed from
        hull: outer hull of f
        e: an edge of the hull

    Returns:
        EdgeLabel: class plus the occupying region for occupied dividing edges
    """
    i = e.index
    if not (0 <= i < len(hull) - 1) or hull[i] != e.s or hull[i + 1] != e.t or hull[i].arc_to_next:
        raise StructureError(f"edge at index {i} is not an edge of the hull")
    value = edge_class(f, e.s.record, e.t.record)
    if value != EdgeClass.DIVIDING:
        return EdgeLabel(value)
    return EdgeLabel(value, occupied_witness(f, e.s.record, e.t.record, records))


__all__ = [
    "EdgeClass",
    "EdgeLabel",
    "edge_class",
    "band_of",
    "region_occupies",
    "occupied_witness",
    "classify_edge",
]
