"""
Imprecise point set model
- Region descriptors (point, simple polygon, disk) and symbolic sentinels
- Region families with mode validation and per-region retrieval state
- Vertex records shared by coincident vertices of several regions
- Retrieval oracle over a hidden realization
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.config import FamilyMode, DISK_MODES, settings
from app.exceptions import FamilyValidationError, RetrievalError
from app.geometry.disks import Circle, depth_of_arrangement
from app.geometry.primitives import Point, Scalar, orient, rational_point, vertex_key
from app.geometry.shapes import DiskShape, PointShape, PolygonShape, SentinelShape

logger = logging.getLogger("regions")


class RegionKind(str, Enum):
    """Region shape kinds"""
    POINT = "point"
    POLYGON = "polygon"
    DISK = "disk"
    SENTINEL = "sentinel"


class RegionState(str, Enum):
    INTACT = "intact"
    RETRIEVED = "retrieved"


# ==================== REGION DESCRIPTORS ====================

def _segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed segments ab and cd share a point"""
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True

    def on_segment(p: Point, q: Point, r: Point) -> bool:
        return min(p.x, q.x) <= r.x <= max(p.x, q.x) and min(p.y, q.y) <= r.y <= max(p.y, q.y)

    if o1 == 0 and on_segment(a, b, c):
        return True
    if o2 == 0 and on_segment(a, b, d):
        return True
    if o3 == 0 and on_segment(c, d, a):
        return True
    if o4 == 0 and on_segment(c, d, b):
        return True
    return False


def signed_area2(vertices: Sequence[Point]) -> Scalar:
    """Twice the signed area of a polygon"""
    total = 0
    for a, b in zip(vertices, list(vertices[1:]) + [vertices[0]]):
        total += a.x * b.y - b.x * a.y
    return total


@dataclass(frozen=True)
class RegionDesc:
    """One imprecise region with a stable id"""
    rid: int
    kind: RegionKind
    point: Optional[Point] = None
    vertices: Tuple[Point, ...] = ()
    center: Optional[Point] = None
    radius: Optional[Fraction] = None

    @classmethod
    def point_region(cls, rid: int, p: Point) -> "RegionDesc":
        return cls(rid, RegionKind.POINT, point=p)

    @classmethod
    def polygon(cls, rid: int, vertices: Iterable[Point]) -> "RegionDesc":
        return cls(rid, RegionKind.POLYGON, vertices=tuple(vertices))

    @classmethod
    def disk(cls, rid: int, center: Point, radius) -> "RegionDesc":
        return cls(rid, RegionKind.DISK, center=center, radius=Fraction(radius))

    @classmethod
    def sentinel(cls, rid: int) -> "RegionDesc":
        return cls(rid, RegionKind.SENTINEL)

    @property
    def is_point(self) -> bool:
        return self.kind == RegionKind.POINT

    @property
    def is_sentinel(self) -> bool:
        return self.kind == RegionKind.SENTINEL

    def x_range(self) -> Tuple[Scalar, Scalar]:
        if self.kind == RegionKind.POINT:
            return self.point.x, self.point.x
        if self.kind == RegionKind.POLYGON:
            xs = [v.x for v in self.vertices]
            return min(xs), max(xs)
        if self.kind == RegionKind.DISK:
            return self.center.x - self.radius, self.center.x + self.radius
        raise RetrievalError(f"sentinel {self.rid} has no x-range")

    def corners(self) -> Tuple[Point, ...]:
        """
        Vertices in the sense that every open segment through them leaves the
        region: the strictly convex corners of a polygon, the point itself for
        point regions. Disks have no finite vertex list.
        """
        if self.kind == RegionKind.POINT:
            return (self.point,)
        if self.kind != RegionKind.POLYGON:
            return ()
        vs = self.vertices
        turn = 1 if signed_area2(vs) > 0 else -1
        out = []
        for i, v in enumerate(vs):
            if orient(vs[i - 1], v, vs[(i + 1) % len(vs)]) == turn:
                out.append(v)
        return tuple(out)

    def shape(self):
        if self.kind == RegionKind.POINT:
            return PointShape(self.point)
        if self.kind == RegionKind.POLYGON:
            return PolygonShape.from_points(self.vertices)
        if self.kind == RegionKind.DISK:
            return DiskShape(self.center, self.radius)
        raise RetrievalError(f"sentinel {self.rid} has no finite shape")

    def as_circle(self) -> Circle:
        if self.kind == RegionKind.POINT:
            return Circle(self.rid, float(self.point.x), float(self.point.y), 0.0)
        if self.kind == RegionKind.DISK:
            return Circle(self.rid, float(self.center.x), float(self.center.y), float(self.radius))
        raise RetrievalError(f"region {self.rid} is not a disk or point")

    def contains(self, q: Point) -> bool:
        """Closed containment; exact for rational input"""
        if self.kind == RegionKind.POINT:
            return q == self.point
        if self.kind == RegionKind.DISK:
            dx, dy = q.x - self.center.x, q.y - self.center.y
            if isinstance(dx, float) or isinstance(dy, float):
                return math.hypot(dx, dy) <= float(self.radius) + settings.EPSILON
            return dx * dx + dy * dy <= self.radius * self.radius
        if self.kind == RegionKind.POLYGON:
            return _point_in_polygon(self.vertices, q)
        return False

    def lower_at(self, x):
        """Lowest point of the region over abscissa x (within the x-range)"""
        if self.kind == RegionKind.POINT:
            return self.point.y
        if self.kind == RegionKind.DISK:
            return self.as_circle().lower_y(float(x))
        best = None
        vs = self.vertices
        for a, b in zip(vs, vs[1:] + vs[:1]):
            lo, hi = (a, b) if a.x <= b.x else (b, a)
            if not lo.x <= x <= hi.x:
                continue
            if lo.x == hi.x:
                y = min(lo.y, hi.y)
            else:
                y = lo.y + (hi.y - lo.y) * (x - lo.x) / (hi.x - lo.x)
            best = y if best is None else min(best, y)
        return best


def _point_in_polygon(vertices: Sequence[Point], q: Point) -> bool:
    inside = False
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        if orient(a, b, q) == 0 and min(a.x, b.x) <= q.x <= max(a.x, b.x) \
                and min(a.y, b.y) <= q.y <= max(a.y, b.y):
            return True
        if (a.y > q.y) != (b.y > q.y):
            cross_x = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if q.x < cross_x:
                inside = not inside
    return inside


# ==================== VALIDATION ====================

def validate_polygon(desc: RegionDesc, k: int) -> None:
    vs = desc.vertices
    if len(vs) < 3:
        raise FamilyValidationError(f"region {desc.rid}: polygon needs at least 3 vertices",
                                    reason="vertex-count", region_ids=(desc.rid,))
    if len(vs) > k:
        raise FamilyValidationError(f"region {desc.rid}: {len(vs)} vertices exceed k={k}",
                                    reason="vertex-count", region_ids=(desc.rid,))
    if len(set(vs)) != len(vs):
        raise FamilyValidationError(f"region {desc.rid}: repeated polygon vertex",
                                    reason="self-intersection", region_ids=(desc.rid,))
    if signed_area2(vs) == 0 or all(orient(vs[0], vs[1], v) == 0 for v in vs):
        raise FamilyValidationError(f"region {desc.rid}: degenerate polygon",
                                    reason="degenerate", region_ids=(desc.rid,))
    n = len(vs)
    edges = [(vs[i], vs[(i + 1) % n]) for i in range(n)]
    for i, j in combinations(range(n), 2):
        if j == i + 1 or (i == 0 and j == n - 1):
            a, b = edges[i]
            c, d = edges[j]
            shared = b if j == i + 1 else a
            other_i = a if j == i + 1 else b
            other_j = d if j == i + 1 else c
            # adjacent edges may only meet at their shared vertex
            if orient(other_i, shared, other_j) == 0 and \
                    (other_j.x - shared.x) * (other_i.x - shared.x) + \
                    (other_j.y - shared.y) * (other_i.y - shared.y) > 0:
                raise FamilyValidationError(f"region {desc.rid}: overlapping edges",
                                            reason="self-intersection", region_ids=(desc.rid,))
            continue
        if _segments_cross(*edges[i], *edges[j]):
            raise FamilyValidationError(f"region {desc.rid}: self-intersecting polygon",
                                        reason="self-intersection", region_ids=(desc.rid,))


def validate_disks(descs: Sequence[RegionDesc], mode: FamilyMode, k: int) -> None:
    disks = [d for d in descs if d.kind == RegionKind.DISK]
    for d in disks:
        if d.radius <= 0:
            raise FamilyValidationError(f"region {d.rid}: radius must be positive",
                                        reason="radius", region_ids=(d.rid,))
        if mode == FamilyMode.DISJOINT_DISKS and not 1 <= d.radius <= k:
            raise FamilyValidationError(f"region {d.rid}: radius {d.radius} outside [1, {k}]",
                                        reason="radius", region_ids=(d.rid,))
        if mode == FamilyMode.UNIT_PLY and d.radius != 1:
            raise FamilyValidationError(f"region {d.rid}: unit-ply families need radius 1",
                                        reason="radius", region_ids=(d.rid,))

    xs: Dict[Scalar, int] = {}
    for d in disks:
        if d.center.x in xs:
            raise FamilyValidationError(
                f"regions {xs[d.center.x]} and {d.rid}: centres share x={d.center.x}",
                reason="general-position", region_ids=(xs[d.center.x], d.rid))
        xs[d.center.x] = d.rid

    if mode == FamilyMode.DISJOINT_DISKS:
        for a, b in combinations(disks, 2):
            dx, dy = a.center.x - b.center.x, a.center.y - b.center.y
            if dx * dx + dy * dy <= (a.radius + b.radius) ** 2:
                raise FamilyValidationError(f"regions {a.rid} and {b.rid} intersect",
                                            reason="disjointness", region_ids=(a.rid, b.rid))

    if mode == FamilyMode.UNIT_PLY:
        circles = [d.as_circle() for d in disks]
        ply = depth_of_arrangement(circles, tolerance=settings.EPSILON)
        if ply > k:
            raise FamilyValidationError(f"ply {ply} exceeds k={k}", reason="ply")


def has_common_point(circles: Sequence[Circle]) -> bool:
    """Closed disks share a point iff every triple does"""
    for triple in combinations(circles, min(3, len(circles))):
        if depth_of_arrangement(triple, tolerance=settings.EPSILON) < len(triple):
            return False
    return True


# ==================== VERTEX RECORDS ====================

@dataclass(frozen=True)
class VertexRecord:
    """All regions having a vertex at one location; sentinels carry no location"""
    location: Optional[Point]
    point_regions: frozenset = field(default_factory=frozenset)
    non_point_regions: frozenset = field(default_factory=frozenset)

    @property
    def regions(self) -> frozenset:
        return self.point_regions | self.non_point_regions

    @property
    def is_canonical(self) -> bool:
        if len(self.non_point_regions) >= 2:
            return False
        return not (self.non_point_regions and self.point_regions)

    @property
    def owner(self) -> int:
        """Single non-point region, else the smallest coincident point region"""
        if self.non_point_regions:
            return min(self.non_point_regions)
        return min(self.point_regions)

    def without(self, rid: int) -> "VertexRecord":
        return VertexRecord(self.location, self.point_regions - {rid},
                            self.non_point_regions - {rid})


# ==================== FAMILY ====================

class Family:
    """Ordered regions R_1..R_n plus the sentinels R_{n+1} (left) and R_{n+2} (right)"""

    def __init__(self, mode: FamilyMode, k: int, descs: Sequence[RegionDesc]):
        self.mode = FamilyMode(mode)
        self.k = k
        self.n = len(descs)
        self.sentinel_left = self.n + 1
        self.sentinel_right = self.n + 2
        self.original: Dict[int, RegionDesc] = {d.rid: d for d in descs}
        self._regions: Dict[int, RegionDesc] = dict(self.original)
        self._regions[self.sentinel_left] = RegionDesc.sentinel(self.sentinel_left)
        self._regions[self.sentinel_right] = RegionDesc.sentinel(self.sentinel_right)
        self.retrieved: Dict[int, Point] = {}
        self._x_ranges: Dict[int, Tuple[Scalar, Scalar]] = {
            d.rid: d.x_range() for d in descs}

    # ---- queries ----

    @property
    def ids(self) -> range:
        return range(1, self.n + 1)

    @property
    def is_disk_mode(self) -> bool:
        return self.mode in DISK_MODES

    def region(self, rid: int) -> RegionDesc:
        try:
            return self._regions[rid]
        except KeyError:
            raise RetrievalError(f"unknown region id {rid}")

    def is_sentinel(self, rid: int) -> bool:
        return rid in (self.sentinel_left, self.sentinel_right)

    def is_point(self, rid: int) -> bool:
        return self.region(rid).is_point

    def state(self, rid: int) -> RegionState:
        return RegionState.RETRIEVED if rid in self.retrieved else RegionState.INTACT

    def x_range(self, rid: int) -> Tuple[Scalar, Scalar]:
        return self._x_ranges[rid]

    def shape(self, rid: int):
        if rid == self.sentinel_left:
            return SentinelShape.LEFT
        if rid == self.sentinel_right:
            return SentinelShape.RIGHT
        return self.region(rid).shape()

    def non_point_ids(self) -> List[int]:
        return [rid for rid in self.ids if not self.is_point(rid)]

    def vertices_of(self, rid: int) -> Tuple[Point, ...]:
        """Locations this region contributes to the vertex set"""
        desc = self.region(rid)
        if desc.kind == RegionKind.DISK:
            return (desc.center,)
        return desc.corners()

    # ---- updates ----

    def apply_retrieval(self, rid: int, p: Point) -> None:
        if self.is_sentinel(rid):
            raise RetrievalError("sentinels cannot be retrieved")
        if rid in self.retrieved or self.original[rid].is_point:
            return
        self.retrieved[rid] = p
        self._regions[rid] = RegionDesc.point_region(rid, p)
        self._x_ranges[rid] = (p.x, p.x)

    def copy(self) -> "Family":
        clone = Family.__new__(Family)
        clone.mode, clone.k, clone.n = self.mode, self.k, self.n
        clone.sentinel_left, clone.sentinel_right = self.sentinel_left, self.sentinel_right
        clone.original = self.original
        clone._regions = dict(self._regions)
        clone.retrieved = dict(self.retrieved)
        clone._x_ranges = dict(self._x_ranges)
        return clone

    def with_retrievals(self, realization: "Realization", ids: Iterable[int]) -> "Family":
        """f with the regions in ids replaced by their points in the realization"""
        clone = self.copy()
        for rid in ids:
            clone.apply_retrieval(rid, realization.points[rid])
        return clone

    def __repr__(self) -> str:
        return (f"Family(mode={self.mode.value}, k={self.k}, n={self.n}, "
                f"retrieved={len(self.retrieved)})")


def build_family(descs: Sequence[RegionDesc], mode, k: int) -> Family:
    """
    Validate region descriptors against the mode constraints and append the sentinels

    Args:
        descs: regions with ids 1..n
        mode: kgon, disjoint-disks or unit-ply-k
        k: complexity parameter

    Returns:
        Family: validated family
    """
    mode = FamilyMode(mode)
    if k < 1:
        raise FamilyValidationError("k must be at least 1", reason="parameter")
    ids = sorted(d.rid for d in descs)
    if ids != list(range(1, len(descs) + 1)):
        raise FamilyValidationError("region ids must be exactly 1..n", reason="ids")

    for d in descs:
        if d.kind == RegionKind.SENTINEL:
            raise FamilyValidationError("sentinels are added by the family",
                                        reason="ids", region_ids=(d.rid,))
        if mode == FamilyMode.KGON and d.kind == RegionKind.DISK:
            raise FamilyValidationError(f"region {d.rid}: disk in a kgon family",
                                        reason="mixed-family", region_ids=(d.rid,))
        if mode in DISK_MODES and d.kind == RegionKind.POLYGON:
            raise FamilyValidationError(f"region {d.rid}: polygon in a disk family",
                                        reason="mixed-family", region_ids=(d.rid,))
        if d.kind == RegionKind.POLYGON:
            validate_polygon(d, max(k, 3))

    if mode in DISK_MODES:
        validate_disks(descs, mode, k)

    family = Family(mode, k, sorted(descs, key=lambda d: d.rid))
    logger.debug(f"Built {family}")
    return family


def vertex_set(f: Family) -> List[VertexRecord]:
    """
    Distinct vertex locations of the family, each with the regions having a vertex there.

    Polygon corners and point locations in kgon mode; disk centres and point
    locations in the disk modes. Sorted by x ascending, then y descending.
    """
    point_regions: Dict[Point, set] = {}
    non_point_regions: Dict[Point, set] = {}
    for rid in f.ids:
        target = point_regions if f.is_point(rid) else non_point_regions
        for v in f.vertices_of(rid):
            target.setdefault(v, set()).add(rid)
    locations = set(point_regions) | set(non_point_regions)
    return [
        VertexRecord(loc, frozenset(point_regions.get(loc, ())),
                     frozenset(non_point_regions.get(loc, ())))
        for loc in sorted(locations, key=vertex_key)
    ]


def vertically_separated(f: Family, a: int, b: int) -> bool:
    """Strict separation by a vertical line; sentinels are separated from everything"""
    if f.is_sentinel(a) or f.is_sentinel(b):
        return True
    a_lo, a_hi = f.x_range(a)
    b_lo, b_hi = f.x_range(b)
    return a_hi < b_lo or b_hi < a_lo


# ==================== REALIZATION AND ORACLE ====================

@dataclass(frozen=True)
class Realization:
    """One hidden point per region, keyed by region id"""
    points: Dict[int, Point]

    def validate(self, f: Family) -> None:
        for rid in f.ids:
            p = self.points.get(rid)
            if p is None:
                raise FamilyValidationError(f"realization misses region {rid}",
                                            reason="realization", region_ids=(rid,))
            if not f.original[rid].contains(p):
                raise FamilyValidationError(f"point {p} lies outside region {rid}",
                                            reason="realization", region_ids=(rid,))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, Tuple]]) -> "Realization":
        return cls({rid: rational_point(*xy) for rid, xy in pairs})


class RetrievalOracle:
    """Reveals hidden points and counts retrievals of non-point regions"""

    def __init__(self, hidden: Realization):
        self.hidden = hidden
        self.log: List[int] = []
        self.count = 0

    def retrieve(self, f: Family, rid: int) -> Point:
        if f.is_sentinel(rid):
            raise RetrievalError(f"region {rid} is a sentinel")
        if rid not in f.original:
            raise RetrievalError(f"unknown region id {rid}")
        if f.is_point(rid):
            return f.region(rid).point
        p = self.hidden.points[rid]
        f.apply_retrieval(rid, p)
        self.count += 1
        self.log.append(rid)
        logger.debug(f"Retrieved region {rid} -> ({p.x}, {p.y})")
        return p


__all__ = [
    "RegionKind",
    "RegionState",
    "RegionDesc",
    "VertexRecord",
    "Family",
    "Realization",
    "RetrievalOracle",
    "build_family",
    "vertex_set",
    "vertically_separated",
    "validate_polygon",
    "validate_disks",
    "has_common_point",
    "signed_area2",
]
