"""
Convex shapes used by the band and containment tests
- Exact shapes: points and convex polygons (Fraction coordinates)
- Float shapes: disks and the convex hull of two disks
- Sentinel sweeps: the limit of a band whose other end recedes to (-inf, -inf) or (+inf, -inf)
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from app.config import settings
from app.exceptions import ShapeError
from app.geometry.disks import Circle, pair_hull_signed_distance, ternary_minimum
from app.geometry.primitives import (
    Point, Scalar, chain_y_at, cross, orient, upper_quarter_hull,
)


class Containment(str, Enum):
    """Closed containment classification"""
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


class SweepDirection(str, Enum):
    """Direction in which a sentinel band extends its base"""
    DOWN_LEFT = "down-left"
    DOWN_RIGHT = "down-right"


def convex_hull_ccw(points: Iterable[Point]) -> Tuple[Point, ...]:
    """Strict convex hull in counter-clockwise order; 1 or 2 points for degenerate input"""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return tuple(pts)

    def half(seq: Sequence[Point]) -> List[Point]:
        out: List[Point] = []
        for p in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(list(reversed(pts)))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:
        return (pts[0], pts[-1])
    return tuple(hull)


@dataclass(frozen=True)
class PointShape:
    point: Point

    @property
    def exact(self) -> bool:
        return not isinstance(self.point.x, float)

    def x_range(self) -> Tuple[Scalar, Scalar]:
        return self.point.x, self.point.x

    def upper_at(self, x: Scalar) -> Scalar:
        return self.point.y

    def lower_at(self, x: Scalar) -> Scalar:
        return self.point.y

    def vertices(self) -> Tuple[Point, ...]:
        return (self.point,)

    def classify(self, q: Point) -> Containment:
        if self.exact:
            return Containment.BOUNDARY if q == self.point else Containment.OUTSIDE
        gap = math.hypot(float(q.x) - float(self.point.x), float(q.y) - float(self.point.y))
        return Containment.BOUNDARY if gap <= settings.EPSILON else Containment.OUTSIDE

    def as_circle(self, rid: int = 0) -> Circle:
        return Circle(rid, float(self.point.x), float(self.point.y), 0.0)


@dataclass(frozen=True)
class PolygonShape:
    """Convex polygon given by its strict hull in counter-clockwise order"""
    hull: Tuple[Point, ...]
    upper: Tuple[Point, ...] = field(default=(), compare=False)
    lower: Tuple[Point, ...] = field(default=(), compare=False)

    @classmethod
    def from_points(cls, points: Iterable[Point]) -> "PolygonShape":
        pts = list(points)
        if not pts:
            raise ShapeError("polygon needs at least one vertex")
        hull = convex_hull_ccw(pts)
        upper = upper_quarter_hull(hull).vertices
        flipped = upper_quarter_hull(Point(p.x, -p.y) for p in hull).vertices
        lower = tuple(Point(p.x, -p.y) for p in flipped)
        return cls(hull, upper, lower)

    @property
    def exact(self) -> bool:
        return True

    def vertices(self) -> Tuple[Point, ...]:
        return self.hull

    def x_range(self) -> Tuple[Scalar, Scalar]:
        return self.upper[0].x, self.upper[-1].x

    def upper_at(self, x: Scalar) -> Scalar:
        return chain_y_at(self.upper, x)

    def lower_at(self, x: Scalar) -> Scalar:
        return chain_y_at(self.lower, x)

    def classify(self, q: Point) -> Containment:
        hull = self.hull
        if len(hull) == 1:
            return Containment.BOUNDARY if q == hull[0] else Containment.OUTSIDE
        if len(hull) == 2:
            a, b = hull
            if orient(a, b, q) == 0 and min(a.x, b.x) <= q.x <= max(a.x, b.x) \
                    and min(a.y, b.y) <= q.y <= max(a.y, b.y):
                return Containment.BOUNDARY
            return Containment.OUTSIDE
        on_edge = False
        for a, b in zip(hull, hull[1:] + hull[:1]):
            turn = orient(a, b, q)
            if turn < 0:
                return Containment.OUTSIDE
            if turn == 0:
                on_edge = True
        return Containment.BOUNDARY if on_edge else Containment.INSIDE


@dataclass(frozen=True)
class DiskShape:
    center: Point
    radius: Scalar

    @property
    def exact(self) -> bool:
        return False

    def as_circle(self, rid: int = 0) -> Circle:
        return Circle(rid, float(self.center.x), float(self.center.y), float(self.radius))

    def x_range(self) -> Tuple[float, float]:
        c = self.as_circle()
        return c.min_x, c.max_x

    def upper_at(self, x: float) -> float:
        return self.as_circle().upper_y(float(x))

    def lower_at(self, x: float) -> float:
        return self.as_circle().lower_y(float(x))

    def classify(self, q: Point) -> Containment:
        gap = self.as_circle().signed_distance(q)
        if gap < -settings.EPSILON:
            return Containment.INSIDE
        if gap <= settings.EPSILON:
            return Containment.BOUNDARY
        return Containment.OUTSIDE


@dataclass(frozen=True)
class DiskHullShape:
    """Convex hull of two circles (either may have radius 0)"""
    first: Circle
    second: Circle

    @property
    def exact(self) -> bool:
        return False

    def signed_distance(self, q: Point) -> float:
        return pair_hull_signed_distance(q, self.first, self.second)

    def classify(self, q: Point) -> Containment:
        gap = self.signed_distance(q)
        if gap < -settings.EPSILON:
            return Containment.INSIDE
        if gap <= settings.EPSILON:
            return Containment.BOUNDARY
        return Containment.OUTSIDE

    def x_range(self) -> Tuple[float, float]:
        return (min(self.first.min_x, self.second.min_x),
                max(self.first.max_x, self.second.max_x))


@dataclass(frozen=True)
class SweepShape:
    """
    Limit of band(sentinel, base): the base together with everything below its
    upper boundary over its x-range, half-open on the side facing away from the
    sentinel.
    """
    base: Union[PolygonShape, DiskShape]
    direction: SweepDirection

    @property
    def exact(self) -> bool:
        return self.base.exact

    def x_range(self):
        return self.base.x_range()

    def _within_sweep_range(self, x) -> bool:
        lo, hi = self.base.x_range()
        if self.direction == SweepDirection.DOWN_LEFT:
            return lo <= x < hi
        return lo < x <= hi

    def classify(self, q: Point) -> Containment:
        own = self.base.classify(q)
        if own == Containment.INSIDE:
            return Containment.INSIDE
        qx = q.x if self.exact else float(q.x)
        if not self._within_sweep_range(qx):
            return own
        lo, hi = self.base.x_range()
        top = self.base.upper_at(qx)
        gap = top - (q.y if self.exact else float(q.y))
        tolerance = 0 if self.exact else settings.EPSILON
        if gap < -tolerance:
            return Containment.OUTSIDE
        if gap <= tolerance or qx == lo or qx == hi:
            return Containment.BOUNDARY
        return Containment.INSIDE


class SentinelShape(str, Enum):
    """Symbolic sentinel regions at (-inf, -inf) and (+inf, -inf)"""
    LEFT = "sentinel-left"
    RIGHT = "sentinel-right"


ConvexShape = Union[PointShape, PolygonShape, DiskShape, DiskHullShape, SweepShape]


def _as_circle(shape) -> Circle:
    if isinstance(shape, (PointShape, DiskShape)):
        return shape.as_circle()
    raise ShapeError(f"{type(shape).__name__} has no circle form")


def band(a, b):
    """
    Closed convex hull of the union of two shapes.

    A sentinel end yields the sweep of the other shape (a point base stays a point).
    Exact inputs give an exact polygon; disk inputs give the hull of two circles.
    """
    if isinstance(a, SentinelShape) and isinstance(b, SentinelShape):
        raise ShapeError("band of two sentinels is undefined")
    if isinstance(a, SentinelShape) or isinstance(b, SentinelShape):
        sentinel, base = (a, b) if isinstance(a, SentinelShape) else (b, a)
        if isinstance(base, PointShape):
            return base
        direction = SweepDirection.DOWN_LEFT if sentinel == SentinelShape.LEFT \
            else SweepDirection.DOWN_RIGHT
        return SweepShape(base, direction)
    if a.exact and b.exact:
        merged = PolygonShape.from_points(list(a.vertices()) + list(b.vertices()))
        if len(merged.hull) == 1:
            return PointShape(merged.hull[0])
        return merged
    return DiskHullShape(_as_circle(a), _as_circle(b))


def vertex_in_shape(q: Point, shape) -> Containment:
    """Closed containment of q in a shape"""
    return shape.classify(q)


def _axes(hull: Sequence[Point]) -> List[Tuple[Scalar, Scalar]]:
    axes = []
    if len(hull) == 2:
        a, b = hull
        axes.append((b.x - a.x, b.y - a.y))
        axes.append((a.y - b.y, b.x - a.x))
        return axes
    for a, b in zip(hull, list(hull[1:]) + [hull[0]]):
        axes.append((a.y - b.y, b.x - a.x))
    return axes


def _separated(first: Sequence[Point], second: Sequence[Point]) -> bool:
    for ax, ay in _axes(first) + _axes(second):
        p1 = [p.x * ax + p.y * ay for p in first]
        p2 = [p.x * ax + p.y * ay for p in second]
        if max(p1) < min(p2) or max(p2) < min(p1):
            return True
    return False


def _exact_intersect(a, b) -> bool:
    ha, hb = a.vertices(), b.vertices()
    if len(ha) == 1:
        return b.classify(ha[0]) != Containment.OUTSIDE
    if len(hb) == 1:
        return a.classify(hb[0]) != Containment.OUTSIDE
    return not _separated(ha, hb)


def _sweep_intersect(sweep: SweepShape, other) -> bool:
    """Intersection of a sweep with a point, a polygon or a disk"""
    if isinstance(other, PointShape):
        return sweep.classify(other.point) != Containment.OUTSIDE
    lo, hi = sweep.x_range()
    olo, ohi = other.x_range()
    left, right = max(lo, olo), min(hi, ohi)
    if left > right:
        return False
    if sweep.exact and other.exact:
        xs = {left, right}
        xs.update(p.x for p in sweep.base.upper if left <= p.x <= right)
        xs.update(p.x for p in other.lower if left <= p.x <= right)
        return any(other.lower_at(x) <= sweep.base.upper_at(x) for x in xs)
    _, gap = ternary_minimum(
        lambda x: other.lower_at(x) - sweep.base.upper_at(x), float(left), float(right))
    return gap <= settings.EPSILON


def convex_intersect(a, b) -> bool:
    """True iff the two closed shapes intersect"""
    if isinstance(a, SweepShape):
        return _sweep_intersect(a, b)
    if isinstance(b, SweepShape):
        return _sweep_intersect(b, a)
    if a.exact and b.exact:
        return _exact_intersect(a, b)
    if isinstance(a, DiskShape) or isinstance(b, DiskShape):
        disk, other = (a, b) if isinstance(a, DiskShape) else (b, a)
        if isinstance(other, (PointShape, DiskShape)):
            c1, c2 = disk.as_circle(), _as_circle(other)
            return math.hypot(c1.cx - c2.cx, c1.cy - c2.cy) <= c1.r + c2.r + settings.EPSILON
        if isinstance(other, DiskHullShape):
            return other.signed_distance(disk.center) <= float(disk.radius) + settings.EPSILON
    if isinstance(a, DiskHullShape) and isinstance(b, PointShape):
        return a.classify(b.point) != Containment.OUTSIDE
    if isinstance(b, DiskHullShape) and isinstance(a, PointShape):
        return b.classify(a.point) != Containment.OUTSIDE
    raise ShapeError(f"unsupported intersection {type(a).__name__} x {type(b).__name__}")


def disk_penetrates(shape, disk: Circle) -> bool:
    """Disk reaches into the shape deeper than the tolerance"""
    eps = settings.EPSILON
    if isinstance(shape, SweepShape):
        lo, hi = shape.x_range()
        left, right = max(lo, disk.min_x), min(hi, disk.max_x)
        if left >= right:
            return False
        _, gap = ternary_minimum(lambda x: disk.lower_y(x) - shape.base.upper_at(x), left, right)
        return gap < -eps
    if isinstance(shape, PolygonShape) and len(shape.hull) <= 2:
        a, b = shape.hull[0], shape.hull[-1]
        shape = DiskHullShape(Circle(0, float(a.x), float(a.y), 0.0),
                              Circle(0, float(b.x), float(b.y), 0.0))
    if isinstance(shape, DiskHullShape):
        return shape.signed_distance(Point(disk.cx, disk.cy)) < disk.r - eps
    if isinstance(shape, (PointShape, DiskShape)):
        c = _as_circle(shape)
        return math.hypot(c.cx - disk.cx, c.cy - disk.cy) < c.r + disk.r - eps
    raise ShapeError(f"unsupported penetration test for {type(shape).__name__}")


__all__ = [
    "Containment",
    "SweepDirection",
    "SentinelShape",
    "ConvexShape",
    "PointShape",
    "PolygonShape",
    "DiskShape",
    "DiskHullShape",
    "SweepShape",
    "convex_hull_ccw",
    "band",
    "vertex_in_shape",
    "convex_intersect",
    "disk_penetrates",
]
