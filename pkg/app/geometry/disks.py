"""
Floating-point disk geometry
- Circles (points are circles of radius 0)
- Upper outer tangents and gift-wrapped upper hulls of circle sets
- Evaluation of hull chains (segments and implicit arcs)
- Convex-function minimisation by ternary search
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.geometry.primitives import Point

TWO_PI = 2.0 * math.pi


class Circle(NamedTuple):
    """Disk region in float coordinates; radius 0 for point regions"""
    rid: int
    cx: float
    cy: float
    r: float

    @property
    def min_x(self) -> float:
        return self.cx - self.r

    @property
    def max_x(self) -> float:
        return self.cx + self.r

    def point_at(self, angle: float) -> Point:
        return Point(self.cx + self.r * math.cos(angle), self.cy + self.r * math.sin(angle))

    def upper_y(self, x: float) -> float:
        return self.cy + math.sqrt(max(0.0, self.r * self.r - (x - self.cx) ** 2))

    def lower_y(self, x: float) -> float:
        return self.cy - math.sqrt(max(0.0, self.r * self.r - (x - self.cx) ** 2))

    def signed_distance(self, q: Point) -> float:
        return math.hypot(float(q.x) - self.cx, float(q.y) - self.cy) - self.r


def ternary_minimum(f: Callable[[float], float], lo: float, hi: float,
                    iterations: Optional[int] = None) -> Tuple[float, float]:
    """Minimum of a convex function on [lo, hi]"""
    iterations = iterations or settings.TERNARY_ITERATIONS
    for _ in range(iterations):
        if hi - lo <= 1e-15 * max(1.0, abs(lo), abs(hi)):
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    x = (lo + hi) / 2.0
    return x, f(x)


def tangent_event_angle(a: Circle, b: Circle, current: float) -> Optional[float]:
    """
    Normal angle at which the supporting line of `a`, rotating clockwise from
    `current`, first touches `b`. None when `b` never becomes tangent
    (one circle inside the other).
    """
    dx, dy = b.cx - a.cx, b.cy - a.cy
    d = math.hypot(dx, dy)
    eps = settings.EPSILON
    if d <= abs(a.r - b.r) + eps:
        return None
    alpha = math.atan2(dy, dx)
    theta = math.acos(max(-1.0, min(1.0, (a.r - b.r) / d)))
    event = alpha + theta
    while event > current + eps:
        event -= TWO_PI
    while event <= current - TWO_PI + eps:
        event += TWO_PI
    return event


@dataclass
class HullVertex:
    """One vertex of a disk hull chain; `arc_to_next` links it to the next vertex along its circle"""
    location: Point
    rid: int
    arc_to_next: bool = False


def _travel(angle: float) -> Tuple[float, float]:
    return math.sin(angle), -math.cos(angle)


def upper_hull_of_circles(circles: Sequence[Circle]) -> List[HullVertex]:
    """
    Upper hull of a set of circles by gift wrapping, from the leftmost point to the
    rightmost point. Consecutive vertices on the same circle are joined by an arc.
    """
    if not circles:
        return []
    eps = settings.EPSILON
    start = min(circles, key=lambda c: (c.min_x, -c.cy, c.rid))
    current, angle = start, math.pi
    chain: List[HullVertex] = [HullVertex(current.point_at(angle), current.rid)]
    limit = 4 * len(circles) + 4

    for _ in range(limit):
        here = chain[-1].location
        ux, uy = _travel(angle)
        best: Optional[Tuple[float, float, Circle]] = None
        for other in circles:
            if other.rid == current.rid:
                continue
            event = tangent_event_angle(current, other, angle)
            # a vertical support on the right closes the upper hull
            if event is None or event <= eps:
                continue
            touch = other.point_at(event)
            ahead = (touch.x - here.x) * ux + (touch.y - here.y) * uy
            if abs(event - angle) <= eps and ahead <= eps:
                continue
            if best is None or event > best[0] + eps or (abs(event - best[0]) <= eps and ahead < best[1]):
                best = (event, ahead, other)

        if best is None:
            if current.r > 0 and angle > eps:
                chain[-1].arc_to_next = True
                chain.append(HullVertex(current.point_at(0.0), current.rid))
            return chain

        event, _, nxt = best
        if current.r > 0 and event < angle - eps:
            chain[-1].arc_to_next = True
            chain.append(HullVertex(current.point_at(event), current.rid))
        chain.append(HullVertex(nxt.point_at(event), nxt.rid))
        current, angle = nxt, event

    raise RuntimeError("gift wrapping did not terminate")


def chain_upper_at(chain: Sequence[HullVertex], circles: Dict[int, Circle], x: float) -> float:
    """Height of a disk hull chain at abscissa x inside its range"""
    for v, w in zip(chain, chain[1:]):
        if float(v.location.x) - settings.EPSILON <= x <= float(w.location.x) + settings.EPSILON:
            if v.arc_to_next:
                return circles[v.rid].upper_y(x)
            if float(w.location.x) == float(v.location.x):
                return max(float(v.location.y), float(w.location.y))
            t = (x - float(v.location.x)) / (float(w.location.x) - float(v.location.x))
            return float(v.location.y) + t * (float(w.location.y) - float(v.location.y))
    if len(chain) == 1:
        return float(chain[0].location.y)
    raise ValueError(f"x={x} outside the chain range")


def pair_hull_signed_distance(q: Point, a: Circle, b: Circle) -> float:
    """
    Signed distance from q to the convex hull of two circles, using that the hull
    is the union of the interpolated circles between them.
    """
    qx, qy = float(q.x), float(q.y)

    def gap(lam: float) -> float:
        cx = a.cx + lam * (b.cx - a.cx)
        cy = a.cy + lam * (b.cy - a.cy)
        r = a.r + lam * (b.r - a.r)
        return math.hypot(qx - cx, qy - cy) - r

    _, value = ternary_minimum(gap, 0.0, 1.0)
    return min(value, gap(0.0), gap(1.0))


def circles_intersect(a: Circle, b: Circle, margin: float = 0.0) -> bool:
    return math.hypot(a.cx - b.cx, a.cy - b.cy) <= a.r + b.r - margin


def circle_intersections(a: Circle, b: Circle) -> List[Tuple[float, float]]:
    """Boundary intersection points of two circles"""
    dx, dy = b.cx - a.cx, b.cy - a.cy
    d = math.hypot(dx, dy)
    if d == 0 or d > a.r + b.r or d < abs(a.r - b.r):
        return []
    along = (a.r * a.r - b.r * b.r + d * d) / (2 * d)
    h = math.sqrt(max(0.0, a.r * a.r - along * along))
    mx, my = a.cx + along * dx / d, a.cy + along * dy / d
    return [(mx + h * dy / d, my - h * dx / d), (mx - h * dy / d, my + h * dx / d)]


def sample_boundary(circle: Circle, count: int = 64) -> np.ndarray:
    """Evenly spaced boundary points, shape (count, 2)"""
    angles = np.linspace(0.0, TWO_PI, count, endpoint=False)
    return np.column_stack((circle.cx + circle.r * np.cos(angles),
                            circle.cy + circle.r * np.sin(angles)))


def depth_of_arrangement(circles: Iterable[Circle], tolerance: float = 0.0) -> int:
    """Maximum number of closed disks sharing a point (ply)"""
    circles = list(circles)
    candidates: List[Tuple[float, float]] = [(c.cx, c.cy) for c in circles]
    for i, a in enumerate(circles):
        for b in circles[i + 1:]:
            candidates.extend(circle_intersections(a, b))
    best = 0
    for px, py in candidates:
        depth = sum(1 for c in circles if math.hypot(px - c.cx, py - c.cy) <= c.r + tolerance)
        best = max(best, depth)
    return best


__all__ = [
    "Circle",
    "HullVertex",
    "ternary_minimum",
    "tangent_event_angle",
    "upper_hull_of_circles",
    "chain_upper_at",
    "pair_hull_signed_distance",
    "circles_intersect",
    "circle_intersections",
    "sample_boundary",
    "depth_of_arrangement",
]
