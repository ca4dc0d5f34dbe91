"""
Disk hull chains as circle sequences
- A chain lists the circles met along an upper hull from left to right; with
  unequal radii a circle may come back after another one
- Tangent points and arcs are derived from consecutive circles, exactly as the
  gift-wrapping hull derives them
- Every circle of a chain supports it over a range of normal angles, from pi
  at the leftmost point down to 0 at the rightmost point
- Two chains whose supports follow each other merge through a single bridge
"""

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from app.config import settings
from app.exceptions import StructureError
from app.geometry.disks import Circle, HullVertex, tangent_event_angle, upper_hull_of_circles

BRIDGE_ITERATIONS = 64


def distinct_circles(circles: Sequence[Circle]) -> List[Circle]:
    """Drop repeated circles; among identical ones the smallest id stays"""
    best: Dict[Tuple[float, float, float], Circle] = {}
    for c in circles:
        key = (c.cx, c.cy, c.r)
        if key not in best or c.rid < best[key].rid:
            best[key] = c
    return sorted(best.values(), key=lambda c: c.rid)


@dataclass(frozen=True)
class CircleChain:
    """circles[i] supports the chain for normal angles in [exits[i], entries[i]]"""
    circles: Tuple[Circle, ...] = ()
    entries: Tuple[float, ...] = ()
    exits: Tuple[float, ...] = ()

    @classmethod
    def from_circles(cls, circles: Sequence[Circle]) -> "CircleChain":
        """Full chain through the given circles, from the first one's leftmost point"""
        circles = tuple(circles)
        if not circles:
            return cls()
        entries, exits = [math.pi], []
        angle = math.pi
        for current, nxt in zip(circles, circles[1:]):
            event = tangent_event_angle(current, nxt, angle)
            if event is None:
                raise StructureError(f"circles {current.rid} and {nxt.rid} have no outer tangent")
            exits.append(event)
            entries.append(event)
            angle = event
        exits.append(0.0)
        return cls(circles, tuple(entries), tuple(exits))

    @classmethod
    def from_vertices(cls, vertices: Sequence[HullVertex], by_id: Dict[int, Circle]) -> "CircleChain":
        sequence: List[Circle] = []
        for v in vertices:
            if not sequence or sequence[-1].rid != v.rid:
                sequence.append(by_id[v.rid])
        return cls.from_circles(sequence)

    @classmethod
    def hull_of(cls, circles: Sequence[Circle]) -> "CircleChain":
        """Upper hull of a circle set, by gift wrapping"""
        circles = distinct_circles(circles)
        return cls.from_vertices(upper_hull_of_circles(circles), {c.rid: c for c in circles})

    def __len__(self) -> int:
        return len(self.circles)

    def __bool__(self) -> bool:
        return bool(self.circles)

    def piece(self, lo: int, hi: int) -> "CircleChain":
        return CircleChain(self.circles[lo:hi], self.entries[lo:hi], self.exits[lo:hi])

    @property
    def rids(self) -> Tuple[int, ...]:
        return tuple(c.rid for c in self.circles)

    @property
    def min_x(self) -> float:
        return self.circles[0].point_at(self.entries[0]).x

    @property
    def max_x(self) -> float:
        return self.circles[-1].point_at(self.exits[-1]).x

    def vertices(self) -> List[HullVertex]:
        """Tangent points left to right; consecutive vertices on one circle are joined by an arc"""
        if not self.circles:
            return []
        eps = settings.EPSILON
        out: List[HullVertex] = []
        for c, entry, exit_ in zip(self.circles, self.entries, self.exits):
            out.append(HullVertex(c.point_at(entry), c.rid))
            if c.r > 0 and exit_ < entry - eps:
                out[-1].arc_to_next = True
                out.append(HullVertex(c.point_at(exit_), c.rid))
        return out

    # ---- support ----

    def visit_at(self, angle: float) -> Optional[int]:
        """Index of the circle supporting the chain at this normal angle; None outside the chain"""
        if not self.circles or angle > self.entries[0] or angle < self.exits[-1]:
            return None
        lo, hi = 0, len(self.exits) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if self.exits[mid] <= angle:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def support(self, angle: float) -> float:
        i = self.visit_at(angle)
        if i is None:
            return -math.inf
        c = self.circles[i]
        return c.cx * math.cos(angle) + c.cy * math.sin(angle) + c.r

    def height_function(self) -> Callable[[float], float]:
        """Height of the chain at x inside [min_x, max_x]"""
        vertices = self.vertices()
        xs = [float(v.location.x) for v in vertices]
        by_id = {c.rid: c for c in self.circles}

        def height(x: float) -> float:
            i = min(max(bisect_right(xs, x) - 1, 0), max(len(vertices) - 2, 0))
            v = vertices[i]
            if len(vertices) == 1:
                return float(v.location.y)
            w = vertices[i + 1]
            if v.arc_to_next:
                return by_id[v.rid].upper_y(x)
            if xs[i + 1] == xs[i]:
                return max(float(v.location.y), float(w.location.y))
            t = (x - xs[i]) / (xs[i + 1] - xs[i])
            return float(v.location.y) + t * (float(w.location.y) - float(v.location.y))

        return height


# ==================== SLABS AND BRIDGES ====================

def split_before(chain: CircleChain, boundary: float) -> Tuple[CircleChain, CircleChain]:
    """(leading circles whose supported part ends left of boundary, the rest)"""
    lo, hi = 0, len(chain)
    while lo < hi:
        mid = (lo + hi) // 2
        if chain.circles[mid].point_at(chain.exits[mid]).x < boundary:
            lo = mid + 1
        else:
            hi = mid
    return chain.piece(0, lo), chain.piece(lo, len(chain))


def split_after(chain: CircleChain, boundary: float) -> Tuple[CircleChain, CircleChain]:
    """(the rest, trailing circles whose supported part starts right of boundary)"""
    lo, hi = 0, len(chain)
    while lo < hi:
        mid = (lo + hi) // 2
        if chain.circles[mid].point_at(chain.entries[mid]).x > boundary:
            hi = mid
        else:
            lo = mid + 1
    return chain.piece(0, lo), chain.piece(lo, len(chain))


def bridge(first: CircleChain, second: CircleChain) -> Tuple[int, int]:
    """
    Upper hull of two chains whose supports follow each other: a prefix of
    `first`, one bridge, then a suffix of `second`.

    Returns:
        Tuple[int, int]: circles kept from first, index where the kept suffix of second starts
    """
    if not first:
        return 0, 0
    if not second:
        return len(first), len(second)

    def first_wins(angle: float) -> bool:
        return first.support(angle) >= second.support(angle)

    if not first_wins(math.pi):
        return 0, 0
    if first_wins(0.0):
        return len(first), len(second)
    lo, hi = 0.0, math.pi
    for _ in range(BRIDGE_ITERATIONS):
        mid = (lo + hi) / 2
        if first_wins(mid):
            hi = mid
        else:
            lo = mid
    kept = first.visit_at(hi) + 1
    start = second.visit_at(lo)
    if first.circles[kept - 1] == second.circles[start]:
        start += 1
    return kept, start


__all__ = [
    "distinct_circles",
    "CircleChain",
    "split_before",
    "split_after",
    "bridge",
]
