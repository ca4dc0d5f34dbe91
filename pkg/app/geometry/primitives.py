"""
Exact geometric primitives
- Rational coordinates (fractions.Fraction) for points and polygons
- Orientation predicate
- Upper quarter hull with collinear and duplicate points
- Bridge search between two x-separated upper chains
"""

from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Sequence, Tuple, Union
import logging

from app.exceptions import ChainPreconditionError

logger = logging.getLogger("geometry")

Scalar = Union[Fraction, float, int]


class Point(NamedTuple):
    """A point in the plane; coordinates are Fractions except for disk tangent points"""
    x: Scalar
    y: Scalar


def to_rational(value) -> Fraction:
    """Parse ints, floats, Fractions, "p/q" and decimal strings into an exact Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def rational_point(x, y) -> Point:
    return Point(to_rational(x), to_rational(y))


def vertex_key(p: Point) -> Tuple[Scalar, Scalar]:
    """Chain order: x ascending, then y descending"""
    return (p.x, -p.y)


def cross(a: Point, b: Point, c: Point) -> Scalar:
    """(b - a) x (c - a)"""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of (b - a) x (c - a): +1 left turn, -1 right turn, 0 collinear"""
    value = cross(a, b, c)
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


def slope(a: Point, b: Point) -> Scalar:
    """Slope of the segment ab; exact when both coordinates are integral or rational"""
    dx = b.x - a.x
    dy = b.y - a.y
    if isinstance(dx, int) and isinstance(dy, int):
        return Fraction(dy, dx)
    return dy / dx


def midpoint(u: Scalar, v: Scalar) -> Scalar:
    if isinstance(u, int) and isinstance(v, int):
        return Fraction(u + v, 2)
    return (u + v) / 2


def y_on_line(a: Point, b: Point, x: Scalar) -> Scalar:
    """y-coordinate of the non-vertical line through a and b at abscissa x"""
    return a.y + slope(a, b) * (x - a.x)


def column_tops(points: Iterable[Point]) -> Dict[Scalar, Point]:
    """Topmost point of every x-column"""
    tops: Dict[Scalar, Point] = {}
    for p in points:
        current = tops.get(p.x)
        if current is None or p.y > current.y:
            tops[p.x] = p
    return tops


@dataclass(frozen=True)
class ConvexChain:
    """Upper convex chain, left to right, with a multiplicity per vertex"""
    vertices: Tuple[Point, ...]
    multiplicity: Tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.vertices)

    def __getitem__(self, index):
        return self.vertices[index]

    def __iter__(self):
        return iter(self.vertices)

    def edges(self) -> List[Tuple[Point, Point]]:
        return list(zip(self.vertices, self.vertices[1:]))

    def is_valid(self) -> bool:
        for a, b in zip(self.vertices, self.vertices[1:]):
            if a == b or a.x > b.x:
                return False
        for a, b, c in zip(self.vertices, self.vertices[1:], self.vertices[2:]):
            if orient(a, b, c) > 0:
                return False
        return True

    def y_at(self, x: Scalar) -> Scalar:
        """Evaluate the chain at x; x must lie within the chain's x-range"""
        return chain_y_at(self.vertices, x)


def chain_y_at(vertices: Sequence[Point], x: Scalar) -> Scalar:
    xs = [v.x for v in vertices]
    i = bisect_left(xs, x)
    if i < len(xs) and xs[i] == x:
        return vertices[i].y
    if i == 0 or i == len(xs):
        raise ValueError(f"x={x} outside chain range [{xs[0]}, {xs[-1]}]")
    return y_on_line(vertices[i - 1], vertices[i], x)


def upper_quarter_hull(points: Iterable[Point]) -> ConvexChain:
    """
    Upper chain from the leftmost to the rightmost point.

    Collinear points on the chain are kept; coincident points collapse into one
    vertex whose multiplicity counts them. Lower points of an x-column never
    participate.
    """
    counts = Counter(points)
    if not counts:
        raise ValueError("upper_quarter_hull needs at least one point")
    tops = sorted(column_tops(counts).values())

    chain: List[Point] = []
    for p in tops:
        while len(chain) >= 2 and orient(chain[-2], chain[-1], p) > 0:
            chain.pop()
        chain.append(p)

    return ConvexChain(tuple(chain), tuple(counts[v] for v in chain))


def _above(a: Point, b: Point, c: Point) -> bool:
    """c strictly above the line from a to b (a left of b)"""
    return orient(a, b, c) > 0


def _on_or_above(a: Point, b: Point, c: Point) -> bool:
    return orient(a, b, c) >= 0


def bridge_between(left: Sequence[Point], right: Sequence[Point]) -> Tuple[Point, Point]:
    """
    Common upper tangent of two x-separated upper chains.

    Simultaneous binary search on both chains. Each sampled pair (a, b) is classified
    by the neighbours of a and b against the line ab; every case discards at least
    one of the two samples. Among collinear candidates the bridge joins the rightmost
    vertex of `left` with the leftmost vertex of `right`.

    Args:
        left: upper chain, every vertex strictly left of `right`
        right: upper chain

    Returns:
        (a, b): bridge endpoints, a in left and b in right
    """
    if not left or not right:
        raise ChainPreconditionError("bridge search needs two non-empty chains")
    if not left[len(left) - 1].x < right[0].x:
        raise ChainPreconditionError(
            f"chains are not x-separated: {left[len(left) - 1]} vs {right[0]}")

    separator = midpoint(left[len(left) - 1].x, right[0].x)
    lo_a, hi_a = 0, len(left) - 1
    lo_b, hi_b = 0, len(right) - 1

    while True:
        i = (lo_a + hi_a) // 2
        j = (lo_b + hi_b) // 2
        a, b = left[i], right[j]
        a_prev = left[i - 1] if i > 0 else None
        a_next = left[i + 1] if i + 1 < len(left) else None
        b_prev = right[j - 1] if j > 0 else None
        b_next = right[j + 1] if j + 1 < len(right) else None

        a_goes_left = a_prev is not None and _above(a, b, a_prev)
        b_goes_right = b_next is not None and _above(a, b, b_next)
        if a_goes_left or b_goes_right:
            if a_goes_left:
                hi_a = i - 1
            if b_goes_right:
                lo_b = j + 1
            continue

        a_goes_right = a_next is not None and _on_or_above(a, b, a_next)
        b_goes_left = b_prev is not None and _on_or_above(a, b, b_prev)

        if not a_goes_right and not b_goes_left:
            return a, b
        if not a_goes_right:
            hi_b = j - 1
            continue
        if not b_goes_left:
            lo_a = i + 1
            continue

        # both samples point inwards: locate the crossing of their hull edges
        slope_a = slope(a, a_next)
        slope_ab = slope(a, b)
        slope_b = slope(b_prev, b)
        if slope_a == slope_ab and slope_b == slope_ab:
            lo_a = i + 1
            hi_b = j - 1
            continue
        crossing_x = (b.y - a.y + slope_a * a.x - slope_b * b.x) / (slope_a - slope_b)
        if crossing_x <= separator:
            lo_a = i + 1
        if crossing_x >= separator:
            hi_b = j - 1


__all__ = [
    "Point",
    "Scalar",
    "ConvexChain",
    "to_rational",
    "rational_point",
    "vertex_key",
    "cross",
    "orient",
    "slope",
    "midpoint",
    "y_on_line",
    "column_tops",
    "chain_y_at",
    "upper_quarter_hull",
    "bridge_between",
]
