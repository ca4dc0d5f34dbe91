"""
Instance generators
- points / triangles / k-gons on a seeded random layout
- nested rectangles with coincident or spread hidden points
- the five-region example with a two-retrieval optimum
- disjoint [1,k]-disks and unit disks of bounded ply
Every generator returns an InstanceFile with an explicit hidden realization
"""

import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from app.config import FamilyMode, InstanceKind, settings
from app.exceptions import FamilyValidationError
from app.geometry.disks import Circle, depth_of_arrangement
from app.geometry.primitives import Point, rational_point
from app.geometry.shapes import convex_hull_ccw
from app.regions.family import Realization, RegionDesc, build_family
from app.regions.sampling import sample_realization
from app.harness.instance_io import InstanceFile

logger = logging.getLogger("generators")

# dyadic grid for generated coordinates
GRID = 8
# gap kept between generated disks, well above DISK_MARGIN
DISK_GAP = Fraction(1, 4)


def _snap(value: float) -> Fraction:
    return Fraction(int(round(value * GRID)), GRID)


def _finish(descs: List[RegionDesc], mode: FamilyMode, k: int, seed: int,
            hidden: Optional[Dict[int, Point]] = None) -> InstanceFile:
    family = build_family(descs, mode, k)
    realization = Realization(hidden) if hidden is not None else sample_realization(family, seed)
    realization.validate(family)
    return InstanceFile.from_family(family, realization, seed)


def _layout_side(n: int, spread: float) -> float:
    return spread * max(1.0, math.sqrt(n))


# ==================== POLYGON FAMILIES ====================

def gen_points(n: int, k: int, seed: int) -> InstanceFile:
    rng = np.random.default_rng(seed)
    side = _layout_side(n, 6.0)
    descs = [RegionDesc.point_region(rid, Point(_snap(rng.random() * side), _snap(rng.random() * side)))
             for rid in range(1, n + 1)]
    return _finish(descs, FamilyMode.KGON, k, seed)


def _random_convex(rng: np.random.Generator, center: Point, radius: float, k: int) -> List[Point]:
    """Strictly convex polygon with 3..k vertices inscribed in a circle"""
    for _ in range(settings.SAMPLING_MAX_TRIES):
        count = int(rng.integers(3, k + 1))
        angles = np.sort(rng.random(count) * 2 * math.pi)
        pts = [Point(center.x + _snap(radius * math.cos(a)), center.y + _snap(radius * math.sin(a)))
               for a in angles]
        hull = convex_hull_ccw(pts)
        if len(hull) >= 3:
            return list(hull)
    raise FamilyValidationError("could not draw a non-degenerate polygon", reason="degenerate")


def gen_kgons(n: int, k: int, seed: int) -> InstanceFile:
    """Convex polygons of up to k vertices scattered so that x-ranges overlap"""
    k = max(k, 3)
    rng = np.random.default_rng(seed)
    side = _layout_side(n, 6.0)
    descs = []
    for rid in range(1, n + 1):
        center = Point(_snap(rng.random() * side), _snap(rng.random() * side))
        radius = 1.0 + 2.0 * rng.random()
        descs.append(RegionDesc.polygon(rid, _random_convex(rng, center, radius, k)))
    return _finish(descs, FamilyMode.KGON, k, seed)


def gen_triangles(n: int, k: int, seed: int) -> InstanceFile:
    return gen_kgons(n, 3, seed)


def _rectangle(rid: int, half: int) -> RegionDesc:
    h = Fraction(half)
    return RegionDesc.polygon(rid, [Point(-h, -h), Point(h, -h), Point(h, h), Point(-h, h)])


def gen_nested(n: int, k: int, seed: int) -> InstanceFile:
    """Nested squares R_n inside ... inside R_1, every hidden point at the common centre"""
    descs = [_rectangle(rid, n - rid + 1) for rid in range(1, n + 1)]
    hidden = {rid: rational_point(0, 0) for rid in range(1, n + 1)}
    return _finish(descs, FamilyMode.KGON, 4, seed, hidden)


def gen_nested_spread(n: int, k: int, seed: int) -> InstanceFile:
    """
    Nested squares whose four outermost hidden points sit on distinct corners,
    so their hull contains the fifth square; the rest are sampled inside
    """
    if n < 5:
        raise FamilyValidationError("nested-spread needs at least 5 regions", reason="parameter")
    descs = [_rectangle(rid, n - rid + 1) for rid in range(1, n + 1)]
    family = build_family(descs, FamilyMode.KGON, 4)
    sampled = sample_realization(family, seed).points
    corners = [(-1, 1), (1, 1), (1, -1), (-1, -1)]
    hidden = dict(sampled)
    for rid, (sx, sy) in zip(range(1, 5), corners):
        half = n - rid + 1
        hidden[rid] = rational_point(sx * half, sy * half)
    return _finish(descs, FamilyMode.KGON, 4, seed, hidden)


def gen_five_regions(n: int = 5, k: int = 4, seed: int = 0) -> InstanceFile:
    """Five regions; retrieving the square and the triangle finishes, order (1, 3, 2, 4)"""
    descs = [
        RegionDesc.point_region(1, rational_point(0, 0)),
        RegionDesc.point_region(2, rational_point(4, 3)),
        RegionDesc.polygon(3, [rational_point(1, 2), rational_point(3, 2),
                               rational_point(3, 4), rational_point(1, 4)]),
        RegionDesc.polygon(4, [rational_point("5/2", -1), rational_point(7, -1), rational_point(7, 1)]),
        RegionDesc.point_region(5, rational_point(3, 0)),
    ]
    hidden = {1: rational_point(0, 0), 2: rational_point(4, 3), 3: rational_point(2, 3),
              4: rational_point(6, 0), 5: rational_point(3, 0)}
    return _finish(descs, FamilyMode.KGON, 4, seed, hidden)


# ==================== DISK FAMILIES ====================

def gen_disjoint_disks(n: int, k: int, seed: int) -> InstanceFile:
    """
    Disks with radii in [1, k] on a jittered grid of cells; cells are wide enough
    that neighbours keep DISK_GAP apart while sharing x-ranges across rows
    """
    rng = np.random.default_rng(seed)
    cell = 2 * k + 1
    columns = max(1, math.ceil(math.sqrt(2 * n)))
    used_x, used_y = set(), set()
    descs = []
    for index in range(n):
        row, column = divmod(index, columns)
        radius = Fraction(int(rng.integers(4, 4 * k + 1)), 4)
        slack = Fraction(cell, 2) - radius - DISK_GAP / 2
        for _ in range(settings.SAMPLING_MAX_TRIES):
            dx = _snap((rng.random() * 2 - 1) * float(slack))
            dy = _snap((rng.random() * 2 - 1) * float(slack))
            cx = Fraction(column * cell) + Fraction(cell, 2) + dx
            cy = Fraction(row * cell) + Fraction(cell, 2) + dy
            if cx not in used_x and cy not in used_y:
                break
        else:
            raise FamilyValidationError("could not place disk centres at distinct coordinates",
                                        reason="general-position")
        used_x.add(cx)
        used_y.add(cy)
        descs.append(RegionDesc.disk(index + 1, Point(cx, cy), radius))
    return _finish(descs, FamilyMode.DISJOINT_DISKS, k, seed)


def gen_unit_ply(n: int, k: int, seed: int) -> InstanceFile:
    """
    Unit disks in a box sized for about k/2 disks per unit area, rejecting
    placements that would push the ply above k
    """
    rng = np.random.default_rng(seed)
    side = 2.0 + 2.0 * math.ceil(math.sqrt(2.0 * n / k))
    placed: List[Circle] = []
    descs = []
    used_x, used_y = set(), set()
    for rid in range(1, n + 1):
        for _ in range(settings.SAMPLING_MAX_TRIES):
            center = Point(_snap(rng.random() * side), _snap(rng.random() * side))
            if center.x in used_x or center.y in used_y:
                continue
            candidate = Circle(rid, float(center.x), float(center.y), 1.0)
            near = [c for c in placed if math.hypot(c.cx - candidate.cx, c.cy - candidate.cy) <= 2.0 + 2 * settings.DISK_MARGIN]
            if depth_of_arrangement(near + [candidate], tolerance=settings.DISK_MARGIN) <= k:
                break
        else:
            raise FamilyValidationError(f"ply {k} unreachable for {n} unit disks", reason="ply")
        used_x.add(center.x)
        used_y.add(center.y)
        placed.append(candidate)
        descs.append(RegionDesc.disk(rid, center, 1))
    return _finish(descs, FamilyMode.UNIT_PLY, k, seed)


GENERATORS: Dict[InstanceKind, Callable[[int, int, int], InstanceFile]] = {
    InstanceKind.POINTS: gen_points,
    InstanceKind.TRIANGLES: gen_triangles,
    InstanceKind.KGONS: gen_kgons,
    InstanceKind.NESTED: gen_nested,
    InstanceKind.NESTED_SPREAD: gen_nested_spread,
    InstanceKind.FIVE_REGIONS: gen_five_regions,
    InstanceKind.DISJOINT_DISKS: gen_disjoint_disks,
    InstanceKind.UNIT_PLY: gen_unit_ply,
}


def gen(kind, n: int, k: int, seed: Optional[int] = None) -> InstanceFile:
    """
    Generate a seeded instance

    Args:
        kind: instance class
        n: number of regions (ignored by five-regions)
        k: complexity parameter (vertex bound, radius bound or ply)
        seed: random seed; settings.DEFAULT_SEED when omitted

    Returns:
        InstanceFile: valid instance with its hidden realization
    """
    kind = InstanceKind(kind)
    if n < 1 or k < 1:
        raise FamilyValidationError("n and k must be at least 1", reason="parameter")
    seed = settings.DEFAULT_SEED if seed is None else seed
    instance = GENERATORS[kind](n, k, seed)
    logger.debug(f"Generated {kind.value} instance n={instance.n} k={instance.k} seed={seed}")
    return instance


__all__ = [
    "GENERATORS",
    "gen",
    "gen_points",
    "gen_triangles",
    "gen_kgons",
    "gen_nested",
    "gen_nested_spread",
    "gen_five_regions",
    "gen_disjoint_disks",
    "gen_unit_ply",
]
