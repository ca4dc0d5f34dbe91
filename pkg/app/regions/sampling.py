"""
Seeded realizations of region families
Rejection sampling in each region's bounding box, snapped to a dyadic grid
so containment stays an exact rational test
"""

import logging
from fractions import Fraction
from typing import Optional

import numpy as np

from app.config import settings
from app.exceptions import FamilyValidationError
from app.geometry.primitives import Point
from app.regions.family import Family, Realization, RegionDesc, RegionKind

logger = logging.getLogger("sampling")


def snap(value: float, bits: Optional[int] = None) -> Fraction:
    bits = bits or settings.SNAP_BITS
    scale = 1 << bits
    return Fraction(int(round(value * scale)), scale)


def _bounding_box(desc: RegionDesc):
    lo, hi = desc.x_range()
    if desc.kind == RegionKind.POLYGON:
        ys = [v.y for v in desc.vertices]
        return lo, hi, min(ys), max(ys)
    return lo, hi, desc.center.y - desc.radius, desc.center.y + desc.radius


def sample_point(desc: RegionDesc, rng: np.random.Generator) -> Point:
    """Uniform point inside one region"""
    if desc.kind == RegionKind.POINT:
        return desc.point
    x0, x1, y0, y1 = _bounding_box(desc)
    for _ in range(settings.SAMPLING_MAX_TRIES):
        u, v = rng.random(2)
        q = Point(snap(float(x0) + u * float(x1 - x0)), snap(float(y0) + v * float(y1 - y0)))
        if desc.contains(q):
            return q
    raise FamilyValidationError(f"region {desc.rid}: rejection sampling exhausted",
                                reason="sampling", region_ids=(desc.rid,))


def sample_realization(f: Family, seed: int) -> Realization:
    """One hidden point per region; region i draws from an independent seeded stream"""
    points = {}
    for rid in f.ids:
        rng = np.random.default_rng([seed, rid])
        points[rid] = sample_point(f.original[rid], rng)
    return Realization(points)


__all__ = ["snap", "sample_point", "sample_realization"]
