"""
Geometric primitives: exact chains and predicates, disk hulls, convex shapes
"""

from app.geometry.primitives import (
    ConvexChain, Point, bridge_between, orient, rational_point, upper_quarter_hull,
)
from app.geometry.circle_chains import CircleChain
from app.geometry.shapes import (
    Containment, PointShape, PolygonShape, DiskShape, SentinelShape, SweepShape,
    band, convex_intersect, vertex_in_shape,
)

__all__ = [
    "ConvexChain",
    "Point",
    "bridge_between",
    "orient",
    "rational_point",
    "upper_quarter_hull",
    "CircleChain",
    "Containment",
    "PointShape",
    "PolygonShape",
    "DiskShape",
    "SentinelShape",
    "SweepShape",
    "band",
    "convex_intersect",
    "vertex_in_shape",
]
