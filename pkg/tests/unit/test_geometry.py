"""
Geometry Testing Suite for the hull reconstruction toolkit
Tests the exact and floating-point geometric kernel:
- Orientation predicate and slope helpers on rationals
- Upper quarter hulls (column tops, collinear points, multiplicities)
- Bridge search against a hull recomputed from scratch
- Shapes: containment, bands with sentinels, convex intersection
- Disk hulls against sampled boundaries and the depth of an arrangement
"""

import unittest
import sys
import os
import logging
from fractions import Fraction

from hypothesis import given, settings as hyp_settings, strategies as st

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from app.exceptions import ChainPreconditionError, ShapeError
from app.geometry.primitives import (
    Point, bridge_between, chain_y_at, column_tops, orient, rational_point, slope,
    upper_quarter_hull, y_on_line,
)
from app.geometry.shapes import (
    Containment, PointShape, PolygonShape, DiskShape, SentinelShape, SweepDirection,
    SweepShape, band, convex_hull_ccw, convex_intersect, vertex_in_shape,
)
from app.geometry.disks import (
    Circle, chain_upper_at, depth_of_arrangement, sample_boundary, upper_hull_of_circles,
)

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("test_geometry")

coords = st.integers(min_value=-20, max_value=20)
points = st.builds(rational_point, coords, coords)


def _proper_cross(a, b, c, d) -> bool:
    return orient(a, b, c) * orient(a, b, d) < 0 and orient(c, d, a) * orient(c, d, b) < 0


def _brute_intersect(first: PolygonShape, second: PolygonShape) -> bool:
    if any(second.classify(p) != Containment.OUTSIDE for p in first.hull):
        return True
    if any(first.classify(p) != Containment.OUTSIDE for p in second.hull):
        return True
    edges_a = list(zip(first.hull, first.hull[1:] + first.hull[:1]))
    edges_b = list(zip(second.hull, second.hull[1:] + second.hull[:1]))
    return any(_proper_cross(a, b, c, d) for a, b in edges_a for c, d in edges_b)


class TestPrimitives(unittest.TestCase):
    """Orientation, slopes and chains over exact rationals"""

    def test_orient_signs(self):
        logger.info("🔧 Testing orientation signs")
        a, b = rational_point(0, 0), rational_point(4, 0)
        self.assertEqual(orient(a, b, rational_point(1, 1)), 1)
        self.assertEqual(orient(a, b, rational_point(1, -1)), -1)
        self.assertEqual(orient(a, b, rational_point(9, 0)), 0)
        logger.info("✅ Orientation test passed")

    @given(points, points, points)
    def test_orient_antisymmetry(self, a, b, c):
        self.assertEqual(orient(a, b, c), -orient(b, a, c))
        self.assertEqual(orient(a, b, c), orient(b, c, a))

    def test_rational_parsing(self):
        logger.info("🔧 Testing rational parsing")
        p = rational_point("5/2", "0.25")
        self.assertEqual(p, Point(Fraction(5, 2), Fraction(1, 4)))
        self.assertEqual(slope(rational_point(0, 0), rational_point(3, 1)), Fraction(1, 3))
        self.assertEqual(y_on_line(rational_point(0, 0), rational_point(2, 2), Fraction(1, 2)),
                         Fraction(1, 2))
        logger.info("✅ Rational parsing test passed")

    def test_column_tops(self):
        logger.info("🔧 Testing column tops")
        tops = column_tops([rational_point(0, 0), rational_point(0, 5), rational_point(1, 0)])
        self.assertEqual(tops[0], rational_point(0, 5))
        self.assertEqual(len(tops), 2)
        logger.info("✅ Column tops test passed")


class TestUpperHull(unittest.TestCase):
    """upper_quarter_hull and chain evaluation"""

    def test_collinear_points_are_kept(self):
        logger.info("🔧 Testing collinear vertices on the upper hull")
        chain = upper_quarter_hull([rational_point(0, 0), rational_point(1, 1), rational_point(2, 2)])
        self.assertEqual(len(chain), 3)
        self.assertTrue(chain.is_valid())
        logger.info("✅ Collinear hull test passed")

    def test_lower_points_of_a_column_are_dropped(self):
        chain = upper_quarter_hull([rational_point(0, 0), rational_point(0, 5), rational_point(3, 0)])
        self.assertEqual(chain.vertices, (rational_point(0, 5), rational_point(3, 0)))

    def test_coincident_points_collapse(self):
        logger.info("🔧 Testing multiplicities of coincident points")
        chain = upper_quarter_hull([rational_point(0, 0), rational_point(0, 0), rational_point(1, 0)])
        self.assertEqual(chain.vertices, (rational_point(0, 0), rational_point(1, 0)))
        self.assertEqual(chain.multiplicity, (2, 1))
        logger.info("✅ Multiplicity test passed")

    def test_interior_points_are_dropped(self):
        chain = upper_quarter_hull([rational_point(0, 0), rational_point(2, 1),
                                    rational_point(1, 3), rational_point(4, 0)])
        self.assertNotIn(rational_point(2, 1), chain.vertices)
        self.assertEqual(chain.y_at(0), 0)

    def test_empty_input_raises(self):
        with self.assertRaises(ValueError):
            upper_quarter_hull([])

    def test_evaluation_outside_range_raises(self):
        chain = upper_quarter_hull([rational_point(0, 0), rational_point(2, 2)])
        with self.assertRaises(ValueError):
            chain_y_at(chain.vertices, 3)

    @given(st.lists(points, min_size=1, max_size=25))
    def test_hull_dominates_every_point(self, pts):
        chain = upper_quarter_hull(pts)
        self.assertTrue(chain.is_valid())
        for p in pts:
            self.assertGreaterEqual(chain.y_at(p.x), p.y)


class TestBridge(unittest.TestCase):
    """Common upper tangent of two x-separated chains"""

    @hyp_settings(max_examples=150)
    @given(st.lists(st.builds(rational_point, st.integers(0, 10), coords), min_size=1, max_size=15),
           st.lists(st.builds(rational_point, st.integers(11, 25), coords), min_size=1, max_size=15))
    def test_bridge_matches_scratch_hull(self, left_pts, right_pts):
        left = upper_quarter_hull(left_pts).vertices
        right = upper_quarter_hull(right_pts).vertices
        merged = upper_quarter_hull(list(left) + list(right)).vertices
        expected = next((a, b) for a, b in zip(merged, merged[1:]) if a.x <= 10 < b.x)
        self.assertEqual(bridge_between(left, right), expected)

    def test_collinear_bridge_joins_inner_vertices(self):
        logger.info("🔧 Testing the collinear bridge rule")
        left = [rational_point(0, 0), rational_point(1, 1)]
        right = [rational_point(2, 2), rational_point(3, 3)]
        self.assertEqual(bridge_between(left, right), (rational_point(1, 1), rational_point(2, 2)))
        logger.info("✅ Collinear bridge test passed")

    def test_precondition_errors(self):
        with self.assertRaises(ChainPreconditionError):
            bridge_between([], [rational_point(1, 1)])
        with self.assertRaises(ChainPreconditionError):
            bridge_between([rational_point(2, 0)], [rational_point(1, 1)])


class TestShapes(unittest.TestCase):
    """Containment, bands and intersection"""

    def setUp(self):
        self.square = PolygonShape.from_points(
            [rational_point(0, 0), rational_point(2, 0), rational_point(2, 2), rational_point(0, 2)])

    def test_polygon_containment(self):
        logger.info("🔧 Testing polygon containment")
        self.assertEqual(vertex_in_shape(rational_point(1, 1), self.square), Containment.INSIDE)
        self.assertEqual(vertex_in_shape(rational_point(2, 1), self.square), Containment.BOUNDARY)
        self.assertEqual(vertex_in_shape(rational_point(3, 1), self.square), Containment.OUTSIDE)
        logger.info("✅ Polygon containment test passed")

    def test_disk_containment(self):
        disk = DiskShape(rational_point(0, 0), Fraction(1))
        self.assertEqual(disk.classify(rational_point(0, 0)), Containment.INSIDE)
        self.assertEqual(disk.classify(rational_point(1, 0)), Containment.BOUNDARY)
        self.assertEqual(disk.classify(rational_point(1, 1)), Containment.OUTSIDE)

    def test_band_of_two_points(self):
        a, b = PointShape(rational_point(0, 0)), PointShape(rational_point(2, 2))
        segment = band(a, b)
        self.assertEqual(segment.classify(rational_point(1, 1)), Containment.BOUNDARY)
        self.assertEqual(segment.classify(rational_point(1, 0)), Containment.OUTSIDE)
        self.assertIsInstance(band(a, a), PointShape)

    def test_band_with_sentinel(self):
        logger.info("🔧 Testing sentinel bands")
        p = PointShape(rational_point(1, 1))
        self.assertEqual(band(SentinelShape.LEFT, p), p)

        sweep = band(SentinelShape.LEFT, self.square)
        self.assertIsInstance(sweep, SweepShape)
        self.assertEqual(sweep.direction, SweepDirection.DOWN_LEFT)
        self.assertEqual(sweep.classify(rational_point(1, -50)), Containment.INSIDE)
        # the right end of a left sweep is open
        self.assertEqual(sweep.classify(rational_point(2, -50)), Containment.OUTSIDE)
        self.assertEqual(sweep.classify(rational_point(1, 3)), Containment.OUTSIDE)

        right = band(self.square, SentinelShape.RIGHT)
        self.assertEqual(right.direction, SweepDirection.DOWN_RIGHT)
        self.assertEqual(right.classify(rational_point(0, -50)), Containment.OUTSIDE)
        self.assertEqual(right.classify(rational_point(2, -50)), Containment.BOUNDARY)
        logger.info("✅ Sentinel band test passed")

    def test_point_sweep_holds_only_the_point(self):
        point = PointShape(rational_point(2, 2))
        for sentinel in (SentinelShape.LEFT, SentinelShape.RIGHT):
            sweep = band(sentinel, point) if sentinel == SentinelShape.LEFT else band(point, sentinel)
            self.assertEqual(vertex_in_shape(rational_point(0, 0), sweep), Containment.OUTSIDE)
            self.assertEqual(vertex_in_shape(rational_point(2, 0), sweep), Containment.OUTSIDE)
            self.assertEqual(vertex_in_shape(rational_point(2, 2), sweep), Containment.BOUNDARY)

    def test_band_of_two_sentinels_raises(self):
        with self.assertRaises(ShapeError):
            band(SentinelShape.LEFT, SentinelShape.RIGHT)

    def test_sweep_intersection(self):
        sweep = band(SentinelShape.LEFT, self.square)
        below = PolygonShape.from_points(
            [rational_point(1, -9), rational_point(3, -9), rational_point(3, -5)])
        self.assertTrue(convex_intersect(sweep, below))
        beside = PolygonShape.from_points(
            [rational_point(3, -9), rational_point(5, -9), rational_point(5, -5)])
        self.assertFalse(convex_intersect(sweep, beside))

    @hyp_settings(max_examples=150)
    @given(st.lists(points, min_size=3, max_size=6), st.lists(points, min_size=3, max_size=6))
    def test_intersection_matches_brute_force(self, first, second):
        hull_a, hull_b = convex_hull_ccw(first), convex_hull_ccw(second)
        if len(hull_a) < 3 or len(hull_b) < 3:
            return
        a, b = PolygonShape.from_points(first), PolygonShape.from_points(second)
        self.assertEqual(convex_intersect(a, b), _brute_intersect(a, b))


class TestDiskGeometry(unittest.TestCase):
    """Floating-point circle hulls and ply"""

    def setUp(self):
        self.circles = [Circle(1, 0.0, 0.0, 1.0), Circle(2, 3.5, 1.0, 1.0),
                        Circle(3, 7.0, -0.5, 2.0), Circle(4, 4.0, -3.0, 1.5)]

    def test_hull_dominates_sampled_boundaries(self):
        logger.info("🔧 Testing disk hull against sampled boundaries")
        chain = upper_hull_of_circles(self.circles)
        lookup = {c.rid: c for c in self.circles}
        lo, hi = float(chain[0].location.x), float(chain[-1].location.x)
        self.assertAlmostEqual(lo, -1.0, places=6)
        self.assertAlmostEqual(hi, 9.0, places=6)
        for circle in self.circles:
            for x, y in sample_boundary(circle, count=128):
                x = min(max(float(x), lo), hi)
                self.assertGreaterEqual(chain_upper_at(chain, lookup, x), float(y) - 1e-6)
        self.assertNotIn(4, {v.rid for v in chain})
        logger.info("✅ Disk hull test passed")

    def test_single_circle_hull(self):
        chain = upper_hull_of_circles([Circle(1, 0.0, 0.0, 2.0)])
        lookup = {1: Circle(1, 0.0, 0.0, 2.0)}
        self.assertAlmostEqual(chain_upper_at(chain, lookup, 0.0), 2.0, places=6)

    def test_depth_of_arrangement(self):
        logger.info("🔧 Testing arrangement depth")
        self.assertEqual(depth_of_arrangement([Circle(1, 0, 0, 1), Circle(2, 5, 0, 1)]), 1)
        self.assertEqual(depth_of_arrangement([Circle(1, 0, 0, 1), Circle(2, 2, 0, 1)]), 2)
        triple = [Circle(1, 0, 0, 1), Circle(2, 1, 0, 1), Circle(3, 0.5, 0.5, 1)]
        self.assertEqual(depth_of_arrangement(triple), 3)
        logger.info("✅ Arrangement depth test passed")


def run_geometry_tests():
    """Run the geometry suite with a summary"""
    print("=" * 80)
    print("Hull Reconstruction - Geometry Test Suite")
    print("=" * 80)

    test_classes = [TestPrimitives, TestUpperHull, TestBridge, TestShapes, TestDiskGeometry]
    suite = unittest.TestSuite()
    for test_class in test_classes:
        suite.addTests(unittest.TestLoader().loadTestsFromTestCase(test_class))

    result = unittest.TextTestRunner(verbosity=2, stream=sys.stdout).run(suite)
    print(f"Tests Run: {result.testsRun}  Failures: {len(result.failures)}  Errors: {len(result.errors)}")
    return result.wasSuccessful()


if __name__ == "__main__":
    sys.exit(0 if run_geometry_tests() else 1)
