"""
Disk Engine Testing Suite
Tests the circle chains, the median cut decomposition and the disk engine:
- Chain vertices, slab splits and bridges against gift-wrapped hulls
- Line hull trees under inserts and deletes
- Root hull against the gift-wrapped hull of every live region
- Unfolded node hulls against the hull of each subtree
- Retrievals, batches and scapegoat rebuilds keep the hull consistent
- Decomposition occupied test against the brute-force test
- Event index against a full event scan after every step
- Final order and lockstep with the naive executor
"""

import unittest
import sys
import os
import logging
import random

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from app.config import CaseTag, settings
from app.exceptions import StructureError
from app.geometry.circle_chains import CircleChain, bridge, split_after, split_before
from app.geometry.disks import Circle, upper_hull_of_circles
from app.regions.family import RetrievalOracle
from app.classify.edges import occupied_witness
from app.classify.chains import candidate_chains_containing, is_spanning
from app.classify.outer_hull import disk_circles, outer_hull
from app.classify.witness import collect_events
from app.structures.hull_events import OCCUPIED, SPANNING
from app.structures.mcd import LineHullTree, ScapegoatPolicy, build_mcd
from app.strategies.disk_engine import DiskEngine, disk_occupied_test, disk_spanning_test, run_disk
from app.strategies.naive import run_naive
from app.strategies.oracle import brute_force_r, hull_order_of
from app.harness.generators import gen
from app.harness.instance_io import load_family

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("test_disk_engine")

CASES = [
    ("disjoint-disks", 8, 2, 1),
    ("disjoint-disks", 12, 3, 2),
    ("unit-ply", 8, 2, 3),
    ("unit-ply", 10, 3, 4),
]


def random_circles(seed: int, count: int = 9, spread: float = 20.0):
    rng = random.Random(seed)
    return [Circle(rid, rng.uniform(0, spread), rng.uniform(0, spread), rng.uniform(0.2, 2.0))
            for rid in range(1, count + 1)]


def subtree_hull(mcd, node):
    return CircleChain.hull_of([mcd.circles[rid] for rid in node.subtree_ids()])


class HullAssertions:
    """Hull comparisons tolerant to float tangent points"""

    def assertSameVertices(self, actual, expected):
        self.assertEqual([v.rid for v in actual], [v.rid for v in expected])
        for a, b in zip(actual, expected):
            self.assertAlmostEqual(float(a.location.x), float(b.location.x), places=6)
            self.assertAlmostEqual(float(a.location.y), float(b.location.y), places=6)
            self.assertEqual(a.arc_to_next, b.arc_to_next)

    def assertSameHullChain(self, actual, expected):
        self.assertEqual(len(actual), len(expected))
        for a, b in zip(actual, expected):
            self.assertEqual(a.record.regions, b.record.regions)
            self.assertEqual(a.arc_to_next, b.arc_to_next)
            if a.location is None or b.location is None:
                self.assertEqual(a.location, b.location)
                continue
            self.assertAlmostEqual(float(a.location.x), float(b.location.x), places=6)
            self.assertAlmostEqual(float(a.location.y), float(b.location.y), places=6)


class TestCircleChains(unittest.TestCase, HullAssertions):
    """Chains, slab splits and bridges"""

    def test_vertices_match_gift_wrapping(self):
        logger.info("🔧 Testing circle chain vertices")
        for seed in range(6):
            circles = random_circles(seed)
            chain = CircleChain.hull_of(circles)
            self.assertSameVertices(chain.vertices(), upper_hull_of_circles(circles))
            self.assertAlmostEqual(chain.min_x, min(c.min_x for c in circles), places=9)
            self.assertAlmostEqual(chain.max_x, max(c.max_x for c in circles), places=9)
        logger.info("✅ Circle chain vertex test passed")

    def test_identical_circles_keep_smallest_id(self):
        chain = CircleChain.hull_of([Circle(4, 0.0, 0.0, 1.0), Circle(2, 0.0, 0.0, 1.0)])
        self.assertEqual(chain.rids, (2,))

    def test_slab_splits_partition_the_chain(self):
        chain = CircleChain.hull_of(random_circles(3, count=12))
        for boundary in (2.0, 8.0, 15.0):
            before, rest = split_before(chain, boundary)
            self.assertEqual(before.rids + rest.rids, chain.rids)
            for c, exit_ in zip(before.circles, before.exits):
                self.assertLess(c.point_at(exit_).x, boundary)
            head, after = split_after(chain, boundary)
            self.assertEqual(head.rids + after.rids, chain.rids)
            for c, entry in zip(after.circles, after.entries):
                self.assertGreater(c.point_at(entry).x, boundary)

    def test_bridge_of_separated_hulls(self):
        logger.info("🔧 Testing bridges")
        for seed in range(8):
            left = random_circles(seed, count=6, spread=10.0)
            right = [Circle(c.rid + 100, c.cx + 15.0, c.cy, c.r) for c in random_circles(seed + 50, 6, 10.0)]
            first, second = CircleChain.hull_of(left), CircleChain.hull_of(right)
            kept, start = bridge(first, second)
            merged = CircleChain.from_circles(first.circles[:kept] + second.circles[start:])
            self.assertSameVertices(merged.vertices(), CircleChain.hull_of(left + right).vertices())
        logger.info("✅ Bridge test passed")

    def test_bridge_with_empty_side(self):
        chain = CircleChain.hull_of(random_circles(1))
        self.assertEqual(bridge(CircleChain(), chain), (0, 0))
        self.assertEqual(bridge(chain, CircleChain()), (len(chain), 0))

    def test_height_function(self):
        circle = Circle(1, 0.0, 0.0, 2.0)
        height = CircleChain.from_circles([circle]).height_function()
        self.assertAlmostEqual(height(0.0), 2.0, places=9)
        self.assertAlmostEqual(height(1.0), circle.upper_y(1.0), places=9)


class TestLineHullTree(unittest.TestCase, HullAssertions):
    """Top-to-bottom trees of the regions crossing one line"""

    def test_updates_keep_hull(self):
        logger.info("🔧 Testing line hull trees")
        circles = random_circles(11, count=10)
        tree = LineHullTree(circles[:4])
        live = list(circles[:4])
        for c in circles[4:]:
            tree.insert(c)
            live.append(c)
            self.assertSameVertices(tree.hull.vertices(), CircleChain.hull_of(live).vertices())
        for c in circles[::3]:
            tree.delete(c.rid)
            live.remove(c)
            self.assertSameVertices(tree.hull.vertices(), CircleChain.hull_of(live).vertices())
        self.assertEqual(len(tree), len(live))
        self.assertEqual(sorted(tree.ids()), sorted(c.rid for c in live))
        self.assertEqual(tree.ids(), [c.rid for c in sorted(live, key=lambda c: (-c.cy, c.rid))])
        logger.info("✅ Line hull tree test passed")

    def test_search_prunes_by_hull(self):
        circles = [Circle(1, 0.0, 10.0, 1.0), Circle(2, 0.5, 0.0, 1.0), Circle(3, 1.0, -10.0, 1.0)]
        tree = LineHullTree(circles)
        self.assertEqual(sorted(tree.search(lambda chain: True)), [1, 2, 3])
        self.assertEqual(sorted(tree.search(lambda chain: chain.min_x < 0)), [1, 2])
        self.assertEqual(tree.search(lambda chain: chain.max_x > 100), [])

    def test_structure_errors(self):
        tree = LineHullTree([Circle(1, 0.0, 0.0, 1.0)])
        with self.assertRaises(StructureError):
            tree.insert(Circle(1, 0.0, 0.0, 1.0))
        with self.assertRaises(StructureError):
            tree.delete(7)
        tree.delete(1)
        self.assertFalse(tree.hull)


class TestMedianCutDecomposition(unittest.TestCase, HullAssertions):
    """Hull maintenance inside the decomposition"""

    def assertConsistent(self, mcd, f):
        self.assertSameHullChain(list(mcd.hull_chain()), list(outer_hull(f)))
        self.assertEqual(sorted(mcd.root.subtree_ids()), list(f.ids))
        self.assertEqual(list(mcd.root_queue), [node.location for node in list(mcd.hull_chain())[1:-1]])

    def test_root_hull_matches_scratch(self):
        logger.info("🔧 Testing the decomposition root hull")
        for kind, n, k, seed in CASES:
            with self.subTest(kind=kind, seed=seed):
                f, _ = load_family(gen(kind, n, k, seed))
                mcd = build_mcd(f)
                self.assertSameVertices(mcd.root_hull().vertices(),
                                        upper_hull_of_circles(disk_circles(f, f.ids)))
                self.assertConsistent(mcd, f)
                self.assertLessEqual(mcd.max_slab_edges(), settings.SLAB_CHAIN_FACTOR * k)
        logger.info("✅ Root hull test passed")

    def test_unfolded_hulls_match_subtrees(self):
        logger.info("🔧 Testing top-down unfolding")
        for kind, n, k, seed in CASES:
            f, hidden = load_family(gen(kind, n, k, seed))
            mcd = build_mcd(f)
            for rid in list(f.ids)[: n // 2]:
                if not f.is_point(rid):
                    f.apply_retrieval(rid, hidden.points[rid])
                    mcd.retrieve(rid, hidden.points[rid])
            hulls = mcd.full_hulls()
            for node in mcd.nodes():
                self.assertSameVertices(hulls[id(node)].vertices(), subtree_hull(mcd, node).vertices())
        logger.info("✅ Unfolding test passed")

    def test_retrievals_keep_hull(self):
        logger.info("🔧 Testing retrievals and rebuilds")
        rebuilds = 0
        for kind, n, k, seed in CASES + [("disjoint-disks", 12, 2, 5), ("unit-ply", 12, 2, 6)]:
            with self.subTest(kind=kind, seed=seed):
                f, hidden = load_family(gen(kind, n, k, seed))
                mcd = build_mcd(f, ScapegoatPolicy(alpha=0.5, min_size=2))
                for rid in f.ids:
                    if f.is_point(rid):
                        continue
                    f.apply_retrieval(rid, hidden.points[rid])
                    stat = mcd.retrieve(rid, hidden.points[rid])
                    self.assertGreaterEqual(stat.changed_bridges, 0)
                    self.assertConsistent(mcd, f)
                self.assertEqual(mcd.hull_chain().region_order(), hull_order_of(hidden))
                rebuilds += mcd.rebuilds
        self.assertGreater(rebuilds, 0)
        logger.info(f"✅ Retrieval test passed with {rebuilds} rebuilds")

    def test_batch_applied_to_family_first(self):
        logger.info("🔧 Testing batched retrievals")
        for kind, n, k, seed in CASES:
            with self.subTest(kind=kind, seed=seed):
                f, hidden = load_family(gen(kind, n, k, seed))
                mcd = build_mcd(f, ScapegoatPolicy(alpha=0.5, min_size=2))
                pending = [rid for rid in f.ids if not f.is_point(rid)]
                while pending:
                    batch, pending = pending[:2], pending[2:]
                    for rid in batch:
                        f.apply_retrieval(rid, hidden.points[rid])
                    for rid in batch:
                        mcd.retrieve(rid, hidden.points[rid])
                    self.assertConsistent(mcd, f)
        logger.info("✅ Batched retrieval test passed")

    def test_rebuild_equals_fresh_build(self):
        f, hidden = load_family(gen("unit-ply", 10, 3, 4))
        mcd = build_mcd(f)
        for rid in list(f.ids)[:5]:
            if not f.is_point(rid):
                f.apply_retrieval(rid, hidden.points[rid])
                mcd.retrieve(rid, hidden.points[rid])
        mcd.rebuild(mcd.root)
        fresh = build_mcd(f)
        self.assertEqual(mcd.signature(), fresh.signature())
        self.assertGreaterEqual(mcd.rebuilds, 1)

    def test_unknown_region_raises(self):
        f, hidden = load_family(gen("disjoint-disks", 6, 2, 1))
        mcd = build_mcd(f)
        rid = next(rid for rid in f.ids if not f.is_point(rid))
        with self.assertRaises(StructureError):
            mcd.retrieve(max(f.ids) + 100, hidden.points[rid])

    def test_descent_without_pruning_reaches_every_region(self):
        f, _ = load_family(gen("unit-ply", 10, 3, 4))
        mcd = build_mcd(f)
        self.assertEqual(sorted(mcd.regions_meeting(lambda chain: True)), list(f.ids))

    def test_polygon_family_rejected(self):
        f, _ = load_family(gen("kgons", 4, 4))
        with self.assertRaises(StructureError):
            build_mcd(f)


class TestDiskEngine(unittest.TestCase):
    """Disk engine against the naive executor"""

    def test_occupied_tests_agree(self):
        logger.info("🔧 Testing the decomposition occupied test")
        for kind, n, k, seed in CASES:
            f, hidden = load_family(gen(kind, n, k, seed))
            mcd = build_mcd(f)
            for rid in list(f.ids)[::3]:
                if not f.is_point(rid):
                    f.apply_retrieval(rid, hidden.points[rid])
                    mcd.retrieve(rid, hidden.points[rid])
            nodes = list(mcd.hull_chain())
            for s, t in zip(nodes, nodes[1:]):
                if s.arc_to_next:
                    continue
                self.assertEqual(disk_occupied_test(mcd, s.record, t.record),
                                 occupied_witness(f, s.record, t.record))
            for s in nodes[:3]:
                for t in nodes[-3:]:
                    if not s.is_sentinel and not t.is_sentinel and s.owner != t.owner \
                            and s.location.x < t.location.x:
                        self.assertEqual(disk_occupied_test(mcd, s.record, t.record),
                                         occupied_witness(f, s.record, t.record))
        logger.info("✅ Decomposition occupied test passed")

    def test_spanning_tests_agree(self):
        for kind, n, k, seed in CASES:
            f, _ = load_family(gen(kind, n, k, seed))
            hull = outer_hull(f)
            for e in hull.edges():
                for chain in candidate_chains_containing(f, hull, e.index):
                    self.assertEqual(disk_spanning_test(f, hull, chain), is_spanning(f, hull, chain))

    def test_event_index_matches_full_scan(self):
        logger.info("🔧 Testing the root event index")
        for kind, n, k, seed in CASES:
            with self.subTest(kind=kind, seed=seed):
                f, hidden = load_family(gen(kind, n, k, seed))
                engine = DiskEngine(f, RetrievalOracle(hidden))
                while True:
                    events = collect_events(f, outer_hull(f), exhaustive=True,
                                            chain_test=disk_spanning_test)
                    for kind_name, case in ((OCCUPIED, CaseTag.OCCUPIED), (SPANNING, CaseTag.SPANNING)):
                        live = [(w.regions, w.occupant) for w in engine.events.live_events(kind_name)]
                        expected = [(w.regions, w.occupant) for w in sorted(events[case], key=lambda w: w.key)]
                        self.assertEqual(live, expected)
                    if engine.step() is None:
                        break
        logger.info("✅ Event index test passed")

    def test_final_order_and_lockstep(self):
        logger.info("🔧 Testing the disk engine end to end")
        cases = CASES + [(kind, 7, 2, seed) for kind in ("disjoint-disks", "unit-ply") for seed in range(10, 16)]
        for kind, n, k, seed in cases:
            with self.subTest(kind=kind, seed=seed):
                f, hidden = load_family(gen(kind, n, k, seed))
                expected = run_naive(f.copy(), RetrievalOracle(hidden))
                report = run_disk(f.copy(), RetrievalOracle(hidden))
                self.assertEqual(report.order, hull_order_of(hidden))
                self.assertEqual([s.to_dict() for s in report.steps],
                                 [s.to_dict() for s in expected.steps])
                self.assertEqual(len(report.recourse), report.retrievals)
                if n <= 8:
                    self.assertLessEqual(report.retrievals, 3 * brute_force_r(f, hidden))
        logger.info("✅ Disk engine test passed")

    def test_engine_reports_structure_sizes(self):
        f, hidden = load_family(gen("unit-ply", 6, 2, 9))
        engine = DiskEngine(f, RetrievalOracle(hidden), audit=True)
        self.assertGreaterEqual(engine.mcd.height(), 1)
        report = engine.run()
        self.assertLessEqual(report.iterations, report.retrievals)
        self.assertIsNone(engine.events.top_event())


def run_disk_engine_tests():
    """Run the disk engine suite with a summary"""
    print("=" * 80)
    print("Hull Reconstruction - Disk Engine Test Suite")
    print("=" * 80)

    suite = unittest.TestSuite()
    for test_class in [TestCircleChains, TestLineHullTree, TestMedianCutDecomposition, TestDiskEngine]:
        suite.addTests(unittest.TestLoader().loadTestsFromTestCase(test_class))

    result = unittest.TextTestRunner(verbosity=2, stream=sys.stdout).run(suite)
    print(f"Tests Run: {result.testsRun}  Failures: {len(result.failures)}  Errors: {len(result.errors)}")
    return result.wasSuccessful()


if __name__ == "__main__":
    sys.exit(0 if run_disk_engine_tests() else 1)
