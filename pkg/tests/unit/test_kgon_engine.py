"""
Polygon Engine Testing Suite
Tests the baseline and fast polygon engines:
- Lockstep with the naive executor on every polygon instance class
- Copy-tree occupied test against the brute-force occupied test
- Id-partitioned copies hold exactly the regions with the matching id bit
- Recourse of the hull tree per vertex update
"""

import unittest
import sys
import os
import logging
import math

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from app.exceptions import EngineModeError
from app.regions.family import RetrievalOracle, vertex_set
from app.classify.edges import occupied_witness
from app.config import CaseTag
from app.classify.chains import candidate_chains_containing
from app.classify.outer_hull import outer_hull
from app.classify.witness import collect_events
from app.structures.hull_events import OCCUPIED, SPANNING
from app.strategies.kgon_engine import KgonEngine, preprocess, run_kgon
from app.strategies.naive import run_naive
from app.strategies.oracle import brute_force_r, hull_order_of
from app.harness.generators import gen
from app.harness.instance_io import load_family

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("test_kgon_engine")

CASES = [
    ("five-regions", 5, 4, 0),
    ("nested", 5, 4, 0),
    ("nested-spread", 6, 4, 1),
    ("triangles", 10, 3, 2),
    ("kgons", 12, 4, 3),
    ("kgons", 12, 6, 4),
    ("points", 8, 4, 5),
]


class TestLockstep(unittest.TestCase):
    """Polygon engines replay the naive executor step by step"""

    def test_engines_match_naive(self):
        logger.info("🔧 Testing lockstep with the naive executor")
        for kind, n, k, seed in CASES:
            with self.subTest(kind=kind, seed=seed):
                f, hidden = load_family(gen(kind, n, k, seed))
                expected = run_naive(f.copy(), RetrievalOracle(hidden))
                for fast in (False, True):
                    report = run_kgon(f.copy(), RetrievalOracle(hidden), fast=fast)
                    self.assertEqual([s.to_dict() for s in report.steps],
                                     [s.to_dict() for s in expected.steps])
                    self.assertEqual(report.retrievals, expected.retrievals)
                    self.assertEqual(report.order, hull_order_of(hidden))
        logger.info("✅ Lockstep test passed")

    def test_many_seeds_within_factor_three(self):
        logger.info("🔧 Testing lockstep over many seeds")
        for kind, k in (("kgons", 4), ("triangles", 3), ("nested-spread", 4)):
            for seed in range(20, 28):
                with self.subTest(kind=kind, seed=seed):
                    f, hidden = load_family(gen(kind, 7, k, seed))
                    expected = run_naive(f.copy(), RetrievalOracle(hidden))
                    optimum = brute_force_r(f, hidden)
                    for fast in (False, True):
                        report = run_kgon(f.copy(), RetrievalOracle(hidden), fast=fast)
                        self.assertEqual([s.to_dict() for s in report.steps],
                                         [s.to_dict() for s in expected.steps])
                        self.assertLessEqual(report.lower_bound, optimum)
                        self.assertLessEqual(report.retrievals, 3 * optimum)
        logger.info("✅ Many-seed lockstep test passed")

    def test_recourse_per_update(self):
        f, hidden = load_family(gen("kgons", 16, 4, 8))
        bound = 4 * math.ceil(math.log2(len(vertex_set(f)) + f.n))
        report = run_kgon(f, RetrievalOracle(hidden), fast=True)
        if report.retrievals:
            self.assertTrue(report.recourse)
        self.assertTrue(all(c <= bound for c in report.recourse))

    def test_disk_family_rejected(self):
        f, hidden = load_family(gen("disjoint-disks", 4, 2))
        with self.assertRaises(EngineModeError):
            KgonEngine(f, RetrievalOracle(hidden))


class TestFastStructures(unittest.TestCase):
    """Copy trees and the occupied tests built on them"""

    def setUp(self):
        self.family, self.hidden = load_family(gen("kgons", 12, 4, 6))
        self.engine = preprocess(self.family, RetrievalOracle(self.hidden), fast=True, audit=True)

    def test_root_hull_matches_outer_hull(self):
        view = list(self.engine.tree.view())
        self.assertEqual([node.location for node in view[1:-1]], outer_hull(self.family).locations())

    def test_occupied_tests_agree(self):
        logger.info("🔧 Testing the copy-tree occupied test")
        families = [(self.family, self.hidden), load_family(gen("nested", 6, 4))]
        for f, hidden in families:
            engine = KgonEngine(f, RetrievalOracle(hidden), fast=True)
            records = vertex_set(f)
            nodes = list(engine.tree.view())
            for s, t in zip(nodes, nodes[1:]):
                expected = occupied_witness(f, s.record, t.record, records)
                self.assertEqual(engine.fast_occupied_test(s.record, t.record), expected)
                self.assertEqual(engine.occupied_test(s.record, t.record), expected)
            for s in records[:6]:
                for t in records[-6:]:
                    if s.location.x < t.location.x:
                        self.assertEqual(engine.fast_occupied_test(s, t),
                                         occupied_witness(f, s, t, records))
        logger.info("✅ Copy-tree occupied test passed")

    def test_event_index_matches_full_scan(self):
        logger.info("🔧 Testing the root event index")
        for kind, n, k, seed in CASES:
            for fast in (False, True):
                with self.subTest(kind=kind, seed=seed, fast=fast):
                    f, hidden = load_family(gen(kind, n, k, seed))
                    engine = preprocess(f, RetrievalOracle(hidden), fast=fast)
                    while True:
                        events = collect_events(f, outer_hull(f), exhaustive=True)
                        for name, case in ((OCCUPIED, CaseTag.OCCUPIED), (SPANNING, CaseTag.SPANNING)):
                            self.assertEqual(engine.tree.events.live_events(name),
                                             sorted(events[case], key=lambda w: w.key))
                        if engine.step() is None:
                            break
        logger.info("✅ Event index test passed")

    def test_fast_candidate_lookup_matches_baseline(self):
        f, hidden = self.family.copy(), self.hidden
        engine = preprocess(f, RetrievalOracle(hidden), fast=True)
        while True:
            view = engine.tree.view()
            for i in range(len(view) - 1):
                self.assertEqual(engine.fast_candidate_lookup(view, i),
                                 candidate_chains_containing(f, view, i))
            if engine.step() is None:
                break

    def test_copy_membership(self):
        logger.info("🔧 Testing id-partitioned copies")
        membership = self.engine.copy_membership()
        self.assertEqual(len(membership), 2 * self.engine.bits)
        for (bit, value), ids in membership.items():
            expected = {rid for rid in self.family.ids if (rid >> bit) & 1 == value}
            self.assertEqual(ids, expected)
        logger.info("✅ Id-partitioned copy test passed")

    def test_copies_follow_retrievals(self):
        self.engine.run()
        for (bit, value), ids in self.engine.copy_membership().items():
            self.assertEqual(ids, {rid for rid in self.family.ids if (rid >> bit) & 1 == value})


def run_kgon_engine_tests():
    """Run the polygon engine suite with a summary"""
    print("=" * 80)
    print("Hull Reconstruction - Polygon Engine Test Suite")
    print("=" * 80)

    suite = unittest.TestSuite()
    for test_class in [TestLockstep, TestFastStructures]:
        suite.addTests(unittest.TestLoader().loadTestsFromTestCase(test_class))

    result = unittest.TextTestRunner(verbosity=2, stream=sys.stdout).run(suite)
    print(f"Tests Run: {result.testsRun}  Failures: {len(result.failures)}  Errors: {len(result.errors)}")
    return result.wasSuccessful()


if __name__ == "__main__":
    sys.exit(0 if run_kgon_engine_tests() else 1)
