"""
Classification Testing Suite
Tests outer hulls, edge labels and witness extraction:
- Outer hull of the five-region example and its region order
- Edge classes (non-canonical, non-dividing, dividing) and occupancy
- Case priority: nonCanonical, nonDividing, occupied, spanning
- Hit chains on nested rectangles
- Terminal families
"""

import unittest
import sys
import os
import logging

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from app.config import CaseTag, FamilyMode
from app.exceptions import StructureError
from app.geometry.primitives import rational_point as P
from app.regions.family import Realization, RegionDesc, build_family, vertex_set
from app.classify.chains import (
    ChainKind, ChainLabel, block_around, candidate_chains_containing, hit_chain_frame, is_hit, links_dividing,
)
from app.classify.edges import EdgeClass, band_of, classify_edge, occupied_witness, region_occupies
from app.classify.outer_hull import HullEdge, outer_hull
from app.classify.witness import collect_events, extract_witness, hit_chains, is_terminal
from app.geometry.shapes import Containment, vertex_in_shape
from app.regions.family import RetrievalOracle
from app.regions.sampling import sample_realization
from app.strategies.naive import NaiveEngine
from app.strategies.oracle import hull_order_of
from app.harness.generators import gen
from app.harness.instance_io import load_family

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("test_classify")


def spanning_family():
    """A triangle reaching below the segment between two point regions"""
    descs = [
        RegionDesc.point_region(1, P(0, 0)),
        RegionDesc.polygon(2, [P(1, -5), P(3, -5), P(2, 3)]),
        RegionDesc.point_region(3, P(4, 0)),
    ]
    hidden = Realization.from_pairs([(1, (0, 0)), (2, (2, 0)), (3, (4, 0))])
    return build_family(descs, FamilyMode.KGON, 4), hidden


class TestOuterHull(unittest.TestCase):
    """Outer hull and edge labels on the five-region example"""

    def setUp(self):
        self.family, self.hidden = load_family(gen("five-regions", 5, 4))
        self.hull = outer_hull(self.family)

    def test_hull_vertices(self):
        logger.info("🔧 Testing outer hull of the five-region example")
        self.assertEqual(self.hull.locations(), [P(0, 0), P(1, 4), P(3, 4), P(7, 1)])
        self.assertEqual(self.hull.region_order(), [1, 3, 4])
        self.assertTrue(self.hull[0].is_sentinel)
        self.assertTrue(self.hull[-1].is_sentinel)
        logger.info("✅ Outer hull test passed")

    def test_edge_classes(self):
        logger.info("🔧 Testing edge classes")
        labels = [classify_edge(self.family, self.hull, e) for e in self.hull.edges()]
        values = [label.value for label in labels]
        self.assertEqual(values[3], EdgeClass.NON_DIVIDING)
        self.assertEqual(values.count(EdgeClass.NON_DIVIDING), 1)
        self.assertTrue(all(not label.occupied for label in labels))
        logger.info("✅ Edge class test passed")

    def test_foreign_edge_raises(self):
        with self.assertRaises(StructureError):
            classify_edge(self.family, self.hull, HullEdge(self.hull[0], self.hull[2], 0))

    def test_non_dividing_witness(self):
        logger.info("🔧 Testing the non-dividing witness")
        witness = extract_witness(self.family)
        self.assertEqual(witness.case, CaseTag.NON_DIVIDING)
        self.assertEqual(witness.regions, (3, 4))
        logger.info("✅ Non-dividing witness test passed")

    def test_terminal_after_retrieval(self):
        g = self.family.with_retrievals(self.hidden, [3, 4])
        self.assertTrue(is_terminal(g))
        self.assertEqual(outer_hull(g).region_order(), [1, 3, 2, 4])
        self.assertFalse(is_terminal(self.family))


class TestCasePriority(unittest.TestCase):
    """Witness cases beyond the non-dividing one"""

    def test_non_canonical_vertex(self):
        logger.info("🔧 Testing a shared hull vertex")
        descs = [
            RegionDesc.polygon(1, [P(0, 0), P(2, 0), P(2, 2), P(0, 2)]),
            RegionDesc.polygon(2, [P(2, 0), P(4, 0), P(4, 2), P(2, 2)]),
        ]
        f = build_family(descs, FamilyMode.KGON, 4)
        self.assertIn(P(2, 2), outer_hull(f).locations())
        witness = extract_witness(f)
        self.assertEqual(witness.case, CaseTag.NON_CANONICAL)
        self.assertEqual(witness.regions, (1, 2))
        logger.info("✅ Non-canonical witness test passed")

    def test_occupied_by_nested_rectangle(self):
        logger.info("🔧 Testing an occupied sentinel edge")
        f, _ = load_family(gen("nested", 3, 4))
        hull = outer_hull(f)
        self.assertEqual(hull.locations(), [P(-3, 3), P(3, 3)])
        witness = extract_witness(f)
        self.assertEqual(witness.case, CaseTag.OCCUPIED)
        self.assertEqual(witness.regions, (1, 2))
        self.assertEqual(witness.occupant, 2)

        chains = hit_chains(f, hull)
        self.assertEqual(len(chains), 2)
        self.assertEqual(chains[0].kind, ChainKind.HIT)
        self.assertEqual(chains[0].middle, 0)
        logger.info("✅ Occupied witness test passed")

    def test_occupied_witness_smallest_id(self):
        f, _ = load_family(gen("nested", 4, 4))
        hull = outer_hull(f)
        s, t = hull[0].record, hull[1].record
        self.assertEqual(occupied_witness(f, s, t, vertex_set(f)), 2)

    def test_spanning_chain(self):
        logger.info("🔧 Testing a spanning chain")
        f, hidden = spanning_family()
        self.assertEqual(outer_hull(f).locations(), [P(0, 0), P(2, 3), P(4, 0)])
        events = collect_events(f, outer_hull(f), exhaustive=True)
        self.assertEqual(events[CaseTag.OCCUPIED], [])
        witness = extract_witness(f)
        self.assertEqual(witness.case, CaseTag.SPANNING)
        self.assertEqual(witness.regions, (1, 2, 3))
        self.assertTrue(is_terminal(f.with_retrievals(hidden, [2])))
        logger.info("✅ Spanning chain test passed")

    def test_point_family_is_terminal(self):
        descs = [RegionDesc.point_region(i + 1, p) for i, p in enumerate(
            [P(0, 0), P(1, 2), P(3, 3), P(5, 2), P(6, 0), P(3, 1)])]
        f = build_family(descs, FamilyMode.KGON, 4)
        self.assertTrue(is_terminal(f))
        self.assertEqual(outer_hull(f).region_order(), [1, 2, 3, 4, 5])


def brute_force_candidates(f, hull, i):
    """Every subchain containing edge i that is a block of one region with two foreign flanks"""
    found = []
    for start in range(0, i + 1):
        for end in range(i + 1, len(hull)):
            if end - start < 2:
                continue
            inner = [hull[j] for j in range(start + 1, end)]
            if any(n.is_sentinel or not n.record.is_canonical for n in inner):
                continue
            owners = {n.owner for n in inner}
            if len(owners) != 1:
                continue
            b = owners.pop()
            if b in hull[start].record.regions or b in hull[end].record.regions:
                continue
            if links_dividing(f, hull, start, end):
                found.append((start, end))
    return sorted(found)


class TestChains(unittest.TestCase):
    """Candidate and hit chains against exhaustive definitions"""

    def test_candidates_match_every_subchain(self):
        logger.info("🔧 Testing candidate chains against all subchains")
        cases = [("five-regions", 5, 4, 0), ("kgons", 10, 4, 3), ("triangles", 9, 3, 2),
                 ("disjoint-disks", 8, 2, 1), ("unit-ply", 8, 2, 3)]
        for kind, n, k, seed in cases:
            f, hidden = load_family(gen(kind, n, k, seed))
            engine = NaiveEngine(f, RetrievalOracle(hidden))
            while True:
                hull = outer_hull(f)
                for i in range(len(hull) - 1):
                    chains = candidate_chains_containing(f, hull, i)
                    self.assertEqual(sorted((c.start, c.end) for c in chains),
                                     brute_force_candidates(f, hull, i))
                    for c in chains:
                        self.assertEqual(block_around(hull, c.start + 1), (c.start + 1, c.end - 1))
                if engine.step() is None:
                    break
        logger.info("✅ Candidate chain test passed")

    def test_is_hit_on_constructed_chains(self):
        logger.info("🔧 Testing hit chain recognition")
        f, _ = load_family(gen("nested", 3, 4))
        hull = outer_hull(f)
        chains = hit_chains(f, hull)
        for chain in chains:
            self.assertTrue(is_hit(f, hull, chain))
            self.assertEqual(hit_chain_frame(f, hull, chain.middle), chain)
        first = chains[0]
        self.assertFalse(is_hit(f, hull, ChainLabel(ChainKind.HIT, first.start, first.end, first.regions)))
        self.assertFalse(is_hit(f, hull, ChainLabel(ChainKind.HIT, first.start, first.end + 1,
                                                    first.regions, middle=first.middle)))

        g, _ = load_family(gen("five-regions", 5, 4))
        five = outer_hull(g)
        for e in five.edges():
            frame = hit_chain_frame(g, five, e.index)
            if frame is not None:
                self.assertFalse(is_hit(g, five, frame))
        logger.info("✅ Hit chain test passed")


class TestTermination(unittest.TestCase):
    """A family is finished exactly when no case fires"""

    def test_terminal_families_are_finished(self):
        logger.info("🔧 Testing terminal families against sampled realizations")
        for kind, n, k, seed in [("kgons", 8, 4, 1), ("nested-spread", 6, 4, 2),
                                 ("disjoint-disks", 6, 2, 3), ("unit-ply", 6, 2, 4)]:
            f, hidden = load_family(gen(kind, n, k, seed))
            NaiveEngine(f, RetrievalOracle(hidden)).run()
            self.assertTrue(is_terminal(f))
            expected = hull_order_of(hidden)
            for sample_seed in range(5):
                sampled = sample_realization(f, sample_seed).points
                points = {rid: f.region(rid).point if f.is_point(rid) else sampled[rid] for rid in f.ids}
                self.assertEqual(hull_order_of(Realization(points)), expected)
        logger.info("✅ Terminal family test passed")

    def test_unfinished_family_is_not_terminal(self):
        f, _ = spanning_family()
        above = Realization.from_pairs([(1, (0, 0)), (2, (2, 2)), (3, (4, 0))])
        below = Realization.from_pairs([(1, (0, 0)), (2, (2, -4)), (3, (4, 0))])
        self.assertNotEqual(hull_order_of(above), hull_order_of(below))
        self.assertFalse(is_terminal(f))


class TestSentinelBands(unittest.TestCase):
    """Band tests on edges that end at a sentinel"""

    def test_region_occupies_with_sentinel_endpoint(self):
        logger.info("🔧 Testing sentinel edges in disk mode")
        f, hidden = load_family(gen("unit-ply", 8, 2, 3))
        for rid in list(f.ids)[::2]:
            f.apply_retrieval(rid, hidden.points[rid])
        hull = outer_hull(f)
        for s, t in ((hull[0], hull[1]), (hull[-2], hull[-1])):
            shape = band_of(f, s.owner, t.owner)
            for rid in f.ids:
                if rid in (s.owner, t.owner) or not f.is_point(rid):
                    continue
                p = f.region(rid).point
                inside = vertex_in_shape(p, shape) != Containment.OUTSIDE
                near_end = any(n.location == p for n in (s, t))
                self.assertEqual(region_occupies(f, shape, s.record, t.record, rid), inside and not near_end)
            occupied_witness(f, s.record, t.record)
        logger.info("✅ Sentinel band test passed")


def run_classify_tests():
    """Run the classification suite with a summary"""
    print("=" * 80)
    print("Hull Reconstruction - Classification Test Suite")
    print("=" * 80)

    suite = unittest.TestSuite()
    for test_class in [TestOuterHull, TestCasePriority, TestChains, TestTermination, TestSentinelBands]:
        suite.addTests(unittest.TestLoader().loadTestsFromTestCase(test_class))

    result = unittest.TextTestRunner(verbosity=2, stream=sys.stdout).run(suite)
    print(f"Tests Run: {result.testsRun}  Failures: {len(result.failures)}  Errors: {len(result.errors)}")
    return result.wasSuccessful()


if __name__ == "__main__":
    sys.exit(0 if run_classify_tests() else 1)
