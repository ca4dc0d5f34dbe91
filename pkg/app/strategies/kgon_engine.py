"""
Polygon Reconstruction Engine
- Baseline: the augmented partial hull tree over the vertex set drives the strategy;
  occupied edges shadow-delete their endpoints and descend the tree, entering
  only nodes whose hull region meets the band
- Fast: adds per-region hulls, one hull tree per (id bit, value) copy of the
  family for the occupied test, and compressed candidate runs for chain lookup
- Both modes select witnesses exactly like the naive executor
"""

import logging
from bisect import bisect_right, insort
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from app.config import FamilyMode
from app.geometry.primitives import Point, midpoint, y_on_line
from app.geometry.shapes import Containment, PointShape, SweepShape, band, vertex_in_shape
from app.regions.family import Family, RetrievalOracle, VertexRecord, vertex_set
from app.classify.chains import ChainLabel, candidate_chain, candidate_chains_containing
from app.classify.edges import band_of
from app.classify.outer_hull import HullChain, HullNode
from app.classify.witness import WitnessSet
from app.structures.concatenable_queue import ConcatenableQueue
from app.structures.hull_events import RootHullView
from app.structures.pht import AugmentedHullTree, PartialHullTree, RecourseStat
from app.strategies.base import ReconstructionEngine, RunReport

logger = logging.getLogger("kgon_engine")

Window = Tuple[Optional[object], Optional[object]]
OPEN: Window = (None, None)


def hull_y(hull: ConcatenableQueue, x):
    """Height of an upper hull at x inside its range"""
    i = hull.bisect_left_x(x)
    if i < len(hull) and hull[i].x == x:
        return hull[i].y
    return y_on_line(hull[i - 1], hull[i], x)


def band_meets_hull(shape, hull: ConcatenableQueue, lo, hi, window: Window = OPEN) -> bool:
    """
    The band meets the region on or below `hull` between lo and hi, inside the window

    Args:
        shape: exact band (point, polygon or sweep)
        hull: upper hull of the points searched, as a queue
        lo, hi: x-extent of those points
        window: optional x-bounds, None for unbounded
    """
    if not hull:
        return False
    s_lo, s_hi = shape.x_range()
    left = max(s_lo, lo, hull.first().x)
    right = min(s_hi, hi, hull.last().x)
    if window[0] is not None:
        left = max(left, window[0])
    if window[1] is not None:
        right = min(right, window[1])
    if left > right:
        return False
    if isinstance(shape, SweepShape):
        return True
    if isinstance(shape, PointShape):
        return shape.point.y <= hull_y(hull, shape.point.x)

    def gap(x):
        return shape.lower_at(x) - hull_y(hull, x)

    xs = {left, right}
    xs.update(v.x for v in shape.lower if left < v.x < right)
    # gap is convex, so its values at the hull vertices are unimodal
    first, last = hull.bisect_left_x(left), hull.bisect_left_x(right) - 1
    if first <= last:
        while first < last:
            mid = (first + last) // 2
            if gap(hull[mid].x) <= gap(hull[mid + 1].x):
                last = mid
            else:
                first = mid + 1
        xs.add(hull[first].x)
    return min(gap(x) for x in xs) <= 0


def _within(p: Point, window: Window) -> bool:
    lo, hi = window
    return (lo is None or lo <= p.x) and (hi is None or p.x <= hi)


# ==================== ID-PARTITIONED COPIES ====================

class IdPartitionedCopy:
    """Hull tree over the vertices of the regions whose id has `value` at `bit`"""

    def __init__(self, bit: int, value: int):
        self.bit = bit
        self.value = value
        self.tree = PartialHullTree()
        self.locations: Set[Point] = set()

    def holds(self, rid: int) -> bool:
        return (rid >> self.bit) & 1 == self.value

    def members(self, record: VertexRecord) -> Set[int]:
        return {rid for rid in record.regions if self.holds(rid)}

    def sync(self, p: Point, record: Optional[VertexRecord]) -> None:
        present = p in self.tree
        wanted = record is not None and bool(self.members(record))
        if present and not wanted:
            self.tree.delete(p)
            self.locations.discard(p)
        elif wanted and not present:
            self.tree.insert(p)
            self.locations.add(p)

    def __repr__(self) -> str:
        return f"IdPartitionedCopy(bit={self.bit}, value={self.value}, {len(self.locations)} vertices)"

# ==================== COMPRESSED CANDIDATE RUNS ====================

class CompressedChainIndex:
    """
    Maximal runs of consecutive root-hull vertices that belong to one non-point
    region and to no other region, stored per region in hull order
    """

    def __init__(self):
        self.runs: Dict[int, List[Tuple[Point, Point]]] = {}

    def rebuild(self, rid: int, view: RootHullView, records: Dict[Point, VertexRecord],
                locations: Iterable[Point]) -> None:
        queue = view.queue
        ranks = sorted(queue.index_of(p) for p in locations
                       if p in queue and records[p].regions == {rid})
        runs: List[Tuple[Point, Point]] = []
        start = prev = None
        for r in ranks:
            if prev is not None and r == prev + 1:
                prev = r
                continue
            if start is not None:
                runs.append((queue[start], queue[prev]))
            start = prev = r
        if start is not None:
            runs.append((queue[start], queue[prev]))
        if runs:
            self.runs[rid] = runs
        else:
            self.runs.pop(rid, None)

    def run_containing(self, rid: int, p: Point) -> Optional[Tuple[Point, Point]]:
        runs = self.runs.get(rid, [])
        i = bisect_right([first.x for first, _ in runs], p.x) - 1
        if i >= 0 and runs[i][0].x <= p.x <= runs[i][1].x:
            return runs[i]
        return None


# ==================== ENGINE ====================

class KgonEngine(ReconstructionEngine):
    """
    Reconstruction engine for families of points and simple polygons
    """

    name = "kgon"
    supported_modes = (FamilyMode.KGON,)

    def __init__(self, family: Family, oracle: RetrievalOracle, fast: bool = False,
                 audit: Optional[bool] = None):
        super().__init__(family, oracle, audit)
        self.fast = fast
        if fast:
            self.name = "kgon-fast"
        self.records: Dict[Point, VertexRecord] = {r.location: r for r in vertex_set(family)}
        self.by_region: Dict[int, Set[Point]] = {}
        for rec in self.records.values():
            for rid in rec.regions:
                self.by_region.setdefault(rid, set()).add(rec.location)
        self.locations: List[Point] = sorted(self.records)

        self.copies: List[IdPartitionedCopy] = []
        self.region_hulls: Dict[int, object] = {}
        self.compressed = CompressedChainIndex()
        if fast:
            self.bits = max(1, family.n.bit_length())
            self.copies = [IdPartitionedCopy(i, j) for i in range(self.bits) for j in (0, 1)]
            for copy in self.copies:
                for p in self.locations:
                    copy.sync(p, self.records[p])
            self.region_hulls = {rid: family.shape(rid) for rid in family.ids}

        self.tree = AugmentedHullTree(
            family, self.records,
            occupied_test=self.fast_occupied_test if fast else self.occupied_test,
            candidate_lookup=self.fast_candidate_lookup if fast else None,
            on_root_change=self._refresh_compressed if fast else None,
        )
        self.tree.build(self.locations)
        logger.debug(f"{self.name}: {len(self.records)} vertices, hull {len(self.tree.hull)}")

    # ---- occupied tests ----

    def _band(self, s: VertexRecord, t: VertexRecord):
        a, b = s.owner, t.owner
        if a == b or (self.family.is_sentinel(a) and self.family.is_sentinel(b)):
            return None
        if self.fast:
            return band(self._hull_of(a), self._hull_of(b))
        return band_of(self.family, a, b)

    def _hull_of(self, rid: int):
        if self.family.is_sentinel(rid):
            return self.family.shape(rid)
        return self.region_hulls[rid]

    def _smallest_occupant(self, shape, found: Iterable[Point], excluded: Set[int],
                           s: VertexRecord, t: VertexRecord,
                           members: Optional[Callable[[VertexRecord], Set[int]]] = None,
                           window: Window = OPEN) -> Optional[int]:
        best: Optional[int] = None
        for p in found:
            if p == s.location or p == t.location or not _within(p, window):
                continue
            record = self.records[p]
            foreign = (members(record) if members else record.regions) - excluded
            if not foreign or (best is not None and min(foreign) >= best):
                continue
            if vertex_in_shape(p, shape) != Containment.OUTSIDE:
                best = min(foreign)
        return best

    def occupied_test(self, s: VertexRecord, t: VertexRecord) -> Optional[int]:
        """
        Smallest foreign region id with a vertex in band(owner(s), owner(t)).
        The endpoints are shadow-deleted so the descent only enters nodes whose
        hull region reaches into the band.
        """
        shape = self._band(s, t)
        if shape is None:
            return None
        excluded = {s.owner, t.owner, self.family.sentinel_left, self.family.sentinel_right}
        with self.tree.shadow((s.location, t.location)):
            found = self.tree.search(lambda hull, lo, hi: band_meets_hull(shape, hull, lo, hi))
        return self._smallest_occupant(shape, found, excluded, s, t)

    def _windows(self, s: VertexRecord, t: VertexRecord) -> List[Tuple[int, Window]]:
        """(anchor owner, x-window) pairs covering the band; each window holds no vertex of the other owner"""
        a, b = s.owner, t.owner
        if self.family.is_sentinel(a):
            return [(b, OPEN)]
        if self.family.is_sentinel(b):
            return [(a, OPEN)]
        a_hi = self._hull_of(a).x_range()[1]
        b_lo = self._hull_of(b).x_range()[0]
        if not a_hi < b_lo:
            return [(a, OPEN)]
        m = midpoint(a_hi, b_lo)
        return [(a, (None, m)), (b, (m, None))]

    def fast_occupied_test(self, s: VertexRecord, t: VertexRecord) -> Optional[int]:
        """
        Same answer as occupied_test, searched only in the copies that exclude an owner

        Every region other than the anchor owner differs from it in some id bit,
        so the copies F(i, not bit_i(anchor)) together hold all foreign regions.
        """
        shape = self._band(s, t)
        if shape is None:
            return None
        excluded = {s.owner, t.owner, self.family.sentinel_left, self.family.sentinel_right}
        best: Optional[int] = None
        for anchor, window in self._windows(s, t):
            def meets(hull, lo, hi, window=window):
                return band_meets_hull(shape, hull, lo, hi, window)

            for copy in self.copies:
                if copy.holds(anchor):
                    continue
                with copy.tree.shadow((s.location, t.location)):
                    found = copy.tree.search(meets)
                occupant = self._smallest_occupant(shape, found, excluded, s, t,
                                                   members=copy.members, window=window)
                if occupant is not None and (best is None or occupant < best):
                    best = occupant
        return best

    # ---- candidate chains ----

    def _refresh_compressed(self, view: RootHullView, changed: Set[Point]) -> None:
        affected: Set[int] = set()
        for p in changed:
            rec = self.records.get(p)
            if rec is not None:
                affected |= rec.non_point_regions
        for rid in affected:
            self.compressed.rebuild(rid, view, self.records, self.by_region.get(rid, ()))

    def _block(self, nodes: RootHullView, i: int) -> Tuple[int, int]:
        node = nodes[i]
        if node.is_sentinel or node.record.regions != node.record.non_point_regions \
                or len(node.record.regions) != 1:
            return i, i
        run = self.compressed.run_containing(node.owner, node.location)
        if run is None:
            return i, i
        return nodes.index_of(run[0]), nodes.index_of(run[1])

    def fast_candidate_lookup(self, nodes: Sequence[HullNode], i: int) -> List[ChainLabel]:
        """Candidate chains containing edge i, with blocks resolved through the compressed runs"""
        if not isinstance(nodes, RootHullView):
            return candidate_chains_containing(self.family, nodes, i)
        s, t = nodes[i], nodes[i + 1]
        solely_s = not s.is_sentinel and s.record.is_canonical
        solely_t = not t.is_sentinel and t.record.is_canonical
        if solely_s and solely_t and s.owner == t.owner:
            chain = candidate_chain(self.family, nodes, *self._block(nodes, i))
            return [chain] if chain else []
        chains: List[ChainLabel] = []
        for side, solely in ((i, solely_s), (i + 1, solely_t)):
            if solely:
                chain = candidate_chain(self.family, nodes, *self._block(nodes, side))
                if chain:
                    chains.append(chain)
        return chains

    # ---- updates ----

    def _record(self, stat: RecourseStat) -> None:
        self.recourse.append(stat.changed_bridges)

    def _set_record(self, p: Point, new: VertexRecord) -> None:
        """Replace the record at p (an empty record deletes the location)"""
        old = self.records.get(p)
        if old is not None:
            self._record(self.tree.delete(p))
            if not new.regions:
                del self.records[p]
                self.locations.remove(p)
        if new.regions:
            self.records[p] = new
            self._record(self.tree.insert(p))
            if old is None:
                insort(self.locations, p)
        for copy in self.copies:
            copy.sync(p, self.records.get(p))

    def apply_retrievals(self, retrieved: Dict[int, Point]) -> None:
        touched: Set[Point] = set()
        for rid, p in sorted(retrieved.items()):
            for loc in sorted(self.by_region.pop(rid, ())):
                self._set_record(loc, self.records[loc].without(rid))
                touched.add(loc)
            current = self.records.get(p)
            if current is None:
                current = VertexRecord(p, frozenset(), frozenset())
            self._set_record(p, VertexRecord(p, current.point_regions | {rid},
                                             current.non_point_regions))
            touched.add(p)
            self.by_region[rid] = {p}
            if self.fast:
                self.region_hulls[rid] = self.family.shape(rid)
                self.compressed.runs.pop(rid, None)
        self.tree.refresh_aux_along_path(touched, retrieved=sorted(retrieved))

    # ---- strategy hooks ----

    def next_witness(self) -> Optional[WitnessSet]:
        return self.tree.top_event()

    def hull_order(self) -> List[int]:
        return HullChain(list(self.tree.view())).region_order()

    def copy_membership(self) -> Dict[Tuple[int, int], Set[int]]:
        """Region ids stored in every copy"""
        out: Dict[Tuple[int, int], Set[int]] = {}
        for copy in self.copies:
            ids: Set[int] = set()
            for p in copy.locations:
                ids |= copy.members(self.records[p])
            out[(copy.bit, copy.value)] = ids
        return out


def preprocess(f: Family, oracle: RetrievalOracle, fast: bool = False,
               audit: Optional[bool] = None) -> KgonEngine:
    """
    Build every structure of the polygon engine

    Args:
        f: kgon-mode family
        oracle: retrieval oracle over the hidden realization
        fast: build the copy trees and compressed runs as well

    Returns:
        KgonEngine: ready to step
    """
    return KgonEngine(f, oracle, fast=fast, audit=audit)


def run_kgon(f: Family, oracle: RetrievalOracle, fast: bool = False) -> RunReport:
    return preprocess(f, oracle, fast).run()


__all__ = [
    "IdPartitionedCopy",
    "CompressedChainIndex",
    "KgonEngine",
    "preprocess",
    "run_kgon",
]
