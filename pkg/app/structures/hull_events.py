"""
Event indexes over a root hull held in a concatenable queue
- Queue masks flag the non-canonical, non-dividing, spanning and occupied edges;
  every mask labels the edge from its element to the element's successor
- Spanning chains and occupied edges live in tables keyed by the node their
  event is anchored at; each entry lists the root edges it depends on
- refresh() re-tests only the edges inside the changed x-windows plus the
  edges whose band can reach a retrieved region
"""

import logging
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from app.config import CaseTag
from app.geometry.primitives import Point
from app.regions.family import Family, VertexRecord
from app.classify.chains import ChainLabel, block_around, candidate_chains_containing, hit_chain_frame
from app.classify.edges import EdgeClass, edge_class
from app.classify.outer_hull import HullNode, sentinel_node
from app.classify.witness import ChainTest, WitnessSet, chain_witness, dips_between_flanks, edge_witness
from app.structures.concatenable_queue import ConcatenableQueue

logger = logging.getLogger("hull_events")

NON_CANONICAL_BIT = 1
NON_DIVIDING_BIT = 2
SPANNING_BIT = 4
HIT_BIT = 8

LEFT_KEY = (0, 0, 0)
RIGHT_KEY = (2, 0, 0)

NodeKey = Tuple
EdgeKey = Tuple[NodeKey, NodeKey]
Edge = Tuple[Point, Point]
OccupiedTest = Callable[[VertexRecord, VertexRecord], Optional[int]]
CandidateLookup = Callable[[Sequence[HullNode], int], List[ChainLabel]]
RootChangeHook = Callable[["RootHullView", Set[Point]], None]

SPANNING = "spanning"
OCCUPIED = "occupied"


def point_key(p: Point) -> NodeKey:
    return (1, p.x, -p.y)


class RootHullView(Sequence):
    """Root hull as hull nodes, sentinels at both ends; always reads the live queue"""

    def __init__(self, family: Family, queue_of: Callable[[], ConcatenableQueue],
                 node_at: Callable[[Point], HullNode]):
        self.family = family
        self._queue_of = queue_of
        self._node_at = node_at
        self.left = sentinel_node(family.sentinel_left)
        self.right = sentinel_node(family.sentinel_right)

    @property
    def queue(self) -> ConcatenableQueue:
        return self._queue_of()

    def __len__(self) -> int:
        return len(self.queue) + 2

    def __getitem__(self, index: int) -> HullNode:
        size = len(self)
        if index < 0:
            index += size
        if index == 0:
            return self.left
        if index == size - 1:
            return self.right
        if not 0 < index < size - 1:
            raise IndexError("hull index out of range")
        return self._node_at(self.queue[index - 1])

    def __iter__(self) -> Iterator[HullNode]:
        yield self.left
        for p in self.queue:
            yield self._node_at(p)
        yield self.right

    def index_of(self, p: Point) -> int:
        return self.queue.index_of(p) + 1

    def key(self, index: int) -> NodeKey:
        if index == 0:
            return LEFT_KEY
        if index == len(self) - 1:
            return RIGHT_KEY
        return point_key(self.queue[index - 1])

    def edge_key(self, index: int) -> EdgeKey:
        return self.key(index), self.key(index + 1)

    def position(self, key: NodeKey) -> Optional[int]:
        """Index of the node with this key; None when it is not on the hull"""
        if key == LEFT_KEY:
            return 0
        if key == RIGHT_KEY:
            return len(self) - 1
        p = Point(key[1], -key[2])
        return self.index_of(p) if p in self.queue else None

    def edges_over(self, lo, hi) -> range:
        """Indices of the edges whose x-span meets [lo, hi]"""
        queue = self.queue
        first = queue.bisect_left_x(lo)
        last = min(len(self) - 2, queue.bisect_left_x(hi) + 1)
        return range(first, last + 1)


@dataclass(frozen=True)
class ChainEntry:
    """An indexed event with the root edges it was computed from"""
    witness: WitnessSet
    anchor: EdgeKey
    edges: Tuple[EdgeKey, ...]
    chain: Optional[ChainLabel] = None


class HullEventIndex:
    """
    Events of every case on a root hull, leftmost first within a case.

    The owner supplies the live queue, the node stored at each queued location
    and the occupied test; the index supplies the queue labeler.
    """

    def __init__(self, family: Family,
                 queue_of: Callable[[], ConcatenableQueue],
                 node_at: Callable[[Point], HullNode],
                 occupied_test: OccupiedTest,
                 candidate_lookup: Optional[CandidateLookup] = None,
                 chain_test: ChainTest = dips_between_flanks,
                 on_root_change: Optional[RootChangeHook] = None):
        self.family = family
        self.hull_view = RootHullView(family, queue_of, node_at)
        self.node_at = node_at
        self.occupied_test = occupied_test
        self.candidate_lookup = candidate_lookup or (
            lambda nodes, i: candidate_chains_containing(family, nodes, i))
        self.chain_test = chain_test
        self.on_root_change = on_root_change
        self.spanning: Dict[NodeKey, ChainEntry] = {}
        self.hits: Dict[NodeKey, ChainEntry] = {}
        self._by_edge: Dict[EdgeKey, Set[Tuple[str, NodeKey]]] = {}
        self._owned: Dict[int, Set[Point]] = {}
        self._sentinel_edges: Set[EdgeKey] = set()
        spans = sorted((desc.x_range(), rid) for rid, desc in family.original.items())
        self._extents = [(lo, hi, rid) for (lo, hi), rid in spans]
        self._extent_lo = [lo for lo, _, _ in self._extents]
        self.evaluations = 0

    # ==================== LABELS ====================

    def label(self, p: Point, q: Optional[Point]) -> int:
        """Mask of the edge from p to its successor q (None: the right sentinel)"""
        node = self.node_at(p)
        mask = 0
        if not node.arc_to_next:
            t = self.node_at(q).record if q is not None else self.hull_view.right.record
            value = edge_class(self.family, node.record, t)
            if value == EdgeClass.NON_CANONICAL:
                mask |= NON_CANONICAL_BIT
            elif value == EdgeClass.NON_DIVIDING:
                mask |= NON_DIVIDING_BIT
        edge = (point_key(p), point_key(q) if q is not None else RIGHT_KEY)
        entry = self.spanning.get(edge[0])
        if entry is not None and entry.anchor == edge:
            mask |= SPANNING_BIT
        entry = self.hits.get(edge[0])
        if entry is not None and entry.anchor == edge:
            mask |= HIT_BIT
        return mask

    def _relabel_key(self, key: NodeKey) -> None:
        if key in (LEFT_KEY, RIGHT_KEY):
            return
        p = Point(key[1], -key[2])
        queue = self.hull_view.queue
        if p in queue:
            queue.relabel(p)

    # ==================== TABLES ====================

    def _table(self, kind: str) -> Dict[NodeKey, ChainEntry]:
        return self.spanning if kind == SPANNING else self.hits

    def _register(self, kind: str, key: NodeKey, entry: ChainEntry) -> None:
        self._drop(kind, key)
        self._table(kind)[key] = entry
        for edge in entry.edges:
            self._by_edge.setdefault(edge, set()).add((kind, key))
        self._relabel_key(key)

    def _drop(self, kind: str, key: NodeKey) -> None:
        entry = self._table(kind).pop(key, None)
        if entry is None:
            return
        for edge in entry.edges:
            holders = self._by_edge.get(edge)
            if holders is not None:
                holders.discard((kind, key))
                if not holders:
                    del self._by_edge[edge]
        self._relabel_key(key)

    def _drop_on(self, edge: EdgeKey) -> None:
        for kind, key in list(self._by_edge.get(edge, ())):
            entry = self._table(kind).get(key)
            if entry is not None and edge in entry.edges:
                self._drop(kind, key)

    def _valid(self, entry: ChainEntry) -> bool:
        view = self.hull_view
        for u, v in entry.edges:
            i = view.position(u)
            if i is None or i + 1 >= len(view) or view.key(i + 1) != v:
                return False
        return True

    def _note(self, node: HullNode) -> None:
        if not node.is_sentinel:
            self._owned.setdefault(node.owner, set()).add(node.location)

    def _owned_on_root(self, rid: int) -> List[Point]:
        queue = self.hull_view.queue
        live = {p for p in self._owned.get(rid, ()) if p in queue and self.node_at(p).owner == rid}
        if live:
            self._owned[rid] = live
        else:
            self._owned.pop(rid, None)
        return sorted(live)

    # ==================== EVALUATION ====================

    def _consider_spanning(self, chain: ChainLabel) -> None:
        view = self.hull_view
        key = view.key(chain.start)
        edges = tuple(view.edge_key(j) for j in range(chain.start, chain.end))
        current = self.spanning.get(key)
        if current is not None and current.edges == edges:
            return
        self.evaluations += 1
        if not self.chain_test(self.family, view, chain):
            return
        witness = chain_witness(self.family, view, chain.start, chain.regions)
        self._register(SPANNING, key, ChainEntry(witness, edges[0], edges, chain))

    def _consider_hit(self, m: int) -> None:
        view = self.hull_view
        key = view.key(m)
        self._drop(OCCUPIED, key)
        s, t = view[m], view[m + 1]
        if s.arc_to_next or s.owner == t.owner or (s.is_sentinel and t.is_sentinel):
            return
        if edge_class(self.family, s.record, t.record) != EdgeClass.DIVIDING:
            return
        self.evaluations += 1
        occupant = self.occupied_test(s.record, t.record)
        if occupant is None:
            return
        witness = edge_witness(self.family, CaseTag.OCCUPIED, s, t, occupant)
        anchor = view.edge_key(m)
        self._register(OCCUPIED, key, ChainEntry(witness, anchor, (anchor,), hit_chain_frame(self.family, view, m)))

    def _evaluate(self, structural: Set[int], occupancy: Set[int]) -> None:
        view = self.hull_view
        last = len(view) - 2
        middles = set(occupancy)
        for i in sorted(structural):
            if not 0 <= i <= last:
                continue
            self._note(view[i])
            self._note(view[i + 1])
            if i > 0:
                self._relabel_key(view.key(i))
            for chain in self.candidate_lookup(view, i):
                self._consider_spanning(chain)
            lo, _ = block_around(view, i)
            _, hi = block_around(view, i + 1)
            middles.update((i, lo - 1, hi))
        for m in sorted(middles):
            if 0 <= m <= last:
                self._consider_hit(m)

    def _occupancy_edges(self, rid: int) -> Set[int]:
        """Edges whose band can meet the region before or after its retrieval"""
        view = self.hull_view
        lo, hi = self.family.original[rid].x_range()
        edges = set(view.edges_over(lo, hi))
        edges.update((0, len(view) - 2))
        for e_lo, e_hi, other in self._extents[:bisect_right(self._extent_lo, hi)]:
            if e_hi < lo:
                continue
            for p in self._owned_on_root(other):
                i = view.index_of(p)
                edges.update((i - 1, i))
        return edges

    def _sentinel_edge_keys(self) -> Set[EdgeKey]:
        view = self.hull_view
        return {view.edge_key(0), view.edge_key(len(view) - 2)}

    def rebuild(self) -> None:
        """Evaluate every edge of the root hull from scratch"""
        self.spanning.clear()
        self.hits.clear()
        self._by_edge.clear()
        self._owned.clear()
        self._sentinel_edges = self._sentinel_edge_keys()
        if self.on_root_change is not None:
            self.on_root_change(self.hull_view, set(self.hull_view.queue))
        self._evaluate(set(range(len(self.hull_view) - 1)), set())
        logger.debug(f"event index rebuilt: {len(self.spanning)} spanning, {len(self.hits)} occupied")

    def refresh(self, added: Iterable[Edge] = (), removed: Iterable[Edge] = (),
                touched: Iterable[Point] = (), retrieved: Iterable[int] = ()) -> None:
        """
        Bring the tables in line with the root hull after a batch of updates

        Args:
            added: edges that became bridges or root edges
            removed: edges that stopped being bridges or root edges
            touched: locations whose vertex records changed in place
            retrieved: regions that became points in this batch
        """
        view = self.hull_view
        added, removed = list(added), list(removed)
        for a, b in removed:
            self._drop_on((point_key(a), point_key(b)))

        last = len(view) - 2
        structural: Set[int] = {0, last}
        for a, b in added + removed:
            structural.update(view.edges_over(a.x, b.x))
        queue = view.queue
        for p in touched:
            if p in queue:
                i = view.index_of(p)
                for j in (i - 1, i):
                    self._drop_on(view.edge_key(j))
                    structural.add(j)

        current = self._sentinel_edge_keys()
        for edge in self._sentinel_edges - current:
            self._drop_on(edge)
        self._sentinel_edges = current

        if self.on_root_change is not None:
            changed = {view[j].location for i in structural for j in (i, i + 1)
                       if 0 <= i <= last and not view[j].is_sentinel}
            changed.update(p for edge in removed for p in edge)
            self.on_root_change(view, changed)

        occupancy: Set[int] = set()
        for rid in retrieved:
            occupancy |= self._occupancy_edges(rid)
        self._evaluate(structural, occupancy)

    # ==================== EVENTS ====================

    def _leftmost(self, kind: str, bit: int) -> Optional[ChainEntry]:
        table = self._table(kind)
        entry = table.get(LEFT_KEY)
        if entry is not None:
            if self._valid(entry):
                return entry
            self._drop(kind, LEFT_KEY)
        queue = self.hull_view.queue
        while True:
            found = queue.leftmost_flagged(bit)
            if found is None:
                return None
            _, p = found
            key = point_key(p)
            entry = table.get(key)
            if entry is not None and self._valid(entry):
                return entry
            # stale flag or stale entry
            if entry is not None:
                self._drop(kind, key)
            else:
                queue.relabel(p)

    def top_event(self) -> Optional[WitnessSet]:
        """Leftmost event of the highest-priority non-empty case"""
        view = self.hull_view
        if len(view) > 2 and not view[1].record.is_canonical:
            return edge_witness(self.family, CaseTag.NON_CANONICAL, view[0], view[1])
        for bit, case in ((NON_CANONICAL_BIT, CaseTag.NON_CANONICAL),
                          (NON_DIVIDING_BIT, CaseTag.NON_DIVIDING)):
            found = view.queue.leftmost_flagged(bit)
            if found is not None:
                rank, _ = found
                return edge_witness(self.family, case, view[rank + 1], view[rank + 2])
        for kind, bit in ((OCCUPIED, HIT_BIT), (SPANNING, SPANNING_BIT)):
            entry = self._leftmost(kind, bit)
            if entry is not None:
                return entry.witness
        return None

    def live_events(self, kind: str) -> List[WitnessSet]:
        """Witnesses of the entries still backed by root edges, left to right"""
        return sorted((e.witness for e in self._table(kind).values() if self._valid(e)),
                      key=lambda w: w.key)


__all__ = [
    "NON_CANONICAL_BIT",
    "NON_DIVIDING_BIT",
    "SPANNING_BIT",
    "HIT_BIT",
    "SPANNING",
    "OCCUPIED",
    "point_key",
    "RootHullView",
    "ChainEntry",
    "HullEventIndex",
]
