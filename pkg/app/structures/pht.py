"""
Partial Hull Tree (dynamic upper hull)
- Leaf-based AVL tree over x-columns; a leaf stands for the topmost point of its column
- Every node keeps its bridge and the part of its hull not on its parent's hull
  in a concatenable queue; the root queue is the full upper hull
- Updates walk one root-to-leaf path: split hulls on the way down, find
  bridges and join on the way up, rotations redo both on the rotated nodes
- Recourse is the symmetric difference of the bridge sets before and after an update
- AugmentedHullTree adds the classification indexes used to drive the strategy
"""

import logging
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from app.exceptions import StructureError
from app.geometry.primitives import Point, bridge_between
from app.regions.family import Family, VertexRecord
from app.classify.outer_hull import HullNode
from app.classify.witness import WitnessSet
from app.structures.concatenable_queue import ConcatenableQueue, Labeler
from app.structures.hull_events import CandidateLookup, HullEventIndex, OccupiedTest, RootChangeHook, RootHullView

logger = logging.getLogger("pht")

Bridge = Tuple[Point, Point]


class _Node:
    __slots__ = ("left", "right", "point", "height", "min_x", "max_x", "bridge", "queue")

    def __init__(self, point: Optional[Point] = None, left: "_Node" = None, right: "_Node" = None):
        self.point = point
        self.left = left
        self.right = right
        self.height = 1
        self.min_x = point.x if point is not None else None
        self.max_x = point.x if point is not None else None
        self.bridge: Optional[Bridge] = None
        self.queue: Optional[ConcatenableQueue] = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


def _height(n: Optional[_Node]) -> int:
    return n.height if n else 0


@dataclass
class RecourseStat:
    """Bridges removed and added by one update"""
    removed: int = 0
    added: int = 0

    @property
    def changed_bridges(self) -> int:
        return self.removed + self.added


class PartialHullTree:
    """
    Dynamic upper hull of a point set with at most one hull point per x-column
    """

    def __init__(self, labeler: Optional[Labeler] = None):
        self.labeler = labeler
        self.root: Optional[_Node] = None
        self.columns: Dict[object, Set[Point]] = {}
        self._delta: Counter = Counter()
        self.pending_added: List[Bridge] = []
        self.pending_removed: List[Bridge] = []
        self.history: List[int] = []

    # ==================== QUEUE HELPERS ====================

    def _single(self, p: Point) -> ConcatenableQueue:
        return ConcatenableQueue.from_points([p], self.labeler)

    def _fix(self, n: _Node) -> None:
        n.height = 1 + max(_height(n.left), _height(n.right))
        n.min_x = n.left.min_x
        n.max_x = n.right.max_x

    def _down(self, n: _Node) -> None:
        """Hand the children their full hulls; n.queue must hold n's full hull"""
        a, _ = n.bridge
        head, tail = n.queue.split(a.x, left_inclusive=True)
        n.left.queue = head.join(n.left.queue)
        n.right.queue = n.right.queue.join(tail)
        n.queue = ConcatenableQueue(self.labeler)

    def _up(self, n: _Node) -> None:
        """Compute n's bridge and full hull from the children's full hulls"""
        left_hull, right_hull = n.left.queue, n.right.queue
        a, b = bridge_between(left_hull, right_hull)
        prefix, n.left.queue = left_hull.split(a.x, left_inclusive=True)
        n.right.queue, suffix = right_hull.split(b.x, left_inclusive=False)
        n.queue = prefix.join(suffix)
        if n.bridge != (a, b):
            if n.bridge is not None:
                self._delta[n.bridge] -= 1
            self._delta[(a, b)] += 1
            n.bridge = (a, b)

    def _forget(self, n: _Node) -> None:
        if n.bridge is not None:
            self._delta[n.bridge] -= 1

    # ==================== ROTATIONS ====================

    def _rotate_right(self, z: _Node) -> _Node:
        self._down(z)
        y = z.left
        self._down(y)
        z.left = y.right
        self._fix(z)
        self._up(z)
        y.right = z
        self._fix(y)
        self._up(y)
        return y

    def _rotate_left(self, z: _Node) -> _Node:
        self._down(z)
        y = z.right
        self._down(y)
        z.right = y.left
        self._fix(z)
        self._up(z)
        y.left = z
        self._fix(y)
        self._up(y)
        return y

    def _rebalance(self, n: _Node) -> _Node:
        """Children hold full hulls; returns the subtree root holding its full hull"""
        self._fix(n)
        self._up(n)
        balance = _height(n.left) - _height(n.right)
        if balance > 1:
            if _height(n.left.left) < _height(n.left.right):
                self._down(n)
                n.left = self._rotate_left(n.left)
                self._fix(n)
                self._up(n)
            return self._rotate_right(n)
        if balance < -1:
            if _height(n.right.right) < _height(n.right.left):
                self._down(n)
                n.right = self._rotate_right(n.right)
                self._fix(n)
                self._up(n)
            return self._rotate_left(n)
        return n

    # ==================== BUILD ====================

    def _build(self, tops: Sequence[Point], lo: int, hi: int) -> _Node:
        if hi - lo == 1:
            leaf = _Node(tops[lo])
            leaf.queue = self._single(tops[lo])
            return leaf
        mid = (lo + hi) // 2
        n = _Node(left=self._build(tops, lo, mid), right=self._build(tops, mid, hi))
        self._fix(n)
        self._up(n)
        return n

    def build(self, points: Iterable[Point]) -> "PartialHullTree":
        """
        Build the tree over distinct locations

        Args:
            points: vertex locations; several may share an x-column

        Returns:
            PartialHullTree: self
        """
        self.columns = {}
        for p in points:
            self.columns.setdefault(p.x, set()).add(p)
        tops = sorted(max(col, key=lambda q: q.y) for col in self.columns.values())
        self.root = self._build(tops, 0, len(tops)) if tops else None
        self._delta.clear()
        return self

    # ==================== UPDATES ====================

    def _finish_update(self) -> RecourseStat:
        stat = RecourseStat()
        for bridge, count in self._delta.items():
            if count > 0:
                stat.added += count
                self.pending_added.append(bridge)
            elif count < 0:
                stat.removed -= count
                self.pending_removed.append(bridge)
        self._delta.clear()
        self.history.append(stat.changed_bridges)
        return stat

    def _insert_leaf(self, n: _Node, p: Point) -> _Node:
        if n.is_leaf:
            fresh = _Node(p)
            fresh.queue = self._single(p)
            parent = _Node(left=fresh, right=n) if p.x < n.point.x else _Node(left=n, right=fresh)
            return self._rebalance(parent)
        self._down(n)
        if p.x <= n.left.max_x:
            n.left = self._insert_leaf(n.left, p)
        else:
            n.right = self._insert_leaf(n.right, p)
        return self._rebalance(n)

    def _delete_leaf(self, n: _Node, x) -> _Node:
        self._down(n)
        go_left = x <= n.left.max_x
        child = n.left if go_left else n.right
        if child.is_leaf:
            self._forget(n)
            return n.right if go_left else n.left
        if go_left:
            n.left = self._delete_leaf(n.left, x)
        else:
            n.right = self._delete_leaf(n.right, x)
        return self._rebalance(n)

    def _replace_leaf(self, n: _Node, p: Point) -> None:
        if n.is_leaf:
            n.point = p
            n.queue = self._single(p)
            return
        self._down(n)
        self._replace_leaf(n.left if p.x <= n.left.max_x else n.right, p)
        self._fix(n)
        self._up(n)

    def insert(self, p: Point) -> RecourseStat:
        """Insert a location; rejects duplicates"""
        column = self.columns.get(p.x)
        if column is not None and p in column:
            raise StructureError(f"{p} is already stored")
        if column is None:
            self.columns[p.x] = {p}
            if self.root is None:
                self.root = _Node(p)
                self.root.queue = self._single(p)
            else:
                self.root = self._insert_leaf(self.root, p)
        else:
            top = max(column, key=lambda q: q.y)
            column.add(p)
            if p.y > top.y:
                self._replace_leaf(self.root, p)
        return self._finish_update()

    def delete(self, p: Point) -> RecourseStat:
        """Delete a stored location; rejects missing ones"""
        column = self.columns.get(p.x)
        if column is None or p not in column:
            raise StructureError(f"{p} is not stored")
        top = max(column, key=lambda q: q.y)
        column.discard(p)
        if not column:
            del self.columns[p.x]
            if self.root.is_leaf:
                self.root = None
            else:
                self.root = self._delete_leaf(self.root, p.x)
        elif top == p:
            self._replace_leaf(self.root, max(column, key=lambda q: q.y))
        return self._finish_update()

    def touch(self, p: Point) -> RecourseStat:
        """Re-insert a location whose labels changed"""
        first = self.delete(p)
        second = self.insert(p)
        return RecourseStat(first.removed + second.removed, first.added + second.added)

    # ==================== QUERIES ====================

    @property
    def hull(self) -> ConcatenableQueue:
        if self.root is None:
            return ConcatenableQueue(self.labeler)
        return self.root.queue

    def hull_points(self) -> List[Point]:
        return self.hull.to_list()

    def edges(self) -> List[Bridge]:
        pts = self.hull_points()
        return list(zip(pts, pts[1:]))

    def bridges(self) -> List[Bridge]:
        out: List[Bridge] = []
        stack = [self.root] if self.root else []
        while stack:
            n = stack.pop()
            if not n.is_leaf:
                out.append(n.bridge)
                stack.extend((n.left, n.right))
        return out

    def __len__(self) -> int:
        return sum(len(col) for col in self.columns.values())

    def __contains__(self, p: Point) -> bool:
        column = self.columns.get(p.x)
        return column is not None and p in column

    def height(self) -> int:
        return _height(self.root)

    def consume_changes(self) -> Tuple[List[Bridge], List[Bridge]]:
        added, removed = self.pending_added, self.pending_removed
        self.pending_added, self.pending_removed = [], []
        return added, removed

    def search(self, meets: Callable[[ConcatenableQueue, object, object], bool]) -> List[Point]:
        """
        Stored points of every column reached by a descent that enters a node only
        when meets(full hull of the node, min_x, max_x) holds
        """
        found: List[Point] = []
        if self.root is not None:
            self._search(self.root, meets, found)
        return found

    def _search(self, n: _Node, meets, found: List[Point]) -> None:
        if not meets(n.queue, n.min_x, n.max_x):
            return
        if n.is_leaf:
            found.extend(self.columns[n.point.x])
            return
        self._down(n)
        try:
            self._search(n.left, meets, found)
            self._search(n.right, meets, found)
        finally:
            self._up(n)

    @contextmanager
    def shadow(self, points: Iterable[Optional[Point]]) -> Iterator["PartialHullTree"]:
        """Delete the stored points among `points` for the duration of the block"""
        hidden = [p for p in dict.fromkeys(points) if p is not None and p in self]
        added, removed = list(self.pending_added), list(self.pending_removed)
        history = len(self.history)
        for p in hidden:
            self.delete(p)
        try:
            yield self
        finally:
            for p in reversed(hidden):
                self.insert(p)
            self.pending_added, self.pending_removed = added, removed
            del self.history[history:]


# ==================== CLASSIFICATION INDEXES ====================

class AugmentedHullTree(PartialHullTree):
    """
    Partial hull tree over the vertex set of a kgon family, with the event index
    of its root hull. The index learns about root changes through the bridges
    each batch of updates added and removed.
    """

    def __init__(self, family: Family, records: Dict[Point, VertexRecord],
                 occupied_test: OccupiedTest,
                 candidate_lookup: Optional[CandidateLookup] = None,
                 on_root_change: Optional[RootChangeHook] = None):
        self.family = family
        self.records = records
        self.events = HullEventIndex(family, lambda: self.hull, self.node_at, occupied_test,
                                     candidate_lookup=candidate_lookup,
                                     on_root_change=on_root_change)
        super().__init__(labeler=self.events.label)

    def node_at(self, p: Point) -> HullNode:
        return HullNode(self.records[p])

    def view(self) -> RootHullView:
        return self.events.hull_view

    def build(self, points: Iterable[Point]) -> "AugmentedHullTree":
        super().build(points)
        self.consume_changes()
        self.events.rebuild()
        return self

    def refresh_aux_along_path(self, touched: Iterable[Point] = (),
                               retrieved: Iterable[int] = ()) -> None:
        """
        Hand the bridges changed since the last refresh to the event index

        Args:
            touched: locations whose vertex records changed
            retrieved: regions that became points
        """
        added, removed = self.consume_changes()
        self.events.refresh(added, removed, touched, retrieved)

    def top_event(self) -> Optional[WitnessSet]:
        return self.events.top_event()


__all__ = [
    "PartialHullTree",
    "AugmentedHullTree",
    "RootHullView",
    "RecourseStat",
]
