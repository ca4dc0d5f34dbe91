"""
Median Cut Decomposition over disk families
- Each node splits its regions by a vertical line between the two median centres;
  regions crossing the line stay at the node, in a line hull tree ordered top to bottom
- Below the root no hull is stored whole: a node keeps the part of its hull that
  is not on its parent's hull plus the slab chains of its children around its
  line, and a parent hull unfolds into its children's hulls top-down
- A merge keeps a prefix of the left hull, the hull of the slab and a suffix of
  the right hull, joined by at most two bridges
- A retrieval unfolds the path to the node holding the disk, pushes the point
  down and merges back bottom-up; unbalanced subtrees are rebuilt (scapegoating)
- The decomposition reads the family only when built; later it works from its
  own snapshot, so a batch of retrievals can be applied one region at a time
- The root hull sits in a concatenable queue that carries the event index
"""

import logging
from bisect import insort
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from app.config import FamilyMode, settings
from app.exceptions import StructureError
from app.geometry.circle_chains import CircleChain, bridge, split_after, split_before
from app.geometry.disks import Circle, HullVertex
from app.geometry.primitives import Point, midpoint
from app.regions.family import Family, VertexRecord
from app.classify.outer_hull import HullChain, HullNode, point_groups, sentinel_node
from app.classify.witness import ChainTest
from app.structures.concatenable_queue import ConcatenableQueue
from app.structures.hull_events import HullEventIndex, OccupiedTest
from app.structures.pht import RecourseStat

logger = logging.getLogger("mcd")

ChainFilter = Callable[[CircleChain], bool]


@dataclass
class ScapegoatPolicy:
    """A subtree is rebuilt once one child holds more than alpha of its regions"""
    alpha: float = settings.SCAPEGOAT_ALPHA
    min_size: int = 4

    def unbalanced(self, node: "MedianCutNode") -> bool:
        if node.size < self.min_size:
            return False
        heavier = max(_size(node.left), _size(node.right))
        return heavier > self.alpha * node.size


# ==================== LINE HULL TREE ====================

def _line_key(c: Circle) -> Tuple:
    # a vertical line meets a circle in a segment centred at the centre's height
    return (-c.cy, c.rid)


class _LineNode:
    __slots__ = ("key", "last", "circle", "left", "right", "hull")

    def __init__(self, circle: Optional[Circle] = None, left: "_LineNode" = None,
                 right: "_LineNode" = None):
        self.circle = circle
        self.left = left
        self.right = right
        self.key = _line_key(circle) if circle is not None else None
        self.last = self.key
        self.hull = CircleChain.from_circles([circle]) if circle is not None else CircleChain()

    @property
    def is_leaf(self) -> bool:
        return self.left is None


class LineHullTree:
    """
    Regions crossing one line, top to bottom. Leaves hold single circles and
    every inner node keeps the hull of the circles below it.
    """

    def __init__(self, circles: Iterable[Circle] = ()):
        ordered = sorted(circles, key=_line_key)
        self._keys: Dict[int, Tuple] = {c.rid: _line_key(c) for c in ordered}
        self.root = self._build(ordered, 0, len(ordered))

    def _build(self, ordered: List[Circle], lo: int, hi: int) -> Optional[_LineNode]:
        if lo >= hi:
            return None
        if hi - lo == 1:
            return _LineNode(ordered[lo])
        mid = (lo + hi) // 2
        return self._refresh(_LineNode(left=self._build(ordered, lo, mid),
                                       right=self._build(ordered, mid, hi)))

    @staticmethod
    def _refresh(n: _LineNode) -> _LineNode:
        n.key = n.left.last
        n.last = n.right.last
        n.hull = CircleChain.hull_of(n.left.hull.circles + n.right.hull.circles)
        return n

    def insert(self, c: Circle) -> None:
        if c.rid in self._keys:
            raise StructureError(f"region {c.rid} already crosses this line")
        self._keys[c.rid] = _line_key(c)
        leaf = _LineNode(c)
        self.root = leaf if self.root is None else self._insert(self.root, leaf)

    def _insert(self, n: _LineNode, leaf: _LineNode) -> _LineNode:
        if n.is_leaf:
            pair = (n, leaf) if n.key < leaf.key else (leaf, n)
            return self._refresh(_LineNode(left=pair[0], right=pair[1]))
        if leaf.key <= n.key:
            n.left = self._insert(n.left, leaf)
        else:
            n.right = self._insert(n.right, leaf)
        return self._refresh(n)

    def delete(self, rid: int) -> None:
        key = self._keys.pop(rid, None)
        if key is None:
            raise StructureError(f"region {rid} does not cross this line")
        self.root = self._delete(self.root, key)

    def _delete(self, n: _LineNode, key: Tuple) -> Optional[_LineNode]:
        if n.is_leaf:
            return None
        if key <= n.key:
            child = self._delete(n.left, key)
            if child is None:
                return n.right
            n.left = child
        else:
            child = self._delete(n.right, key)
            if child is None:
                return n.left
            n.right = child
        return self._refresh(n)

    @property
    def hull(self) -> CircleChain:
        return self.root.hull if self.root is not None else CircleChain()

    def ids(self) -> List[int]:
        return [rid for _, rid in sorted((key, rid) for rid, key in self._keys.items())]

    def search(self, meets: ChainFilter) -> List[int]:
        """Ids of the leaves reached by a descent entering only nodes whose hull passes `meets`"""
        out: List[int] = []
        stack = [self.root] if self.root is not None else []
        while stack:
            n = stack.pop()
            if not meets(n.hull):
                continue
            if n.is_leaf:
                out.append(n.circle.rid)
            else:
                stack.extend((n.left, n.right))
        return out

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, rid: int) -> bool:
        return rid in self._keys


# ==================== DECOMPOSITION NODES ====================

@dataclass(eq=False)
class MedianCutNode:
    line: object
    phi: LineHullTree = field(default_factory=LineHullTree)
    parent: Optional["MedianCutNode"] = None
    left: Optional["MedianCutNode"] = None
    right: Optional["MedianCutNode"] = None
    size: int = 0
    min_x: float = 0.0
    max_x: float = 0.0
    star: Tuple[Circle, ...] = ()  # own hull minus the parent's hull; the full hull at the root
    slab_left: Tuple[Circle, ...] = ()  # left child's hull inside the slab
    slab_right: Tuple[Circle, ...] = ()
    kept_left: int = 0  # circles of the left child's hull leading this node's hull
    kept_right: int = 0

    @property
    def phi_ids(self) -> List[int]:
        return self.phi.ids()

    @property
    def is_leaf(self) -> bool:
        return self.left is None and self.right is None

    def subtree_ids(self) -> List[int]:
        out = list(self.phi_ids)
        for child in (self.left, self.right):
            if child is not None:
                out.extend(child.subtree_ids())
        return out


def _size(node: Optional[MedianCutNode]) -> int:
    return node.size if node else 0


# ==================== DECOMPOSITION ====================

class MedianCutDecomposition:
    """
    Balanced vertical-line hierarchy over the live regions of a disk family
    """

    def __init__(self, family: Family, policy: Optional[ScapegoatPolicy] = None):
        if not family.is_disk_mode:
            raise StructureError(f"median cut decomposition needs a disk family, got {family.mode.value}")
        self.family = family
        self.policy = policy or ScapegoatPolicy()
        self.slab_width = 2 if family.mode == FamilyMode.UNIT_PLY else 2 * family.k
        self.circles: Dict[int, Circle] = {rid: family.region(rid).as_circle() for rid in family.ids}
        self.points: Dict[int, Point] = {rid: family.region(rid).point
                                         for rid in family.ids if family.is_point(rid)}
        self.centers: Dict[int, object] = {
            rid: self.points[rid].x if rid in self.points else family.region(rid).center.x
            for rid in family.ids}
        self.groups: Dict[Point, List[int]] = point_groups(family, family.ids)
        self.holder: Dict[int, MedianCutNode] = {}
        self.rebuilds = 0
        self.rebuild_work = 0
        self.root: Optional[MedianCutNode] = None
        self.events: Optional[HullEventIndex] = None
        self.root_queue = ConcatenableQueue(self._label)
        self.root_nodes: Dict[Point, HullNode] = {}
        self._root_entries: List[Tuple[Point, HullNode]] = []
        self.pending_added: List[Tuple[Point, Point]] = []
        self.pending_removed: List[Tuple[Point, Point]] = []

    # ==================== BUILD ====================

    def _crosses(self, rid: int, line) -> bool:
        if rid in self.points:
            return self.points[rid].x == line
        c = self.circles[rid]
        return c.min_x <= float(line) <= c.max_x

    def _split_line(self, rids: List[int]):
        xs = sorted(self.centers[rid] for rid in rids)
        m = len(xs) // 2
        if len(xs) == 1 or xs[m - 1] == xs[m]:
            return xs[m]
        return midpoint(xs[m - 1], xs[m])

    def _build(self, rids: List[int], parent: Optional[MedianCutNode]) -> Tuple[MedianCutNode, CircleChain]:
        line = self._split_line(rids)
        crossing, lefts, rights = [], [], []
        for rid in rids:
            if self._crosses(rid, line):
                crossing.append(rid)
            elif self.centers[rid] < line:
                lefts.append(rid)
            else:
                rights.append(rid)
        node = MedianCutNode(line, LineHullTree(self.circles[rid] for rid in crossing), parent=parent)
        for rid in crossing:
            self.holder[rid] = node
        left_hull = right_hull = CircleChain()
        if lefts:
            node.left, left_hull = self._build(lefts, node)
        if rights:
            node.right, right_hull = self._build(rights, node)
        return node, self._merge(node, left_hull, right_hull)

    def build(self) -> "MedianCutDecomposition":
        ids = list(self.family.ids)
        hull = CircleChain()
        self.holder.clear()
        self.root = None
        if ids:
            self.root, hull = self._build(ids, None)
            self.root.star = hull.circles
        self._root_entries = []
        self.root_nodes.clear()
        self.root_queue = ConcatenableQueue(self._label)
        self._publish(hull)
        self.pending_added, self.pending_removed = [], []
        logger.debug(f"MCD built over {self.family.n} regions, height {self.height()}")
        return self

    # ==================== MERGE AND UNFOLD ====================

    def _measure(self, node: MedianCutNode) -> None:
        node.size = len(node.phi) + _size(node.left) + _size(node.right)
        extents = [(self.circles[rid].min_x, self.circles[rid].max_x) for rid in node.phi_ids]
        extents.extend((child.min_x, child.max_x) for child in (node.left, node.right) if child)
        node.min_x = min(lo for lo, _ in extents)
        node.max_x = max(hi for _, hi in extents)

    def _merge(self, node: MedianCutNode, left_hull: CircleChain, right_hull: CircleChain) -> CircleChain:
        """
        Hull of node's subtree from its children's hulls and its line tree; stores
        the slab chains at node and the starred chains at its children
        """
        line, width = float(node.line), self.slab_width
        outer_left, slab_left = split_before(left_hull, line - width)
        slab_right, outer_right = split_after(right_hull, line + width)
        middle = CircleChain.hull_of(slab_left.circles + slab_right.circles + node.phi.hull.circles)

        kept_left, start_middle = bridge(outer_left, middle)
        partial = CircleChain.from_circles(outer_left.circles[:kept_left] + middle.circles[start_middle:])
        kept_partial, start_right = bridge(partial, outer_right)

        node.kept_left = min(kept_left, kept_partial)
        node.kept_right = len(outer_right) - start_right
        node.slab_left, node.slab_right = slab_left.circles, slab_right.circles
        if node.left is not None:
            node.left.star = outer_left.circles[node.kept_left:]
        if node.right is not None:
            node.right.star = outer_right.circles[:start_right]
        self._measure(node)
        return CircleChain.from_circles(partial.circles[:kept_partial] + outer_right.circles[start_right:])

    def unfold(self, node: MedianCutNode, hull: CircleChain) -> Tuple[CircleChain, CircleChain]:
        """Full hulls of node's children from node's full hull"""
        left = right = CircleChain()
        if node.left is not None:
            left = CircleChain.from_circles(
                hull.circles[:node.kept_left] + node.left.star + node.slab_left)
        if node.right is not None:
            right = CircleChain.from_circles(
                node.slab_right + node.right.star + hull.circles[len(hull) - node.kept_right:])
        return left, right

    def _unfold_into(self, node: MedianCutNode, hulls: Dict[int, CircleChain]) -> None:
        left, right = self.unfold(node, hulls[id(node)])
        if node.left is not None:
            hulls[id(node.left)] = left
        if node.right is not None:
            hulls[id(node.right)] = right

    def root_hull(self) -> CircleChain:
        return CircleChain.from_circles(self.root.star) if self.root else CircleChain()

    def full_hulls(self) -> Dict[int, CircleChain]:
        """Full hull of every node, keyed by id(node), unfolded from the root"""
        hulls: Dict[int, CircleChain] = {}
        if self.root is None:
            return hulls
        hulls[id(self.root)] = self.root_hull()
        for node in self.nodes():
            self._unfold_into(node, hulls)
        return hulls

    # ==================== RETRIEVAL ====================

    def _ancestors(self, node: MedianCutNode) -> List[MedianCutNode]:
        path = []
        while node is not None:
            path.append(node)
            node = node.parent
        return path[::-1]

    def rebuild(self, node: MedianCutNode) -> Tuple[MedianCutNode, CircleChain]:
        """Replace node's subtree by a freshly balanced one over the same regions"""
        ids = node.subtree_ids()
        fresh, hull = self._build(ids, node.parent)
        parent = node.parent
        if parent is None:
            self.root = fresh
            fresh.star = hull.circles
        elif parent.left is node:
            parent.left = fresh
        else:
            parent.right = fresh
        self.rebuilds += 1
        self.rebuild_work += len(ids)
        logger.debug(f"Scapegoat rebuild of {len(ids)} regions")
        return fresh, hull

    def retrieve(self, rid: int, p: Point) -> RecourseStat:
        """
        Replace disk rid by its retrieved point

        Args:
            rid: retrieved region id
            p: revealed point

        Returns:
            RecourseStat: root hull vertices removed and added
        """
        holder = self.holder.pop(rid, None)
        if holder is None:
            raise StructureError(f"region {rid} is not stored in the decomposition")
        path = self._ancestors(holder)
        hulls: Dict[int, CircleChain] = {id(self.root): self.root_hull()}
        for node in path:
            self._unfold_into(node, hulls)

        holder.phi.delete(rid)
        circle = Circle(rid, float(p.x), float(p.y), 0.0)
        self.circles[rid], self.points[rid], self.centers[rid] = circle, p, p.x
        insort(self.groups.setdefault(p, []), rid)

        node = holder
        while p.x != node.line:
            side = "left" if p.x < node.line else "right"
            child = getattr(node, side)
            if child is None:
                leaf, leaf_hull = self._build([rid], node)
                setattr(node, side, leaf)
                hulls[id(leaf)] = leaf_hull
                break
            path.append(child)
            self._unfold_into(child, hulls)
            node = child
        else:
            node.phi.insert(circle)
            self.holder[rid] = node

        for node in reversed(path):
            self._measure(node)
        scapegoat = next((node for node in path if self.policy.unbalanced(node)), None)
        if scapegoat is not None:
            fresh, hull = self.rebuild(scapegoat)
            hulls[id(fresh)] = hull
            path = path[:path.index(scapegoat)]
        for node in reversed(path):
            hulls[id(node)] = self._merge(
                node,
                hulls[id(node.left)] if node.left is not None else CircleChain(),
                hulls[id(node.right)] if node.right is not None else CircleChain())
        hull = hulls[id(self.root)]
        self.root.star = hull.circles
        return self._publish(hull)

    # ==================== ROOT QUEUE ====================

    def _label(self, p: Point, q: Optional[Point]) -> int:
        return self.events.label(p, q) if self.events is not None else 0

    def _hull_entry(self, v: HullVertex) -> Tuple[Point, HullNode]:
        if v.rid in self.points:
            location = self.points[v.rid]
            record = VertexRecord(location, frozenset(self.groups[location]), frozenset())
        else:
            location = v.location
            record = VertexRecord(location, frozenset(), frozenset({v.rid}))
        return location, HullNode(record, v.arc_to_next)

    def _publish(self, hull: CircleChain) -> RecourseStat:
        """Splice the changed window of the root hull into the root queue"""
        old = self._root_entries
        new = [self._hull_entry(v) for v in hull.vertices()]
        a = 0
        while a < len(old) and a < len(new) and old[a] == new[a]:
            a += 1
        b = 0
        while b < len(old) - a and b < len(new) - a and old[-1 - b] == new[-1 - b]:
            b += 1
        removed, added = old[a:len(old) - b], new[a:len(new) - b]

        for location, node in added:
            self.root_nodes[location] = node
        queue = self.root_queue
        if a < len(old):
            head, rest = queue.split(old[a][0].x, left_inclusive=False)
        else:
            head, rest = queue, ConcatenableQueue(self._label)
        if removed:
            _, rest = rest.split(removed[-1][0].x, left_inclusive=True)
        middle = ConcatenableQueue.from_points([location for location, _ in added], self._label)
        self.root_queue = head.join(middle).join(rest)
        kept = {location for location, _ in added}
        for location, _ in removed:
            if location not in kept:
                del self.root_nodes[location]

        def window_edges(entries, stop):
            window = [location for location, _ in entries[max(a - 1, 0):stop + 1]]
            return list(zip(window, window[1:]))

        self.pending_removed.extend(window_edges(old, len(old) - b))
        self.pending_added.extend(window_edges(new, len(new) - b))
        self._root_entries = new
        return RecourseStat(removed=len(removed), added=len(added))

    def track_events(self, occupied_test: OccupiedTest, chain_test: ChainTest) -> HullEventIndex:
        """Attach an event index to the root queue and evaluate every root edge"""
        self.events = HullEventIndex(self.family, lambda: self.root_queue, self.root_nodes.__getitem__,
                                     occupied_test, chain_test=chain_test)
        self.root_queue = ConcatenableQueue.from_points(
            [location for location, _ in self._root_entries], self._label)
        self.pending_added, self.pending_removed = [], []
        self.events.rebuild()
        return self.events

    def refresh_events(self, retrieved: Iterable[int] = ()) -> None:
        """Hand the root edges changed since the last refresh to the event index"""
        added, removed = self.pending_added, self.pending_removed
        self.pending_added, self.pending_removed = [], []
        if self.events is not None:
            self.events.refresh(added, removed, retrieved=retrieved)

    # ==================== QUERIES ====================

    def hull_chain(self) -> HullChain:
        nodes = [sentinel_node(self.family.sentinel_left)]
        nodes.extend(node for _, node in self._root_entries)
        nodes.append(sentinel_node(self.family.sentinel_right))
        return HullChain(nodes)

    def regions_meeting(self, meets: ChainFilter) -> List[int]:
        """
        Ids of the crossing regions reached by a top-down descent that unfolds the
        hulls on its way and enters a node, or a line tree node, only when its
        hull passes `meets`
        """
        out: List[int] = []
        stack = [(self.root, self.root_hull())] if self.root is not None else []
        while stack:
            node, hull = stack.pop()
            if not hull or not meets(hull):
                continue
            out.extend(node.phi.search(meets))
            left, right = self.unfold(node, hull)
            if node.left is not None:
                stack.append((node.left, left))
            if node.right is not None:
                stack.append((node.right, right))
        return out

    def nodes(self) -> Iterable[MedianCutNode]:
        stack = [self.root] if self.root else []
        while stack:
            node = stack.pop()
            yield node
            stack.extend(child for child in (node.left, node.right) if child is not None)

    def height(self) -> int:
        def depth(node: Optional[MedianCutNode]) -> int:
            return 0 if node is None else 1 + max(depth(node.left), depth(node.right))
        return depth(self.root)

    def max_slab_edges(self) -> int:
        return max((max(len(node.slab_left), len(node.slab_right), 1) - 1 for node in self.nodes()),
                   default=0)

    def signature(self, node: Optional[MedianCutNode] = None, top: bool = True) -> Tuple:
        """Lines, crossing ids and stored chains of a subtree; the subtree root's own star is left out"""
        node = node if node is not None else self.root
        if node is None:
            return ()

        def rids(circles) -> Tuple[int, ...]:
            return tuple(c.rid for c in circles)

        return (node.line, tuple(node.phi_ids), () if top else rids(node.star),
                rids(node.slab_left), rids(node.slab_right), node.kept_left, node.kept_right,
                self.signature(node.left, False) if node.left else (),
                self.signature(node.right, False) if node.right else ())


def build_mcd(f: Family, policy: Optional[ScapegoatPolicy] = None) -> MedianCutDecomposition:
    """
    Build the decomposition over every region of a disk family

    Args:
        f: disjoint-disks or unit-ply-k family
        policy: scapegoat balance policy

    Returns:
        MedianCutDecomposition: perfectly balanced at build time
    """
    return MedianCutDecomposition(f, policy).build()


__all__ = [
    "ScapegoatPolicy",
    "LineHullTree",
    "MedianCutNode",
    "MedianCutDecomposition",
    "build_mcd",
]
