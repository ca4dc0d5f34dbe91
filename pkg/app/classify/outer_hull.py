"""
Outer (upper quarter) convex hull of a region family
- kgon mode: upper hull over the vertex set, one node per distinct location
- disk modes: gift-wrapped upper hull of the disk boundaries; consecutive
  nodes on the same disk are joined by an implicit arc and form no edge
- both ends carry the symbolic sentinels
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from app.geometry.disks import Circle, HullVertex, upper_hull_of_circles
from app.geometry.primitives import Point, upper_quarter_hull
from app.regions.family import Family, VertexRecord, vertex_set

logger = logging.getLogger("outer_hull")


@dataclass(frozen=True)
class HullNode:
    """A hull vertex with every region having a vertex at its location"""
    record: VertexRecord
    arc_to_next: bool = False

    @property
    def location(self) -> Optional[Point]:
        return self.record.location

    @property
    def is_sentinel(self) -> bool:
        return self.record.location is None

    @property
    def owner(self) -> int:
        return self.record.owner


@dataclass(frozen=True)
class HullEdge:
    """Edge between hull nodes `index` and `index + 1`"""
    s: HullNode
    t: HullNode
    index: int

    @property
    def s_owner(self) -> int:
        return self.s.owner

    @property
    def t_owner(self) -> int:
        return self.t.owner


def sentinel_node(rid: int) -> HullNode:
    return HullNode(VertexRecord(None, frozenset({rid}), frozenset()))


def node_key(f: Family, node: HullNode) -> Tuple:
    """Left-to-right order of hull nodes: left sentinel, then x ascending and y descending"""
    if node.is_sentinel:
        return (0, 0, 0) if node.owner == f.sentinel_left else (2, 0, 0)
    return (1, node.location.x, -node.location.y)


class HullChain(Sequence):
    """Left-to-right hull nodes, sentinels included"""

    def __init__(self, nodes: Sequence[HullNode]):
        self.nodes: Tuple[HullNode, ...] = tuple(nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, index):
        return self.nodes[index]

    def __iter__(self) -> Iterator[HullNode]:
        return iter(self.nodes)

    def edges(self) -> List[HullEdge]:
        return [HullEdge(self.nodes[i], self.nodes[i + 1], i)
                for i in range(len(self.nodes) - 1) if not self.nodes[i].arc_to_next]

    def locations(self) -> List[Point]:
        return [node.location for node in self.nodes if not node.is_sentinel]

    def region_order(self) -> List[int]:
        """Region ids along the hull; coincident regions grouped and sorted by id"""
        order: List[int] = []
        for node in self.nodes:
            if node.is_sentinel:
                continue
            for rid in sorted(node.record.regions):
                if rid not in order:
                    order.append(rid)
        return order

    def __repr__(self) -> str:
        return f"HullChain({len(self.nodes)} nodes)"


def chain_from_records(f: Family, records: Sequence[VertexRecord]) -> HullChain:
    """Upper hull over vertex records; only the topmost record of each x-column participates"""
    nodes = [sentinel_node(f.sentinel_left)]
    if records:
        by_location: Dict[Point, VertexRecord] = {r.location: r for r in records}
        chain = upper_quarter_hull(by_location.keys())
        nodes.extend(HullNode(by_location[v]) for v in chain.vertices)
    nodes.append(sentinel_node(f.sentinel_right))
    return HullChain(nodes)


def point_groups(f: Family, rids) -> Dict[Point, List[int]]:
    """Point regions grouped by location, ids ascending"""
    groups: Dict[Point, List[int]] = {}
    for rid in sorted(rids):
        desc = f.region(rid)
        if desc.is_point:
            groups.setdefault(desc.point, []).append(rid)
    return groups


def disk_circles(f: Family, rids) -> List[Circle]:
    """One circle per disk and one zero-radius circle per distinct point location"""
    seen = set()
    circles: List[Circle] = []
    for rid in sorted(rids):
        desc = f.region(rid)
        if desc.is_point:
            if desc.point in seen:
                continue
            seen.add(desc.point)
        circles.append(desc.as_circle())
    return circles


def chain_from_disk_hull(f: Family, hull: Sequence[HullVertex],
                         groups: Dict[Point, List[int]]) -> HullChain:
    """Hull nodes for a gift-wrapped disk hull; point vertices carry every coincident id"""
    nodes = [sentinel_node(f.sentinel_left)]
    for v in hull:
        desc = f.region(v.rid)
        if desc.is_point:
            record = VertexRecord(desc.point, frozenset(groups[desc.point]), frozenset())
        else:
            record = VertexRecord(v.location, frozenset(), frozenset({v.rid}))
        nodes.append(HullNode(record, v.arc_to_next))
    nodes.append(sentinel_node(f.sentinel_right))
    return HullChain(nodes)


def _disk_hull(f: Family) -> HullChain:
    circles = disk_circles(f, f.ids)
    return chain_from_disk_hull(f, upper_hull_of_circles(circles), point_groups(f, f.ids))


def outer_hull(f: Family, records: Optional[Sequence[VertexRecord]] = None) -> HullChain:
    """
    Upper quarter hull of the family with owner sets attached

    Args:
        f: region family
        records: precomputed vertex set (kgon mode only)

    Returns:
        HullChain: sentinel-left, hull nodes left to right, sentinel-right
    """
    if f.is_disk_mode:
        return _disk_hull(f)
    return chain_from_records(f, records if records is not None else vertex_set(f))


__all__ = [
    "HullNode",
    "HullEdge",
    "HullChain",
    "sentinel_node",
    "node_key",
    "chain_from_records",
    "point_groups",
    "disk_circles",
    "chain_from_disk_hull",
    "outer_hull",
]
