"""
Contiguous hull subchains: candidate, spanning and hit chains
- A block is a maximal run of hull nodes owned solely by one region
- A candidate chain is a block flanked by one node on each side that is not a
  vertex of the block's region, with every edge dividing
- A hit chain joins two blocks at an occupied middle edge
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from app.config import settings
from app.geometry.disks import chain_upper_at, ternary_minimum, upper_hull_of_circles
from app.geometry.primitives import chain_y_at, upper_quarter_hull
from app.regions.family import Family, RegionKind, VertexRecord
from app.classify.edges import EdgeClass, edge_class, occupied_witness
from app.classify.outer_hull import HullNode

logger = logging.getLogger("chains")


class ChainKind(str, Enum):
    CANDIDATE = "candidate"
    SPANNING = "spanning"
    HIT = "hit"


@dataclass(frozen=True)
class ChainLabel:
    """
    Chain of hull nodes start..end (inclusive).

    regions holds (R_a, R_b, R_c) for candidate and spanning chains and the two
    owners of the middle edge for hit chains; middle is the index of the middle
    edge's left node.
    """
    kind: ChainKind
    start: int
    end: int
    regions: Tuple[int, ...]
    middle: Optional[int] = None


def _solely_owned(node: HullNode) -> bool:
    return not node.is_sentinel and node.record.is_canonical


def block_around(nodes: Sequence[HullNode], i: int) -> Tuple[int, int]:
    """Maximal run of nodes around i sharing i's single owner; sentinels are their own block"""
    if not _solely_owned(nodes[i]):
        return i, i
    owner = nodes[i].owner
    lo, hi = i, i
    while lo - 1 >= 0 and _solely_owned(nodes[lo - 1]) and nodes[lo - 1].owner == owner:
        lo -= 1
    while hi + 1 < len(nodes) and _solely_owned(nodes[hi + 1]) and nodes[hi + 1].owner == owner:
        hi += 1
    return lo, hi


def links_dividing(f: Family, nodes: Sequence[HullNode], start: int, end: int) -> bool:
    """Every edge between nodes start..end is dividing; arcs are not edges"""
    for i in range(start, end):
        if nodes[i].arc_to_next:
            continue
        if edge_class(f, nodes[i].record, nodes[i + 1].record) != EdgeClass.DIVIDING:
            return False
    return True


def candidate_chain(f: Family, nodes: Sequence[HullNode], lo: int, hi: int) -> Optional[ChainLabel]:
    """Candidate chain around the block lo..hi, if the flanks qualify"""
    if not _solely_owned(nodes[lo]) or lo - 1 < 0 or hi + 1 >= len(nodes):
        return None
    b = nodes[lo].owner
    q, t = nodes[lo - 1], nodes[hi + 1]
    if b in q.record.regions or b in t.record.regions:
        return None
    if not links_dividing(f, nodes, lo - 1, hi + 1):
        return None
    return ChainLabel(ChainKind.CANDIDATE, lo - 1, hi + 1, (q.owner, b, t.owner))


def candidate_chains_containing(f: Family, nodes: Sequence[HullNode], i: int) -> List[ChainLabel]:
    """
    Maximal candidate chains containing the edge (nodes[i], nodes[i + 1]).

    At most two: the block around an edge interior to a block, or the block
    ending at its left node and the block starting at its right node.
    """
    s, t = nodes[i], nodes[i + 1]
    chains: List[ChainLabel] = []
    if _solely_owned(s) and _solely_owned(t) and s.owner == t.owner:
        chain = candidate_chain(f, nodes, *block_around(nodes, i))
        return [chain] if chain else []
    if _solely_owned(s):
        lo, hi = block_around(nodes, i)
        chain = candidate_chain(f, nodes, lo, hi)
        if chain:
            chains.append(chain)
    if _solely_owned(t):
        lo, hi = block_around(nodes, i + 1)
        chain = candidate_chain(f, nodes, lo, hi)
        if chain:
            chains.append(chain)
    return chains


# ==================== SPANNING ====================

def _polygon_dips(f: Family, b: int, flanks: List[int]) -> bool:
    region = f.region(b)
    corners = []
    for rid in flanks:
        desc = f.region(rid)
        corners.extend((desc.point,) if desc.is_point else desc.vertices)
    upper = upper_quarter_hull(corners).vertices
    b_lo, b_hi = f.x_range(b)
    lo, hi = max(b_lo, upper[0].x), min(b_hi, upper[-1].x)
    if lo > hi:
        return False
    xs = {lo, hi}
    if region.kind == RegionKind.POLYGON:
        xs.update(v.x for v in region.vertices if lo <= v.x <= hi)
    xs.update(v.x for v in upper if lo <= v.x <= hi)
    return any(region.lower_at(x) < chain_y_at(upper, x) for x in xs)


def _disk_dips(f: Family, b: int, flanks: List[int]) -> bool:
    circles = [f.region(rid).as_circle() for rid in flanks]
    chain = upper_hull_of_circles(circles)
    by_id = {c.rid: c for c in circles}
    u_lo = min(c.min_x for c in circles)
    u_hi = max(c.max_x for c in circles)
    target = f.region(b).as_circle()
    lo, hi = max(target.min_x, u_lo), min(target.max_x, u_hi)
    if lo > hi:
        return False

    def gap(x: float) -> float:
        return target.lower_y(x) - chain_upper_at(chain, by_id, x)

    _, value = ternary_minimum(gap, lo, hi)
    return min(value, gap(lo), gap(hi)) < -settings.EPSILON


def region_dips_below(f: Family, b: int, a: int, c: int) -> bool:
    """
    Region b meets the open inside of the outer hull of {R_a, R_c}: some point of b
    lies strictly below the upper boundary of the non-sentinel flanks, within their
    x-range. Empty when both flanks are sentinels.
    """
    flanks = [rid for rid in (a, c) if not f.is_sentinel(rid)]
    if not flanks or f.is_sentinel(b):
        return False
    if f.is_disk_mode:
        return _disk_dips(f, b, flanks)
    return _polygon_dips(f, b, flanks)


def is_spanning(f: Family, nodes: Sequence[HullNode], chain: ChainLabel) -> bool:
    """Candidate chain whose middle region dips below the hull of its flanking regions"""
    if chain.end - chain.start < 2:
        return False
    recomputed = candidate_chain(f, nodes, chain.start + 1, chain.end - 1)
    if recomputed is None or block_around(nodes, chain.start + 1) != (chain.start + 1, chain.end - 1):
        return False
    a, b, c = recomputed.regions
    return region_dips_below(f, b, a, c)


def spanning_chain_at(f: Family, nodes: Sequence[HullNode], lo: int, hi: int) -> Optional[ChainLabel]:
    chain = candidate_chain(f, nodes, lo, hi)
    if chain is None:
        return None
    a, b, c = chain.regions
    if not region_dips_below(f, b, a, c):
        return None
    return ChainLabel(ChainKind.SPANNING, chain.start, chain.end, chain.regions)


# ==================== HIT ====================

def hit_chain_frame(f: Family, nodes: Sequence[HullNode], i: int) -> Optional[ChainLabel]:
    """
    Chain that would be a hit chain around the edge (nodes[i], nodes[i + 1]) if
    that edge were occupied. A sentinel block has no outer flank.
    """
    if i < 0 or i + 1 >= len(nodes) or nodes[i].arc_to_next:
        return None
    s, t = nodes[i], nodes[i + 1]
    if s.owner == t.owner or (s.is_sentinel and t.is_sentinel):
        return None
    if edge_class(f, s.record, t.record) != EdgeClass.DIVIDING:
        return None

    left_lo, _ = block_around(nodes, i)
    _, right_hi = block_around(nodes, i + 1)
    start = left_lo if s.is_sentinel else left_lo - 1
    end = right_hi if t.is_sentinel else right_hi + 1
    if start < 0 or end >= len(nodes):
        return None
    if not s.is_sentinel and s.owner in nodes[start].record.regions:
        return None
    if not t.is_sentinel and t.owner in nodes[end].record.regions:
        return None
    if not links_dividing(f, nodes, start, end):
        return None
    return ChainLabel(ChainKind.HIT, start, end, (s.owner, t.owner), middle=i)


def hit_chain_at(f: Family, nodes: Sequence[HullNode], i: int,
                 records: Optional[Sequence[VertexRecord]] = None,
                 occupant: Optional[int] = None) -> Optional[ChainLabel]:
    """
    Hit chain whose middle edge is (nodes[i], nodes[i + 1]), if any.
    `occupant` skips the band test when the caller already knows the edge is occupied.
    """
    frame = hit_chain_frame(f, nodes, i)
    if frame is None:
        return None
    if occupant is None:
        occupant = occupied_witness(f, nodes[i].record, nodes[i + 1].record, records)
    return frame if occupant is not None else None


def is_hit(f: Family, nodes: Sequence[HullNode], chain: ChainLabel,
           records: Optional[Sequence[VertexRecord]] = None) -> bool:
    if chain.middle is None:
        return False
    return hit_chain_at(f, nodes, chain.middle, records) == chain


__all__ = [
    "ChainKind",
    "ChainLabel",
    "block_around",
    "links_dividing",
    "candidate_chain",
    "candidate_chains_containing",
    "region_dips_below",
    "is_spanning",
    "spanning_chain_at",
    "hit_chain_frame",
    "hit_chain_at",
    "is_hit",
]
