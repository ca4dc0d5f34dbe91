"""
Witness extraction in case priority order
nonCanonical >> canonical non-dividing >> occupied >> spanning
Within a case the event whose first node is leftmost wins
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from app.config import CaseTag
from app.regions.family import Family, VertexRecord, vertex_set
from app.classify.chains import ChainLabel, block_around, candidate_chain, hit_chain_at, region_dips_below
from app.classify.edges import EdgeClass, edge_class, occupied_witness
from app.classify.outer_hull import HullChain, HullNode, node_key, outer_hull

logger = logging.getLogger("witness")

CASE_PRIORITY: Tuple[CaseTag, ...] = (
    CaseTag.NON_CANONICAL,
    CaseTag.NON_DIVIDING,
    CaseTag.OCCUPIED,
    CaseTag.SPANNING,
)

OccupiedTest = Callable[[VertexRecord, VertexRecord], Optional[int]]
ChainTest = Callable[[Family, Sequence[HullNode], ChainLabel], bool]


def dips_between_flanks(f: Family, nodes: Sequence[HullNode], chain: ChainLabel) -> bool:
    a, b, c = chain.regions
    return region_dips_below(f, b, a, c)


@dataclass(frozen=True)
class WitnessSet:
    """Regions to retrieve (sentinels dropped) with the case that produced them"""
    case: CaseTag
    regions: Tuple[int, ...]
    key: Tuple
    occupant: Optional[int] = None

    def to_dict(self) -> Dict:
        return {"case": self.case.value, "regions": list(self.regions)}


def drop_sentinels(f: Family, ids: Iterable[int]) -> Tuple[int, ...]:
    return tuple(sorted({rid for rid in ids if not f.is_sentinel(rid)}))


def non_canonical_regions(s: VertexRecord, t: VertexRecord) -> Tuple[int, ...]:
    """Two regions at the first non-canonical endpoint, not both point regions"""
    rec = s if not s.is_canonical else t
    non_point = sorted(rec.non_point_regions)
    if len(non_point) >= 2:
        return tuple(non_point[:2])
    return (non_point[0], min(rec.point_regions))


def edge_witness(f: Family, case: CaseTag, s: HullNode, t: HullNode,
                 occupant: Optional[int] = None) -> WitnessSet:
    """Witness for an edge event keyed by its left node"""
    if case == CaseTag.NON_CANONICAL:
        regions = non_canonical_regions(s.record, t.record)
    elif case == CaseTag.OCCUPIED:
        regions = (s.owner, t.owner, occupant)
    else:
        regions = (s.owner, t.owner)
    return WitnessSet(case, drop_sentinels(f, regions), node_key(f, s), occupant)


def chain_witness(f: Family, nodes: Sequence[HullNode], start: int,
                  regions: Iterable[int]) -> WitnessSet:
    return WitnessSet(CaseTag.SPANNING, drop_sentinels(f, regions), node_key(f, nodes[start]))


def select_event(events: Dict[CaseTag, List[WitnessSet]]) -> Optional[WitnessSet]:
    """Highest-priority case, leftmost event"""
    for case in CASE_PRIORITY:
        candidates = events.get(case) or []
        if candidates:
            return min(candidates, key=lambda w: w.key)
    return None


def collect_events(f: Family, hull: HullChain,
                   records: Optional[Sequence[VertexRecord]] = None,
                   exhaustive: bool = False,
                   occupied_test: Optional[OccupiedTest] = None,
                   chain_test: ChainTest = dips_between_flanks) -> Dict[CaseTag, List[WitnessSet]]:
    """
    Events of every case on the hull.

    Unless exhaustive, stops after the first non-empty case; occupied and
    spanning scans then stop at their leftmost event. Engines may supply their
    own occupied and chain tests; both must agree with the defaults.
    """
    if records is None and not f.is_disk_mode:
        records = vertex_set(f)
    if occupied_test is None:
        occupied_test = lambda s, t: occupied_witness(f, s, t, records)
    events: Dict[CaseTag, List[WitnessSet]] = {case: [] for case in CASE_PRIORITY}
    edges = hull.edges()
    labels = {e.index: edge_class(f, e.s.record, e.t.record) for e in edges}

    for e in edges:
        if labels[e.index] == EdgeClass.NON_CANONICAL:
            events[CaseTag.NON_CANONICAL].append(edge_witness(f, CaseTag.NON_CANONICAL, e.s, e.t))
    if events[CaseTag.NON_CANONICAL] and not exhaustive:
        return events

    for e in edges:
        if labels[e.index] == EdgeClass.NON_DIVIDING:
            events[CaseTag.NON_DIVIDING].append(edge_witness(f, CaseTag.NON_DIVIDING, e.s, e.t))
    if events[CaseTag.NON_DIVIDING] and not exhaustive:
        return events

    for e in edges:
        if labels[e.index] != EdgeClass.DIVIDING:
            continue
        occupant = occupied_test(e.s.record, e.t.record)
        if occupant is not None:
            events[CaseTag.OCCUPIED].append(
                edge_witness(f, CaseTag.OCCUPIED, e.s, e.t, occupant))
            if not exhaustive:
                return events

    i = 1
    while i < len(hull) - 1:
        lo, hi = block_around(hull, i)
        chain = candidate_chain(f, hull, lo, hi)
        if chain is not None and chain_test(f, hull, chain):
            events[CaseTag.SPANNING].append(chain_witness(f, hull, chain.start, chain.regions))
            if not exhaustive:
                return events
        i = hi + 1
    return events


def extract_witness(f: Family, hull: Optional[HullChain] = None,
                    records: Optional[Sequence[VertexRecord]] = None,
                    occupied_test: Optional[OccupiedTest] = None,
                    chain_test: ChainTest = dips_between_flanks) -> Optional[WitnessSet]:
    """
    Witness of the highest-priority firing case, or None for a terminal family

    Args:
        f: region family
        hull: outer hull of f (computed when omitted)
        records: vertex set of f (computed when omitted)
        occupied_test: replacement for the brute-force occupied test
        chain_test: replacement for the spanning test of candidate chains

    Returns:
        Optional[WitnessSet]: regions to retrieve next
    """
    if records is None and not f.is_disk_mode:
        records = vertex_set(f)
    if hull is None:
        hull = outer_hull(f, records)
    return select_event(collect_events(f, hull, records, occupied_test=occupied_test,
                                      chain_test=chain_test))


def is_terminal(f: Family) -> bool:
    return extract_witness(f) is None


def hit_chains(f: Family, hull: HullChain,
               records: Optional[Sequence[VertexRecord]] = None):
    """All hit chains of the hull, left to right"""
    out = []
    for e in hull.edges():
        chain = hit_chain_at(f, hull, e.index, records)
        if chain is not None:
            out.append(chain)
    return out


__all__ = [
    "CASE_PRIORITY",
    "dips_between_flanks",
    "WitnessSet",
    "drop_sentinels",
    "non_canonical_regions",
    "edge_witness",
    "chain_witness",
    "select_event",
    "collect_events",
    "extract_witness",
    "is_terminal",
    "hit_chains",
]
