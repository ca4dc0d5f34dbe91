"""
Brute-force oracles
- Hull order of a realization (left to right, coincident ids grouped)
- Minimum number of retrievals after which the family is terminal
"""

import logging
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from app.config import settings
from app.exceptions import OracleLimitError
from app.geometry.primitives import Point, upper_quarter_hull
from app.regions.family import Family, Realization
from app.classify.witness import is_terminal

logger = logging.getLogger("oracle")


def hull_order_of(p: Realization) -> List[int]:
    """Region ids on the upper hull of the realization, left to right"""
    if not p.points:
        return []
    by_location: Dict[Point, List[int]] = {}
    for rid, q in p.points.items():
        by_location.setdefault(q, []).append(rid)
    chain = upper_quarter_hull(by_location.keys())
    order: List[int] = []
    for v in chain.vertices:
        order.extend(sorted(by_location[v]))
    return order


def optimal_retrieval_set(f: Family, p: Realization,
                          max_n: Optional[int] = None) -> Tuple[int, ...]:
    """
    Smallest set B of non-point regions such that f with B retrieved under p is terminal

    Args:
        f: family
        p: realization of f
        max_n: largest number of non-point regions to search over

    Returns:
        Tuple[int, ...]: the first optimal set in cardinality, then lexicographic, order
    """
    limit = min(max_n or settings.MAX_ORACLE_N, settings.ORACLE_HARD_LIMIT)
    candidates = f.non_point_ids()
    if len(candidates) > limit:
        raise OracleLimitError(
            f"{len(candidates)} non-point regions exceed the oracle limit {limit}")

    for size in range(len(candidates) + 1):
        for subset in combinations(candidates, size):
            if is_terminal(f.with_retrievals(p, subset)):
                logger.debug(f"Optimal retrieval set {subset}")
                return subset
    return tuple(candidates)


def brute_force_r(f: Family, p: Realization, max_n: Optional[int] = None) -> int:
    return len(optimal_retrieval_set(f, p, max_n))


__all__ = ["hull_order_of", "optimal_retrieval_set", "brute_force_r"]
