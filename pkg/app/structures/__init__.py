"""
Dynamic hull structures: concatenable queues, partial hull trees, median cut decomposition
"""

from app.structures.concatenable_queue import ConcatenableQueue
from app.structures.hull_events import HullEventIndex, RootHullView
from app.structures.pht import AugmentedHullTree, PartialHullTree, RecourseStat
from app.structures.mcd import MedianCutDecomposition, ScapegoatPolicy, build_mcd

__all__ = [
    "ConcatenableQueue",
    "PartialHullTree",
    "AugmentedHullTree",
    "HullEventIndex",
    "RootHullView",
    "RecourseStat",
    "MedianCutDecomposition",
    "ScapegoatPolicy",
    "build_mcd",
]
