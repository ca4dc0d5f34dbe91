"""
Ground-truth classification of hull edges and subchains
"""

from app.classify.outer_hull import HullChain, HullEdge, HullNode, outer_hull
from app.classify.edges import EdgeClass, EdgeLabel, classify_edge, occupied_witness
from app.classify.chains import (
    ChainKind, ChainLabel, candidate_chains_containing, is_hit, is_spanning,
)
from app.classify.witness import WitnessSet, extract_witness, is_terminal, select_event

__all__ = [
    "HullChain",
    "HullEdge",
    "HullNode",
    "outer_hull",
    "EdgeClass",
    "EdgeLabel",
    "classify_edge",
    "occupied_witness",
    "ChainKind",
    "ChainLabel",
    "candidate_chains_containing",
    "is_hit",
    "is_spanning",
    "WitnessSet",
    "extract_witness",
    "is_terminal",
    "select_event",
]
