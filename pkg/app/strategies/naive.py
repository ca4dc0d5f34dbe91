"""
Naive reference executor
Recomputes the outer hull and classification from scratch every iteration
"""

import logging
from typing import Dict, List, Optional

from app.config import FamilyMode
from app.geometry.primitives import Point
from app.regions.family import Family, RetrievalOracle
from app.classify.outer_hull import outer_hull
from app.classify.witness import WitnessSet, extract_witness, is_terminal
from app.strategies.base import ReconstructionEngine, RunReport

logger = logging.getLogger("naive_engine")


class NaiveEngine(ReconstructionEngine):
    """Ground-truth strategy; every other engine must replay its steps"""

    name = "naive"
    supported_modes = tuple(FamilyMode)

    def _audit_witness(self, witness: Optional[WitnessSet]) -> None:
        # the witness already comes from the classifier
        return None

    def next_witness(self) -> Optional[WitnessSet]:
        return extract_witness(self.family)

    def apply_retrievals(self, retrieved: Dict[int, Point]) -> None:
        return None

    def hull_order(self) -> List[int]:
        return outer_hull(self.family).region_order()


def run_naive(f: Family, oracle: RetrievalOracle) -> RunReport:
    """Run the reference strategy until the family is terminal"""
    return NaiveEngine(f, oracle).run()


__all__ = ["NaiveEngine", "run_naive", "is_terminal"]
