"""
Abstract Reconstruction Engine Interface
All engines (naive, kgon baseline/fast, disk) implement this interface
Enforces one step loop, one witness audit and one report format across engines
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import logging
import time

from app.config import CaseTag, FamilyMode, settings
from app.exceptions import EngineModeError, WitnessAuditError
from app.geometry.primitives import Point
from app.regions.family import Family, RetrievalOracle
from app.classify.witness import WitnessSet, extract_witness

logger = logging.getLogger("base_engine")


@dataclass
class StepAction:
    """One iteration of the strategy"""
    case: CaseTag
    witness: Tuple[int, ...]
    retrieved_non_point: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "case": self.case.value,
            "witness": list(self.witness),
            "retrieved_non_point": list(self.retrieved_non_point),
        }


@dataclass
class RunReport:
    """Outcome of one reconstruction run"""
    engine: str
    order: List[int]
    iterations: int
    retrievals: int
    steps: List[StepAction] = field(default_factory=list)
    recourse: List[int] = field(default_factory=list)  # changed bridges per vertex update
    step_times: List[float] = field(default_factory=list)  # seconds per retrieval step

    @property
    def lower_bound(self) -> int:
        """Witnesses of distinct iterations are disjoint, so any finishing set needs one region per iteration"""
        return self.iterations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "engine": self.engine,
            "order": list(self.order),
            "iterations": self.iterations,
            "retrievals": self.retrievals,
            "lower_bound": self.lower_bound,
            "steps": [s.to_dict() for s in self.steps],
            "recourse": list(self.recourse),
            "step_times": list(self.step_times),
        }


StepObserver = Callable[[Family, Optional[StepAction]], None]


class ReconstructionEngine(ABC):
    """
    Abstract base class for all reconstruction engines
    """

    name: str = ""
    supported_modes: Tuple[FamilyMode, ...] = ()

    def __init__(self, family: Family, oracle: RetrievalOracle,
                 audit: Optional[bool] = None):
        if self.supported_modes and family.mode not in self.supported_modes:
            raise EngineModeError(
                f"engine {self.name} does not support mode {family.mode.value}")
        self.family = family
        self.oracle = oracle
        self.audit = settings.AUDIT_WITNESSES if audit is None else audit
        self.steps: List[StepAction] = []
        self.recourse: List[int] = []
        self.step_times: List[float] = []
        self._retrieved_so_far: set = set()

    @abstractmethod
    def next_witness(self) -> Optional[WitnessSet]:
        """
        Witness of the current family from the engine's own structures

        Returns:
            Optional[WitnessSet]: None iff the family is terminal
        """
        pass

    @abstractmethod
    def apply_retrievals(self, retrieved: Dict[int, Point]) -> None:
        """
        Bring the engine's structures up to date after regions became points

        Args:
            retrieved: region id -> revealed point, for regions that were non-point
        """
        pass

    @abstractmethod
    def hull_order(self) -> List[int]:
        """Region ids along the current hull, left to right"""
        pass

    def _audit_witness(self, witness: Optional[WitnessSet]) -> None:
        expected = extract_witness(self.family)
        if expected != witness:
            raise WitnessAuditError(
                f"{self.name}: witness {witness} differs from classifier {expected}")

    def step(self) -> Optional[StepAction]:
        """Retrieve one witness; None when the family is terminal"""
        started = time.perf_counter()
        witness = self.next_witness()
        if self.audit:
            self._audit_witness(witness)
        if witness is None:
            return None

        retrieved: Dict[int, Point] = {}
        for rid in witness.regions:
            if not self.family.is_point(rid):
                retrieved[rid] = self.oracle.retrieve(self.family, rid)
        if not retrieved:
            raise WitnessAuditError(f"{self.name}: witness {witness.regions} holds no non-point region")
        if self._retrieved_so_far & retrieved.keys():
            raise WitnessAuditError(f"{self.name}: region retrieved twice")
        self._retrieved_so_far |= retrieved.keys()

        self.apply_retrievals(retrieved)
        action = StepAction(witness.case, witness.regions, tuple(sorted(retrieved)))
        self.steps.append(action)
        self.step_times.append(time.perf_counter() - started)
        logger.debug(f"{self.name}: {action.case.value} -> {list(action.witness)}")
        return action

    def run(self, observer: Optional[StepObserver] = None) -> RunReport:
        """
        Execute the strategy until the family is terminal

        Args:
            observer: called with the family before the first step (action None)
                and after every retrieval step
        """
        if observer:
            observer(self.family, None)
        limit = self.family.n + 1
        for _ in range(limit):
            action = self.step()
            if action is None:
                break
            if observer:
                observer(self.family, action)
        else:
            raise WitnessAuditError(f"{self.name}: no termination after {limit} iterations")

        report = RunReport(
            engine=self.name,
            order=self.hull_order(),
            iterations=len(self.steps),
            retrievals=self.oracle.count,
            steps=list(self.steps),
            recourse=list(self.recourse),
            step_times=list(self.step_times),
        )
        logger.info(f"✅ {self.name}: n={self.family.n} iterations={report.iterations} "
                    f"retrievals={report.retrievals}")
        return report


__all__ = [
    "StepAction",
    "RunReport",
    "ReconstructionEngine",
    "StepObserver",
]
