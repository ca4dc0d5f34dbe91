"""
Engine Selector
- Registry of every reconstruction engine
- Mode compatibility checks (polygon engines vs disk engine)
- Default engine per family mode
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional

from app.config import DISK_MODES, EngineType, FamilyMode, settings
from app.exceptions import EngineModeError
from app.regions.family import Family, RetrievalOracle
from app.strategies.base import ReconstructionEngine
from app.strategies.disk_engine import DiskEngine
from app.strategies.kgon_engine import KgonEngine
from app.strategies.naive import NaiveEngine

logger = logging.getLogger("engine_selector")

EngineFactory = Callable[[Family, RetrievalOracle, Optional[bool]], ReconstructionEngine]


class SelectionReason(str, Enum):
    REQUESTED = "REQUESTED"
    MODE_DEFAULT = "MODE_DEFAULT"
    CONFIGURED_DEFAULT = "CONFIGURED_DEFAULT"


@dataclass
class EngineSignal:
    engine: EngineType
    reason: SelectionReason
    mode: FamilyMode


class EngineSelector:
    """
    Picks and instantiates engines for a family
    """

    def __init__(self):
        self.engines: Dict[EngineType, EngineFactory] = {
            EngineType.NAIVE: lambda f, o, audit: NaiveEngine(f, o, audit),
            EngineType.KGON: lambda f, o, audit: KgonEngine(f, o, fast=False, audit=audit),
            EngineType.KGON_FAST: lambda f, o, audit: KgonEngine(f, o, fast=True, audit=audit),
            EngineType.DISK: lambda f, o, audit: DiskEngine(f, o, audit),
        }
        self.selection_history: List[EngineSignal] = []

    def compatible_engines(self, mode: FamilyMode) -> List[EngineType]:
        """Engines able to run on a family mode; the naive executor runs everywhere"""
        mode = FamilyMode(mode)
        if mode in DISK_MODES:
            return [EngineType.NAIVE, EngineType.DISK]
        return [EngineType.NAIVE, EngineType.KGON, EngineType.KGON_FAST]

    def select(self, mode: FamilyMode, requested: Optional[str] = None) -> EngineSignal:
        """
        Resolve the engine for a family mode

        Args:
            mode: family mode
            requested: engine name from the command line, if any

        Returns:
            EngineSignal: chosen engine and why
        """
        mode = FamilyMode(mode)
        if requested:
            engine = EngineType(requested)
            if engine not in self.compatible_engines(mode):
                raise EngineModeError(f"engine {engine.value} does not support mode {mode.value}")
            signal = EngineSignal(engine, SelectionReason.REQUESTED, mode)
        else:
            configured = EngineType(settings.DEFAULT_ENGINE)
            if configured in self.compatible_engines(mode):
                signal = EngineSignal(configured, SelectionReason.CONFIGURED_DEFAULT, mode)
            else:
                fallback = EngineType.DISK if mode in DISK_MODES else EngineType.KGON_FAST
                signal = EngineSignal(fallback, SelectionReason.MODE_DEFAULT, mode)
        self.selection_history.append(signal)
        logger.debug(f"Selected engine {signal.engine.value} ({signal.reason.value}) for {mode.value}")
        return signal

    def create(self, family: Family, oracle: RetrievalOracle, requested: Optional[str] = None,
               audit: Optional[bool] = None) -> ReconstructionEngine:
        signal = self.select(family.mode, requested)
        return self.engines[signal.engine](family, oracle, audit)


engine_selector = EngineSelector()


def create_engine(family: Family, oracle: RetrievalOracle, requested: Optional[str] = None,
                  audit: Optional[bool] = None) -> ReconstructionEngine:
    """Instantiate the requested (or default) engine for a family"""
    return engine_selector.create(family, oracle, requested, audit)


__all__ = [
    "EngineSelector",
    "EngineSignal",
    "SelectionReason",
    "engine_selector",
    "create_engine",
]
