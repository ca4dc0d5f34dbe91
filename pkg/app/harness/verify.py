"""
Engine verification
- Runs every engine applicable to the family mode next to the naive executor
- Checks the final order against the hidden hull, terminality of the final family,
  step-for-step agreement with the naive executor (kgon mode) and the factor-3
  bound against the brute-force optimum when the family is small enough
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from app.config import EngineType, FamilyMode, settings
from app.exceptions import OracleLimitError, ReconstructionException
from app.regions.family import Family, Realization, RetrievalOracle
from app.classify.witness import is_terminal
from app.strategies.base import RunReport
from app.strategies.engine_selector import engine_selector
from app.strategies.oracle import brute_force_r, hull_order_of

logger = logging.getLogger("verify")

OPTIMALITY_FACTOR = 3


@dataclass
class EngineVerdict:
    engine: str
    checks: Dict[str, bool] = field(default_factory=dict)
    report: Optional[RunReport] = None
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "engine": self.engine,
            "passed": self.passed,
            "checks": dict(sorted(self.checks.items())),
        }
        if self.report is not None:
            out["retrievals"] = self.report.retrievals
            out["iterations"] = self.report.iterations
            out["lower_bound"] = self.report.lower_bound
            out["order"] = list(self.report.order)
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class VerifyReport:
    mode: str
    n: int
    expected_order: List[int]
    optimum: Optional[int]
    verdicts: List[EngineVerdict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "n": self.n,
            "passed": self.passed,
            "expected_order": list(self.expected_order),
            "optimum": self.optimum,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }


def _run(engine: EngineType, f: Family, hidden: Realization):
    family = f.copy()
    oracle = RetrievalOracle(hidden)
    report = engine_selector.create(family, oracle, engine.value, audit=True).run()
    return family, report


def _step_signature(report: RunReport) -> List[Dict[str, Any]]:
    return [s.to_dict() for s in report.steps]


def verify(f: Family, hidden: Realization, engines: Optional[List[str]] = None,
           max_oracle_n: Optional[int] = None, check_optimum: bool = True) -> VerifyReport:
    """
    Verify every applicable engine on one instance

    Args:
        f: pristine family
        hidden: hidden realization
        engines: engine names to check (naive always runs); all compatible ones by default
        max_oracle_n: oracle limit on non-point regions
        check_optimum: compute brute_force_r when the family is small enough

    Returns:
        VerifyReport: per-engine verdicts
    """
    compatible = engine_selector.compatible_engines(f.mode)
    selected = [EngineType(e) for e in engines] if engines else list(compatible)
    if EngineType.NAIVE not in selected:
        selected.insert(0, EngineType.NAIVE)

    expected = hull_order_of(hidden)
    optimum = None
    if check_optimum:
        try:
            optimum = brute_force_r(f, hidden, max_oracle_n or settings.MAX_ORACLE_N)
        except OracleLimitError as e:
            logger.info(f"Skipping optimum: {e}")

    result = VerifyReport(f.mode.value, f.n, expected, optimum)
    naive_steps = None
    for engine in selected:
        verdict = EngineVerdict(engine.value)
        result.verdicts.append(verdict)
        if engine not in compatible:
            verdict.error = f"engine {engine.value} does not support mode {f.mode.value}"
            continue
        try:
            family, report = _run(engine, f, hidden)
        except ReconstructionException as e:
            verdict.error = f"{type(e).__name__}: {e}"
            logger.error(f"❌ {engine.value}: {verdict.error}")
            continue

        verdict.report = report
        verdict.checks["order"] = report.order == expected
        verdict.checks["terminal"] = is_terminal(family)
        if optimum is not None:
            verdict.checks["lower_bound"] = report.lower_bound <= optimum <= report.retrievals
            verdict.checks["factor_3"] = report.retrievals <= OPTIMALITY_FACTOR * optimum
        if engine == EngineType.NAIVE:
            naive_steps = _step_signature(report)
        elif f.mode == FamilyMode.KGON and naive_steps is not None:
            verdict.checks["lockstep"] = _step_signature(report) == naive_steps

        glyph = "✅" if verdict.passed else "❌"
        logger.info(f"{glyph} {engine.value}: retrievals={report.retrievals} "
                    f"iterations={report.iterations} optimum={optimum}")
    return result


__all__ = [
    "OPTIMALITY_FACTOR",
    "EngineVerdict",
    "VerifyReport",
    "verify",
]
