"""
Run statistics and benchmarks
- StatsReport: one engine run summarised for the stats file
- bench: per-retrieval time percentiles and changed-bridge histograms over growing n,
  plus the log-log slope of median step time against log^3(kn)
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from app.config import InstanceKind, settings
from app.regions.family import RetrievalOracle
from app.strategies.base import RunReport
from app.strategies.engine_selector import create_engine
from app.harness.generators import gen
from app.harness.instance_io import load_family

logger = logging.getLogger("stats")

PERCENTILES = (50, 90, 99)


@dataclass
class StatsReport:
    """Canonical stats of one reconstruction run"""
    engine: str
    retrievals: int
    iterations: int
    order: List[int]
    optimum: Optional[int] = None
    changed_bridges: List[int] = field(default_factory=list)
    step_times: List[float] = field(default_factory=list)
    cases: List[str] = field(default_factory=list)

    @classmethod
    def from_run(cls, report: RunReport, optimum: Optional[int] = None) -> "StatsReport":
        return cls(
            engine=report.engine,
            retrievals=report.retrievals,
            iterations=report.iterations,
            order=list(report.order),
            optimum=optimum,
            changed_bridges=list(report.recourse),
            step_times=list(report.step_times),
            cases=[s.case.value for s in report.steps],
        )

    @property
    def within_bound(self) -> Optional[bool]:
        if self.optimum is None:
            return None
        return self.retrievals <= 3 * self.optimum

    def to_dict(self) -> Dict[str, Any]:
        return {
            "engine": self.engine,
            "retrievals": self.retrievals,
            "iterations": self.iterations,
            "lower_bound": self.iterations,
            "optimum": self.optimum,
            "within_bound": self.within_bound,
            "order": list(self.order),
            "cases": list(self.cases),
            "changed_bridges": list(self.changed_bridges),
            "step_times": [round(t, 9) for t in self.step_times],
        }


def time_percentiles(step_times: Sequence[float]) -> Dict[str, float]:
    if not step_times:
        return {f"p{q}": 0.0 for q in PERCENTILES}
    values = np.percentile(np.asarray(step_times, dtype=float), PERCENTILES)
    return {f"p{q}": float(v) for q, v in zip(PERCENTILES, values)}


def recourse_histogram(changed: Sequence[int]) -> Dict[int, int]:
    """Number of updates per changed-bridge count"""
    if not len(changed):
        return {}
    counts = pd.Series(list(changed), dtype="int64").value_counts().sort_index()
    return {int(k): int(v) for k, v in counts.items()}


def scaling_slope(sizes: Sequence[int], k: int, medians: Sequence[float]) -> Optional[float]:
    """
    Slope of log(median step time) against log(log^3(kn)); None with fewer than
    two usable sizes
    """
    xs, ys = [], []
    for n, t in zip(sizes, medians):
        if t > 0 and k * n > 2:
            xs.append(math.log(math.log(k * n) ** 3))
            ys.append(math.log(t))
    if len(xs) < 2:
        return None
    slope, _ = np.polyfit(np.asarray(xs), np.asarray(ys), 1)
    return float(slope)


@dataclass
class BenchReport:
    engine: str
    kind: str
    k: int
    table: pd.DataFrame
    histogram: Dict[int, int]
    slope: Optional[float]

    @property
    def slope_ok(self) -> bool:
        return self.slope is None or 0.0 <= self.slope <= settings.SCALING_SLOPE_MAX

    def to_dict(self) -> Dict[str, Any]:
        return {
            "engine": self.engine,
            "kind": self.kind,
            "k": self.k,
            "rows": self.table.to_dict(orient="records"),
            "recourse_histogram": {str(k): v for k, v in self.histogram.items()},
            "slope": self.slope,
            "slope_ok": self.slope_ok,
        }


def bench(engine: str = "kgon-fast", kind: str = InstanceKind.KGONS.value, k: int = 4,
          sizes: Optional[Sequence[int]] = None, seed: Optional[int] = None) -> BenchReport:
    """
    Time one engine on instances of growing size

    Args:
        engine: engine name
        kind: generator kind
        k: complexity parameter
        sizes: instance sizes (settings.BENCH_SIZES by default)
        seed: generator seed

    Returns:
        BenchReport: per-size percentiles, aggregated recourse histogram and scaling slope
    """
    sizes = list(sizes or settings.BENCH_SIZES)
    seed = settings.DEFAULT_SEED if seed is None else seed
    rows = []
    changed: List[int] = []
    for n in sizes:
        family, hidden = load_family(gen(kind, n, k, seed))
        report = create_engine(family, RetrievalOracle(hidden), engine, audit=False).run()
        changed.extend(report.recourse)
        row = {"n": n, "retrievals": report.retrievals, "iterations": report.iterations}
        row.update(time_percentiles(report.step_times))
        row["max_changed_bridges"] = max(report.recourse, default=0)
        rows.append(row)
        logger.info(f"📊 {engine} n={n}: retrievals={report.retrievals} p50={row['p50']:.6f}s")

    table = pd.DataFrame(rows)
    slope = scaling_slope(table["n"].tolist(), k, table["p50"].tolist())
    result = BenchReport(engine, str(kind), k, table, recourse_histogram(changed), slope)
    if not result.slope_ok:
        logger.warning(f"⚠️ scaling slope {slope:.3f} outside [0, {settings.SCALING_SLOPE_MAX}]")
    return result


__all__ = [
    "StatsReport",
    "BenchReport",
    "time_percentiles",
    "recourse_histogram",
    "scaling_slope",
    "bench",
]
