"""
Celery Background Tasks for batch reconstruction
- Verification of one instance against every applicable engine
- Reconstruction of one instance with a chosen engine
- Benchmarks of one engine over growing instance sizes
- Batch fan-out through Celery or a local process pool
Tasks take canonical instance payloads (JSON dictionaries) and return plain report dictionaries
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional

from celery import group
from kombu.exceptions import OperationalError

from app.config import settings
from app.exceptions import ReconstructionException
from app.regions.family import RetrievalOracle
from app.strategies.engine_selector import create_engine
from app.strategies.oracle import brute_force_r
from app.harness.generators import gen
from app.harness.instance_io import InstanceFile, load_family
from app.harness.stats import StatsReport, bench
from app.harness.verify import verify

# Configure logging
logger = logging.getLogger("celery_tasks")

# Import celery app from config
from app.tasks.celery_config import celery_app

# Broker, backend and file-system hiccups; anything else fails the same way on retry
TRANSIENT_ERRORS = (OSError, OperationalError)

# ============================================================================
# PAYLOAD HANDLERS
# ============================================================================


def _load(payload: Dict[str, Any]):
    return load_family(InstanceFile.model_validate(payload))


def verify_payload(payload: Dict[str, Any], engines: Optional[List[str]] = None,
                   max_oracle_n: Optional[int] = None) -> Dict[str, Any]:
    family, hidden = _load(payload)
    report = verify(family, hidden, engines=engines, max_oracle_n=max_oracle_n)
    return {"status": "success" if report.passed else "failed", "report": report.to_dict(),
            "seed": payload.get("seed")}


def reconstruct_payload(payload: Dict[str, Any], engine: Optional[str] = None,
                        with_optimum: bool = False) -> Dict[str, Any]:
    family, hidden = _load(payload)
    optimum = brute_force_r(family, hidden) if with_optimum else None
    report = create_engine(family, RetrievalOracle(hidden), engine).run()
    return {"status": "success", "stats": StatsReport.from_run(report, optimum).to_dict(),
            "seed": payload.get("seed")}


def bench_payload(params: Dict[str, Any]) -> Dict[str, Any]:
    result = bench(engine=params.get("engine", "kgon-fast"), kind=params.get("kind", "kgons"),
                   k=params.get("k", 4), sizes=params.get("sizes"), seed=params.get("seed"))
    return {"status": "success", "bench": result.to_dict()}


def _guarded(handler: Callable[..., Dict[str, Any]], *args, **kwargs) -> Dict[str, Any]:
    try:
        return handler(*args, **kwargs)
    except ReconstructionException as e:
        logger.error(f"❌ {handler.__name__} rejected input: {e}")
        return {"status": "error", "message": f"{type(e).__name__}: {e}"}


def _retrying(task, label: str, handler: Callable[..., Dict[str, Any]], *args) -> Dict[str, Any]:
    """Run a handler inside a bound task; only transient errors are retried"""
    try:
        return _guarded(handler, *args)
    except TRANSIENT_ERRORS as e:
        logger.warning(f"⚠️ {label} task hit a transient error: {e}")
        if task.request.retries < task.max_retries:
            raise task.retry(countdown=settings.TASK_TIME_LIMIT // 10, exc=e)
        return {"status": "error", "message": f"{type(e).__name__}: {e}"}
    except Exception as e:
        logger.error(f"❌ {label} task failed: {e}")
        return {"status": "error", "message": f"{type(e).__name__}: {e}"}


# ============================================================================
# TASKS
# ============================================================================

@celery_app.task(bind=True, max_retries=3)
def verify_instance_task(self, payload: Dict[str, Any], engines: Optional[List[str]] = None,
                         max_oracle_n: Optional[int] = None):
    """Verify one instance against every applicable engine"""
    return _retrying(self, "Verification", verify_payload, payload, engines, max_oracle_n)


@celery_app.task(bind=True, max_retries=3)
def reconstruct_instance_task(self, payload: Dict[str, Any], engine: Optional[str] = None,
                              with_optimum: bool = False):
    """Reconstruct one instance and return its stats"""
    return _retrying(self, "Reconstruction", reconstruct_payload, payload, engine, with_optimum)


@celery_app.task(bind=True, max_retries=1)
def bench_instance_task(self, params: Dict[str, Any]):
    """Benchmark one engine over growing instance sizes"""
    try:
        return _guarded(bench_payload, params)
    except Exception as e:
        logger.error(f"Benchmark task failed: {e}")
        return {"status": "error", "message": str(e)}


# ============================================================================
# BATCH EXECUTION
# ============================================================================

def seeded_payloads(kind: str, n: int, k: int, seeds: Iterable[int]) -> List[Dict[str, Any]]:
    """Canonical payloads of generated instances, one per seed"""
    return [gen(kind, n, k, seed).model_dump(mode="json", exclude_none=True) for seed in seeds]


def _verify_local(payload: Dict[str, Any]) -> Dict[str, Any]:
    return _guarded(verify_payload, payload)


def run_batch(payloads: List[Dict[str, Any]], use_celery: Optional[bool] = None,
              workers: Optional[int] = None) -> List[Dict[str, Any]]:
    """
    Verify many instances in parallel

    Args:
        payloads: canonical instance dictionaries
        use_celery: fan out through Celery (settings.USE_CELERY by default)
        workers: process pool size when Celery is not used

    Returns:
        List[Dict[str, Any]]: one result per payload, in input order
    """
    use_celery = settings.USE_CELERY if use_celery is None else use_celery
    if use_celery:
        job = group(verify_instance_task.s(payload) for payload in payloads)
        results = job.apply_async().get(disable_sync_subtasks=False)
    elif len(payloads) <= 1:
        results = [_verify_local(payload) for payload in payloads]
    else:
        with ProcessPoolExecutor(max_workers=workers or settings.BATCH_WORKERS) as pool:
            results = list(pool.map(_verify_local, payloads))

    failed = sum(1 for r in results if r.get("status") != "success")
    glyph = "✅" if failed == 0 else "❌"
    logger.info(f"{glyph} Batch of {len(results)} instances: {failed} not passing")
    return results


# Export all tasks
__all__ = [
    "verify_instance_task",
    "reconstruct_instance_task",
    "bench_instance_task",
    "verify_payload",
    "reconstruct_payload",
    "bench_payload",
    "seeded_payloads",
    "run_batch",
]
