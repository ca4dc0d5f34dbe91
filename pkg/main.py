"""
Main entry point for the imprecise hull reconstruction toolkit
---------------------------------------------------------------
Subcommands:
  • gen          generate a seeded instance file
  • reconstruct  run one engine, write stats (and optionally an SVG)
  • oracle       brute-force minimum number of retrievals
  • verify       run every applicable engine and check it
  • bench        per-retrieval timings over growing n
  • full-hull    cyclic order of the whole hull from four rotated runs
  • batch        verify many seeded instances (Celery or process pool)
  • worker       launch a Celery worker for batch runs
  • config       print the effective configuration and its issues

Exit codes: 0 = pass, 1 = verification failure, 2 = usage or input error

Run:
    python main.py gen --kind five-regions --out five_regions.json
    python main.py reconstruct --engine naive --input five_regions.json --svg five_regions.svg
    python main.py verify --input five_regions.json
"""

import sys
import json
import logging
import argparse
import subprocess
from pathlib import Path
from typing import Any, Dict, Optional

# -------------------------------------------------
# Project imports
# -------------------------------------------------
from app.config import (
    EngineType, InstanceKind, settings, get_celery_config, get_engine_config,
    get_geometry_config, get_harness_config, validate_configuration,
)
from app.exceptions import ReconstructionException
from app.regions.family import RetrievalOracle
from app.strategies.engine_selector import create_engine
from app.strategies.oracle import optimal_retrieval_set
from app.harness.full_hull import full_hull
from app.harness.generators import gen
from app.harness.instance_io import load_family, read_instance, serialize_instance, write_instance
from app.harness.stats import StatsReport, bench
from app.harness.svg_renderer import record_run, render_run
from app.harness.verify import verify
from app.tasks.celery_tasks import run_batch, seeded_payloads  # registers tasks with celery_app

logger = logging.getLogger("main")
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format=settings.LOG_FORMAT,
    handlers=[logging.StreamHandler(sys.stdout)],
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


# -------------------------------------------------
# Helper functions
# -------------------------------------------------
def emit(payload: Dict[str, Any], out: Optional[str]) -> None:
    """Write a result as canonical JSON to --out, or to stdout"""
    text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"💾 Wrote {out}")
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    instance = gen(args.kind, args.n, args.k, args.seed)
    if args.out:
        write_instance(instance, args.out)
    else:
        sys.stdout.write(serialize_instance(instance))
    return EXIT_PASS


def cmd_reconstruct(args) -> int:
    family, hidden = load_family(read_instance(args.input))
    optimum = None
    if args.with_optimum:
        optimum = len(optimal_retrieval_set(family, hidden, args.max_oracle_n))
    engine = create_engine(family.copy(), RetrievalOracle(hidden), args.engine)
    if args.svg:
        report, log = record_run(engine)
        render_run(family, log, args.svg)
    else:
        report = engine.run()
    emit(StatsReport.from_run(report, optimum).to_dict(), args.out)
    return EXIT_PASS


def cmd_oracle(args) -> int:
    family, hidden = load_family(read_instance(args.input))
    best = optimal_retrieval_set(family, hidden, args.max_oracle_n)
    emit({"optimum": len(best), "retrieval_set": list(best)}, args.out)
    return EXIT_PASS


def cmd_verify(args) -> int:
    family, hidden = load_family(read_instance(args.input))
    engines = [args.engine] if args.engine else None
    report = verify(family, hidden, engines=engines, max_oracle_n=args.max_oracle_n)
    emit(report.to_dict(), args.out)
    if report.passed:
        logger.info("✅ Verification passed")
        return EXIT_PASS
    logger.error("❌ Verification failed")
    return EXIT_FAIL


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else None
    result = bench(engine=args.engine or EngineType.KGON_FAST.value, kind=args.kind,
                   k=args.k, sizes=sizes, seed=args.seed)
    emit(result.to_dict(), args.out)
    return EXIT_PASS


def cmd_full_hull(args) -> int:
    family, hidden = load_family(read_instance(args.input))
    emit(full_hull(family, hidden, args.engine).to_dict(), args.out)
    return EXIT_PASS


def cmd_batch(args) -> int:
    seeds = range(args.seed, args.seed + args.count)
    results = run_batch(seeded_payloads(args.kind, args.n, args.k, seeds))
    passed = sum(1 for r in results if r.get("status") == "success")
    emit({"count": len(results), "passed": passed, "results": results}, args.out)
    return EXIT_PASS if passed == len(results) else EXIT_FAIL


def cmd_config(args) -> int:
    issues = validate_configuration()
    emit({
        "geometry": get_geometry_config(),
        "engines": get_engine_config(),
        "harness": get_harness_config(),
        "batch": get_celery_config(),
        "issues": issues,
    }, args.out)
    return EXIT_FAIL if issues else EXIT_PASS


def cmd_worker(args) -> int:
    cmd = ["celery", "-A", "app.tasks.celery_tasks", "worker", "-Q", "verify,reconstruct,bench", "--loglevel=info"]
    logger.info("🚜 Launching Celery worker …")
    return subprocess.call(cmd)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Instance-optimal hull reconstruction toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    engines = [e.value for e in EngineType]
    kinds = [k.value for k in InstanceKind]

    p = sub.add_parser("gen", help="Generate an instance file")
    p.add_argument("--kind", choices=kinds, required=True)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("reconstruct", help="Run one engine on an instance")
    p.add_argument("--input", required=True)
    p.add_argument("--engine", choices=engines)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.add_argument("--with-optimum", action="store_true")
    p.add_argument("--max-oracle-n", type=int, default=settings.MAX_ORACLE_N)
    p.set_defaults(handler=cmd_reconstruct)

    p = sub.add_parser("oracle", help="Brute-force minimum number of retrievals")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument("--max-oracle-n", type=int, default=settings.MAX_ORACLE_N)
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("verify", help="Check engines against the naive executor and the optimum")
    p.add_argument("--input", required=True)
    p.add_argument("--engine", choices=engines)
    p.add_argument("--out")
    p.add_argument("--max-oracle-n", type=int, default=settings.MAX_ORACLE_N)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("bench", help="Per-retrieval timings over growing n")
    p.add_argument("--engine", choices=engines)
    p.add_argument("--kind", choices=kinds, default=InstanceKind.KGONS.value)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--sizes", help="comma separated sizes")
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("full-hull", help="Cyclic hull order from four rotated runs")
    p.add_argument("--input", required=True)
    p.add_argument("--engine", choices=engines)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_full_hull)

    p = sub.add_parser("batch", help="Verify many seeded instances")
    p.add_argument("--kind", choices=kinds, default=InstanceKind.KGONS.value)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--count", type=int, default=settings.BATCH_SIZE)
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_batch)

    p = sub.add_parser("worker", help="Launch a Celery worker")
    p.set_defaults(handler=cmd_worker)

    p = sub.add_parser("config", help="Print the effective configuration")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_config)
    return parser


# -------------------------------------------------
# Main routine
# -------------------------------------------------
def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ReconstructionException as exc:
        logger.error(f"❌ {type(exc).__name__}: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        logger.error(f"❌ {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
