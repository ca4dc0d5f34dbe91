"""
Harness Testing Suite
Tests everything around the engines:
- Canonical instance files and their error handling
- Seeded generators for every instance class
- Full hull stitching from four rotated runs
- Verification, run statistics and benchmarks
- SVG rendering of a recorded run
- Command line exit codes and batch fan-out
"""

import unittest
from unittest.mock import MagicMock, patch
import sys
import os
import json
import math
import logging
import tempfile
from pathlib import Path

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from celery.exceptions import Retry

from app.config import FamilyMode, InstanceKind, settings
from app.exceptions import FamilyValidationError, InstanceFormatError
from app.geometry.primitives import rational_point as P
from app.regions.family import RetrievalOracle
from app.strategies.naive import NaiveEngine, run_naive
from app.strategies.oracle import hull_order_of
from app.harness.full_hull import full_hull, rotate_point, stitch
from app.harness.generators import gen
from app.harness.instance_io import (
    InstanceFile, RegionModel, load_family, parse_instance, read_instance,
    serialize_instance, write_instance,
)
from app.harness.stats import StatsReport, bench, recourse_histogram, scaling_slope, time_percentiles
from app.harness.svg_renderer import record_run, render_run
from app.harness.verify import verify
from app.tasks.celery_tasks import (
    _retrying, reconstruct_instance_task, reconstruct_payload, run_batch, seeded_payloads, verify_instance_task,
)
import main as cli

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("test_harness")


class TestInstanceFiles(unittest.TestCase):
    """Canonical JSON instances"""

    def setUp(self):
        self.instance = gen("five-regions", 5, 4)
        self.text = serialize_instance(self.instance)

    def test_canonical_text_parses_strictly(self):
        logger.info("🔧 Testing canonical instance files")
        parsed = parse_instance(self.text, strict=True)
        self.assertEqual(serialize_instance(parsed), self.text)
        self.assertEqual(parsed.n, 5)
        self.assertIn('"5/2"', self.text)
        logger.info("✅ Canonical instance test passed")

    def test_non_canonical_text(self):
        compact = json.dumps(json.loads(self.text))
        with self.assertRaises(InstanceFormatError):
            parse_instance(compact, strict=True)
        self.assertEqual(serialize_instance(parse_instance(compact)), self.text)

    def test_decimal_rationals_are_normalised(self):
        model = RegionModel(id=1, kind="polygon", vertices=[["2.5", "0"], ["4", "0"], ["3", "0.75"]])
        self.assertEqual(model.vertices, [["5/2", "0"], ["4", "0"], ["3", "3/4"]])

    def test_format_errors(self):
        logger.info("🔧 Testing instance format errors")
        payload = json.loads(self.text)
        bad_version = dict(payload, version="0")
        extra_field = dict(payload, colour="red")
        for text in ["{not json", json.dumps(bad_version), json.dumps(extra_field)]:
            with self.assertRaises(InstanceFormatError):
                parse_instance(text)
        broken = json.loads(self.text)
        broken["regions"][0]["point"] = ["1/0", "0"]
        with self.assertRaises(InstanceFormatError):
            parse_instance(json.dumps(broken))
        with self.assertRaises(InstanceFormatError):
            read_instance("/nonexistent/instance.json")
        logger.info("✅ Instance format error test passed")

    def test_file_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_instance(self.instance, Path(tmp) / "nested" / "five_regions.json")
            loaded = read_instance(path, strict=True)
        f, hidden = load_family(loaded)
        self.assertEqual(f.mode, FamilyMode.KGON)
        self.assertEqual(hull_order_of(hidden), [1, 3, 2, 4])

    def test_seed_replaces_missing_realization(self):
        payload = gen("kgons", 6, 4, seed=11).model_dump(mode="json", exclude_none=True)
        payload.pop("realization", None)
        instance = InstanceFile.model_validate(payload)
        first = instance.hidden()
        second = instance.hidden()
        self.assertEqual(first.points, second.points)
        self.assertEqual(sorted(first.points), list(range(1, 7)))


class TestGenerators(unittest.TestCase):
    """Seeded instance classes"""

    def test_every_kind_is_valid(self):
        logger.info("🔧 Testing generators")
        for kind in InstanceKind:
            k = 2 if kind in (InstanceKind.DISJOINT_DISKS, InstanceKind.UNIT_PLY) else 4
            with self.subTest(kind=kind.value):
                instance = gen(kind, 8, k, seed=7)
                f, hidden = load_family(instance)
                self.assertEqual(sorted(hidden.points), list(f.ids))
        logger.info("✅ Generator test passed")

    def test_generators_are_deterministic(self):
        for kind in ("kgons", "unit-ply"):
            self.assertEqual(serialize_instance(gen(kind, 10, 3, seed=4)),
                             serialize_instance(gen(kind, 10, 3, seed=4)))

    def test_parameter_errors(self):
        with self.assertRaises(FamilyValidationError):
            gen("kgons", 0, 4)
        with self.assertRaises(FamilyValidationError) as ctx:
            gen("nested-spread", 4, 4)
        self.assertEqual(ctx.exception.reason, "parameter")
        with self.assertRaises(ValueError):
            gen("hexagons", 4, 4)


class TestFullHull(unittest.TestCase):
    """Clockwise order from four rotated runs"""

    def test_rotation(self):
        p = rotate_point(P(2, 1), 1)
        self.assertEqual(p, P(-1, 2))
        self.assertEqual(rotate_point(p, 3), P(2, 1))

    def test_stitch(self):
        self.assertEqual(stitch([[1, 2], [2, 3], [3, 4], [4, 1]]), [1, 2, 3, 4])
        self.assertEqual(stitch([[1], [1], [1], [1]]), [1])
        self.assertEqual(stitch([[1, 2, 3], [3], [3, 4, 1], [1]]), [1, 2, 3, 4])

    def test_five_region_example(self):
        logger.info("🔧 Testing the full hull of the five-region example")
        f, hidden = load_family(gen("five-regions", 5, 4))
        report = full_hull(f, hidden)
        self.assertEqual(report.sides, [[1, 3, 2, 4], [2, 4], [4, 5, 1], [1, 3]])
        self.assertEqual(report.order, [1, 3, 2, 4, 5])
        self.assertEqual(report.retrieved, [3, 4])
        self.assertEqual(len(report.to_dict()["runs"]), 4)
        logger.info("✅ Full hull test passed")


class TestVerifyAndStats(unittest.TestCase):
    """Engine verification and run statistics"""

    def test_verify_five_region_example(self):
        logger.info("🔧 Testing verification")
        f, hidden = load_family(gen("five-regions", 5, 4))
        report = verify(f, hidden)
        self.assertTrue(report.passed)
        self.assertEqual(report.optimum, 2)
        self.assertEqual([v.engine for v in report.verdicts], ["naive", "kgon", "kgon-fast"])
        self.assertTrue(report.verdicts[2].checks["lockstep"])
        self.assertEqual(report.to_dict()["expected_order"], [1, 3, 2, 4])
        logger.info("✅ Verification test passed")

    def test_verify_rejects_incompatible_engine(self):
        f, hidden = load_family(gen("disjoint-disks", 4, 2))
        report = verify(f, hidden, engines=["kgon-fast"], check_optimum=False)
        self.assertFalse(report.passed)
        self.assertIn("does not support", report.verdicts[-1].error)
        self.assertTrue(report.verdicts[0].passed)

    def test_stats_report(self):
        f, hidden = load_family(gen("five-regions", 5, 4))
        stats = StatsReport.from_run(run_naive(f, RetrievalOracle(hidden)), optimum=2)
        self.assertTrue(stats.within_bound)
        payload = stats.to_dict()
        self.assertEqual(payload["cases"], ["nonDividing"])
        self.assertEqual(payload["lower_bound"], 1)
        self.assertIsNone(StatsReport.from_run(run_naive(f, RetrievalOracle(hidden))).within_bound)

    def test_percentiles_and_histogram(self):
        self.assertEqual(time_percentiles([]), {"p50": 0.0, "p90": 0.0, "p99": 0.0})
        self.assertAlmostEqual(time_percentiles([1.0, 2.0, 3.0, 4.0])["p50"], 2.5)
        self.assertEqual(recourse_histogram([2, 1, 2, 0]), {0: 1, 1: 1, 2: 2})
        self.assertEqual(recourse_histogram([]), {})

    def test_scaling_slope(self):
        sizes = [10, 100, 1000]
        medians = [math.log(n) ** 3 for n in sizes]
        self.assertAlmostEqual(scaling_slope(sizes, 1, medians), 1.0, places=6)
        self.assertIsNone(scaling_slope([10], 1, [0.5]))

    def test_bench(self):
        logger.info("🔧 Testing the benchmark")
        result = bench(engine="kgon-fast", kind="kgons", k=4, sizes=[6, 12], seed=1)
        self.assertEqual(result.table["n"].tolist(), [6, 12])
        payload = result.to_dict()
        self.assertEqual(len(payload["rows"]), 2)
        self.assertIn("p90", payload["rows"][0])
        logger.info("✅ Benchmark test passed")


class TestSvgRenderer(unittest.TestCase):
    """Snapshots and SVG output"""

    def test_render_polygon_run(self):
        logger.info("🔧 Testing SVG rendering")
        f, hidden = load_family(gen("five-regions", 5, 4))
        report, log = record_run(NaiveEngine(f.copy(), RetrievalOracle(hidden)))
        self.assertEqual(len(log.snapshots), report.iterations + 1)
        self.assertEqual(log.snapshots[1].case, "nonDividing")
        self.assertEqual(dict(log.snapshots[1].retrieved), {3: (2.0, 3.0), 4: (6.0, 0.0)})
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "five_regions.svg"
            render_run(f, log, path)
            text = path.read_text()
        self.assertIn("<svg", text)
        self.assertIn('id="final"', text)
        logger.info("✅ SVG rendering test passed")

    def test_render_disk_run_without_file(self):
        f, hidden = load_family(gen("unit-ply", 5, 2, seed=2))
        _, log = record_run(NaiveEngine(f.copy(), RetrievalOracle(hidden)))
        drawing = render_run(f, log, width=300, height=300)
        self.assertIn("circle", drawing.tostring())
        self.assertEqual(len(log.to_dict()), len(log.snapshots))


class TestCommandLine(unittest.TestCase):
    """Subcommands and exit codes"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.instance = str(self.dir / "five_regions.json")
        self.assertEqual(cli.main(["gen", "--kind", "five-regions", "--out", self.instance]), cli.EXIT_PASS)

    def tearDown(self):
        self.tmp.cleanup()

    def read_json(self, name):
        return json.loads((self.dir / name).read_text())

    def test_reconstruct_with_svg(self):
        logger.info("🔧 Testing the reconstruct command")
        code = cli.main(["reconstruct", "--input", self.instance, "--engine", "kgon-fast",
                         "--out", str(self.dir / "stats.json"), "--svg", str(self.dir / "run.svg"),
                         "--with-optimum"])
        self.assertEqual(code, cli.EXIT_PASS)
        stats = self.read_json("stats.json")
        self.assertEqual(stats["order"], [1, 3, 2, 4])
        self.assertEqual(stats["retrievals"], 2)
        self.assertEqual(stats["optimum"], 2)
        self.assertTrue((self.dir / "run.svg").exists())
        logger.info("✅ Reconstruct command test passed")

    def test_oracle_verify_and_full_hull(self):
        self.assertEqual(cli.main(["oracle", "--input", self.instance, "--out", str(self.dir / "o.json")]),
                         cli.EXIT_PASS)
        self.assertEqual(self.read_json("o.json"), {"optimum": 2, "retrieval_set": [3, 4]})
        self.assertEqual(cli.main(["verify", "--input", self.instance, "--out", str(self.dir / "v.json")]),
                         cli.EXIT_PASS)
        self.assertTrue(self.read_json("v.json")["passed"])
        self.assertEqual(cli.main(["full-hull", "--input", self.instance, "--out", str(self.dir / "h.json")]),
                         cli.EXIT_PASS)
        self.assertEqual(self.read_json("h.json")["order"], [1, 3, 2, 4, 5])

    def test_failed_verification_exits_one(self):
        failing = MagicMock(passed=False)
        failing.to_dict.return_value = {"passed": False}
        with patch("main.verify", return_value=failing):
            code = cli.main(["verify", "--input", self.instance, "--out", str(self.dir / "v.json")])
        self.assertEqual(code, cli.EXIT_FAIL)

    def test_config_command(self):
        out = self.dir / "config.json"
        self.assertEqual(cli.main(["config", "--out", str(out)]), cli.EXIT_PASS)
        payload = self.read_json("config.json")
        self.assertEqual(payload["issues"], [])
        self.assertEqual(payload["engines"]["slab_chain_factor"], settings.SLAB_CHAIN_FACTOR)
        with patch.object(settings, "SCAPEGOAT_ALPHA", 0.3):
            self.assertEqual(cli.main(["config", "--out", str(out)]), cli.EXIT_FAIL)
        self.assertIn("SCAPEGOAT_ALPHA must lie in (0.5, 1)", self.read_json("config.json")["issues"])

    def test_input_errors_exit_two(self):
        logger.info("🔧 Testing usage error exit codes")
        self.assertEqual(cli.main(["verify", "--input", str(self.dir / "missing.json")]), cli.EXIT_USAGE)
        self.assertEqual(cli.main(["gen", "--kind", "nested-spread", "--n", "3"]), cli.EXIT_USAGE)
        (self.dir / "bad.json").write_text("{")
        self.assertEqual(cli.main(["reconstruct", "--input", str(self.dir / "bad.json")]), cli.EXIT_USAGE)
        disks = str(self.dir / "disks.json")
        cli.main(["gen", "--kind", "disjoint-disks", "--n", "4", "--k", "2", "--out", disks])
        self.assertEqual(cli.main(["reconstruct", "--input", disks, "--engine", "kgon"]), cli.EXIT_USAGE)
        logger.info("✅ Usage error exit code test passed")


class TestBatch(unittest.TestCase):
    """Batch verification through the process pool and Celery"""

    def setUp(self):
        self.payloads = seeded_payloads("kgons", 5, 4, range(2))

    def test_seeded_payloads(self):
        self.assertEqual([p["seed"] for p in self.payloads], [0, 1])
        self.assertEqual(self.payloads[0]["version"], settings.INSTANCE_VERSION)

    def test_local_batch(self):
        logger.info("🔧 Testing local batch verification")
        results = run_batch(self.payloads, use_celery=False, workers=2)
        self.assertEqual([r["status"] for r in results], ["success", "success"])
        self.assertEqual([r["seed"] for r in results], [0, 1])
        single = run_batch(self.payloads[:1], use_celery=False)
        self.assertEqual(single[0]["report"]["mode"], "kgon")
        logger.info("✅ Local batch test passed")

    def test_celery_batch(self):
        expected = [{"status": "success"}, {"status": "success"}]
        with patch("app.tasks.celery_tasks.group") as group:
            group.return_value.apply_async.return_value.get.return_value = expected
            results = run_batch(self.payloads, use_celery=True)
        self.assertEqual(results, expected)
        group.assert_called_once()

    def test_tasks_run_eagerly(self):
        result = verify_instance_task.apply(args=[self.payloads[0]]).get()
        self.assertEqual(result["status"], "success")
        stats = reconstruct_payload(self.payloads[1], engine="naive", with_optimum=True)
        self.assertTrue(stats["stats"]["within_bound"])

    def test_deterministic_failures_are_not_retried(self):
        logger.info("🔧 Testing task failure handling")
        with patch("app.tasks.celery_tasks.verify_payload", side_effect=ValueError("bad geometry")), \
                patch.object(verify_instance_task, "retry") as retry:
            result = verify_instance_task.apply(args=[self.payloads[0]]).get()
        self.assertEqual(result["status"], "error")
        self.assertIn("ValueError", result["message"])
        retry.assert_not_called()
        with patch("app.tasks.celery_tasks.reconstruct_payload", side_effect=ZeroDivisionError("degenerate")), \
                patch.object(reconstruct_instance_task, "retry") as retry:
            result = reconstruct_instance_task.apply(args=[self.payloads[0]]).get()
        self.assertEqual(result["status"], "error")
        retry.assert_not_called()
        logger.info("✅ Task failure handling test passed")

    def test_transient_failures_are_retried(self):
        task = MagicMock()
        task.max_retries = 3
        task.request.retries = 0
        task.retry.return_value = Retry()
        handler = MagicMock(side_effect=ConnectionError("broker unreachable"))
        with self.assertRaises(Retry):
            _retrying(task, "Verification", handler, {})
        self.assertIsInstance(task.retry.call_args.kwargs["exc"], ConnectionError)

        task.request.retries = 3
        result = _retrying(task, "Verification", handler, {})
        self.assertEqual(result["status"], "error")
        self.assertIn("ConnectionError", result["message"])


def run_harness_tests():
    """Run the harness suite with a summary"""
    print("=" * 80)
    print("Hull Reconstruction - Harness Test Suite")
    print("=" * 80)

    test_classes = [TestInstanceFiles, TestGenerators, TestFullHull, TestVerifyAndStats,
                    TestSvgRenderer, TestCommandLine, TestBatch]
    suite = unittest.TestSuite()
    for test_class in test_classes:
        suite.addTests(unittest.TestLoader().loadTestsFromTestCase(test_class))

    result = unittest.TextTestRunner(verbosity=2, stream=sys.stdout).run(suite)
    print(f"Tests Run: {result.testsRun}  Failures: {len(result.failures)}  Errors: {len(result.errors)}")
    return result.wasSuccessful()


if __name__ == "__main__":
    sys.exit(0 if run_harness_tests() else 1)
