import contextlib
import csv
import io
import json
import os
import tempfile
import unittest
from unittest import mock

from conedual import cli
from conedual.conedual_base import ConeDualConfigException, Settings, SoundnessException
from conedual.wiener import witness_w

REVESZ_FREE = {
    "version": 1,
    "command": "revesz",
    "problem": {"dim": 1, "M": [1], "L": [1], "r": {"dim": 1, "entries": {"0": 1.0, "1": 1.0}}},
    "schedule": [64, 256, 4096],
    "seed": 0,
}
REVESZ_EMPTY = {
    "command": "revesz",
    "problem": {"M": [], "L": [], "r": {"entries": {"0": 1.0}}},
    "schedule": [64, 128, 256],
}
WIENER = {
    "command": "wiener",
    "problem": {"L": 2, "N": 1, "R": [2, 4, 8], "G": [64, 1024, 4096], "budget": 50, "restarts": 2},
}


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name
        patcher = mock.patch.dict(os.environ, {"CONEDUAL_WORKERS": "1"})
        patcher.start()
        self.addCleanup(patcher.stop)
        self.addCleanup(self._tmp.cleanup)

    def write_config(self, payload, name="config.json"):
        path = os.path.join(self.tmp, name)
        with open(path, "w", encoding="utf-8") as stream:
            if isinstance(payload, str):
                stream.write(payload)
            else:
                json.dump(payload, stream)
        return path

    def run_config(self, payload, out="out", **kwargs):
        out_dir = os.path.join(self.tmp, out)
        stderr = io.StringIO()
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(io.StringIO()):
            code = cli.run(self.write_config(payload), out_dir, **kwargs)
        return code, out_dir, stderr.getvalue()

    def read_report(self, out_dir):
        with open(os.path.join(out_dir, "report.json"), encoding="utf-8") as stream:
            return json.load(stream)

    def read_rows(self, out_dir):
        with open(os.path.join(out_dir, "bracket.csv"), encoding="utf-8") as stream:
            return list(csv.DictReader(stream))


class TestRun(CliTestCase):
    def test_revesz_empty_pattern_is_exact(self):
        code, out_dir, _ = self.run_config(REVESZ_EMPTY)
        self.assertEqual(code, cli.EXIT_OK)
        for level in self.read_report(out_dir)["result"]["levels"]:
            self.assertEqual(level["alpha_certified"], 1.0)
            self.assertEqual(level["omega_certified"], 1.0)
            self.assertEqual(level["gap"], 0.0)

    def test_revesz_report(self):
        code, out_dir, _ = self.run_config(REVESZ_FREE)
        self.assertEqual(code, cli.EXIT_OK)
        report = self.read_report(out_dir)
        self.assertEqual(report["report_version"], cli.REPORT_VERSION)
        self.assertEqual(report["config"], REVESZ_FREE)
        self.assertIsNone(report["error"])
        self.assertLessEqual(report["result"]["gap"], 1e-3)
        for bound in report["result"]["bounds"]:
            self.assertIn(bound["direction"], ("LOWER", "UPPER"))
            self.assertTrue(bound["method"])
        self.assertTrue(os.path.exists(os.path.join(out_dir, "timing.json")))

    def test_csv_is_a_projection(self):
        _, out_dir, _ = self.run_config(REVESZ_FREE)
        levels = self.read_report(out_dir)["result"]["levels"]
        rows = self.read_rows(out_dir)
        self.assertEqual(len(rows), len(levels))
        for row, level in zip(rows, levels):
            for key in ("points_per_axis", "alpha_relaxed", "alpha_certified", "omega_relaxed", "omega_certified", "gap"):
                self.assertEqual(float(row[key]), level[key])

    def test_reports_are_reproducible(self):
        _, first, _ = self.run_config(REVESZ_FREE, out="first")
        _, second, _ = self.run_config(REVESZ_FREE, out="second")
        with open(os.path.join(first, "report.json"), "rb") as a, open(os.path.join(second, "report.json"), "rb") as b:
            self.assertEqual(a.read(), b.read())

    def test_wiener(self):
        code, out_dir, _ = self.run_config(WIENER, seed=5)
        self.assertEqual(code, cli.EXIT_OK)
        rows = self.read_rows(out_dir)
        self.assertEqual([int(row["R"]) for row in rows], [2, 4, 8])
        self.assertLessEqual(float(rows[-1]["upper"]), 2.0 + 1e-6)
        report = self.read_report(out_dir)
        self.assertEqual(report["seed"], 5)
        self.assertGreaterEqual(report["result"]["bounds"][0]["value"], 1.0)

    def test_decompose(self):
        config = {
            "command": "decompose",
            "problem": {"phi": {"entries": {"0": 2.0, "1": 2.0, "2": -1.0}}, "window": 2, "points_per_axis": 256},
        }
        code, out_dir, _ = self.run_config(config)
        self.assertEqual(code, cli.EXIT_OK)
        result = self.read_report(out_dir)["result"]
        self.assertEqual(result["verdict"], "decomposable")
        self.assertEqual(self.read_rows(out_dir)[0]["decomposable"], "True")

    def test_parseval(self):
        config = {"command": "parseval-test", "problem": {"trials": 50, "support": 3, "atoms": 5}, "seed": 2}
        code, out_dir, _ = self.run_config(config)
        self.assertEqual(code, cli.EXIT_OK)
        self.assertTrue(self.read_report(out_dir)["result"]["passed"])
        self.assertEqual(len(self.read_rows(out_dir)), 50)


class TestErrors(CliTestCase):
    def test_malformed_json(self):
        code, out_dir, stderr = self.run_config('{"command": "revesz",')
        self.assertEqual(code, cli.EXIT_CONFIG)
        self.assertFalse(os.path.exists(out_dir))
        self.assertEqual(json.loads(stderr)["error"]["type"], "ConeDualConfigException")

    def test_invalid_configs(self):
        for payload in (
            [],
            {"command": "plot", "problem": {}},
            {"command": "revesz", "problem": {"M": [1]}},
            {"command": "revesz", "problem": {"r": {"entries": {"0": 1.0}}}, "schedule": []},
            {"command": "wiener", "problem": {"L": 2, "N": 1, "R": [2], "G": [64, 128]}},
            {"command": "wiener", "problem": {"L": 1, "N": 1, "R": [2], "G": [64]}},
            {"command": "check-pd", "problem": {}},
            {"command": "revesz", "problem": {"r": {"entries": {"0": 2.0}}}},
            {"command": "revesz", "problem": {"r": {"entries": {"0": 1.0}}}, "seed": -1},
            {"command": "revesz", "problem": {"r": {"entries": {"0": 1.0}}}, "schedule": [128, 64]},
            {"command": "wiener", "problem": {"L": 2, "N": 1, "R": [2], "G": [64], "max_length": 0}},
            {"command": "decompose", "problem": {"phi": {"entries": {"0": 1.0}}, "window": -1}},
            {"command": "check-pd", "problem": {"sequence": {"entries": {"0": 1.0}}, "points_per_axis": 2}},
        ):
            code, out_dir, _ = self.run_config(payload)
            self.assertEqual(code, cli.EXIT_CONFIG, payload)
            self.assertFalse(os.path.exists(out_dir))

    def test_validator_matches_schema_minimums(self):
        path = os.path.join(os.path.dirname(cli.__file__), "schemas", "run_config.schema.json")
        with open(path, "r", encoding="utf-8") as stream:
            schema = json.load(stream)
        minimal = {
            "revesz": {"r": {"entries": {"0": 1.0}}},
            "wiener": {"L": 2, "N": 1, "R": [2], "G": [64]},
            "check-pd": {"sequence": {"entries": {"0": 1.0}}},
            "decompose": {"phi": {"entries": {"0": 1.0}}, "window": 0},
            "parseval-test": {},
        }
        checked = 0
        for rule in schema["allOf"]:
            command = rule["if"]["properties"]["command"]["const"]
            for key, field in rule["then"]["properties"]["problem"]["properties"].items():
                if field.get("type") != "integer" or "minimum" not in field:
                    continue
                problem = dict(minimal[command], **{key: field["minimum"]})
                cli.validate_config({"command": command, "problem": problem})
                problem[key] = field["minimum"] - 1
                with self.assertRaises(ConeDualConfigException, msg=f"{command}.{key}"):
                    cli.validate_config({"command": command, "problem": problem})
                checked += 1
        self.assertGreaterEqual(checked, 12)

    def test_missing_file(self):
        with contextlib.redirect_stderr(io.StringIO()):
            self.assertEqual(cli.run(os.path.join(self.tmp, "absent.json"), self.tmp), cli.EXIT_CONFIG)
        with self.assertRaises(ConeDualConfigException):
            cli.load_config(os.path.join(self.tmp, "absent.json"))

    def test_soundness_failure(self):
        failure = SoundnessException("lower bound above upper bound")
        with mock.patch("conedual.cli.WienerSolver.run_wiener_bracket", side_effect=failure):
            code, out_dir, _ = self.run_config(WIENER)
        self.assertEqual(code, cli.EXIT_SOUNDNESS)
        report = self.read_report(out_dir)
        self.assertIsNone(report["result"])
        self.assertEqual(report["error"]["type"], "SoundnessException")


class TestCheckPd(unittest.TestCase):
    settings = Settings(workers=1)

    def test_witness_is_certified_by_l1_bound(self):
        result = cli.check_pd(witness_w(3, 2).as_dict(), 1024, self.settings, echo=False)
        self.assertEqual((result["status"], result["method"]), ("CERTIFIED_NONNEG", "L1_BOUND"))

    def test_refuted(self):
        result = cli.check_pd({"entries": {"0": 1.0, "1": 0.6}}, 1024, self.settings, echo=False)
        self.assertEqual(result["status"], "REFUTED")
        self.assertAlmostEqual(result["witness"]["x"][0], 3.141592653589793, places=6)
        self.assertAlmostEqual(result["witness"]["value"], -0.2, places=9)

    def test_chi0(self):
        result = cli.check_pd({"entries": {"0": 1.0}}, 64, self.settings, echo=False)
        self.assertEqual(result["status"], "CERTIFIED_NONNEG")
        self.assertEqual(result["certified"]["margin"], 0.0)

    def test_prints_report(self):
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            cli.check_pd({"entries": {"0": 1.0}}, 64, self.settings)
        self.assertEqual(json.loads(stdout.getvalue())["status"], "CERTIFIED_NONNEG")


class TestMain(CliTestCase):
    def test_main(self):
        path = self.write_config({"command": "check-pd", "problem": {"sequence": {"entries": {"0": 1.0}}, "points_per_axis": 64}})
        with contextlib.redirect_stdout(io.StringIO()):
            code = cli.main(["--config", path, "--out", os.path.join(self.tmp, "main"), "--eps-pd", "1e-8"])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(self.read_report(os.path.join(self.tmp, "main"))["tolerances"]["eps_pd"], 1e-8)

    def test_version(self):
        with contextlib.redirect_stdout(io.StringIO()) as stdout:
            with self.assertRaises(SystemExit) as raised:
                cli.main(["--version"])
        self.assertEqual(raised.exception.code, 0)
        self.assertIn("conedual", stdout.getvalue())


if __name__ == "__main__":
    unittest.main()
