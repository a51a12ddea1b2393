#!/usr/bin/env python3
"""
test_lie_cli.py
===============
Tests d'intégration pour lie_cli.py

Couverture:
  - sorties JSON (champ "schema") et CSV
  - commandes dim, omega, subgroups, variety, complexity, conjecture,
    consistency, report, cache
  - codes de sortie 0 / 2 / 3 / 4
  - sorties identiques octet pour octet à 1 et 4 workers

Usage:
  python test_lie_cli.py
  python -m pytest test_lie_cli.py -v
"""

import contextlib
import io
import json
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

sys.path.insert(0, str(Path(__file__).parent))
import lie_cli
from lie_config import InternalAssertionError


class CliTestCase(unittest.TestCase):
    """Exécute main() en capturant stdout ; cache et base dans un répertoire temporaire."""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.db_path = str(self.tmp / "results.db")
        self.cache_dir = str(self.tmp / "cache")

    def tearDown(self):
        self._tmp.cleanup()

    def run_cli(self, *argv):
        args = list(argv) + ["--db", self.db_path, "--cache-dir", self.cache_dir]
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            code = lie_cli.main(args)
        return code, out.getvalue()

    def run_json(self, *argv):
        code, text = self.run_cli(*argv)
        self.assertEqual(code, lie_cli.EXIT_OK, text)
        doc = json.loads(text)
        self.assertEqual(doc["schema"], 1)
        return doc


class TestSimpleCommands(CliTestCase):
    """dim, omega, subgroups."""

    def test_dim(self):
        doc = self.run_json("dim", "--n", "4", "--p", "2")
        self.assertEqual((doc["dim"], doc["verified"]), (6, True))

    def test_dim_trivial(self):
        doc = self.run_json("dim", "--n", "2", "--p", "2")
        self.assertEqual(doc["dim"], 1)

    def test_dim_without_oracle(self):
        doc = self.run_json("dim", "--n", "9", "--p", "3")
        self.assertEqual(doc["dim"], 40320)
        self.assertIsNone(doc["verified"])

    def test_omega_p_divides_n(self):
        doc = self.run_json("omega", "--n", "3", "--p", "3")
        self.assertTrue(doc["square_is_zero"])
        self.assertTrue(doc["square_check"])
        self.assertEqual(doc["support_size"], 4)

    def test_omega_trivial(self):
        doc = self.run_json("omega", "--n", "1", "--p", "5")
        self.assertEqual(doc["omega"], "1*()")

    def test_omega_6_2(self):
        self.assertTrue(self.run_json("omega", "--n", "6", "--p", "2")["square_check"])

    def test_subgroups(self):
        doc = self.run_json("subgroups", "--n", "8", "--p", "2")
        self.assertEqual([s["shape"] for s in doc["subgroups"]], ["3", "2,2", "2,1,1", "1,1,1,1"])
        doc = self.run_json("subgroups", "--n", "4", "--p", "2")
        self.assertEqual(doc["subgroups"][0]["generators"], ["(1,2)(3,4)", "(1,3)(2,4)"])

    def test_subgroups_none(self):
        self.assertEqual(self.run_json("subgroups", "--n", "3", "--p", "5")["subgroups"], [])


class TestComputeCommands(CliTestCase):
    """variety, complexity, conjecture, consistency."""

    def test_variety_lie4(self):
        doc = self.run_json("variety", "--n", "4", "--p", "2", "--shape", "2", "--mode", "full")
        report = doc["reports"][0]
        self.assertTrue(all(pt["member"] for pt in report["points"]))
        self.assertEqual(report["dimension"]["value"], 2)
        self.assertTrue(report["dimension"]["certified"])

    def test_variety_shortcut(self):
        doc = self.run_json("variety", "--n", "5", "--p", "2")
        for report in doc["reports"]:
            self.assertEqual(report["dimension"]["method"], "point-stabilizer")
            self.assertEqual(report["dimension"]["value"], 0)

    def test_variety_point_mode(self):
        doc = self.run_json("variety", "--n", "4", "--p", "2", "--shape", "1,1",
                            "--mode", "point", "--alpha", "1,0")
        self.assertEqual(doc["reports"][0]["points"][0]["member"], False)

    def test_variety_scan_respects_cap(self):
        doc = self.run_json("variety", "--n", "6", "--p", "2", "--shape", "2,1",
                            "--mode", "scan", "--ext", "1")
        report = doc["reports"][0]
        for pt in report["points"]:
            if pt["alpha"][2] == 0:
                self.assertFalse(pt["member"])
        self.assertLessEqual(report["dimension"]["high"], 1)

    def test_complexity(self):
        self.assertEqual(self.run_json("complexity", "--n", "4", "--p", "2")["value"], 2)
        self.assertEqual(self.run_json("complexity", "--n", "7", "--p", "2")["value"], 0)

    def test_complexity_csv(self):
        code, text = self.run_cli("complexity", "--n", "4", "--p", "2", "--out", "csv")
        self.assertEqual(code, 0)
        lines = text.strip().splitlines()
        self.assertTrue(lines[0].startswith("n,p,m,shape"))
        self.assertEqual(len(lines), 3)

    def test_byte_identical_across_workers(self):
        _, one = self.run_cli("complexity", "--n", "4", "--p", "2", "--threads", "1")
        _, four = self.run_cli("complexity", "--n", "4", "--p", "2", "--threads", "4")
        self.assertEqual(one, four)

    def test_conjecture(self):
        self.assertEqual(self.run_json("conjecture", "--m", "2", "--p", "2")["verdict"],
                         "certified-true")
        self.assertEqual(self.run_json("conjecture", "--m", "1", "--p", "3")["verdict"],
                         "certified-true")

    def test_consistency(self):
        self.assertTrue(self.run_json("consistency", "--n", "6", "--p", "3")["consistent"])


class TestExitCodes(CliTestCase):
    """Correspondance erreurs → codes de sortie."""

    def test_resource_refusal(self):
        code, _ = self.run_cli("complexity", "--n", "8", "--p", "2")
        self.assertEqual(code, lie_cli.EXIT_RESOURCE)

    def test_not_prime(self):
        code, _ = self.run_cli("dim", "--n", "4", "--p", "4")
        self.assertEqual(code, lie_cli.EXIT_INPUT)

    def test_bad_shape(self):
        code, _ = self.run_cli("variety", "--n", "4", "--p", "2", "--shape", "3")
        self.assertEqual(code, lie_cli.EXIT_INPUT)

    def test_bad_ext(self):
        code, _ = self.run_cli("complexity", "--n", "4", "--p", "2", "--ext", "5")
        self.assertEqual(code, lie_cli.EXIT_INPUT)

    def test_point_mode_without_alpha(self):
        code, _ = self.run_cli("variety", "--n", "4", "--p", "2", "--shape", "2",
                               "--mode", "point")
        self.assertEqual(code, lie_cli.EXIT_INPUT)

    def test_internal_assertion(self):
        with patch("lie_cli.orch.assemble", side_effect=InternalAssertionError("borne violée")):
            code, _ = self.run_cli("complexity", "--n", "4", "--p", "2")
        self.assertEqual(code, lie_cli.EXIT_INTERNAL)

    def test_corrupted_cache_is_input_error(self):
        self.run_json("complexity", "--n", "4", "--p", "2")
        for path in Path(self.cache_dir).glob("*.liem"):
            path.write_bytes(b"JUNK" + path.read_bytes()[4:])
        code, _ = self.run_cli("complexity", "--n", "4", "--p", "2")
        self.assertEqual(code, lie_cli.EXIT_INPUT)


class TestPersistenceCommands(CliTestCase):
    """--save, report, cache."""

    def test_save_then_report(self):
        self.run_json("complexity", "--n", "5", "--p", "2", "--save")
        code, text = self.run_cli("report")
        self.assertEqual(code, 0)
        self.assertIn("certifié", text)
        code, text = self.run_cli("report", "--out", "csv")
        self.assertIn("5,2", text)

    def test_report_history_for_one_pair(self):
        self.run_json("complexity", "--n", "4", "--p", "2", "--save")
        self.run_json("complexity", "--n", "4", "--p", "2", "--save")
        self.run_json("complexity", "--n", "5", "--p", "2", "--save")
        self.run_json("variety", "--n", "4", "--p", "2", "--shape", "2", "--save")
        doc = self.run_json("report", "--n", "4", "--p", "2")
        self.assertEqual((doc["n"], doc["p"]), (4, 2))
        self.assertEqual(len(doc["history"]), 2)
        self.assertTrue(all(h["value"] == 2 for h in doc["history"]))
        self.assertGreater(doc["history"][0]["id"], doc["history"][1]["id"])
        self.assertNotIn("payload", doc["history"][0])
        self.assertEqual([r["shape"] for r in doc["variety_reports"]], ["2"])
        code, text = self.run_cli("report", "--n", "4", "--p", "2", "--out", "csv")
        self.assertEqual(code, 0)
        self.assertEqual(len(text.strip().splitlines()), 3)

    def test_report_needs_both_n_and_p(self):
        code, _ = self.run_cli("report", "--n", "4")
        self.assertEqual(code, lie_cli.EXIT_INPUT)

    def test_cache_list_and_clear(self):
        self.run_json("complexity", "--n", "4", "--p", "2")
        files = self.run_json("cache", "list")["files"]
        self.assertEqual(len(files), 2)
        self.assertEqual(self.run_json("cache", "clear")["removed"], 2)
        self.assertEqual(self.run_json("cache")["files"], [])
        self.assertFalse(any(f.endswith(".liem") for f in os.listdir(self.cache_dir)))


if __name__ == "__main__":
    loader = unittest.TestLoader()
    suite = loader.loadTestsFromModule(sys.modules[__name__])
    runner = unittest.TextTestRunner(verbosity=2)
    result = runner.run(suite)
    sys.exit(0 if result.wasSuccessful() else 1)
