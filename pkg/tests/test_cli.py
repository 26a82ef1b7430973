#  Copyright 2023 The HuggingFace Team. All rights reserved.
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.

import contextlib
import io
import json
import tempfile
import unittest
from pathlib import Path

import jsonschema
from testing_utils import slow

from invkit.commands.invkit_cli import main
from invkit.commands.verify import _statuses
from invkit.nilpotent import nilpotent_test_matrices
from invkit.scalars import PrimeFieldWithRoots
from invkit.septest import builtin_witness
from invkit.utils import REPORT_SCHEMA


def run_cli(*argv):
    stdout = io.StringIO()
    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(io.StringIO()):
        status = main(list(argv))
    return status, stdout.getvalue()


def read_report(path):
    with open(path) as f:
        payload = json.load(f)
    with open(REPORT_SCHEMA) as f:
        jsonschema.validate(instance=payload, schema=json.load(f))
    return payload


class InvkitCLITest(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.path = Path(self.tmpdir.name)

    def tearDown(self):
        self.tmpdir.cleanup()

    def write(self, name, obj):
        path = self.path / name
        with open(path, "w") as f:
            json.dump(obj, f)
        return str(path)

    def test_list_sets(self):
        status, out = run_cli("list-sets")
        self.assertEqual(status, 0)
        self.assertIn("gl2:", out)
        self.assertIn("o3-sym-d3:", out)

        status, out = run_cli("list-sets", "--case", "gl2", "--d", "2")
        self.assertEqual(status, 0)
        self.assertIn("(5 invariants, n=2, d=2)", out)
        self.assertIn("tr(1 2)", out)

    def test_expand(self):
        report = str(self.path / "expand.json")
        status, out = run_cli("expand", "--expr", "tr(1 2)", "--n", "2", "--json", report)
        self.assertEqual(status, 0)
        self.assertIn("x11(1)", out)
        payload = read_report(report)
        self.assertEqual(payload["command"], "expand")
        self.assertTrue(payload["pass"])
        self.assertEqual(payload["result"]["monomials"], 4)

    def test_eval_nilpotent_tuple(self):
        suite = nilpotent_test_matrices(PrimeFieldWithRoots(17, 4, 6))
        obj = suite.to_json()
        path = self.write(
            "nilpotent.json",
            {"n": 3, "d": 3, "field": obj["field"], "tuples": [[obj["T1"], obj["T2"], obj["T3"]]]},
        )
        report = str(self.path / "eval.json")
        status, out = run_cli("eval", "--expr", "tr(1 2 3)", "--input", path, "--json", report)
        self.assertEqual(status, 0)
        self.assertEqual(out.split(), ["2"])
        self.assertEqual(read_report(report)["result"]["values"][0]["value"], "2")

        status, out = run_cli("eval", "--expr", "tr(1 2)", "--input", path)
        self.assertEqual(out.split(), ["4"])

    def test_eval_declared_shape_mismatch(self):
        path = self.write("bad.json", {"n": 3, "field": "Q", "tuples": [[[[1, 0], [0, 1]]]]})
        status, _ = run_cli("eval", "--expr", "tr(1)", "--input", path)
        self.assertEqual(status, 2)

    def test_separate(self):
        pair = builtin_witness("o3-sym-d2", "tr(1 2 2)")
        path = self.write("pair.json", {"field": "Q", "tuples": [pair.u.to_json(), pair.v.to_json()]})
        report = str(self.path / "separate.json")
        status, out = run_cli("separate", "--case", "o3-sym-d2", "--input", path, "--json", report)
        self.assertEqual(status, 0)
        self.assertIn("separated by tr(1 2 2)", out)
        self.assertEqual(read_report(report)["result"]["first_separator"], "tr(1 2 2)")

        same = self.write("same.json", {"field": "Q", "tuples": [pair.u.to_json(), pair.u.to_json()]})
        status, out = run_cli("separate", "--case", "o3-sym-d2", "--input", same)
        self.assertEqual(status, 1)
        self.assertIn("not separated", out)

        single = self.write("single.json", {"field": "Q", "tuples": [pair.u.to_json()]})
        status, _ = run_cli("separate", "--case", "o3-sym-d2", "--input", single)
        self.assertEqual(status, 2)

    def test_decompose(self):
        status, out = run_cli("decompose", "--expr", "tr(1 1 2 2 1 2)", "--certificate", "--expect", "decomposable")
        self.assertEqual(status, 0)
        self.assertIn("decomposable", out)

        report = str(self.path / "decompose.json")
        status, _ = run_cli(
            "decompose", "--expr", "tr(1 1 2 2 1 2)", "--expect", "indecomposable", "--json", report
        )
        self.assertEqual(status, 1)
        payload = read_report(report)
        self.assertFalse(payload["pass"])
        self.assertTrue(payload["result"]["decomposable"])

        status, out = run_cli("decompose", "--expr", "tr(1 2 3)", "--expect", "indecomposable")
        self.assertEqual(status, 0)
        self.assertIn("indecomposable", out)

    def test_search_witness(self):
        status, out = run_cli(
            "search-witness", "--case", "gl2", "--expr", "sigma_2(1)", "--d", "1", "--budget", "2000"
        )
        self.assertEqual(status, 0)
        self.assertIn("witness found", out)

    def test_verify_theorem(self):
        report = str(self.path / "theorem.json")
        status, out = run_cli("verify", "theorem", "--case", "gl2", "--json", report)
        self.assertEqual(status, 0)
        self.assertIn("theorem over Q: PASS", out)
        payload = read_report(report)
        self.assertEqual(sorted(payload), ["command", "pass", "result"])
        self.assertEqual(payload["command"], "verify")
        self.assertEqual(payload["result"]["name"], "theorem")
        self.assertEqual(len(payload["result"]["reports"]), 1)

    def test_verify_reports_are_reproducible(self):
        first, second = str(self.path / "first.json"), str(self.path / "second.json")
        run_cli("verify", "theorem", "--case", "o3-sym-d2", "--json", first)
        run_cli("verify", "theorem", "--case", "o3-sym-d2", "--json", second)
        with open(first, "rb") as f, open(second, "rb") as g:
            self.assertEqual(f.read(), g.read())

    @slow
    def test_verify_all_reports_are_reproducible(self):
        first, second = str(self.path / "first.json"), str(self.path / "second.json")
        first_status, _ = run_cli("verify", "all", "--json", first)
        second_status, _ = run_cli("verify", "all", "--json", second)
        self.assertEqual(first_status, second_status)
        with open(first, "rb") as f, open(second, "rb") as g:
            self.assertEqual(f.read(), g.read())
        self.assertEqual(read_report(first)["pass"], first_status == 0)

    def test_unmarked_rows_count_as_failures(self):
        self.assertEqual(_statuses({"entries": [{}]}), "1 fail")
        self.assertEqual(_statuses({"entries": [{"pass": True}, {"pass": False}]}), "1 fail, 1 pass")
        self.assertEqual(_statuses({"instances": [{"status": "uncertified", "pass": False}]}), "1 uncertified")

    def test_verify_ansatz(self):
        status, out = run_cli("verify", "ansatz", "--target", "f2")
        self.assertEqual(status, 0)
        self.assertIn("f2: pass", out)

    def test_config_file(self):
        config = self.write("invkit_config.json", {"verification": {"field": "F5"}})
        status, out = run_cli("list-sets", "--case", "o3-sym-d3", "--config", config)
        self.assertEqual(status, 0)
        self.assertIn("(28 invariants", out)

        status, out = run_cli("list-sets", "--case", "o3-sym-d3", "--field", "F3")
        self.assertIn("(29 invariants", out)

    def test_errors(self):
        self.assertEqual(run_cli()[0], 2)
        self.assertEqual(run_cli("expand", "--expr", "tr(1 x)", "--n", "2")[0], 2)
        self.assertEqual(run_cli("eval", "--expr", "tr(1)", "--input", str(self.path / "missing.json"))[0], 2)
        self.assertEqual(run_cli("list-sets", "--field", "F4")[0], 2)
        with self.assertRaises(SystemExit):
            run_cli("expand", "--expr", "tr(1)")
