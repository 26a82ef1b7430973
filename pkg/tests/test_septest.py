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

import unittest

from parameterized import parameterized

from invkit.genmat import concrete_from_rows, signed_permutation, sym6
from invkit.invlang import evaluate, standard_set
from invkit.scalars import RATIONALS, PrimeField
from invkit.septest import (
    MatrixTuple,
    builtin_witness,
    search_witness,
    separates,
    transport,
    verify_minimality,
)
from invkit.utils import CharacteristicError, FieldMismatchError, WitnessNotFoundError


WITNESS_CASES = ("gl2", "gl3-d2", "o3-skew", "o4-skew-d2", "o3-sym-d2")


class MinimalityTest(unittest.TestCase):
    @parameterized.expand([(case,) for case in WITNESS_CASES])
    def test_witnesses_over_rationals(self, case_name):
        report = verify_minimality(case_name, RATIONALS)
        self.assertTrue(report.passed, [e.to_dict() for e in report.entries if not e.passed])
        self.assertTrue(all(entry.status == "pass" for entry in report.entries))

    @parameterized.expand([(case, p) for case in WITNESS_CASES for p in (5, 7)])
    def test_witnesses_over_prime_fields(self, case_name, p):
        report = verify_minimality(case_name, PrimeField(p))
        self.assertTrue(report.passed)
        self.assertEqual(report.to_dict()["field"], f"F{p}")

    def test_gl2_larger_d(self):
        report = verify_minimality("gl2", RATIONALS, d=4)
        self.assertEqual(len(report.entries), len(standard_set("gl2", 4)))
        self.assertTrue(report.passed)

    def test_o3_skew_covers_two_and_three_matrices(self):
        report = verify_minimality("o3-skew")
        self.assertEqual(sorted({entry.d for entry in report.entries}), [2, 3])
        self.assertEqual(len(report.entries), 3 + 7)

    def test_characteristic_two_is_rejected(self):
        with self.assertRaises(CharacteristicError):
            verify_minimality("o3-sym-d2", PrimeField(2))

    def test_characteristic_three(self):
        self.assertTrue(verify_minimality("gl3-d2", PrimeField(3)).passed)
        self.assertTrue(verify_minimality("o3-sym-d2", PrimeField(3)).passed)


class SeparationTest(unittest.TestCase):
    def test_builtin_witness_separates_only_its_member(self):
        inv_set = standard_set("o3-sym-d2")
        pair = builtin_witness("o3-sym-d2", "tr(1 2 2)")
        self.assertEqual(inv_set.text(pair.separator), "tr(1 2 2)")
        report = separates(inv_set, pair.u, pair.v)
        self.assertTrue(report.separated)
        self.assertEqual(report.first_separator, "tr(1 2 2)")
        self.assertFalse(separates(inv_set.without("tr(1 2 2)"), pair.u, pair.v).separated)

    def test_witness_slots_are_relabelled(self):
        pair = builtin_witness("gl2", "tr(2 3)", d=3)
        self.assertTrue(pair.u[0].is_zero())
        self.assertTrue(pair.v[0].is_zero())
        self.assertNotEqual(evaluate("tr(2 3)", pair.u.matrices), evaluate("tr(2 3)", pair.v.matrices))

    def test_missing_witnesses(self):
        with self.assertRaises(WitnessNotFoundError):
            builtin_witness("o3-sym-d2", "tr(1 2 1 2)")
        with self.assertRaises(WitnessNotFoundError):
            builtin_witness("o3-sym-d3", "tr(1 2 3)")

    def test_incompatible_tuples(self):
        inv_set = standard_set("o3-sym-d2")
        u = MatrixTuple(RATIONALS, (sym6(1, 0, 0, 0, 0, 0), sym6(0, 0, 0, 0, 0, 1)))
        v = MatrixTuple(PrimeField(5), (sym6(1, 0, 0, 0, 0, 0, PrimeField(5)), sym6(0, 0, 0, 0, 0, 1, PrimeField(5))))
        with self.assertRaises(FieldMismatchError):
            separates(inv_set, u, v)
        with self.assertRaises(ValueError):
            separates(inv_set, MatrixTuple(RATIONALS, u.matrices[:1]), u)
        with self.assertRaises(ValueError):
            MatrixTuple(RATIONALS, (sym6(1, 0, 0, 0, 0, 0), concrete_from_rows([[0, 1, 0], [0, 0, 0], [0, 0, 0]])))

    def test_transport_by_orthogonal_matrix(self):
        inv_set = standard_set("o3-sym-d2")
        pair = builtin_witness("o3-sym-d2", "tr(1 1 2 2)")
        g = signed_permutation([2, 0, 1], [-1, 1, 1])
        moved = transport(pair, g)
        self.assertEqual(moved.u.kind, pair.u.kind)
        self.assertEqual(separates(inv_set, moved.u, moved.v).first_separator, "tr(1 1 2 2)")
        self.assertFalse(separates(inv_set.without("tr(1 1 2 2)"), moved.u, moved.v).separated)

    def test_transport_checks_inverse(self):
        pair = builtin_witness("gl2", "tr(1 2)")
        g = concrete_from_rows([[1, 1], [0, 1]])
        with self.assertRaises(ValueError):
            transport(pair, g)
        moved = transport(pair, g, concrete_from_rows([[1, -1], [0, 1]]))
        self.assertTrue(separates(standard_set("gl2"), moved.u, moved.v).separated)


class WitnessSearchTest(unittest.TestCase):
    @parameterized.expand([("resample",), ("independent",)])
    def test_search_finds_determinant_witness(self, strategy):
        inv_set = standard_set("gl2", 1)
        pair = search_witness(inv_set, "sigma_2(1)", budget=2000, seed=2016, strategy=strategy)
        self.assertIsNotNone(pair)
        self.assertEqual(evaluate("tr(1)", pair.u.matrices), evaluate("tr(1)", pair.v.matrices))
        self.assertNotEqual(evaluate("det(1)", pair.u.matrices), evaluate("det(1)", pair.v.matrices))

    def test_search_is_reproducible(self):
        inv_set = standard_set("gl2", 1)
        first = search_witness(inv_set, "tr(1)", budget=500, seed=7)
        second = search_witness(inv_set, "tr(1)", budget=500, seed=7)
        self.assertEqual(first.to_json(), second.to_json())

    def test_search_arguments(self):
        inv_set = standard_set("gl2", 1)
        self.assertIsNone(search_witness(inv_set, "tr(1)", budget=0))
        with self.assertRaises(ValueError):
            search_witness(inv_set, "tr(1)", strategy="annealing")
        with self.assertRaises(KeyError):
            search_witness(inv_set, "tr(1 1)")
