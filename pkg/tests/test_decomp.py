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
from fractions import Fraction
from unittest import mock

from parameterized import parameterized
from testing_utils import slow

from invkit import decomp
from invkit.configuration import DecompositionConfig, LemmaScheduleConfig
from invkit.decomp import (
    ExactEchelon,
    GeneratingSetReport,
    SpanEngine,
    brute_force_decomposable,
    build_pool,
    expand_certificate,
    is_decomposable,
    lemma_targets,
    verify_generating_set,
    verify_lemma_dec,
    verify_reduction,
)
from invkit.invlang import expand, parse_expr
from invkit.scalars import RATIONALS, PrimeField
from invkit.utils import FieldMismatchError, PoolInsufficientError, ResourceCapError


class PoolTest(unittest.TestCase):
    def test_small_pool(self):
        pool = build_pool("symmetric", 3, 2, RATIONALS, 2)
        texts = {pool.text(item.index) for item in pool}
        self.assertEqual(
            texts, {"tr(1)", "tr(2)", "sigma_2(1)", "sigma_2(2)", "tr(1 1)", "tr(1 2)", "tr(2 2)"}
        )
        self.assertEqual([item.degree for item in pool], sorted(item.degree for item in pool))

    def test_determinant_in_pool(self):
        pool = build_pool("symmetric", 3, 1, RATIONALS, 3)
        self.assertIn("det(1)", {pool.text(item.index) for item in pool})

    def test_words_are_deduplicated(self):
        pool = build_pool("symmetric", 3, 2, RATIONALS, 3)
        texts = {pool.text(item.index) for item in pool}
        self.assertIn("tr(1 1 2)", texts)
        self.assertNotIn("tr(1 2 1)", texts)
        self.assertNotIn("tr(2 1 1)", texts)
        self.assertLess(len(pool), len(build_pool("symmetric", 3, 2, RATIONALS, 3, deduplicate=False)))

    def test_expansions_have_their_multidegree(self):
        pool = build_pool("symmetric", 3, 2, PrimeField(5), 3)
        self.assertEqual(pool.field, PrimeField(5))
        for item in pool:
            self.assertIn(pool.expansion(item.index).multidegrees(), ([], [item.mdeg]))

    def test_invalid_degree(self):
        with self.assertRaises(ValueError):
            build_pool("symmetric", 3, 2, RATIONALS, 0)


class DecomposabilityTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.pool_d2 = build_pool("symmetric", 3, 2, RATIONALS, 5)
        cls.engine_d2 = SpanEngine(cls.pool_d2)

    def test_degree_one_is_indecomposable(self):
        report = is_decomposable("tr(1)", self.pool_d2, engine=self.engine_d2)
        self.assertFalse(report.decomposable)
        self.assertEqual(report.candidates, 0)

    def test_lemma_identity_is_decomposable(self):
        report = is_decomposable("tr(1 1 2 2 1 2)", self.pool_d2, engine=self.engine_d2)
        self.assertTrue(report.decomposable)
        self.assertTrue(report.certified)
        self.assertEqual(report.multidegree, (3, 3))
        self.assertTrue(report.certificate_text().startswith("tr(1 1 2 2 1 2) ="))
        self.assertEqual(report.to_dict()["field"], "Q")

    def test_certificate_reproduces_target(self):
        config = DecompositionConfig(certify=False)
        pool = build_pool("symmetric", 3, 2, RATIONALS, 3)
        engine = SpanEngine(pool, config)
        report = engine.decide("tr(1 1 1 2)")
        self.assertTrue(report.decomposable)
        index = {pool.text(item.index): item.index for item in pool}
        certificate = [(Fraction(c), tuple(index[name] for name in names)) for c, names in report.certificate]
        expected = pool.context.expand(parse_expr("tr(1 1 1 2)"))
        self.assertEqual(expand_certificate(pool, certificate), expected)

    def test_product_of_three_matrices_is_indecomposable(self):
        pool = build_pool("symmetric", 3, 3, RATIONALS, 2)
        report = is_decomposable("tr(1 2 3)", pool)
        self.assertFalse(report.decomposable)
        self.assertGreater(report.candidates, 0)
        self.assertIn("not in the span", report.certificate_text())

    def test_combinations(self):
        report = is_decomposable([(1, "tr(1 2 1 2)"), (-1, "tr(1 1 2 2)")], self.pool_d2, engine=self.engine_d2)
        self.assertEqual(report.target, "tr(1 2 1 2) - tr(1 1 2 2)")
        with self.assertRaises(ValueError):
            is_decomposable([(1, "tr(1)"), (1, "tr(2)")], self.pool_d2, engine=self.engine_d2)

    def test_pool_limits(self):
        small = build_pool("symmetric", 3, 2, RATIONALS, 2)
        with self.assertRaises(PoolInsufficientError):
            is_decomposable("tr(1 1 2 2)", small)
        with self.assertRaises(ValueError):
            is_decomposable("tr(1 3)", small)
        with self.assertRaises(FieldMismatchError):
            is_decomposable("tr(1 2)", small, engine=self.engine_d2)

    def test_resource_cap(self):
        pool = build_pool("symmetric", 3, 2, RATIONALS, 3)
        with self.assertRaises(ResourceCapError):
            is_decomposable("tr(1 1 1 2)", pool, DecompositionConfig(resource_cap=10))

    @parameterized.expand(
        [
            ("tr(1 1)",),
            ("sigma_2(1)",),
            ("det(1)",),
            ("tr(1 1 1)",),
            ("tr(1 1 2)",),
            ("tr(1 2 3)",),
            ("tr(1 1 1 1)",),
            ("tr(1 1 2 2)",),
            ("tr(1 2 1 2)",),
            ("sigma_2(1 2)",),
            ("tr(1 1 2 3)",),
        ]
    )
    def test_agrees_with_brute_force(self, text):
        expr = parse_expr(text)
        d = expr.word.max_index
        pool = build_pool("symmetric", 3, d, RATIONALS, 3)
        fast = is_decomposable(text, pool).decomposable
        self.assertEqual(fast, brute_force_decomposable(text, "symmetric", 3, d))

    def test_brute_force_limit(self):
        with self.assertRaises(ResourceCapError):
            brute_force_decomposable("tr(1 1 2 2 1)", "symmetric", 3, 2)

    @slow
    def test_characteristic_dependent_verdict(self):
        target = "tr(1 1 2 2 3 3)"
        rational = is_decomposable(target, build_pool("symmetric", 3, 3, RATIONALS, 5))
        modular = is_decomposable(target, build_pool("symmetric", 3, 3, PrimeField(3), 5))
        self.assertTrue(rational.decomposable)
        self.assertFalse(modular.decomposable)
        self.assertEqual(modular.field, "F3")


class LemmaTest(unittest.TestCase):
    def test_targets(self):
        self.assertEqual(len(lemma_targets("b")), 4)
        self.assertEqual(lemma_targets("c")[0][0][1], parse_expr("tr(1 1 2 2 1 2)"))
        with self.assertRaises(ValueError):
            lemma_targets("g")

    def test_quantified_targets_are_homogeneous_pairs(self):
        schedule = LemmaScheduleConfig(max_word_length=2, max_tail_length=1, max_degree=8, generators=3)
        for part in ("a", "e"):
            targets = lemma_targets(part, schedule)
            self.assertGreater(len(targets), 0)
            for terms in targets:
                self.assertEqual(len(terms), 2)
                self.assertEqual(terms[0][1].multidegree(3), terms[1][1].multidegree(3))
                self.assertLessEqual(terms[0][1].degree(), 8)

    def test_part_c(self):
        report = verify_lemma_dec("c", RATIONALS)
        self.assertTrue(report.passed)
        self.assertTrue(all(instance.certified for instance in report.instances))

    def test_part_a_small_schedule(self):
        schedule = LemmaScheduleConfig(max_word_length=1, max_tail_length=1, max_degree=8, generators=2)
        report = verify_lemma_dec("a", RATIONALS, schedule)
        self.assertTrue(report.passed)

    @slow
    def test_part_d_exception_in_characteristic_three(self):
        report = verify_lemma_dec("d", PrimeField(3))
        self.assertTrue(report.passed)
        self.assertEqual([instance.status for instance in report.instances], ["expected-exception"])

    @slow
    def test_part_b(self):
        report = verify_lemma_dec("b", RATIONALS)
        self.assertEqual(len(report.instances), 4)
        self.assertTrue(report.passed)

    @slow
    def test_part_f(self):
        for field in (RATIONALS, PrimeField(3)):
            self.assertTrue(verify_lemma_dec("f", field).passed)

    @slow
    def test_part_e(self):
        self.assertTrue(verify_lemma_dec("e", RATIONALS).passed)

    @slow
    def test_part_a_tail_extension(self):
        short = LemmaScheduleConfig(max_word_length=1, max_tail_length=1, generators=3)
        longer = LemmaScheduleConfig(max_word_length=1, max_tail_length=2, generators=3)
        self.assertTrue(verify_lemma_dec("a", RATIONALS, short).passed)
        self.assertTrue(verify_lemma_dec("a", RATIONALS, longer).passed)


class GeneratingSetTest(unittest.TestCase):
    def test_symmetric_pair_identity(self):
        h1 = expand("tr(1 1 2 2 3 3)", "symmetric", 3, 3)
        h2 = expand("tr(1 1 3 3 2 2)", "symmetric", 3, 3)
        self.assertEqual(h1, h2)

    @slow
    def test_generating_set(self):
        for field in (RATIONALS, PrimeField(3)):
            report = verify_generating_set(field)
            self.assertTrue(report.passed, report.to_dict())

    @slow
    def test_reduction(self):
        for field in (RATIONALS, PrimeField(3)):
            report = verify_reduction(field)
            self.assertTrue(report.passed, report.to_dict())


class ExactVerdictTest(unittest.TestCase):
    def test_indecomposable_verdicts_are_exact(self):
        pool = build_pool("symmetric", 3, 3, RATIONALS, 2)
        report = is_decomposable("tr(1 2 3)", pool)
        self.assertFalse(report.decomposable)
        self.assertTrue(report.exact)
        self.assertTrue(report.conclusive())
        self.assertTrue(report.to_dict()["exact"])

    def test_exact_confirmation_can_be_disabled(self):
        pool = build_pool("symmetric", 3, 3, RATIONALS, 2)
        report = is_decomposable("tr(1 2 3)", pool, DecompositionConfig(exact=False))
        self.assertFalse(report.decomposable)
        self.assertFalse(report.exact)
        self.assertFalse(report.conclusive())
        self.assertTrue(report.conclusive(exact=False))

    def test_exact_confirmation_above_the_cap_is_skipped(self):
        pool = build_pool("symmetric", 3, 3, RATIONALS, 2)
        with self.assertLogs("invkit.decomp", level="WARNING"):
            report = is_decomposable("tr(1 2 3)", pool, DecompositionConfig(resource_cap=10))
        self.assertFalse(report.decomposable)
        self.assertFalse(report.exact)

    @parameterized.expand([(RATIONALS,), (PrimeField(5),)])
    def test_exact_echelon_expresses_combinations(self, field):
        a = expand("tr(1)", "symmetric", 3, 2, field)
        b = expand("tr(2)", "symmetric", 3, 2, field)
        c = expand("tr(1 2)", "symmetric", 3, 2, field)
        echelon = ExactEchelon(a.ring.field, track=True)
        self.assertTrue(echelon.insert(a * b, "ab"))
        self.assertTrue(echelon.insert(c, "c"))
        self.assertFalse(echelon.insert(a * b + c, "ab+c"))
        self.assertEqual(echelon.rank, 2)
        combination = echelon.express((a * b).scale(2) - c)
        rebuilt = a.ring.zero
        for item, coefficient in combination.items():
            rebuilt = rebuilt + {"ab": a * b, "c": c, "ab+c": a * b + c}[item].scale(coefficient)
        self.assertEqual(rebuilt, (a * b).scale(2) - c)
        self.assertIsNone(echelon.express(a * a))

    def test_unliftable_coefficients_are_solved_exactly(self):
        pool = build_pool("symmetric", 3, 2, RATIONALS, 3)
        with mock.patch.object(decomp, "rational_reconstruction", return_value=None):
            report = SpanEngine(pool).decide("tr(1 1 1 2)")
        self.assertTrue(report.decomposable)
        self.assertTrue(report.certified)
        self.assertTrue(report.exact)
        index = {pool.text(item.index): item.index for item in pool}
        certificate = [(Fraction(c), tuple(index[name] for name in names)) for c, names in report.certificate]
        self.assertEqual(expand_certificate(pool, certificate), pool.context.expand(parse_expr("tr(1 1 1 2)")))

    def test_uncertified_verdicts_fail_the_lemma(self):
        with mock.patch.object(decomp, "rational_reconstruction", return_value=None):
            report = verify_lemma_dec("c", RATIONALS, None, DecompositionConfig(exact=False))
        self.assertFalse(report.passed)
        self.assertEqual([instance.status for instance in report.instances], ["uncertified"])
        self.assertFalse(report.to_dict()["pass"])

    @slow
    def test_lemma_passes_through_the_exact_fallback(self):
        with mock.patch.object(decomp, "rational_reconstruction", return_value=None):
            report = verify_lemma_dec("c", RATIONALS, None, DecompositionConfig())
        self.assertTrue(report.passed)
        self.assertTrue(all(instance.certified and instance.exact for instance in report.instances))

    def test_inconclusive_generating_set_entries_fail(self):
        report = GeneratingSetReport("Q", [("tr(1 2 3)", (1, 1, 1), False, False)])
        self.assertFalse(report.passed)
        self.assertFalse(report.to_dict()["entries"][0]["pass"])
        report.entries[0] = ("tr(1 2 3)", (1, 1, 1), False, True)
        self.assertTrue(report.passed)


class OracleAgreementTest(unittest.TestCase):
    def check_all_multidegrees(self, kind, n, d, field, max_degree=4):
        pool = build_pool(kind, n, d, field, max_degree)
        engine = SpanEngine(build_pool(kind, n, d, field, max_degree - 1))
        by_mdeg = {}
        for item in pool:
            by_mdeg.setdefault(item.mdeg, []).append(item.expr)
        for mdeg, exprs in by_mdeg.items():
            targets = [[(1, expr)] for expr in exprs]
            if len(exprs) > 1:
                targets.append([(1, exprs[0]), (-2, exprs[-1])])
            for target in targets:
                fast = engine.decide(target)
                self.assertTrue(fast.exact, fast.target)
                self.assertEqual(
                    fast.decomposable, brute_force_decomposable(target, kind, n, d, field, max_degree), fast.target
                )

    def test_two_by_two_general_matrices(self):
        self.check_all_multidegrees("general", 2, 2, RATIONALS, 3)

    @parameterized.expand(
        [
            ("general", 2, 2, RATIONALS),
            ("general", 2, 2, PrimeField(3)),
            ("symmetric", 3, 2, RATIONALS),
            ("symmetric", 3, 2, PrimeField(3)),
            ("symmetric", 3, 3, RATIONALS),
            ("skew", 3, 2, RATIONALS),
        ]
    )
    @slow
    def test_every_multidegree_up_to_degree_four(self, kind, n, d, field):
        self.check_all_multidegrees(kind, n, d, field)
