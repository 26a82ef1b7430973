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

from parameterized import parameterized

from invkit.polyring import (
    MatrixKind,
    Polynomial,
    PolynomialRing,
    VariableId,
    count_monomials,
    graded_component,
    monomials_of_multidegree,
    poly_arith,
)
from invkit.scalars import EXTENSION, PrimeField
from invkit.utils import FieldMismatchError


class PolynomialRingTest(unittest.TestCase):
    @parameterized.expand([("general", 9), ("symmetric", 6), ("skew", 3)])
    def test_variables_per_matrix(self, kind, block):
        ring = PolynomialRing(kind, 3, 2)
        self.assertEqual(ring.block, block)
        self.assertEqual(ring.nvars, 2 * block)

    def test_variable_order(self):
        ring = PolynomialRing(MatrixKind.SYMMETRIC, 2, 2)
        self.assertEqual(
            [str(v) for v in ring.variables], ["x11(1)", "x21(1)", "x22(1)", "x11(2)", "x21(2)", "x22(2)"]
        )

    def test_missing_variables(self):
        ring = PolynomialRing(MatrixKind.SKEW, 3, 1)
        self.assertFalse(ring.has_variable(1, 1, 1))
        self.assertFalse(ring.has_variable(1, 2, 1))
        with self.assertRaises(ValueError):
            ring.gen(1, 2, 1)

    @parameterized.expand(
        [
            ("symmetric", 3, (2, 1), 126),
            ("general", 2, (1, 1), 16),
            ("skew", 4, (2, 0), 21),
            ("symmetric", 3, (2, 3, 3), 65856),
        ]
    )
    def test_count_monomials(self, kind, n, t, expected):
        self.assertEqual(count_monomials(kind, n, t), expected)

    @parameterized.expand([("symmetric", 3, (2, 1)), ("general", 2, (1, 2)), ("skew", 4, (1, 1))])
    def test_count_matches_enumeration(self, kind, n, t):
        monomials = monomials_of_multidegree(kind, n, t)
        self.assertEqual(len(monomials), count_monomials(kind, n, t))
        self.assertEqual(len(set(monomials)), len(monomials))
        ring = PolynomialRing(kind, n, len(t))
        self.assertTrue(all(ring.mdeg_of(m) == tuple(t) for m in monomials))

    def test_invalid_rings(self):
        with self.assertRaises(ValueError):
            PolynomialRing("symmetric", 0, 1)
        with self.assertRaises(ValueError):
            PolynomialRing("symmetric", 3, 0)
        with self.assertRaises(ValueError):
            PolynomialRing("hermitian", 3, 1)

    def test_exponent_limit(self):
        ring = PolynomialRing(MatrixKind.GENERAL, 2, 1)
        with self.assertRaises(ValueError):
            ring.monomial({VariableId(1, 1, 1): 256})


class PolynomialTest(unittest.TestCase):
    def setUp(self):
        self.ring = PolynomialRing(MatrixKind.SYMMETRIC, 3, 3)
        self.x = self.ring.gen(2, 1, 1)
        self.y = self.ring.gen(3, 2, 3)

    def test_binomial(self):
        x, y = self.x, self.y
        self.assertEqual((x + y) ** 2, x * x + 2 * x * y + y * y)
        self.assertEqual((x + y) * (x - y), x**2 - y**2)
        self.assertTrue((x - x).is_zero())

    def test_pretty(self):
        f = (self.x**2 * self.y).scale(2)
        self.assertEqual(f.pretty(), "2·x21(1)^2·x32(3)")
        self.assertEqual((-self.x).pretty(), "-x21(1)")
        self.assertEqual(self.ring.zero.pretty(), "0")
        self.assertEqual((self.x * Fraction(-1, 2) + 1).pretty(), "-1/2·x21(1) + 1")

    def test_multidegrees(self):
        f = self.x * self.y + self.x**2 + 3
        self.assertEqual(f.multidegrees(), [(0, 0, 0), (1, 0, 1), (2, 0, 0)])
        self.assertEqual(graded_component(f, (1, 0, 1)), self.x * self.y)
        self.assertFalse(f.is_multihomogeneous())
        self.assertTrue((self.x * self.y).is_multihomogeneous())
        self.assertEqual(sorted(f.components()), [(0, 0, 0), (1, 0, 1), (2, 0, 0)])

    def test_evaluate(self):
        f = self.x**2 * self.y - 3 * self.y
        value = f.evaluate({VariableId(2, 1, 1): 2, VariableId(3, 2, 3): Fraction(1, 3)})
        self.assertEqual(value, Fraction(1, 3))
        with self.assertRaises(ValueError):
            f.evaluate({VariableId(2, 1, 1): 2})

    def test_prime_field_coefficients(self):
        ring = PolynomialRing(MatrixKind.GENERAL, 2, 1, PrimeField(3))
        x = ring.gen(1, 2, 1)
        self.assertTrue((x * 3).is_zero())
        self.assertEqual((x + x + x + x), x)

    def test_extension_coefficients(self):
        ring = PolynomialRing(MatrixKind.GENERAL, 2, 1, EXTENSION)
        i = EXTENSION([0, 1, 0, 0])
        x = ring.gen(1, 1, 1)
        self.assertEqual((x * i) * (x * i), -(x * x))

    def test_json(self):
        f = (self.x**2 * self.y).scale(Fraction(-3, 2)) + self.y
        records = f.to_json()
        self.assertEqual(records[0]["coeff"], "-3/2")
        self.assertEqual(Polynomial.from_json(self.ring, records), f)

    def test_mixed_rings(self):
        other = PolynomialRing(MatrixKind.SYMMETRIC, 3, 3, PrimeField(5))
        with self.assertRaises(FieldMismatchError):
            self.x + other.gen(2, 1, 1)
        with self.assertRaises(FieldMismatchError):
            self.x * PolynomialRing(MatrixKind.GENERAL, 3, 3).gen(2, 1, 1)

    @parameterized.expand([("add",), ("sub",), ("mul",)])
    def test_poly_arith(self, op):
        expected = {"add": self.x + self.y, "sub": self.x - self.y, "mul": self.x * self.y}[op]
        self.assertEqual(poly_arith(self.x, self.y, op), expected)

    def test_poly_arith_scale(self):
        self.assertEqual(poly_arith(self.x, Fraction(1, 2), "scale"), self.x * Fraction(1, 2))
        with self.assertRaises(ValueError):
            poly_arith(self.x, self.y, "div")

