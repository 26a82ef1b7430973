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

from hypothesis import given, settings
from parameterized import parameterized
from testing_utils import field_elements

from invkit.scalars import (
    EXTENSION,
    RATIONALS,
    PrimeField,
    PrimeFieldWithRoots,
    embed_special,
    parse_field,
    rational_reconstruction,
    reduce_rational,
    scalar_arith,
    scalar_decode,
    scalar_encode,
)
from invkit.utils import EVALUATION_PRIME, CharacteristicError, FieldMismatchError


FIELDS = (RATIONALS, PrimeField(7), EXTENSION, PrimeFieldWithRoots(17))


class FieldParsingTest(unittest.TestCase):
    @parameterized.expand(
        [
            ("Q", RATIONALS),
            ("F5", PrimeField(5)),
            ("QiS2", EXTENSION),
            ("F17iS2", PrimeFieldWithRoots(17, 4, 6)),
            ("F17iS2:13,11", PrimeFieldWithRoots(17, 13, 11)),
        ]
    )
    def test_parse_field(self, text, expected):
        self.assertEqual(parse_field(text), expected)
        self.assertEqual(parse_field(text).name, expected.name)

    def test_characteristic_two_is_rejected(self):
        with self.assertRaises(CharacteristicError) as context:
            parse_field("F2")
        self.assertIn("different from 2", str(context.exception))

    @parameterized.expand([("F9", ValueError), ("F7iS2", CharacteristicError), ("F17iS2:3,6", ValueError)])
    def test_invalid_fields(self, text, error):
        with self.assertRaises(error):
            parse_field(text)

    def test_unknown_field(self):
        with self.assertRaises(ValueError):
            parse_field("R")

    def test_default_roots(self):
        field = PrimeFieldWithRoots(17)
        self.assertEqual(embed_special("i", field), 4)
        self.assertEqual(embed_special("sqrt2", field), 6)

    def test_prime_field_of(self):
        self.assertEqual(EXTENSION.prime_field(), RATIONALS)
        self.assertEqual(PrimeFieldWithRoots(17).prime_field(), PrimeField(17))
        self.assertTrue(EXTENSION.contains_roots)
        self.assertFalse(PrimeField(17).contains_roots)


class ScalarArithmeticTest(unittest.TestCase):
    def test_extension_relations(self):
        i = embed_special("i", EXTENSION)
        s2 = embed_special("sqrt2", EXTENSION)
        self.assertEqual(i * i, -1)
        self.assertEqual(s2 * s2, 2)
        self.assertEqual(str(1 + (1 - 2 * s2) * i), "1 + i - 2*i*sqrt2")

    @parameterized.expand([(field.name, field) for field in FIELDS if field.contains_roots])
    def test_roots_in_fields(self, _, field):
        i = embed_special("i", field)
        s2 = embed_special("sqrt2", field)
        self.assertEqual(i**2, -1)
        self.assertEqual(s2**2, 2)
        x = 1 + i + s2 + 3 * i * s2
        self.assertEqual(x * x.inverse(), 1)

    def test_prime_field_reduction(self):
        f5 = PrimeField(5)
        self.assertEqual(f5(7), 2)
        self.assertEqual(f5(Fraction(1, 2)), 3)
        self.assertEqual(str(f5(-1)), "4")

    def test_division_by_zero(self):
        with self.assertRaises(ZeroDivisionError):
            PrimeField(5)(0).inverse()
        with self.assertRaises(ZeroDivisionError):
            RATIONALS(1) / RATIONALS(0)
        with self.assertRaises(ZeroDivisionError):
            EXTENSION(0).inverse()
        with self.assertRaises(ZeroDivisionError):
            reduce_rational(PrimeField(3), Fraction(1, 3))

    def test_mixed_fields(self):
        with self.assertRaises(FieldMismatchError):
            RATIONALS(1) + PrimeField(5)(1)
        with self.assertRaises(FieldMismatchError):
            scalar_arith(PrimeField(5)(1), PrimeField(7)(1), "add")

    def test_scalars_are_immutable(self):
        a = RATIONALS(3)
        with self.assertRaises(AttributeError):
            a.raw = 4

    def test_no_roots_in_rationals(self):
        with self.assertRaises(CharacteristicError):
            embed_special("i", RATIONALS)

    @parameterized.expand([("add", 7), ("sub", -1), ("mul", 12), ("div", Fraction(3, 4))])
    def test_scalar_arith(self, op, expected):
        self.assertEqual(scalar_arith(RATIONALS(3), RATIONALS(4), op), expected)

    @parameterized.expand([(field.name, field) for field in FIELDS])
    def test_field_axioms(self, _, field):
        @settings(max_examples=40, deadline=None)
        @given(field_elements(field), field_elements(field), field_elements(field))
        def check(a, b, c):
            self.assertEqual((a + b) * c, a * c + b * c)
            self.assertEqual(a * b, b * a)
            self.assertEqual((a - b) + b, a)
            if not a.is_zero():
                self.assertEqual(a * a.inverse(), 1)
                self.assertEqual((b / a) * a, b)

        check()


class EncodingTest(unittest.TestCase):
    @parameterized.expand(
        [
            ("rational", RATIONALS, Fraction(-3, 4), "-3/4"),
            ("prime", PrimeField(7), 10, 3),
            ("extension", EXTENSION, ["1/2", "1", "0", "-2"], ["1/2", "1", "0", "-2"]),
        ]
    )
    def test_encode_decode(self, _, field, value, encoding):
        scalar = field(value)
        self.assertEqual(scalar_encode(scalar), encoding)
        self.assertEqual(scalar_decode(field, encoding), scalar)

    @parameterized.expand([(0.5,), (True,), ("1.5",), ("abc",)])
    def test_inexact_encodings_are_rejected(self, obj):
        with self.assertRaises(ValueError):
            RATIONALS.decode(obj)

    def test_rational_reconstruction(self):
        p = EVALUATION_PRIME
        residue = -pow(6, -1, p) % p
        self.assertEqual(rational_reconstruction(residue, p), Fraction(-1, 6))
        self.assertEqual(rational_reconstruction(5, p), 5)
