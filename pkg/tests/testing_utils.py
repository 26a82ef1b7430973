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

import os
import unittest

from hypothesis import strategies as st

from invkit.genmat import concrete_from_rows
from invkit.polyring import MatrixKind


def parse_flag_from_env(key: str, default: bool = False) -> bool:
    value = os.environ.get(key)
    if value is None:
        return default
    if value.strip().lower() in ("1", "true", "yes", "on"):
        return True
    if value.strip().lower() in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"If set, {key} must be yes or no (got: {value!r}).")


_run_slow_tests = parse_flag_from_env("RUN_SLOW", default=False)


def slow(test_case):
    """
    Decorator marking a test as slow: degree-8 span solves and the complete reduction. Slow tests are skipped
    unless RUN_SLOW is set to a truthy value.
    """
    return unittest.skipUnless(_run_slow_tests, "test is slow")(test_case)


def rationals(max_value: int = 20):
    return st.fractions(min_value=-max_value, max_value=max_value, max_denominator=7)


def field_elements(field):
    """Elements of `field` as `Scalar`s, drawn from small rationals (or small 4-tuples for QiS2)."""
    if field.contains_roots and field.characteristic == 0:
        return st.tuples(*[rationals(5)] * 4).map(lambda coords: field(list(coords)))
    if field.characteristic == 0:
        return rationals().map(field)
    return st.integers(min_value=0, max_value=field.characteristic - 1).map(field)


def small_matrices(kind, n: int, field, entries=(-2, -1, 0, 1, 2)):
    """Matrices of the given kind with entries from `entries`, built through `concrete_from_rows`."""
    kind = MatrixKind.parse(kind)

    def build(values):
        rows = [[0] * n for _ in range(n)]
        position = 0
        for i in range(n):
            for j in range(n):
                if kind == MatrixKind.GENERAL:
                    rows[i][j] = values[position]
                    position += 1
                elif kind == MatrixKind.SYMMETRIC and i >= j:
                    rows[i][j] = rows[j][i] = values[position]
                    position += 1
                elif kind == MatrixKind.SKEW and i > j:
                    rows[i][j] = values[position]
                    rows[j][i] = -values[position]
                    position += 1
        return concrete_from_rows(rows, kind, field)

    return st.lists(st.sampled_from(entries), min_size=n * n, max_size=n * n).map(build)




def polynomials(ring, max_terms: int = 4, max_factors: int = 3):
    """Small polynomials of `ring`: integer combinations of products of its variables."""
    variable = st.tuples(
        st.integers(min_value=1, max_value=ring.n),
        st.integers(min_value=1, max_value=ring.n),
        st.integers(min_value=1, max_value=ring.d),
    )
    term = st.tuples(st.integers(min_value=-3, max_value=3), st.lists(variable, max_size=max_factors))

    def build(terms):
        total = ring.zero
        for c, factors in terms:
            monomial = ring.one
            for i, j, k in factors:
                monomial = monomial * ring.gen(i, j, k)
            total = total + monomial.scale(c)
        return total

    return st.lists(term, max_size=max_terms).map(build)
