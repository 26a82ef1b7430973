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

"""
Evaluation of invariants at random points of a large finite field, and modular row echelon forms.

Linear relations between invariants of one multidegree are found on value vectors instead of expanded
polynomials. For characteristic 0 values live in F_q with q = 2^31 - 1; for characteristic p they live in an
extension F_{p^k} with p^k >= 2^31, stored as arrays of shape (..., k) of residues modulo p.
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

from .genmat import Matrix
from .invlang import InvariantExpr, Letter
from .polyring import MatrixKind, matrix_positions
from .utils import EVALUATION_FIELD_MIN_SIZE, EVALUATION_PRIME


__all__ = ["EvaluationField", "EvaluationDomain", "ModularEchelon", "PointEvaluator", "find_irreducible"]

LOGGER = logging.getLogger(__name__)


def find_irreducible(p: int, k: int) -> Tuple[int, ...]:
    """
    The lexicographically first monic irreducible polynomial of degree `k` over F_p, as low-first coefficients
    of degree < k.
    """
    if k == 1:
        return (0,)
    for index in range(p**k):
        low = [(index // p**e) % p for e in range(k)]
        if low[0] == 0:
            continue
        # galoistools expects dense coefficients, highest degree first.
        if gf_irreducible_p([1] + low[::-1], p, ZZ):
            return tuple(low)
    raise ValueError(f"No irreducible polynomial of degree {k} over F_{p}.")


class EvaluationField:
    """
    The field F_{p^k} = F_p[u] / (m(u)) with elements stored as int64 residue arrays of shape (..., k).

    Args:
        characteristic (`int`):
            0 selects F_q for q = 2^31 - 1 (k = 1); an odd prime p < 2^31 selects the smallest k with p^k >= 2^31.
    """

    def __init__(self, characteristic: int):
        if characteristic == 0:
            self.p, self.k = EVALUATION_PRIME, 1
        else:
            if characteristic >= EVALUATION_FIELD_MIN_SIZE:
                raise ValueError(f"Evaluation needs a characteristic below 2^31 (got: {characteristic}).")
            self.p = characteristic
            self.k = 1
            while self.p**self.k < EVALUATION_FIELD_MIN_SIZE:
                self.k += 1
        self.characteristic = characteristic
        self.modulus = find_irreducible(self.p, self.k)
        self._reduction = self._reduction_table()
        LOGGER.debug(f"Evaluation field of size {self.p}^{self.k} with modulus {self.modulus}.")

    def _reduction_table(self) -> np.ndarray:
        """Row j holds u^(k+j) reduced modulo m, for j < k - 1."""
        p, k = self.p, self.k
        if k == 1:
            return np.zeros((0, 1), dtype=np.int64)
        first = [(-c) % p for c in self.modulus]
        rows = [first]
        for _ in range(k - 2):
            previous = rows[-1]
            top = previous[-1]
            shifted = [0] + previous[:-1]
            rows.append([(a + top * b) % p for a, b in zip(shifted, first)])
        return np.asarray(rows, dtype=np.int64)

    @property
    def size(self) -> int:
        return self.p**self.k

    def random(self, rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
        return rng.integers(0, self.p, size=tuple(shape) + (self.k,), dtype=np.int64)

    def constant(self, value: int, shape: Tuple[int, ...]) -> np.ndarray:
        result = np.zeros(tuple(shape) + (self.k,), dtype=np.int64)
        result[..., 0] = value % self.p
        return result

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a + b) % self.p

    def sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a - b) % self.p

    def neg(self, a: np.ndarray) -> np.ndarray:
        return (-a) % self.p

    def scale(self, a: np.ndarray, c: int) -> np.ndarray:
        return (a * (c % self.p)) % self.p

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        p, k = self.p, self.k
        if k == 1:
            return (a * b) % p
        shape = np.broadcast_shapes(a.shape, b.shape)[:-1]
        full = np.zeros(shape + (2 * k - 1,), dtype=np.int64)
        for i in range(k):
            full[..., i : i + k] = (full[..., i : i + k] + a[..., i : i + 1] * b) % p
        low = full[..., :k]
        for j in range(k - 1):
            low = (low + full[..., k + j : k + j + 1] * self._reduction[j]) % p
        return low


class EvaluationDomain:
    """Coefficient domain of `N` evaluation points, so that `genmat.Matrix` computes pointwise."""

    def __init__(self, field: EvaluationField, npoints: int):
        self.field = field
        self.npoints = npoints
        self.zero = field.constant(0, (npoints,))
        self.one = field.constant(1, (npoints,))

    def add(self, a, b):
        return self.field.add(a, b)

    def sub(self, a, b):
        return self.field.sub(a, b)

    def neg(self, a):
        return self.field.neg(a)

    def mul(self, a, b):
        return self.field.mul(a, b)

    def is_zero(self, a) -> bool:
        return not a.any()


class PointEvaluator:
    """
    Values of invariant expressions at `npoints` random tuples of `d` matrices of the given kind.

    Args:
        kind (`MatrixKind`):
            Kind of the matrices.
        n (`int`):
            Matrix size.
        d (`int`):
            Number of matrices.
        field (`EvaluationField`):
            Where the random entries live.
        npoints (`int`):
            Number of points.
        rng (`np.random.Generator`):
            Source of the random entries.
        max_cached_prefix (`int`, defaults to 4):
            Longest word prefix whose value matrix is kept.
    """

    def __init__(
        self,
        kind: MatrixKind,
        n: int,
        d: int,
        field: EvaluationField,
        npoints: int,
        rng: np.random.Generator,
        max_cached_prefix: int = 4,
    ):
        self.kind = MatrixKind.parse(kind)
        self.n = n
        self.d = d
        self.field = field
        self.npoints = npoints
        self.domain = EvaluationDomain(field, npoints)
        self.max_cached_prefix = max_cached_prefix
        self.generators = [self._random_matrix(rng) for _ in range(d)]
        self._prefixes: Dict[Tuple[Letter, ...], Matrix] = {}
        self._values: Dict[InvariantExpr, np.ndarray] = {}

    def _random_matrix(self, rng: np.random.Generator) -> Matrix:
        n = self.n
        rows = [[self.domain.zero] * n for _ in range(n)]
        for i, j in matrix_positions(self.kind, n):
            value = self.field.random(rng, (self.npoints,))
            rows[i - 1][j - 1] = value
            if i != j and self.kind == MatrixKind.SYMMETRIC:
                rows[j - 1][i - 1] = value
            elif i != j and self.kind == MatrixKind.SKEW:
                rows[j - 1][i - 1] = self.field.neg(value)
        return Matrix(rows, self.domain, self.kind, validate=False)

    def _letter(self, letter: Letter) -> Matrix:
        if letter.index > self.d:
            raise IndexError(f"Generator index {letter.index} exceeds d={self.d}.")
        matrix = self.generators[letter.index - 1]
        return matrix.transpose() if letter.transpose else matrix

    def word_matrix(self, letters: Tuple[Letter, ...]) -> Matrix:
        if len(letters) == 1:
            return self._letter(letters[0])
        cached = self._prefixes.get(letters)
        if cached is not None:
            return cached
        result = self.word_matrix(letters[:-1]) @ self._letter(letters[-1])
        if len(letters) <= self.max_cached_prefix:
            self._prefixes[letters] = result
        return result

    def value(self, expr: InvariantExpr) -> np.ndarray:
        """The array of shape (npoints, k) of sigma_t(word) at every point."""
        expr = expr.resolved(self.n)
        cached = self._values.get(expr)
        if cached is not None:
            return cached
        letters = expr.word.letters
        if expr.t == 1 and len(letters) > 1:
            head = self.word_matrix(letters[:-1])
            last = self._letter(letters[-1])
            result = self.domain.zero
            for i in range(self.n):
                for j in range(self.n):
                    result = self.field.add(result, self.field.mul(head.rows[i][j], last.rows[j][i]))
        else:
            result = self.word_matrix(letters).sigma(expr.t)
        self._values[expr] = result
        return result


class ModularEchelon:
    """
    A reduced row echelon form over F_p of vectors of a fixed length.

    With `track > 0` every row also carries its coefficients with respect to the inserted items, so that a vector
    of the span can be written as a combination of them.

    Args:
        p (`int`):
            A prime below 2^31.
        length (`int`):
            Length of the vectors.
        track (`int`, defaults to 0):
            Number of items whose combinations are tracked.
    """

    def __init__(self, p: int, length: int, track: int = 0):
        self.p = p
        self.length = length
        self.track = track
        self._rows = np.zeros((16, length), dtype=np.int64)
        self._combinations = np.zeros((16, track), dtype=np.int64)
        self._pivots = np.zeros(16, dtype=np.int64)
        self.rank = 0

    def _grow(self):
        capacity = 2 * self._rows.shape[0]
        rows = np.zeros((capacity, self.length), dtype=np.int64)
        rows[: self.rank] = self._rows[: self.rank]
        combinations = np.zeros((capacity, self.track), dtype=np.int64)
        combinations[: self.rank] = self._combinations[: self.rank]
        pivots = np.zeros(capacity, dtype=np.int64)
        pivots[: self.rank] = self._pivots[: self.rank]
        self._rows, self._combinations, self._pivots = rows, combinations, pivots

    def _coordinates(self, vec: np.ndarray) -> np.ndarray:
        return vec[self._pivots[: self.rank]]

    def _combine(self, coefficients: np.ndarray, rows: np.ndarray) -> np.ndarray:
        return ((coefficients[:, None] * rows) % self.p).sum(axis=0) % self.p

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec, dtype=np.int64).reshape(-1) % self.p
        if self.rank == 0:
            return vec
        c = self._coordinates(vec)
        return (vec - self._combine(c, self._rows[: self.rank])) % self.p

    def insert(self, vec: np.ndarray, item: Optional[int] = None) -> bool:
        """Adds `vec`; returns whether the rank increased."""
        vec = np.asarray(vec, dtype=np.int64).reshape(-1) % self.p
        r = self.rank
        c = self._coordinates(vec)
        residual = (vec - self._combine(c, self._rows[:r])) % self.p if r else vec
        nonzero = np.flatnonzero(residual)
        if nonzero.size == 0:
            return False
        col = int(nonzero[0])
        inverse = pow(int(residual[col]), self.p - 2, self.p)
        residual = (residual * inverse) % self.p
        combination = np.zeros(self.track, dtype=np.int64)
        if self.track:
            if item is None:
                raise ValueError("Tracked echelon forms need the index of the inserted item.")
            combination[item] = 1
            if r:
                combination = (combination - self._combine(c, self._combinations[:r])) % self.p
            combination = (combination * inverse) % self.p
        if r:
            factors = self._rows[:r, col].copy()
            self._rows[:r] = (self._rows[:r] - (factors[:, None] * residual) % self.p) % self.p
            if self.track:
                self._combinations[:r] = (
                    self._combinations[:r] - (factors[:, None] * combination) % self.p
                ) % self.p
        if r == self._rows.shape[0]:
            self._grow()
        self._rows[r] = residual
        self._combinations[r] = combination
        self._pivots[r] = col
        self.rank = r + 1
        return True

    def contains(self, vec: np.ndarray) -> bool:
        return not self.reduce(vec).any()

    def express(self, vec: np.ndarray) -> Optional[np.ndarray]:
        """Coefficients over the tracked items summing to `vec`, or `None` when `vec` is outside the span."""
        vec = np.asarray(vec, dtype=np.int64).reshape(-1) % self.p
        if self.reduce(vec).any():
            return None
        if self.rank == 0:
            return np.zeros(self.track, dtype=np.int64)
        return self._combine(self._coordinates(vec), self._combinations[: self.rank])
