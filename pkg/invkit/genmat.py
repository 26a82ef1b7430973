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

"""Concrete and generic matrices of the general, symmetric and skew kinds, sigma_t, matrix words and Psi."""

from itertools import combinations
from typing import Any, Optional, Sequence, Tuple, Union

import numpy as np

from .polyring import MatrixKind, Polynomial, PolynomialRing
from .scalars import RATIONALS, FieldDescriptor, Scalar
from .utils import FieldMismatchError


__all__ = [
    "MatrixKind",
    "Matrix",
    "ConcreteMatrix",
    "GenericMatrix",
    "generic",
    "matrix_algebra",
    "sigma_t",
    "word_value",
    "psi_substitution",
    "concrete_from_rows",
    "zero_matrix",
    "identity_matrix",
    "unit",
    "skew_unit",
    "jordan_j2",
    "sym6",
    "signed_permutation",
    "random_concrete",
    "random_invertible",
    "matrix_power",
    "matrix_inverse",
    "is_nilpotent",
    "conjugate",
]


def determinant(domain, rows: Sequence[Sequence[Any]]):
    """Fraction-free cofactor expansion along the first row; `domain` is a field or a polynomial ring."""
    size = len(rows)
    if size == 0:
        return domain.one
    if size == 1:
        return rows[0][0]
    if size == 2:
        return domain.sub(domain.mul(rows[0][0], rows[1][1]), domain.mul(rows[0][1], rows[1][0]))
    total = domain.zero
    for col, a in enumerate(rows[0]):
        if domain.is_zero(a):
            continue
        minor = [row[:col] + row[col + 1 :] for row in rows[1:]]
        term = domain.mul(a, determinant(domain, minor))
        total = domain.add(total, term) if col % 2 == 0 else domain.sub(total, term)
    return total


class Matrix:
    """
    An immutable `n`x`n` matrix over a coefficient domain tagged with a `MatrixKind`.

    Args:
        rows (`Sequence[Sequence]`):
            Entries in the representation of `domain` (raw field values, or polynomials).
        domain (`FieldDescriptor` or `PolynomialRing`):
            Provides `zero`, `one`, `add`, `sub`, `mul`, `neg` and `is_zero`.
        kind (`MatrixKind`, defaults to `MatrixKind.GENERAL`):
            Symmetric and skew inputs are validated, never symmetrised.
    """

    def __init__(self, rows, domain, kind: Union[str, MatrixKind] = MatrixKind.GENERAL, validate: bool = True):
        self.rows = tuple(tuple(row) for row in rows)
        self.n = len(self.rows)
        self.domain = domain
        self.kind = MatrixKind.parse(kind)
        if validate:
            self._validate()

    def _validate(self):
        if self.n == 0 or any(len(row) != self.n for row in self.rows):
            raise ValueError(f"Matrix rows should form a nonempty square array (got: {[len(r) for r in self.rows]}).")
        domain = self.domain
        for i in range(self.n):
            for j in range(i, self.n):
                a, b = self.rows[i][j], self.rows[j][i]
                if self.kind == MatrixKind.SYMMETRIC and not domain.is_zero(domain.sub(a, b)):
                    raise ValueError(f"Matrix declared symmetric has entry ({i + 1},{j + 1}) != ({j + 1},{i + 1}).")
                if self.kind == MatrixKind.SKEW and not domain.is_zero(domain.add(a, b)):
                    raise ValueError(
                        f"Matrix declared skew has entry ({i + 1},{j + 1}) != -({j + 1},{i + 1}) or nonzero diagonal."
                    )

    def _make(self, rows, kind) -> "Matrix":
        return type(self)(rows, self.domain, kind, validate=False)

    def _wrap(self, value):
        return value

    def entry(self, i: int, j: int):
        """1-based entry access."""
        return self._wrap(self.rows[i - 1][j - 1])

    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix) or other.domain != self.domain:
            raise FieldMismatchError("Matrices should share their coefficient domain.")
        if other.n != self.n:
            raise ValueError(f"Matrix sizes do not match ({self.n} vs {other.n}).")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        domain = self.domain
        columns = list(zip(*other.rows))
        rows = []
        for row in self.rows:
            new_row = []
            for column in columns:
                total = domain.zero
                for a, b in zip(row, column):
                    if domain.is_zero(a) or domain.is_zero(b):
                        continue
                    total = domain.add(total, domain.mul(a, b))
                new_row.append(total)
            rows.append(new_row)
        return self._make(rows, MatrixKind.GENERAL)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        kind = self.kind if self.kind == other.kind else MatrixKind.GENERAL
        rows = [[self.domain.add(a, b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        return self._make(rows, kind)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return self._make([[self.domain.neg(a) for a in row] for row in self.rows], self.kind)

    def scale(self, value) -> "Matrix":
        return self._make([[self.domain.mul(value, a) for a in row] for row in self.rows], self.kind)

    def transpose(self) -> "Matrix":
        if self.kind == MatrixKind.SYMMETRIC:
            return self
        if self.kind == MatrixKind.SKEW:
            return -self
        return self._make(list(zip(*self.rows)), self.kind)

    def trace(self):
        total = self.domain.zero
        for i in range(self.n):
            total = self.domain.add(total, self.rows[i][i])
        return self._wrap(total)

    def sigma(self, t: int):
        """Sum of the principal `t`x`t` minors; sigma(1) is the trace and sigma(n) the determinant."""
        if not 1 <= t <= self.n:
            raise ValueError(f"sigma index should be in [1, {self.n}] (got: {t}).")
        if t == 1:
            return self.trace()
        domain = self.domain
        total = domain.zero
        for subset in combinations(range(self.n), t):
            minor = [[self.rows[i][j] for j in subset] for i in subset]
            total = domain.add(total, determinant(domain, minor))
        return self._wrap(total)

    def determinant(self):
        return self.sigma(self.n)

    def power(self, exponent: int) -> "Matrix":
        if exponent < 1:
            raise ValueError(f"Matrix power should be >= 1 (got: {exponent}).")
        result = self
        for _ in range(exponent - 1):
            result = result @ self
        return result

    def is_zero(self) -> bool:
        return all(self.domain.is_zero(a) for row in self.rows for a in row)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.domain == other.domain and self.rows == other.rows

    __hash__ = None


class ConcreteMatrix(Matrix):
    """A matrix of field elements; entries are stored raw and returned as `Scalar`."""

    @property
    def field(self) -> FieldDescriptor:
        return self.domain

    def _wrap(self, value):
        return Scalar(self.domain, value)

    def scale(self, value) -> "ConcreteMatrix":
        return super().scale(self.field(value).raw)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind.value,
            "entries": [[self.field.encode(a) for a in row] for row in self.rows],
        }

    @classmethod
    def from_json(cls, obj, field: FieldDescriptor, kind: Optional[Union[str, MatrixKind]] = None) -> "ConcreteMatrix":
        """Reads `{n, kind, entries}`; `entries` may be nested rows or a flat row-major list. Bare rows work too."""
        if isinstance(obj, dict):
            entries = obj["entries"]
            kind = obj.get("kind", kind)
            n = obj.get("n")
        else:
            entries, n = obj, None
        if entries and not isinstance(entries[0], list):
            size = n if n is not None else int(round(len(entries) ** 0.5))
            if size * size != len(entries):
                raise ValueError(f"Flat entries should contain n^2 values (got: {len(entries)}).")
            entries = [entries[r * size : (r + 1) * size] for r in range(size)]
        matrix = concrete_from_rows(entries, kind or MatrixKind.GENERAL, field)
        if n is not None and matrix.n != n:
            raise ValueError(f"Matrix declares n={n} but has {matrix.n} rows.")
        return matrix

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(self.field.to_str(a) for a in row) + "]" for row in self.rows) + "]"

    def __repr__(self):
        return f"ConcreteMatrix({self.kind.value}, {self})"


class GenericMatrix(Matrix):
    """A matrix of polynomials over a `PolynomialRing`."""

    @property
    def ring(self) -> PolynomialRing:
        return self.domain

    def scale(self, value) -> "GenericMatrix":
        return self._make([[a.scale(value) for a in row] for row in self.rows], self.kind)


def generic(kind: Union[str, MatrixKind], n: int, k: int, ring: Optional[PolynomialRing] = None) -> GenericMatrix:
    """The generic matrix X_k, Y_k or Z_k of size `n` in `ring` (by default the rational ring with d = k)."""
    kind = MatrixKind.parse(kind)
    if n < 2:
        raise ValueError(f"Generic matrices need n >= 2 (got: {n}).")
    if k < 1:
        raise ValueError(f"Generic matrix index should be >= 1 (got: {k}).")
    if ring is None:
        ring = PolynomialRing(kind, n, k)
    if ring.kind != kind or ring.n != n or k > ring.d:
        raise FieldMismatchError(f"{ring!r} does not contain the generic {kind.value} matrix {k}.")
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            if kind == MatrixKind.GENERAL:
                row.append(ring.gen(i, j, k))
            elif kind == MatrixKind.SYMMETRIC:
                row.append(ring.gen(max(i, j), min(i, j), k))
            elif i > j:
                row.append(ring.gen(i, j, k))
            elif i < j:
                row.append(-ring.gen(j, i, k))
            else:
                row.append(ring.zero)
        rows.append(row)
    return GenericMatrix(rows, ring, kind, validate=False)


def matrix_algebra(a: Matrix, b: Optional[Matrix], op: str):
    """`mul` and `add` of two matrices, or `transpose` and `trace` of `a`."""
    if op == "mul":
        return a @ b
    if op == "add":
        return a + b
    if op == "transpose":
        return a.transpose()
    if op == "trace":
        return a.trace()
    raise ValueError(f"Unknown matrix operation {op!r}, expected one of mul, add, transpose, trace.")


def sigma_t(a: Matrix, t: int):
    return a.sigma(t)


def word_value(word: Sequence[Tuple[int, bool]], matrices: Sequence[Matrix]) -> Matrix:
    """The product of `matrices[k - 1]` (transposed where flagged) along the letters of `word`."""
    if not word:
        raise ValueError("Words should be nonempty.")
    result = None
    for k, transposed in word:
        if not 1 <= k <= len(matrices):
            raise IndexError(f"Generator index {k} out of range for a tuple of {len(matrices)} matrices.")
        factor = matrices[k - 1].transpose() if transposed else matrices[k - 1]
        result = factor if result is None else result @ factor
    return result


def psi_substitution(f: Polynomial) -> Polynomial:
    """Psi: x_ij(k) -> x_ij(k) for i >= j and x_ij(k) -> x_ji(k) otherwise, from R onto the symmetric ring."""
    ring = f.ring
    if ring.kind != MatrixKind.GENERAL:
        raise FieldMismatchError(f"Psi is defined on the general ring (got: {ring!r}).")
    target = PolynomialRing(MatrixKind.SYMMETRIC, ring.n, ring.d, ring.field)
    index_map = [target.variable_index(max(v.i, v.j), min(v.i, v.j), v.k) for v in ring.variables]
    return f.rename_variables(target, index_map)


def concrete_from_rows(rows, kind: Union[str, MatrixKind] = MatrixKind.GENERAL, field: FieldDescriptor = RATIONALS):
    """Builds a validated `ConcreteMatrix` from rows of ints, fractions, encodings or scalars."""
    return ConcreteMatrix([[field(value).raw for value in row] for row in rows], field, kind)


def zero_matrix(n: int, field: FieldDescriptor = RATIONALS, kind=MatrixKind.GENERAL) -> ConcreteMatrix:
    return ConcreteMatrix([[field.zero] * n for _ in range(n)], field, kind, validate=False)


def identity_matrix(n: int, field: FieldDescriptor = RATIONALS) -> ConcreteMatrix:
    rows = [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]
    return ConcreteMatrix(rows, field, MatrixKind.SYMMETRIC, validate=False)


def unit(n: int, i: int, j: int, field: FieldDescriptor = RATIONALS) -> ConcreteMatrix:
    """The matrix unit E_ij."""
    rows = [[field.zero] * n for _ in range(n)]
    rows[i - 1][j - 1] = field.one
    return ConcreteMatrix(rows, field, MatrixKind.GENERAL, validate=False)


def skew_unit(n: int, i: int, j: int, field: FieldDescriptor = RATIONALS) -> ConcreteMatrix:
    """E_ij - E_ji."""
    rows = [[field.zero] * n for _ in range(n)]
    rows[i - 1][j - 1] = field.one
    rows[j - 1][i - 1] = field.neg(field.one)
    return ConcreteMatrix(rows, field, MatrixKind.SKEW)


def jordan_j2(field: FieldDescriptor = RATIONALS) -> ConcreteMatrix:
    """J_2 = E_12 + E_23."""
    return unit(3, 1, 2, field) + unit(3, 2, 3, field)


def sym6(a, b, c, d, e, f, field: FieldDescriptor = RATIONALS) -> ConcreteMatrix:
    """The symmetric matrix [[a, b, c], [b, d, e], [c, e, f]]."""
    return concrete_from_rows([[a, b, c], [b, d, e], [c, e, f]], MatrixKind.SYMMETRIC, field)


def signed_permutation(perm: Sequence[int], signs: Sequence[int], field: FieldDescriptor = RATIONALS):
    """The orthogonal matrix sending basis vector e_j to signs[j] * e_perm[j] (0-based `perm`)."""
    n = len(perm)
    if sorted(perm) != list(range(n)) or len(signs) != n or any(s not in (1, -1) for s in signs):
        raise ValueError(f"Invalid signed permutation (got: perm={list(perm)}, signs={list(signs)}).")
    rows = [[field.zero] * n for _ in range(n)]
    for j, (i, s) in enumerate(zip(perm, signs)):
        rows[i][j] = field.from_int(s)
    return ConcreteMatrix(rows, field, MatrixKind.GENERAL, validate=False)


def random_concrete(
    kind: Union[str, MatrixKind],
    n: int,
    field: FieldDescriptor,
    rng: np.random.Generator,
    entries: Sequence[int] = (-2, -1, 0, 1, 2),
) -> ConcreteMatrix:
    """A matrix of the given kind with independent entries drawn from `entries`."""
    kind = MatrixKind.parse(kind)
    draws = rng.choice(np.asarray(entries, dtype=np.int64), size=(n, n))
    rows = [[field.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            value = field.from_int(int(draws[i, j]))
            if kind == MatrixKind.GENERAL:
                rows[i][j] = value
            elif kind == MatrixKind.SYMMETRIC and i >= j:
                rows[i][j] = rows[j][i] = value
            elif kind == MatrixKind.SKEW and i > j:
                rows[i][j] = value
                rows[j][i] = field.neg(value)
    return ConcreteMatrix(rows, field, kind, validate=False)


def random_invertible(n: int, field: FieldDescriptor, rng: np.random.Generator, entries=(-2, -1, 0, 1, 2)):
    """Draws general matrices until one is invertible; returns the matrix and its inverse."""
    while True:
        g = random_concrete(MatrixKind.GENERAL, n, field, rng, entries)
        if not field.is_zero(g.determinant().raw):
            return g, matrix_inverse(g)


def matrix_power(a: Matrix, exponent: int) -> Matrix:
    return a.power(exponent)


def matrix_inverse(a: ConcreteMatrix) -> ConcreteMatrix:
    """Exact Gauss-Jordan inverse; raises `ZeroDivisionError` for singular matrices."""
    field = a.field
    n = a.n
    work = [list(row) + [field.one if i == j else field.zero for j in range(n)] for i, row in enumerate(a.rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not field.is_zero(work[r][col])), None)
        if pivot is None:
            raise ZeroDivisionError("Matrix is singular.")
        work[col], work[pivot] = work[pivot], work[col]
        inverse = field.inv(work[col][col])
        work[col] = [field.mul(inverse, x) for x in work[col]]
        for r in range(n):
            if r != col and not field.is_zero(work[r][col]):
                factor = work[r][col]
                work[r] = [field.sub(x, field.mul(factor, y)) for x, y in zip(work[r], work[col])]
    return ConcreteMatrix([row[n:] for row in work], field, MatrixKind.GENERAL, validate=False)


def is_nilpotent(a: Matrix) -> bool:
    return a.power(a.n).is_zero()


def conjugate(a: ConcreteMatrix, g: ConcreteMatrix, g_inverse: ConcreteMatrix) -> ConcreteMatrix:
    """g a g^-1, keeping the kind of `a` when `g` is orthogonal (callers pass g^T as `g_inverse`)."""
    product_matrix = g @ a @ g_inverse
    return ConcreteMatrix(product_matrix.rows, a.field, a.kind if _is_transpose(g, g_inverse) else MatrixKind.GENERAL)


def _is_transpose(g: Matrix, h: Matrix) -> bool:
    return list(zip(*g.rows)) == [tuple(row) for row in h.rows]
