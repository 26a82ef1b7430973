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

"""Sparse multivariate polynomials in the entries x_ij(k) of generic matrices, graded by degree and multidegree."""

from enum import Enum
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import comb, prod
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from .scalars import RATIONALS, FieldDescriptor, Scalar
from .utils import EXPONENT_BITS, MAX_EXPONENT, FieldMismatchError


__all__ = [
    "MatrixKind",
    "VariableId",
    "PolynomialRing",
    "Polynomial",
    "poly_arith",
    "mdeg_of",
    "graded_component",
    "monomials_of_multidegree",
    "count_monomials",
]

MultiDegree = Tuple[int, ...]


class MatrixKind(str, Enum):
    GENERAL = "general"
    SYMMETRIC = "symmetric"
    SKEW = "skew"

    @classmethod
    def parse(cls, value: Union[str, "MatrixKind"]) -> "MatrixKind":
        if isinstance(value, MatrixKind):
            return value
        normalized = value.strip().lower().replace("-", "").replace("_", "")
        aliases = {"general": cls.GENERAL, "symmetric": cls.SYMMETRIC, "skew": cls.SKEW, "skewsymmetric": cls.SKEW}
        if normalized not in aliases:
            raise ValueError(f"Unknown matrix kind {value!r}, expected one of general, symmetric, skew.")
        return aliases[normalized]

    @property
    def letter(self) -> str:
        return {MatrixKind.GENERAL: "X", MatrixKind.SYMMETRIC: "Y", MatrixKind.SKEW: "Z"}[self]


class VariableId(NamedTuple):
    i: int
    j: int
    k: int

    def __str__(self):
        return f"x{self.i}{self.j}({self.k})"


def matrix_positions(kind: MatrixKind, n: int) -> List[Tuple[int, int]]:
    """The (i, j) pairs carrying a variable of one generic matrix, in lexicographic order."""
    if kind == MatrixKind.GENERAL:
        return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    if kind == MatrixKind.SYMMETRIC:
        return [(i, j) for i in range(1, n + 1) for j in range(1, i + 1)]
    return [(i, j) for i in range(1, n + 1) for j in range(1, i)]


def count_monomials(kind: Union[str, MatrixKind], n: int, t: Sequence[int]) -> int:
    """Number of monomials of multidegree `t`, a product of multiset coefficients."""
    block = len(matrix_positions(MatrixKind.parse(kind), n))
    return prod(comb(block + tk - 1, tk) if block else int(tk == 0) for tk in t)


class PolynomialRing:
    """
    The polynomial ring in the variables x_ij(k) of `d` generic `n`x`n` matrices of the given kind.

    Variables are ordered by (k, i, j). A monomial is packed into one Python integer, one byte per exponent, so
    that multiplying monomials is integer addition.

    Args:
        kind (`MatrixKind`):
            `general` (all x_ij(k)), `symmetric` (i >= j) or `skew` (i > j).
        n (`int`):
            Size of the matrices.
        d (`int`):
            Number of generic matrices.
        field (`FieldDescriptor`, defaults to `Q`):
            Coefficient field.
    """

    def __init__(self, kind: Union[str, MatrixKind], n: int, d: int, field: FieldDescriptor = RATIONALS):
        if n < 1:
            raise ValueError(f"Provided matrix size should be >= 1 (got: {n}).")
        if d < 1:
            raise ValueError(f"Provided number of matrices should be >= 1 (got: {d}).")
        self.kind = MatrixKind.parse(kind)
        self.n = n
        self.d = d
        self.field = field
        self.positions = matrix_positions(self.kind, n)
        self.block = len(self.positions)
        self.variables = [VariableId(i, j, k) for k in range(1, d + 1) for i, j in self.positions]
        self.nvars = len(self.variables)
        self._index = {v: idx for idx, v in enumerate(self.variables)}

    def _key(self):
        return (self.kind, self.n, self.d, self.field)

    def __eq__(self, other):
        return isinstance(other, PolynomialRing) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"PolynomialRing({self.kind.value}, n={self.n}, d={self.d}, {self.field.name})"

    def with_field(self, field: FieldDescriptor) -> "PolynomialRing":
        return PolynomialRing(self.kind, self.n, self.d, field)

    def variable_index(self, i: int, j: int, k: int) -> int:
        try:
            return self._index[VariableId(i, j, k)]
        except KeyError:
            raise ValueError(f"x{i}{j}({k}) is not a variable of {self!r}.")

    def has_variable(self, i: int, j: int, k: int) -> bool:
        return VariableId(i, j, k) in self._index

    def monomial(self, exponents: Mapping[VariableId, int]) -> int:
        packed = 0
        for var, exponent in exponents.items():
            if exponent < 0 or exponent > MAX_EXPONENT:
                raise ValueError(f"Exponent of {var} should be in [0, {MAX_EXPONENT}] (got: {exponent}).")
            packed += exponent << (EXPONENT_BITS * self.variable_index(*var))
        return packed

    def exponent_vector(self, m: int) -> bytes:
        return m.to_bytes(self.nvars, "little")

    def exponents(self, m: int) -> Dict[VariableId, int]:
        return {self.variables[v]: e for v, e in enumerate(self.exponent_vector(m)) if e}

    def degree_of(self, m: int) -> int:
        return sum(self.exponent_vector(m))

    def mdeg_of(self, m: int) -> MultiDegree:
        vector = self.exponent_vector(m)
        block = self.block
        return tuple(sum(vector[k * block : (k + 1) * block]) for k in range(self.d))

    # Coefficient-domain interface shared with `FieldDescriptor`, used by generic matrices.

    @property
    def zero(self) -> "Polynomial":
        return Polynomial(self, {}, trusted=True)

    @property
    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, value) -> "Polynomial":
        raw = _raw_coefficient(self.field, value)
        return Polynomial(self, {} if self.field.is_zero(raw) else {0: raw}, trusted=True)

    def gen(self, i: int, j: int, k: int) -> "Polynomial":
        return Polynomial(self, {1 << (EXPONENT_BITS * self.variable_index(i, j, k)): self.field.one}, trusted=True)

    def add(self, f: "Polynomial", g: "Polynomial") -> "Polynomial":
        return f + g

    def sub(self, f: "Polynomial", g: "Polynomial") -> "Polynomial":
        return f - g

    def neg(self, f: "Polynomial") -> "Polynomial":
        return -f

    def mul(self, f: "Polynomial", g: "Polynomial") -> "Polynomial":
        return f * g

    def is_zero(self, f: "Polynomial") -> bool:
        return f.is_zero()

    def monomials_of_multidegree(self, t: Sequence[int]) -> Iterator[int]:
        if len(t) != self.d:
            raise ValueError(f"Multidegree {tuple(t)} should have {self.d} entries.")
        per_matrix = []
        for k, tk in enumerate(t):
            offset = k * self.block
            per_matrix.append(
                [
                    sum(1 << (EXPONENT_BITS * (offset + v)) for v in combo)
                    for combo in combinations_with_replacement(range(self.block), tk)
                ]
            )
        for parts in product(*per_matrix):
            yield sum(parts)

    def _add_terms(self, a: dict, b: dict, sign: int = 1) -> dict:
        field = self.field
        result = dict(a)
        if field.native_arithmetic:
            for m, c in b.items():
                value = field.normalize(result.get(m, 0) + sign * c)
                if value != 0:
                    result[m] = value
                else:
                    result.pop(m, None)
            return result
        for m, c in b.items():
            c = c if sign > 0 else field.neg(c)
            value = field.add(result[m], c) if m in result else c
            if field.is_zero(value):
                result.pop(m, None)
            else:
                result[m] = value
        return result

    def _mul_terms(self, a: dict, b: dict) -> dict:
        if len(a) > len(b):
            a, b = b, a
        field = self.field
        acc = {}
        get = acc.get
        if field.native_arithmetic:
            for m1, c1 in a.items():
                for m2, c2 in b.items():
                    key = m1 + m2
                    acc[key] = get(key, 0) + c1 * c2
            normalize = field.normalize
            result = {}
            for m, c in acc.items():
                value = normalize(c)
                if value != 0:
                    result[m] = value
            return result
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                key = m1 + m2
                term = field.mul(c1, c2)
                acc[key] = field.add(acc[key], term) if key in acc else term
        return {m: c for m, c in acc.items() if not field.is_zero(c)}


def _raw_coefficient(field: FieldDescriptor, value):
    if isinstance(value, Scalar):
        if value.field != field:
            raise FieldMismatchError(f"Scalar from {value.field.name} cannot scale a polynomial over {field.name}.")
        return value.raw
    if isinstance(value, int) and not isinstance(value, bool):
        return field.from_int(value)
    if isinstance(value, Fraction):
        return field.from_fraction(value)
    return field.normalize(value)


class Polynomial:
    """
    An immutable sparse polynomial: a map from packed monomials to nonzero raw coefficients of `ring.field`.
    """

    __slots__ = ("ring", "terms", "_degree")

    def __init__(self, ring: PolynomialRing, terms: Optional[Mapping[int, object]] = None, trusted: bool = False):
        self.ring = ring
        if trusted:
            self.terms = terms
        else:
            field = ring.field
            self.terms = {}
            for m, c in (terms or {}).items():
                c = _raw_coefficient(field, c)
                if not field.is_zero(c):
                    self.terms[m] = c
        self._degree = None

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise FieldMismatchError(f"Cannot combine polynomials from {self.ring!r} and {other.ring!r}.")

    def _lift(self, other) -> Optional["Polynomial"]:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, Scalar)) and not isinstance(other, bool):
            return self.ring.constant(other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return Polynomial(self.ring, self.ring._add_terms(self.terms, other.terms), trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return Polynomial(self.ring, self.ring._add_terms(self.terms, other.terms, sign=-1), trusted=True)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        field = self.ring.field
        return Polynomial(self.ring, {m: field.neg(c) for m, c in self.terms.items()}, trusted=True)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            if not self.terms or not other.terms:
                return self.ring.zero
            if self.degree() + other.degree() > MAX_EXPONENT:
                raise ValueError(f"Product degree exceeds the packed exponent limit {MAX_EXPONENT}.")
            return Polynomial(self.ring, self.ring._mul_terms(self.terms, other.terms), trusted=True)
        if isinstance(other, (int, Fraction, Scalar)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError(f"Polynomial exponent should be >= 0 (got: {exponent}).")
        result = self.ring.one
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, value) -> "Polynomial":
        field = self.ring.field
        c = _raw_coefficient(field, value)
        if field.is_zero(c):
            return self.ring.zero
        terms = {}
        for m, coefficient in self.terms.items():
            product_value = field.mul(coefficient, c)
            if not field.is_zero(product_value):
                terms[m] = product_value
        return Polynomial(self.ring, terms, trusted=True)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction, Scalar)) and not isinstance(other, bool):
            return self.terms == self.ring.constant(other).terms
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def degree(self) -> int:
        if self._degree is None:
            self._degree = max((self.ring.degree_of(m) for m in self.terms), default=0)
        return self._degree

    def coefficient(self, m: int) -> Scalar:
        field = self.ring.field
        return Scalar(field, self.terms.get(m, field.zero))

    def multidegrees(self) -> List[MultiDegree]:
        return sorted({self.ring.mdeg_of(m) for m in self.terms})

    def graded_component(self, t: Sequence[int]) -> "Polynomial":
        t = tuple(t)
        mdeg = self.ring.mdeg_of
        return Polynomial(self.ring, {m: c for m, c in self.terms.items() if mdeg(m) == t}, trusted=True)

    def components(self) -> Dict[MultiDegree, "Polynomial"]:
        grouped = {}
        for m, c in self.terms.items():
            grouped.setdefault(self.ring.mdeg_of(m), {})[m] = c
        return {t: Polynomial(self.ring, terms, trusted=True) for t, terms in sorted(grouped.items())}

    def is_multihomogeneous(self) -> bool:
        return len(self.multidegrees()) <= 1

    def evaluate(self, assignment: Mapping[VariableId, object]) -> Scalar:
        """Substitutes a field value for every variable occurring in the polynomial."""
        field = self.ring.field
        values = {}
        for var, value in assignment.items():
            values[self.ring.variable_index(*var)] = _raw_coefficient(field, value)
        total = field.zero
        for m, c in self.terms.items():
            term = c
            for v, e in enumerate(self.ring.exponent_vector(m)):
                if e:
                    if v not in values:
                        raise ValueError(f"No value assigned to {self.ring.variables[v]}.")
                    term = field.mul(term, field.power(values[v], e))
            total = field.add(total, term)
        return Scalar(field, total)

    def rename_variables(self, target: PolynomialRing, index_map: Sequence[int]) -> "Polynomial":
        """Maps variable `v` to variable `index_map[v]` of `target`; coefficients are kept."""
        if target.field != self.ring.field:
            raise FieldMismatchError(f"Cannot move polynomials from {self.ring!r} to {target!r}.")
        field = target.field
        terms = {}
        for m, c in self.terms.items():
            image = 0
            for v, e in enumerate(self.ring.exponent_vector(m)):
                if e:
                    image += e << (EXPONENT_BITS * index_map[v])
            terms[image] = field.add(terms[image], c) if image in terms else c
        return Polynomial(target, {m: c for m, c in terms.items() if not field.is_zero(c)}, trusted=True)

    def sorted_monomials(self) -> List[int]:
        vector = self.ring.exponent_vector
        return sorted(self.terms, key=lambda m: (sum(vector(m)), tuple(vector(m))), reverse=True)

    def to_json(self) -> list:
        field = self.ring.field
        records = []
        for m in self.sorted_monomials():
            exponents = [[var.i, var.j, var.k, e] for var, e in self.ring.exponents(m).items()]
            records.append({"monomial": exponents, "coeff": field.encode(self.terms[m])})
        return records

    @classmethod
    def from_json(cls, ring: PolynomialRing, records: Iterable[dict]) -> "Polynomial":
        terms = {}
        for record in records:
            m = ring.monomial({VariableId(i, j, k): e for i, j, k, e in record["monomial"]})
            terms[m] = ring.field.decode(record["coeff"])
        return cls(ring, terms)

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        field = self.ring.field
        pieces = []
        for m in self.sorted_monomials():
            factors = []
            for var, e in self.ring.exponents(m).items():
                factors.append(str(var) if e == 1 else f"{var}^{e}")
            coefficient = field.to_str(self.terms[m])
            negative = coefficient.startswith("-") and " " not in coefficient
            if negative:
                coefficient = coefficient[1:]
            if " " in coefficient:
                coefficient = f"({coefficient})"
            if factors and coefficient == "1":
                body = "·".join(factors)
            else:
                body = "·".join([coefficient] + factors)
            pieces.append(("- " if negative else "+ ") + body)
        text = " ".join(pieces)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __str__(self):
        return self.pretty()

    def __repr__(self):
        return f"Polynomial({self.pretty()})"


def poly_arith(f: Polynomial, g: Union[Polynomial, int, Fraction, Scalar], op: str) -> Polynomial:
    """Exact `add`, `sub`, `mul` of two polynomials, or `scale` of `f` by a scalar `g`."""
    if op == "scale":
        return f.scale(g)
    if not isinstance(g, Polynomial):
        g = f.ring.constant(g)
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"Unknown polynomial operation {op!r}, expected one of add, sub, mul, scale.")


def mdeg_of(ring: PolynomialRing, m: int) -> MultiDegree:
    return ring.mdeg_of(m)


def graded_component(f: Polynomial, t: Sequence[int]) -> Polynomial:
    return f.graded_component(t)


def monomials_of_multidegree(kind: Union[str, MatrixKind], n: int, t: Sequence[int]) -> List[int]:
    """The monomials of multidegree `t` in `PolynomialRing(kind, n, len(t))`, in a deterministic order."""
    return list(PolynomialRing(kind, n, len(t)).monomials_of_multidegree(t))
