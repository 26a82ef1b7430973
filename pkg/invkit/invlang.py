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

"""The invariant-expression language: sigma_t of words in generator matrices, and the standard invariant sets."""

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .genmat import ConcreteMatrix, GenericMatrix, generic, word_value
from .polyring import MatrixKind, Polynomial, PolynomialRing
from .scalars import RATIONALS, FieldDescriptor, Scalar
from .utils import ExpressionSyntaxError, FieldMismatchError


__all__ = [
    "Letter",
    "Word",
    "InvariantExpr",
    "InvariantSet",
    "ExpansionContext",
    "parse_expr",
    "evaluate",
    "expand",
    "canonical_word",
    "standard_set",
    "list_cases",
    "CASES",
]


class Letter(NamedTuple):
    """A generator index with an optional transpose flag."""

    index: int
    transpose: bool = False

    def text(self) -> str:
        return f"{self.index}'" if self.transpose else str(self.index)


@dataclass(frozen=True)
class Word:
    """A nonempty sequence of letters, stored verbatim."""

    letters: Tuple[Letter, ...]

    def __post_init__(self):
        letters = tuple(letter if isinstance(letter, Letter) else Letter(*letter) for letter in self.letters)
        if not letters:
            raise ValueError("Words should be nonempty.")
        if any(letter.index < 1 for letter in letters):
            raise ValueError(f"Generator indices should be >= 1 (got: {[x.index for x in letters]}).")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def of(cls, *indices: int) -> "Word":
        return cls(tuple(Letter(k) for k in indices))

    def __len__(self):
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    @property
    def max_index(self) -> int:
        return max(letter.index for letter in self.letters)

    def generators(self) -> List[int]:
        return sorted({letter.index for letter in self.letters})

    def counts(self, d: int) -> Tuple[int, ...]:
        counts = [0] * d
        for letter in self.letters:
            if letter.index > d:
                raise ValueError(f"Generator index {letter.index} exceeds d={d}.")
            counts[letter.index - 1] += 1
        return tuple(counts)

    def rotations(self) -> List["Word"]:
        letters = self.letters
        return [Word(letters[r:] + letters[:r]) for r in range(len(letters))]

    def reversed(self) -> "Word":
        return Word(self.letters[::-1])

    def transpose_reversed(self) -> "Word":
        """The word of the transposed product."""
        return Word(tuple(Letter(x.index, not x.transpose) for x in self.letters[::-1]))

    def without_transposes(self) -> "Word":
        return Word(tuple(Letter(x.index) for x in self.letters))

    def relabel(self, mapping: Dict[int, int]) -> "Word":
        return Word(tuple(Letter(mapping[x.index], x.transpose) for x in self.letters))

    def text(self) -> str:
        return " ".join(letter.text() for letter in self.letters)

    def render(self, kind: MatrixKind) -> str:
        """Renders runs of equal letters as powers, e.g. `Y1^2 Y2`."""
        pieces = []
        letters = self.letters
        start = 0
        while start < len(letters):
            end = start
            while end < len(letters) and letters[end] == letters[start]:
                end += 1
            letter = letters[start]
            name = f"{kind.letter}{letter.index}" + ("^T" if letter.transpose else "")
            if end - start > 1:
                name = f"({name})^{end - start}" if letter.transpose else f"{name}^{end - start}"
            pieces.append(name)
            start = end
        return " ".join(pieces)

    def __str__(self):
        return self.text()


def canonical_word(word: Word, kind: Union[str, MatrixKind]) -> Word:
    """
    Smallest representative of the class of `word` under cyclic shifts and transposition of the product.

    For symmetric and skew kinds transpose flags are dropped first (for skew matrices this identifies
    invariants up to sign) and transposition becomes plain reversal.
    """
    kind = MatrixKind.parse(kind)
    if kind == MatrixKind.GENERAL:
        candidates = word.rotations() + word.transpose_reversed().rotations()
    else:
        plain = word.without_transposes()
        candidates = plain.rotations() + plain.reversed().rotations()
    return min(candidates, key=lambda w: w.letters)


@dataclass(frozen=True)
class InvariantExpr:
    """
    sigma_t of a word. `t=None` stands for the determinant, resolved to t=n once n is known.
    """

    t: Optional[int]
    word: Word

    def sigma_index(self, n: int) -> int:
        t = n if self.t is None else self.t
        if not 1 <= t <= n:
            raise ValueError(f"sigma index should be in [1, {n}] (got: {t}).")
        return t

    def resolved(self, n: int) -> "InvariantExpr":
        return InvariantExpr(self.sigma_index(n), self.word)

    def multidegree(self, d: int, n: Optional[int] = None) -> Tuple[int, ...]:
        t = self.t if self.t is not None else n
        if t is None:
            raise ValueError("The multidegree of det(...) needs the matrix size n.")
        return tuple(t * c for c in self.word.counts(d))

    def degree(self, n: Optional[int] = None) -> int:
        t = self.t if self.t is not None else n
        if t is None:
            raise ValueError("The degree of det(...) needs the matrix size n.")
        return t * len(self.word)

    def _head(self, n: Optional[int]) -> str:
        if self.t is None or (n is not None and self.t == n):
            return "det"
        if self.t == 1:
            return "tr"
        return f"sigma_{self.t}"

    def text(self, n: Optional[int] = None) -> str:
        """Grammar form, e.g. `tr(1 1 2)`; parsing it back gives the same expression."""
        return f"{self._head(n)}({self.word.text()})"

    def render(self, kind: Union[str, MatrixKind], n: Optional[int] = None) -> str:
        """Notation form, e.g. `tr(Y1^2 Y2)`."""
        return f"{self._head(n)}({self.word.render(MatrixKind.parse(kind))})"

    def __str__(self):
        return self.text()


_HEADS = ("tr", "det", "sigma_")


def parse_expr(text: str) -> InvariantExpr:
    """
    Parses `("tr" | "det" | "sigma_" t) "(" letter+ ")"` where a letter is a generator index, optionally followed
    by `'` (transpose) and `^e` (repetition).
    """
    pos = 0
    length = len(text)

    def skip_spaces():
        nonlocal pos
        while pos < length and text[pos].isspace():
            pos += 1

    def read_int(what: str) -> int:
        nonlocal pos
        start = pos
        while pos < length and text[pos].isdigit():
            pos += 1
        if start == pos:
            raise ExpressionSyntaxError(f"Expected {what}", text, start)
        return int(text[start:pos])

    skip_spaces()
    if text.startswith("tr", pos):
        t, pos = 1, pos + 2
    elif text.startswith("det", pos):
        t, pos = None, pos + 3
    elif text.startswith("sigma_", pos):
        pos += len("sigma_")
        t = read_int("a sigma index")
    else:
        raise ExpressionSyntaxError(f"Expected one of {', '.join(_HEADS)}", text, pos)
    skip_spaces()
    if pos >= length or text[pos] != "(":
        raise ExpressionSyntaxError("Expected '('", text, pos)
    pos += 1
    letters = []
    while True:
        skip_spaces()
        if pos < length and text[pos] == ")":
            pos += 1
            break
        if pos >= length:
            raise ExpressionSyntaxError("Expected ')'", text, pos)
        start = pos
        index = read_int("a generator index")
        if index < 1:
            raise ExpressionSyntaxError("Generator indices start at 1", text, start)
        transpose = False
        if pos < length and text[pos] == "'":
            transpose = True
            pos += 1
        repeat = 1
        if pos < length and text[pos] == "^":
            pos += 1
            repeat = read_int("an exponent")
            if repeat < 1:
                raise ExpressionSyntaxError("Exponents should be >= 1", text, pos - 1)
        if pos < length and not (text[pos].isspace() or text[pos] == ")"):
            raise ExpressionSyntaxError("Expected a space or ')'", text, pos)
        letters.extend([Letter(index, transpose)] * repeat)
    skip_spaces()
    if pos != length:
        raise ExpressionSyntaxError("Unexpected trailing characters", text, pos)
    if not letters:
        raise ExpressionSyntaxError("Expected at least one letter", text, pos - 1)
    return InvariantExpr(t, Word(tuple(letters)))


def _as_expr(expr: Union[str, InvariantExpr]) -> InvariantExpr:
    return parse_expr(expr) if isinstance(expr, str) else expr


def evaluate(expr: Union[str, InvariantExpr], matrices: Sequence[ConcreteMatrix]) -> Scalar:
    """sigma_t of the product of the concrete matrices along the word."""
    expr = _as_expr(expr)
    matrices = list(matrices)
    if not matrices:
        raise ValueError("Cannot evaluate an invariant on an empty tuple.")
    first = matrices[0]
    for matrix in matrices[1:]:
        if matrix.n != first.n:
            raise ValueError(f"Matrix sizes do not match ({first.n} vs {matrix.n}).")
        if matrix.field != first.field:
            raise FieldMismatchError(f"Matrices from {first.field.name} and {matrix.field.name} in one tuple.")
    return word_value(expr.word.letters, matrices).sigma(expr.sigma_index(first.n))


class ExpansionContext:
    """
    Expands invariant expressions over generic matrices of one ring, reusing short word prefixes.

    Args:
        kind (`MatrixKind`):
            Kind of the generic matrices.
        n (`int`):
            Matrix size.
        d (`int`):
            Number of generic matrices.
        field (`FieldDescriptor`, defaults to `Q`):
            Coefficient field of the expansion.
        max_cached_prefix (`int`, defaults to 3):
            Longest word prefix whose generic product is kept.
    """

    def __init__(self, kind, n: int, d: int, field: FieldDescriptor = RATIONALS, max_cached_prefix: int = 3):
        self.ring = PolynomialRing(kind, n, d, field)
        self.kind = self.ring.kind
        self.n = n
        self.d = d
        self.generators = [generic(self.kind, n, k, self.ring) for k in range(1, d + 1)]
        self.max_cached_prefix = max_cached_prefix
        self._prefixes: Dict[Tuple[Letter, ...], GenericMatrix] = {}

    def _letter_matrix(self, letter: Letter) -> GenericMatrix:
        if letter.index > self.d:
            raise IndexError(f"Generator index {letter.index} exceeds d={self.d}.")
        matrix = self.generators[letter.index - 1]
        return matrix.transpose() if letter.transpose else matrix

    def word_matrix(self, letters: Tuple[Letter, ...]) -> GenericMatrix:
        if len(letters) == 1:
            return self._letter_matrix(letters[0])
        cached = self._prefixes.get(letters)
        if cached is not None:
            return cached
        result = self.word_matrix(letters[:-1]) @ self._letter_matrix(letters[-1])
        if len(letters) <= self.max_cached_prefix:
            self._prefixes[letters] = result
        return result

    def expand(self, expr: Union[str, InvariantExpr]) -> Polynomial:
        expr = _as_expr(expr)
        t = expr.sigma_index(self.n)
        letters = expr.word.letters
        if t == 1 and len(letters) > 1:
            # tr(P M) only needs the diagonal of the product.
            head = self.word_matrix(letters[:-1])
            last = self._letter_matrix(letters[-1])
            result = self.ring.zero
            for i in range(self.n):
                for j in range(self.n):
                    a, b = head.rows[i][j], last.rows[j][i]
                    if a and b:
                        result = result + a * b
        else:
            result = self.word_matrix(letters).sigma(t)
        expected = expr.multidegree(self.d, self.n)
        occurring = result.multidegrees()
        if occurring and occurring != [expected]:
            raise AssertionError(f"Expansion of {expr} is not multihomogeneous of multidegree {expected}.")
        return result


def expand(
    expr: Union[str, InvariantExpr],
    kind: Union[str, MatrixKind],
    n: int,
    d: int,
    field: FieldDescriptor = RATIONALS,
) -> Polynomial:
    """sigma_t of the product of generic matrices; the result is multihomogeneous of multidegree t * counts."""
    return ExpansionContext(kind, n, d, field).expand(expr)


@dataclass(frozen=True)
class InvariantSet:
    """A named list of invariant expressions for `d` matrices of size `n` and a given kind."""

    case_name: str
    n: int
    d: int
    kind: MatrixKind
    exprs: Tuple[InvariantExpr, ...]

    def __post_init__(self):
        for expr in self.exprs:
            if expr.word.max_index > self.d:
                raise ValueError(f"{expr} references a generator beyond d={self.d}.")

    def __len__(self):
        return len(self.exprs)

    def __iter__(self) -> Iterator[InvariantExpr]:
        return iter(self.exprs)

    def index_of(self, expr: Union[str, InvariantExpr]) -> int:
        target = _as_expr(expr).resolved(self.n)
        for position, candidate in enumerate(self.exprs):
            if candidate.resolved(self.n) == target:
                return position
        raise KeyError(f"{target.text(self.n)} is not a member of {self.case_name}.")

    def __contains__(self, expr) -> bool:
        try:
            self.index_of(expr)
        except KeyError:
            return False
        return True

    def without(self, expr: Union[str, InvariantExpr]) -> "InvariantSet":
        position = self.index_of(expr)
        exprs = self.exprs[:position] + self.exprs[position + 1 :]
        return InvariantSet(self.case_name, self.n, self.d, self.kind, exprs)

    def text(self, expr: InvariantExpr) -> str:
        return expr.text(self.n)

    def render(self, expr: InvariantExpr) -> str:
        return expr.render(self.kind, self.n)

    def to_json(self) -> dict:
        return {
            "case": self.case_name,
            "n": self.n,
            "d": self.d,
            "kind": self.kind.value,
            "exprs": [expr.text(self.n) for expr in self.exprs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "InvariantSet":
        return cls(
            obj["case"],
            obj["n"],
            obj["d"],
            MatrixKind.parse(obj["kind"]),
            tuple(parse_expr(text).resolved(obj["n"]) for text in obj["exprs"]),
        )


def _e(t: int, *indices: int) -> InvariantExpr:
    return InvariantExpr(t, Word.of(*indices))


def _pairs(d: int) -> Iterable[Tuple[int, int]]:
    return ((i, j) for i in range(1, d + 1) for j in range(i + 1, d + 1))


def _triples(d: int) -> Iterable[Tuple[int, int, int]]:
    return ((i, j, k) for i in range(1, d + 1) for j in range(i + 1, d + 1) for k in range(j + 1, d + 1))


def _gl2(d: int, characteristic: int) -> List[InvariantExpr]:
    exprs = [_e(1, i) for i in range(1, d + 1)] + [_e(2, i) for i in range(1, d + 1)]
    exprs += [_e(1, i, j) for i, j in _pairs(d)]
    exprs += [_e(1, i, j, k) for i, j, k in _triples(d)]
    return exprs


def _gl3_d2(d: int, characteristic: int) -> List[InvariantExpr]:
    exprs = [_e(t, i) for t in (1, 2, 3) for i in (1, 2)]
    return exprs + [_e(1, 1, 2), _e(1, 1, 1, 2), _e(1, 1, 2, 2), _e(1, 1, 1, 2, 2), _e(1, 1, 1, 2, 2, 1, 2)]


def _o3_skew(d: int, characteristic: int) -> List[InvariantExpr]:
    exprs = [_e(2, i) for i in range(1, d + 1)]
    exprs += [_e(1, i, j) for i, j in _pairs(d)]
    exprs += [_e(1, i, j, k) for i, j, k in _triples(d)]
    return exprs


def _o4_skew_d2(d: int, characteristic: int) -> List[InvariantExpr]:
    return [
        _e(2, 1),
        _e(2, 2),
        _e(4, 1),
        _e(4, 2),
        _e(1, 1, 2),
        _e(2, 1, 2),
        _e(1, 1, 1, 2, 2),
        _e(1, 1, 1, 1, 2),
        _e(1, 1, 2, 2, 2),
    ]


def _o3_sym_d2(d: int, characteristic: int) -> List[InvariantExpr]:
    exprs = [_e(t, i) for t in (1, 2, 3) for i in (1, 2)]
    return exprs + [_e(1, 1, 2), _e(1, 1, 1, 2), _e(1, 1, 2, 2), _e(1, 1, 1, 2, 2)]


def _o3_sym_d3(d: int, characteristic: int) -> List[InvariantExpr]:
    exprs = [_e(t, i) for t in (1, 2, 3) for i in (1, 2, 3)]
    for i, j in _pairs(3):
        exprs += [_e(1, i, j), _e(1, i, i, j), _e(1, i, j, j), _e(1, i, i, j, j)]
    exprs.append(_e(1, 1, 2, 3))
    exprs += [_e(1, 1, 1, 2, 3), _e(1, 2, 2, 1, 3), _e(1, 3, 3, 1, 2)]
    exprs += [_e(1, 1, 1, 2, 2, 3), _e(1, 1, 1, 3, 3, 2), _e(1, 2, 2, 3, 3, 1)]
    if characteristic == 3:
        exprs.append(_e(1, 1, 1, 2, 2, 3, 3))
    return exprs


def _distinct_triples() -> List[Tuple[int, int, int]]:
    return [(i, j, k) for i in (1, 2, 3) for j in (1, 2, 3) for k in (1, 2, 3) if len({i, j, k}) == 3]


def _o3_sym_d3_g1(d: int, characteristic: int) -> List[InvariantExpr]:
    exprs = [_e(1, i, i, j, j, i, j) for i, j in _pairs(3)]
    exprs.append(_e(1, 1, 3, 2))
    exprs.append(_e(1, 1, 1, 2, 2, 3, 3))
    exprs += [_e(1, i, i, j, k) for i, j, k in _distinct_triples() if j > k]
    exprs += [_e(1, i, i, j, j, k) for i, j, k in _distinct_triples() if i > j]
    exprs += [_e(1, i, i, j, i, k) for i, j, k in _distinct_triples() if j < k]
    exprs += [_e(1, i, i, j, j, i, k) for i, j, k in _distinct_triples()]
    return exprs


def _o3_sym_d3_g2(d: int, characteristic: int) -> List[InvariantExpr]:
    triples = [(i, j, k) for i, j, k in _distinct_triples() if j < k]
    exprs = [_e(1, 1, 1, 3, 3, 2, 2)]
    exprs += [_e(1, i, j, j, k, k, j, k) for i, j, k in triples]
    exprs += [_e(1, i, i, j, j, i, k, k) for i, j, k in triples]
    exprs += [_e(1, i, i, j, j, k, k, j, k) for i, j, k in triples]
    return exprs


@dataclass(frozen=True)
class CaseInfo:
    n: int
    kind: MatrixKind
    fixed_d: Optional[int]
    builder: object
    description: str


CASES: Dict[str, CaseInfo] = {
    "gl2": CaseInfo(2, MatrixKind.GENERAL, None, _gl2, "GL(2)-invariants of d matrices, minimal separating set"),
    "gl3-d2": CaseInfo(3, MatrixKind.GENERAL, 2, _gl3_d2, "GL(3)-invariants of two matrices, minimal separating set"),
    "o3-skew": CaseInfo(3, MatrixKind.SKEW, None, _o3_skew, "O(3)-invariants of d skew-symmetric matrices"),
    "o4-skew-d2": CaseInfo(4, MatrixKind.SKEW, 2, _o4_skew_d2, "O(4)-invariants of two skew-symmetric matrices"),
    "o3-sym-d2": CaseInfo(3, MatrixKind.SYMMETRIC, 2, _o3_sym_d2, "O(3)-invariants of two symmetric matrices"),
    "o3-sym-d3": CaseInfo(3, MatrixKind.SYMMETRIC, 3, _o3_sym_d3, "O(3)-invariants of three symmetric matrices"),
    "o3-sym-d3-pool-G1": CaseInfo(3, MatrixKind.SYMMETRIC, 3, _o3_sym_d3_g1, "auxiliary generators G1"),
    "o3-sym-d3-pool-G2": CaseInfo(3, MatrixKind.SYMMETRIC, 3, _o3_sym_d3_g2, "auxiliary generators G2 (p = 3)"),
}


def list_cases() -> List[str]:
    return list(CASES)


def resolve_d(case_name: str, d: Optional[int] = None) -> int:
    if case_name not in CASES:
        raise ValueError(f"Unknown case {case_name!r}, expected one of {', '.join(CASES)}.")
    info = CASES[case_name]
    if info.fixed_d is not None:
        if d is not None and d != info.fixed_d:
            raise ValueError(f"Case {case_name} is defined for d={info.fixed_d} only (got: {d}).")
        return info.fixed_d
    if d is None:
        return 2
    if d < 1:
        raise ValueError(f"Provided number of matrices should be >= 1 (got: {d}).")
    return d


def standard_set(case_name: str, d: Optional[int] = None, characteristic: int = 0) -> InvariantSet:
    """
    The invariant set of a shipped case. `characteristic` only matters for `o3-sym-d3`, which gains
    tr(Y1^2 Y2^2 Y3^2) in characteristic 3.
    """
    d = resolve_d(case_name, d)
    info = CASES[case_name]
    exprs = tuple(info.builder(d, characteristic))
    return InvariantSet(case_name, info.n, d, info.kind, exprs)
