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

"""Exact scalar arithmetic over the rationals, odd prime fields and the extension Q(i, sqrt2)."""

import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Any, Optional, Union

import sympy

from .utils import STANDING_HYPOTHESIS, CharacteristicError, FieldMismatchError


__all__ = [
    "FieldDescriptor",
    "Rationals",
    "PrimeField",
    "QAdjoinISqrt2",
    "PrimeFieldWithRoots",
    "Scalar",
    "RATIONALS",
    "EXTENSION",
    "parse_field",
    "scalar_arith",
    "embed_special",
    "reduce_rational",
    "rational_reconstruction",
    "scalar_encode",
    "scalar_decode",
]

SPECIAL_SYMBOLS = ("i", "sqrt2")


def _normalize_fraction(value):
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def _parse_rational(obj) -> Fraction:
    if isinstance(obj, bool) or isinstance(obj, float):
        raise ValueError(f"Scalars must be exact integers or rational strings (got: {obj!r}).")
    if isinstance(obj, (int, Fraction)):
        return Fraction(obj)
    if isinstance(obj, str):
        text = obj.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
            raise ValueError(f"Invalid rational encoding {obj!r}, expected 'p' or 'p/q'.")
        return Fraction(text)
    raise ValueError(f"Invalid rational encoding {obj!r}.")


def _rational_str(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class FieldDescriptor(ABC):
    """
    Describes a coefficient field and implements its arithmetic on raw values.

    Raw values are plain Python objects (ints, fractions, tuples) so that polynomial and matrix code can run
    without wrapping every coefficient. `Scalar` is the user facing wrapper.
    """

    # Raw values support the builtin `+`, `-` and `*`; `normalize` brings a result back to canonical form.
    native_arithmetic: bool = True

    @property
    @abstractmethod
    def name(self) -> str:
        raise NotImplementedError()

    @property
    @abstractmethod
    def characteristic(self) -> int:
        raise NotImplementedError()

    @property
    def contains_roots(self) -> bool:
        """Whether the field contains the designated square roots of -1 and 2."""
        return False

    def prime_field(self) -> "FieldDescriptor":
        """The prime subfield: the rationals in characteristic 0, F_p otherwise."""
        if self.characteristic == 0:
            return RATIONALS
        return PrimeField(self.characteristic)

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    @abstractmethod
    def from_int(self, value: int):
        raise NotImplementedError()

    @abstractmethod
    def from_fraction(self, value: Fraction):
        raise NotImplementedError()

    def normalize(self, value):
        return value

    def add(self, a, b):
        return self.normalize(a + b)

    def sub(self, a, b):
        return self.normalize(a - b)

    def neg(self, a):
        return self.normalize(-a)

    def mul(self, a, b):
        return self.normalize(a * b)

    @abstractmethod
    def inv(self, a):
        raise NotImplementedError()

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == 0

    def power(self, a, exponent: int):
        if exponent < 0:
            return self.power(self.inv(a), -exponent)
        result = self.one
        base = a
        while exponent:
            if exponent & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            exponent >>= 1
        return result

    def special(self, symbol: str):
        raise CharacteristicError(f"{self.name} does not contain a designated square root for {symbol!r}.")

    @abstractmethod
    def encode(self, a) -> Any:
        raise NotImplementedError()

    @abstractmethod
    def decode(self, obj) -> Any:
        raise NotImplementedError()

    def to_str(self, a) -> str:
        return str(self.encode(a))

    def __call__(self, value) -> "Scalar":
        if isinstance(value, Scalar):
            if value.field != self:
                raise FieldMismatchError(f"Scalar from {value.field.name} cannot be used in {self.name}.")
            return value
        if isinstance(value, int):
            return Scalar(self, self.from_int(value))
        if isinstance(value, Fraction):
            return Scalar(self, self.from_fraction(value))
        return Scalar(self, self.decode(value))

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Rationals(FieldDescriptor):
    """The field of rational numbers; raw values are `int` or `Fraction`."""

    @property
    def name(self) -> str:
        return "Q"

    @property
    def characteristic(self) -> int:
        return 0

    def from_int(self, value: int):
        return int(value)

    def from_fraction(self, value: Fraction):
        return _normalize_fraction(Fraction(value))

    def normalize(self, value):
        return _normalize_fraction(value)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("Division by zero in Q.")
        return _normalize_fraction(Fraction(1) / a)

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("Division by zero in Q.")
        return _normalize_fraction(Fraction(a) / b)

    def encode(self, a) -> str:
        return _rational_str(a)

    def decode(self, obj):
        return _normalize_fraction(_parse_rational(obj))


@dataclass(frozen=True)
class PrimeField(FieldDescriptor):
    """
    The prime field F_p for an odd prime p; raw values are residues in [0, p).

    Args:
        p (`int`):
            An odd prime. `p=2` is rejected because all orthogonal-group content assumes p != 2.
    """

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise ValueError(f"Prime field characteristic should be an integer (got: {self.p!r}).")
        if self.p == 2:
            raise CharacteristicError(f"Characteristic 2 is not supported: {STANDING_HYPOTHESIS}.")
        if self.p < 2 or not sympy.isprime(self.p):
            raise ValueError(f"Prime field characteristic should be an odd prime (got: {self.p}).")

    @property
    def name(self) -> str:
        return f"F{self.p}"

    @property
    def characteristic(self) -> int:
        return self.p

    def prime_field(self) -> "FieldDescriptor":
        if type(self) is PrimeField:
            return self
        return PrimeField(self.p)

    def from_int(self, value: int):
        return int(value) % self.p

    def from_fraction(self, value: Fraction):
        value = Fraction(value)
        if value.denominator % self.p == 0:
            raise ZeroDivisionError(f"Denominator of {value} vanishes in {self.name}.")
        return value.numerator * pow(value.denominator, -1, self.p) % self.p

    def normalize(self, value):
        return value % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"Division by zero in {self.name}.")
        return pow(a, -1, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def power(self, a, exponent: int):
        if exponent < 0:
            return pow(self.inv(a), -exponent, self.p)
        return pow(a, exponent, self.p)

    def encode(self, a) -> int:
        return int(a)

    def decode(self, obj):
        if isinstance(obj, str) and "/" in obj:
            return self.from_fraction(_parse_rational(obj))
        if isinstance(obj, str):
            return self.from_int(int(_parse_rational(obj)))
        if isinstance(obj, bool) or not isinstance(obj, int):
            raise ValueError(f"Invalid {self.name} encoding {obj!r}, expected an integer.")
        return self.from_int(obj)


@dataclass(frozen=True)
class PrimeFieldWithRoots(PrimeField):
    """
    F_p for a prime p = 1 (mod 8) together with designated square roots of -1 and 2.

    Args:
        p (`int`):
            A prime congruent to 1 modulo 8.
        i_rep (`int`, *optional*):
            Residue whose square is -1. Defaults to the smallest such residue.
        sqrt2_rep (`int`, *optional*):
            Residue whose square is 2. Defaults to the smallest such residue.
    """

    i_rep: Optional[int] = None
    sqrt2_rep: Optional[int] = None

    def __post_init__(self):
        super().__post_init__()
        if self.p % 8 != 1:
            raise CharacteristicError(f"F{self.p} does not contain both i and sqrt(2); p should be 1 mod 8.")
        if self.i_rep is None:
            object.__setattr__(self, "i_rep", _smallest_root(-1, self.p))
        if self.sqrt2_rep is None:
            object.__setattr__(self, "sqrt2_rep", _smallest_root(2, self.p))
        object.__setattr__(self, "i_rep", self.i_rep % self.p)
        object.__setattr__(self, "sqrt2_rep", self.sqrt2_rep % self.p)
        if (self.i_rep * self.i_rep + 1) % self.p != 0:
            raise ValueError(f"{self.i_rep} is not a square root of -1 modulo {self.p}.")
        if (self.sqrt2_rep * self.sqrt2_rep - 2) % self.p != 0:
            raise ValueError(f"{self.sqrt2_rep} is not a square root of 2 modulo {self.p}.")

    @property
    def name(self) -> str:
        return f"F{self.p}iS2:{self.i_rep},{self.sqrt2_rep}"

    @property
    def contains_roots(self) -> bool:
        return True

    def special(self, symbol: str):
        if symbol == "i":
            return self.i_rep
        if symbol == "sqrt2":
            return self.sqrt2_rep
        return super().special(symbol)


def _smallest_root(value: int, p: int) -> int:
    target = value % p
    for r in range(1, p):
        if r * r % p == target:
            return r
    raise CharacteristicError(f"{value} has no square root modulo {p}.")


@dataclass(frozen=True)
class QAdjoinISqrt2(FieldDescriptor):
    """
    The field Q(i, sqrt2) as the Q-algebra with basis (1, i, sqrt2, i*sqrt2), i^2 = -1 and sqrt2^2 = 2.

    Raw values are 4-tuples of rationals (ints or fractions).
    """

    native_arithmetic = False
    basis_names = ("", "i", "sqrt2", "i*sqrt2")

    @property
    def name(self) -> str:
        return "QiS2"

    @property
    def characteristic(self) -> int:
        return 0

    @property
    def contains_roots(self) -> bool:
        return True

    def from_int(self, value: int):
        return (int(value), 0, 0, 0)

    def from_fraction(self, value: Fraction):
        return (_normalize_fraction(Fraction(value)), 0, 0, 0)

    def normalize(self, value):
        return tuple(_normalize_fraction(c) for c in value)

    def add(self, a, b):
        return tuple(_normalize_fraction(x + y) for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(_normalize_fraction(x - y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        a0, a1, a2, a3 = a
        b0, b1, b2, b3 = b
        return (
            _normalize_fraction(a0 * b0 - a1 * b1 + 2 * a2 * b2 - 2 * a3 * b3),
            _normalize_fraction(a0 * b1 + a1 * b0 + 2 * (a2 * b3 + a3 * b2)),
            _normalize_fraction(a0 * b2 + a2 * b0 - (a1 * b3 + a3 * b1)),
            _normalize_fraction(a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1),
        )

    def scale(self, a, q):
        return tuple(_normalize_fraction(x * q) for x in a)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("Division by zero in QiS2.")
        a0, a1, a2, a3 = a
        # x = u + v*sqrt2 with u, v in Q(i); x * conj_sqrt2(x) = u^2 - 2 v^2 = w0 + w1*i lies in Q(i).
        w0 = a0 * a0 - a1 * a1 - 2 * (a2 * a2 - a3 * a3)
        w1 = 2 * a0 * a1 - 4 * a2 * a3
        norm = Fraction(w0 * w0 + w1 * w1)
        numerator = self.mul((a0, a1, -a2, -a3), (w0, -w1, 0, 0))
        return self.scale(numerator, 1 / norm)

    def is_zero(self, a) -> bool:
        return all(c == 0 for c in a)

    def special(self, symbol: str):
        if symbol == "i":
            return (0, 1, 0, 0)
        if symbol == "sqrt2":
            return (0, 0, 1, 0)
        return super().special(symbol)

    def rational_part(self, a) -> Optional[Fraction]:
        """Returns `a` as a rational number when its irrational coordinates vanish, else `None`."""
        if any(c != 0 for c in a[1:]):
            return None
        return Fraction(a[0])

    def encode(self, a) -> list:
        return [_rational_str(c) for c in a]

    def decode(self, obj):
        if isinstance(obj, (list, tuple)):
            if len(obj) != 4:
                raise ValueError(f"QiS2 elements are encoded as 4 rationals (got: {obj!r}).")
            return tuple(_normalize_fraction(_parse_rational(c)) for c in obj)
        return self.from_fraction(_parse_rational(obj))

    def to_str(self, a) -> str:
        parts = []
        for coefficient, basis in zip(a, self.basis_names):
            if coefficient == 0:
                continue
            text = _rational_str(coefficient)
            if basis:
                text = basis if text == "1" else "-" + basis if text == "-1" else f"{text}*{basis}"
            parts.append(text)
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")


RATIONALS = Rationals()
EXTENSION = QAdjoinISqrt2()

_PRIME_FIELD_PATTERN = re.compile(r"F(\d+)")
_ROOTS_FIELD_PATTERN = re.compile(r"F(\d+)iS2(?::(-?\d+),(-?\d+))?")


def parse_field(text: str) -> FieldDescriptor:
    """
    Parses a field descriptor from `Q`, `F<p>`, `QiS2` or `F<p>iS2[:<iRep>,<sqrt2Rep>]`.
    """
    text = text.strip()
    if text == "Q":
        return RATIONALS
    if text == "QiS2":
        return EXTENSION
    match = _PRIME_FIELD_PATTERN.fullmatch(text)
    if match:
        return PrimeField(int(match.group(1)))
    match = _ROOTS_FIELD_PATTERN.fullmatch(text)
    if match:
        p = int(match.group(1))
        if match.group(2) is None:
            return PrimeFieldWithRoots(p)
        return PrimeFieldWithRoots(p, int(match.group(2)), int(match.group(3)))
    raise ValueError(f"Unknown field {text!r}, expected one of Q, F<p>, QiS2, F<p>iS2[:<iRep>,<sqrt2Rep>].")


class Scalar:
    """An immutable element of a `FieldDescriptor`."""

    __slots__ = ("field", "raw")

    def __init__(self, field: FieldDescriptor, raw):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "raw", field.normalize(raw))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable.")

    @property
    def value(self):
        if isinstance(self.field, QAdjoinISqrt2):
            return tuple(Fraction(c) for c in self.raw)
        if self.field.characteristic == 0:
            return Fraction(self.raw)
        return self.raw

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatchError(f"Cannot combine scalars from {self.field.name} and {other.field.name}.")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.field, self.field.add(self.raw, other.raw))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.field, self.field.sub(self.raw, other.raw))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.field, self.field.sub(other.raw, self.raw))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.field, self.field.mul(self.raw, other.raw))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.field, self.field.div(self.raw, other.raw))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.field, self.field.div(other.raw, self.raw))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.raw))

    def __pow__(self, exponent: int):
        return Scalar(self.field, self.field.power(self.raw, exponent))

    def inverse(self) -> "Scalar":
        return Scalar(self.field, self.field.inv(self.raw))

    def is_zero(self) -> bool:
        return self.field.is_zero(self.raw)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.raw == other.raw
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            try:
                return self.raw == self.field(other).raw
            except ZeroDivisionError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.raw))

    def encode(self):
        return self.field.encode(self.raw)

    def __str__(self):
        return self.field.to_str(self.raw)

    def __repr__(self):
        return f"Scalar({self.field.name}, {self})"


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Exact `add`, `sub`, `mul` or `div` of two scalars from the same field."""
    if a.field != b.field:
        raise FieldMismatchError(f"Cannot combine scalars from {a.field.name} and {b.field.name}.")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"Unknown scalar operation {op!r}, expected one of add, sub, mul, div.")


def embed_special(symbol: str, field: FieldDescriptor) -> Scalar:
    """Returns the designated square root of -1 (`"i"`) or of 2 (`"sqrt2"`) in `field`."""
    if symbol not in SPECIAL_SYMBOLS:
        raise ValueError(f"Unknown special symbol {symbol!r}, expected one of {SPECIAL_SYMBOLS}.")
    return Scalar(field, field.special(symbol))


def reduce_rational(field: FieldDescriptor, value: Union[int, Fraction]) -> Scalar:
    return Scalar(field, field.from_fraction(Fraction(value)))


def rational_reconstruction(residue: int, modulus: int) -> Optional[Fraction]:
    """
    Lifts `residue` modulo `modulus` to the unique fraction a/b with |a|, |b| <= sqrt(modulus / 2), if any.
    """
    bound = isqrt(modulus // 2)
    r0, r1 = modulus, residue % modulus
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    result = Fraction(r1, s1)
    if (result.numerator - residue * result.denominator) % modulus != 0:
        return None
    return result


def scalar_encode(a: Scalar):
    return a.encode()


def scalar_decode(field: FieldDescriptor, obj) -> Scalar:
    return Scalar(field, field.decode(obj))
