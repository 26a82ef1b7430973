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

"""Separation testing and verification of the built-in minimality witnesses."""

import dataclasses
import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import tqdm

from .genmat import ConcreteMatrix, conjugate, identity_matrix, random_concrete, zero_matrix
from .invlang import InvariantExpr, InvariantSet, evaluate, parse_expr, resolve_d, standard_set
from .polyring import MatrixKind
from .scalars import RATIONALS, FieldDescriptor, Scalar
from .utils import STANDING_HYPOTHESIS, WITNESS_DIR, CharacteristicError, FieldMismatchError, WitnessNotFoundError


__all__ = [
    "MatrixTuple",
    "WitnessPair",
    "SeparationReport",
    "MinimalityEntry",
    "MinimalityReport",
    "separates",
    "builtin_witness",
    "verify_minimality",
    "search_witness",
    "transport",
]

LOGGER = logging.getLogger(__name__)

# Cases whose group is orthogonal; they require characteristic != 2.
ORTHOGONAL_CASES = ("o3-skew", "o4-skew-d2", "o3-sym-d2", "o3-sym-d3")


@dataclass(frozen=True)
class MatrixTuple:
    """A point of the representation: `d` concrete matrices sharing size, kind and field."""

    field: FieldDescriptor
    matrices: Tuple[ConcreteMatrix, ...]

    def __post_init__(self):
        matrices = tuple(self.matrices)
        if not matrices:
            raise ValueError("A matrix tuple should contain at least one matrix.")
        first = matrices[0]
        for matrix in matrices:
            if matrix.field != self.field:
                raise FieldMismatchError(f"Matrix over {matrix.field.name} in a tuple over {self.field.name}.")
            if matrix.n != first.n:
                raise ValueError(f"Matrix sizes do not match ({first.n} vs {matrix.n}).")
            if matrix.kind != first.kind:
                raise ValueError(f"Matrix kinds do not match ({first.kind.value} vs {matrix.kind.value}).")
        object.__setattr__(self, "matrices", matrices)

    @property
    def n(self) -> int:
        return self.matrices[0].n

    @property
    def kind(self) -> MatrixKind:
        return self.matrices[0].kind

    def __len__(self):
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)

    def __getitem__(self, index):
        return self.matrices[index]

    def to_json(self) -> list:
        return [matrix.to_json() for matrix in self.matrices]

    @classmethod
    def from_json(cls, obj: Sequence, field: FieldDescriptor, kind=None) -> "MatrixTuple":
        return cls(field, tuple(ConcreteMatrix.from_json(matrix, field, kind) for matrix in obj))


@dataclass(frozen=True)
class WitnessPair:
    """Two tuples that agree on every member of a standard set except `separator`."""

    u: MatrixTuple
    v: MatrixTuple
    separator: InvariantExpr
    case_name: str

    def to_json(self) -> dict:
        return {
            "case": self.case_name,
            "separator": self.separator.text(self.u.n),
            "u": self.u.to_json(),
            "v": self.v.to_json(),
        }


@dataclass
class SeparationReport:
    separated: bool
    first_separator: Optional[str]
    values: List[Tuple[str, str, str]]

    def to_dict(self) -> dict:
        return {
            "separated": self.separated,
            "first_separator": self.first_separator,
            "values": [{"f": f, "value_u": a, "value_v": b} for f, a, b in self.values],
        }


def _check_compatible(inv_set: InvariantSet, u: MatrixTuple, v: MatrixTuple):
    case = inv_set.case_name
    for name, point in (("u", u), ("v", v)):
        if point.n != inv_set.n:
            raise ValueError(f"Tuple {name} holds {point.n}x{point.n} matrices, {case} needs n={inv_set.n}.")
        if len(point) != inv_set.d:
            raise ValueError(f"Tuple {name} holds {len(point)} matrices, {case} needs d={inv_set.d}.")
        if inv_set.kind != MatrixKind.GENERAL and point.kind != inv_set.kind:
            raise ValueError(f"Tuple {name} holds {point.kind.value} matrices, {case} needs {inv_set.kind.value}.")
    if u.field != v.field:
        raise FieldMismatchError(f"Tuples over {u.field.name} and {v.field.name} cannot be compared.")


def _values(inv_set: InvariantSet, point: MatrixTuple) -> List[Scalar]:
    return [evaluate(expr, point.matrices) for expr in inv_set]


def separates(inv_set: InvariantSet, u: MatrixTuple, v: MatrixTuple) -> SeparationReport:
    """Evaluates every member of `inv_set` on both tuples; `separated` iff some value differs."""
    _check_compatible(inv_set, u, v)
    values_u = _values(inv_set, u)
    values_v = _values(inv_set, v)
    first = None
    table = []
    for expr, a, b in zip(inv_set, values_u, values_v):
        if first is None and a != b:
            first = inv_set.text(expr)
        table.append((inv_set.text(expr), str(a), str(b)))
    return SeparationReport(first is not None, first, table)


def check_characteristic(case_name: str, field: FieldDescriptor):
    if case_name in ORTHOGONAL_CASES and field.characteristic == 2:
        raise CharacteristicError(f"Case {case_name} is not available in characteristic 2: {STANDING_HYPOTHESIS}.")


@lru_cache(maxsize=None)
def load_witness_table(case_name: str) -> dict:
    path = WITNESS_DIR / f"{case_name}.json"
    if not path.is_file():
        raise WitnessNotFoundError(f"No built-in witnesses ship for case {case_name!r}.")
    with open(path) as f:
        return json.load(f)


def _table_matrix(obj, n: int, kind: MatrixKind, field: FieldDescriptor) -> ConcreteMatrix:
    if obj == "zero":
        return zero_matrix(n, field, kind)
    return ConcreteMatrix.from_json({"n": n, "kind": kind.value, "entries": obj}, field)


def _entry_tuples(table: dict, entry: dict, field: FieldDescriptor):
    n = table["n"]
    kind = MatrixKind.parse(table["kind"])
    if "swap_of" in entry:
        source = next((e for e in table["entries"] if e["separator"] == entry["swap_of"]), None)
        if source is None:
            raise WitnessNotFoundError(f"Witness {entry['separator']} refers to a missing entry {entry['swap_of']}.")
        u, v = _entry_tuples(table, source, field)
        return u[::-1], v[::-1]
    u = [_table_matrix(m, n, kind, field) for m in entry["u"]]
    v = [_table_matrix(m, n, kind, field) for m in entry["v"]]
    return u, v


def builtin_witness(
    case_name: str, f: Union[str, InvariantExpr], field: FieldDescriptor = RATIONALS, d: Optional[int] = None
) -> WitnessPair:
    """
    The witness pair for `f` in the standard set of `case_name`.

    Witness tables are stored in local generator indices: the generators used by `f` are relabelled 1, 2, ... and
    the stored matrices are placed in their slots, every other slot holding the zero matrix.
    """
    check_characteristic(case_name, field)
    inv_set = standard_set(case_name, d, field.characteristic)
    expr = parse_expr(f) if isinstance(f, str) else f
    if expr not in inv_set:
        raise WitnessNotFoundError(f"{expr.text(inv_set.n)} is not a member of {case_name} (d={inv_set.d}).")
    member = inv_set.exprs[inv_set.index_of(expr)]
    generators = member.word.generators()
    local = InvariantExpr(member.t, member.word.relabel({g: r + 1 for r, g in enumerate(generators)}))
    local = local.resolved(inv_set.n)
    table = load_witness_table(case_name)
    for entry in table["entries"]:
        if parse_expr(entry["separator"]).resolved(inv_set.n) != local:
            continue
        u_local, v_local = _entry_tuples(table, entry, field)
        if len(u_local) != len(generators):
            raise WitnessNotFoundError(f"Witness {entry['separator']} of {case_name} has the wrong number of slots.")
        u = [zero_matrix(inv_set.n, field, inv_set.kind) for _ in range(inv_set.d)]
        v = list(u)
        for slot, generator in enumerate(generators):
            u[generator - 1] = u_local[slot]
            v[generator - 1] = v_local[slot]
        return WitnessPair(MatrixTuple(field, tuple(u)), MatrixTuple(field, tuple(v)), member, case_name)
    raise WitnessNotFoundError(f"No built-in witness for {member.text(inv_set.n)} in case {case_name}.")


@dataclass
class MinimalityEntry:
    f: str
    d: int
    status: str
    values_u: List[str]
    values_v: List[str]
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        return {
            "f": self.f,
            "d": self.d,
            "pass": self.passed,
            "status": self.status,
            "values_u": self.values_u,
            "values_v": self.values_v,
            "reason": self.reason,
        }


@dataclass
class MinimalityReport:
    case: str
    field: str
    entries: List[MinimalityEntry] = dataclasses.field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "field": self.field,
            "pass": self.passed,
            "entries": [entry.to_dict() for entry in self.entries],
        }


def _check_pair(inv_set: InvariantSet, pair: WitnessPair, field: FieldDescriptor) -> MinimalityEntry:
    position = inv_set.index_of(pair.separator)
    values_u = _values(inv_set, pair.u)
    values_v = _values(inv_set, pair.v)
    disagreements = [inv_set.text(e) for k, e in enumerate(inv_set) if k != position and values_u[k] != values_v[k]]
    separator_differs = values_u[position] != values_v[position]
    name = inv_set.text(pair.separator)
    if disagreements:
        status, reason = "fail", f"also separated by {', '.join(disagreements)}"
    elif separator_differs:
        status, reason = "pass", ""
    elif field.characteristic > 0:
        status, reason = "flagged", f"separator values collide in characteristic {field.characteristic}"
        LOGGER.warning(f"Witness for {name} in {inv_set.case_name} is characteristic-dependent over {field.name}.")
    else:
        status, reason = "fail", "separator does not separate"
    return MinimalityEntry(
        name, inv_set.d, status, [str(x) for x in values_u], [str(x) for x in values_v], reason
    )


def verify_minimality(
    case_name: str, field: FieldDescriptor = RATIONALS, d: Optional[int] = None, show_progress: bool = False
) -> MinimalityReport:
    """
    Checks, for every member f of the standard set, that the built-in pair agrees on the set without f and differs
    on f. Without an explicit `d`, `o3-skew` is checked at d=2 and d=3, which covers every d.
    """
    check_characteristic(case_name, field)
    if case_name == "o3-skew" and d is None:
        dimensions = (2, 3)
    else:
        dimensions = (resolve_d(case_name, d),)
    report = MinimalityReport(case_name, field.name)
    for dim in dimensions:
        inv_set = standard_set(case_name, dim, field.characteristic)
        for expr in tqdm.tqdm(inv_set.exprs, desc=f"{case_name} d={dim}", disable=not show_progress):
            pair = builtin_witness(case_name, expr, field, dim)
            report.entries.append(_check_pair(inv_set, pair, field))
    LOGGER.info(
        f"{case_name} over {field.name}: {sum(e.passed for e in report.entries)}/{len(report.entries)} witnesses pass."
    )
    return report


def _random_tuple(inv_set, field, rng, entries) -> List[ConcreteMatrix]:
    return [random_concrete(inv_set.kind, inv_set.n, field, rng, entries) for _ in range(inv_set.d)]


def search_witness(
    inv_set: InvariantSet,
    f: Union[str, InvariantExpr],
    budget: int = 100000,
    seed: int = 2016,
    entries: Sequence[int] = (-2, -1, 0, 1, 2),
    strategy: str = "resample",
    field: FieldDescriptor = RATIONALS,
    show_progress: bool = False,
) -> Optional[WitnessPair]:
    """
    Random search for a pair agreeing on `inv_set` without `f` and differing on `f`.

    With `strategy="resample"` the second tuple copies the first one and redraws only the matrices occurring in `f`;
    with `strategy="independent"` both tuples are drawn from scratch. Entries are uniform in `entries`.
    """
    if strategy not in ("resample", "independent"):
        raise ValueError(f"Unknown search strategy {strategy!r}, expected resample or independent.")
    if budget < 0:
        raise ValueError(f"Provided budget should be >= 0 (got: {budget}).")
    position = inv_set.index_of(f)
    target = inv_set.exprs[position]
    others = [e for k, e in enumerate(inv_set.exprs) if k != position]
    touched = [g - 1 for g in target.word.generators()]
    rng = np.random.default_rng(seed)
    for attempt in tqdm.tqdm(range(budget), desc="witness search", disable=not show_progress):
        u = _random_tuple(inv_set, field, rng, entries)
        if strategy == "resample":
            v = list(u)
            for slot in touched:
                v[slot] = random_concrete(inv_set.kind, inv_set.n, field, rng, entries)
        else:
            v = _random_tuple(inv_set, field, rng, entries)
        if evaluate(target, u) == evaluate(target, v):
            continue
        if all(evaluate(e, u) == evaluate(e, v) for e in others):
            LOGGER.info(f"Found a witness for {inv_set.text(target)} after {attempt + 1} attempts.")
            return WitnessPair(MatrixTuple(field, tuple(u)), MatrixTuple(field, tuple(v)), target, inv_set.case_name)
    LOGGER.info(f"No witness for {inv_set.text(target)} within {budget} attempts.")
    return None


def transport(pair: WitnessPair, g: ConcreteMatrix, g_inverse: Optional[ConcreteMatrix] = None) -> WitnessPair:
    """
    Conjugates both tuples by `g`. Without `g_inverse`, `g` should be orthogonal and its transpose is used.
    """
    if g_inverse is None:
        g_inverse = g.transpose()
    if not (g @ g_inverse) == identity_matrix(g.n, g.field):
        raise ValueError("The conjugating matrix is not inverted by the provided (or transposed) matrix.")

    def move(point: MatrixTuple) -> MatrixTuple:
        return MatrixTuple(point.field, tuple(conjugate(a, g, g_inverse) for a in point))

    return WitnessPair(move(pair.u), move(pair.v), pair.separator, pair.case_name)


def value_table(inv_set: InvariantSet, point: MatrixTuple) -> Dict[str, str]:
    return {inv_set.text(e): str(v) for e, v in zip(inv_set, _values(inv_set, point))}
