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
Symmetric nilpotent test matrices and the substitution arguments showing that the generators of the invariants of
three 3x3 symmetric matrices are indecomposable.

Every argument assumes an identity `target = ansatz` with unknown coefficients, evaluates both sides on tuples of
nilpotent matrices in a fixed order and eliminates one unknown per substitution. A substitution whose pivot
vanishes in the chosen field is reported as degenerate.
"""

import dataclasses
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import primefactors

from .decomp import build_pool, pool_multisets
from .genmat import ConcreteMatrix, sym6
from .invlang import InvariantExpr, canonical_word, evaluate, parse_expr
from .polyring import MatrixKind, MultiDegree
from .scalars import RATIONALS, FieldDescriptor, QAdjoinISqrt2, Scalar, embed_special
from .utils import CharacteristicError, multidegree_str


__all__ = [
    "NilpotentTestSuite",
    "nilpotent_test_matrices",
    "check_layout",
    "AffineForm",
    "AffineSolver",
    "AnsatzTerm",
    "IndecomposabilityArgument",
    "NILPOTENT_ARGUMENTS",
    "verify_indecomposability_argument",
    "AnsatzReport",
    "derive_ansatz",
]

LOGGER = logging.getLogger(__name__)

SUITE_NAMES = ("R1", "R2", "R3", "T1", "T2", "T3")


@dataclass(frozen=True)
class NilpotentTestSuite:
    """
    Six symmetric nilpotent 3x3 matrices over a field containing i and sqrt(2).

    The R matrices satisfy R^3 = 0 and the T matrices T^2 = 0. The constructor checks both, together with the
    vanishing of every sigma_t of each matrix.
    """

    field: FieldDescriptor
    R1: ConcreteMatrix
    R2: ConcreteMatrix
    R3: ConcreteMatrix
    T1: ConcreteMatrix
    T2: ConcreteMatrix
    T3: ConcreteMatrix

    def __post_init__(self):
        for name in SUITE_NAMES:
            matrix = self[name]
            if matrix.n != 3 or matrix.field != self.field:
                raise ValueError(f"{name} should be a 3x3 matrix over {self.field.name}.")
            if matrix != matrix.transpose():
                raise ValueError(f"{name} is not symmetric.")
            if not matrix.power(2 if name.startswith("T") else 3).is_zero():
                power = "square" if name.startswith("T") else "cube"
                raise ValueError(f"The {power} of {name} is not zero.")
            for t in range(1, 4):
                if not matrix.sigma(t).is_zero():
                    raise ValueError(f"sigma_{t}({name}) = {matrix.sigma(t)} should vanish for a nilpotent matrix.")

    def __getitem__(self, name: str) -> ConcreteMatrix:
        if name not in SUITE_NAMES:
            raise KeyError(f"Unknown test matrix {name!r}, expected one of {', '.join(SUITE_NAMES)}.")
        return getattr(self, name)

    def tuple_of(self, names: Sequence[str]) -> List[ConcreteMatrix]:
        return [self[name] for name in names]

    def to_json(self) -> dict:
        return {"field": self.field.name, **{name: self[name].to_json() for name in SUITE_NAMES}}


def check_layout(suite: NilpotentTestSuite):
    """
    Six-parameter symmetric matrices are laid out as [[a, b, c], [b, d, e], [c, e, f]]; with this layout the T
    matrices square to zero and tr(T1 T2 T3) = 2.
    """
    value = evaluate("tr(1 2 3)", suite.tuple_of(("T1", "T2", "T3")))
    if value != 2:
        raise ValueError(f"tr(T1 T2 T3) should be 2 with the [[a, b, c], [b, d, e], [c, e, f]] layout (got: {value}).")


def nilpotent_test_matrices(field: FieldDescriptor) -> NilpotentTestSuite:
    if not field.contains_roots:
        raise CharacteristicError(
            f"{field.name} does not contain i and sqrt(2); use QiS2 or F<p>iS2 with p = 1 mod 8."
        )
    i = embed_special("i", field)
    s2 = embed_special("sqrt2", field)
    suite = NilpotentTestSuite(
        field=field,
        R1=sym6(0, 1, 0, 0, i, 0, field),
        R2=sym6(1, 1, 0, -3, 2 * i * s2, 2, field),
        R3=sym6(0, -1, 0, 0, i, 0, field),
        T1=sym6(1, i, 0, -1, 0, 0, field),
        T2=sym6(1, -i, 0, -1, 0, 0, field),
        T3=sym6(1, 0, i, 0, 0, -1, field),
    )
    check_layout(suite)
    return suite


class AffineForm:
    """`constant + sum(coefficients[u] * u)` over a field, for named unknowns u."""

    def __init__(self, field: FieldDescriptor, coefficients: Optional[Dict[str, Scalar]] = None, constant=0):
        self.field = field
        self.coefficients = {u: field(c) for u, c in (coefficients or {}).items() if not field(c).is_zero()}
        self.constant = field(constant)

    @classmethod
    def variable(cls, field: FieldDescriptor, name: str) -> "AffineForm":
        return cls(field, {name: 1})

    def coefficient(self, name: str) -> Scalar:
        return self.coefficients.get(name, self.field(0))

    @property
    def unknowns(self) -> List[str]:
        return sorted(self.coefficients)

    def is_constant(self) -> bool:
        return not self.coefficients

    def __add__(self, other: "AffineForm") -> "AffineForm":
        coefficients = dict(self.coefficients)
        for name, c in other.coefficients.items():
            coefficients[name] = coefficients.get(name, self.field(0)) + c
        return AffineForm(self.field, coefficients, self.constant + other.constant)

    def scale(self, value) -> "AffineForm":
        value = self.field(value)
        return AffineForm(self.field, {u: c * value for u, c in self.coefficients.items()}, self.constant * value)

    def without(self, name: str) -> "AffineForm":
        return AffineForm(self.field, {u: c for u, c in self.coefficients.items() if u != name}, self.constant)

    def substitute(self, name: str, form: "AffineForm") -> "AffineForm":
        c = self.coefficient(name)
        if c.is_zero():
            return self
        return self.without(name) + form.scale(c)

    def text(self) -> str:
        parts = []
        for name in self.unknowns:
            c = str(self.coefficients[name])
            if c in ("1", "-1"):
                parts.append(name if c == "1" else f"-{name}")
            else:
                parts.append(f"({c})*{name}" if " " in c else f"{c}*{name}")
        if not self.constant.is_zero() or not parts:
            parts.append(str(self.constant))
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self):
        return self.text()


class AffineSolver:
    """
    Solves a linear system one designated unknown at a time. Solved unknowns are kept as affine forms in the
    unknowns that are still free, and every later equation is rewritten through them.
    """

    def __init__(self, field: FieldDescriptor, unknowns: Sequence[str]):
        self.field = field
        self.unknowns = tuple(unknowns)
        self.solutions: Dict[str, AffineForm] = {}

    def form_of(self, name: str) -> AffineForm:
        if name not in self.unknowns:
            raise KeyError(f"Unknown {name!r} is not part of the system ({', '.join(self.unknowns)}).")
        return self.solutions.get(name) or AffineForm.variable(self.field, name)

    def equation(self, value: Scalar, coefficients: Dict[str, Scalar]) -> AffineForm:
        """The form `value - sum(coefficients[u] * u)`, which the system asserts to be zero."""
        form = AffineForm(self.field, constant=value)
        for name, c in coefficients.items():
            form = form + self.form_of(name).scale(-self.field(c))
        return form

    def solve(self, form: AffineForm, name: str) -> Optional[AffineForm]:
        """Solves `form = 0` for `name`; returns None when the pivot vanishes."""
        if name in self.solutions:
            raise ValueError(f"{name} is already solved as {self.solutions[name]}.")
        pivot = form.coefficient(name)
        if pivot.is_zero():
            return None
        solution = form.without(name).scale(-pivot.inverse())
        self.solutions = {u: f.substitute(name, solution) for u, f in self.solutions.items()}
        self.solutions[name] = solution
        return solution


@dataclass(frozen=True)
class AnsatzTerm:
    unknown: str
    factors: Tuple[str, ...]

    def text(self) -> str:
        return " * ".join(self.factors)


@dataclass(frozen=True)
class IndecomposabilityArgument:
    """
    An assumed identity `expression = sum(unknown * product of factors)` and the substitutions refuting it.

    Each schedule entry names the three test matrices substituted for (A1, A2, A3) and the unknown solved from the
    resulting equation, or None for the final check. `expected_residual` gives the value the final check should
    be proportional to, as a function of i and sqrt(2).
    """

    name: str
    expression: str
    ansatz: Tuple[AnsatzTerm, ...]
    schedule: Tuple[Tuple[Tuple[str, str, str], Optional[str]], ...]
    expected_residual: Optional[str] = None

    @property
    def unknowns(self) -> List[str]:
        return [term.unknown for term in self.ansatz]


def _term(unknown: str, *factors: str) -> AnsatzTerm:
    return AnsatzTerm(unknown, factors)


NILPOTENT_ARGUMENTS: Dict[str, IndecomposabilityArgument] = {
    "f1": IndecomposabilityArgument(
        name="f1",
        expression="tr(1 2 3)",
        ansatz=(),
        schedule=((("T1", "T2", "T3"), None),),
        expected_residual="2",
    ),
    "f2": IndecomposabilityArgument(
        name="f2",
        expression="tr(1 1 2 3)",
        ansatz=(_term("alpha", "tr(1 2)", "tr(1 3)"),),
        schedule=((("T1", "T2", "T3"), "alpha"), (("R1", "R2", "T1"), None)),
        expected_residual="1 + (1 - 2*sqrt2)*i",
    ),
    "f3": IndecomposabilityArgument(
        name="f3",
        expression="tr(1 1 2 2 3)",
        ansatz=(
            _term("alpha", "tr(1 2)", "tr(1 2 3)"),
            _term("beta", "tr(1 3)", "tr(1 2 2)"),
            _term("gamma", "tr(2 3)", "tr(1 1 2)"),
        ),
        schedule=(
            (("T1", "T2", "T3"), "alpha"),
            (("T1", "R1", "T2"), "beta"),
            (("R1", "T1", "T2"), "gamma"),
            (("R1", "R2", "T1"), None),
        ),
        expected_residual="2*(i - 1)*(sqrt2 - 1)",
    ),
    "f4": IndecomposabilityArgument(
        name="f4",
        expression="tr(1 1 2 2 3 3)",
        ansatz=(
            _term("alpha1", "tr(1 1 2 3)", "tr(2 3)"),
            _term("alpha2", "tr(2 2 1 3)", "tr(1 3)"),
            _term("alpha3", "tr(3 3 1 2)", "tr(1 2)"),
            _term("beta1", "tr(1 1 3)", "tr(2 2 3)"),
            _term("beta2", "tr(1 1 2)", "tr(3 3 2)"),
            _term("beta3", "tr(2 2 1)", "tr(3 3 1)"),
            _term("gamma", "tr(1 2 3)", "tr(1 2 3)"),
            _term("delta", "tr(1 2)", "tr(1 3)", "tr(2 3)"),
        ),
        schedule=(
            (("T1", "T2", "T3"), "delta"),
            (("R1", "T1", "T2"), "alpha1"),
            (("T1", "R1", "T2"), "alpha2"),
            (("T1", "T2", "R1"), "alpha3"),
            (("R1", "R2", "T1"), "beta1"),
            (("R1", "T1", "R2"), "beta2"),
            (("T1", "R1", "R2"), "beta3"),
            (("R1", "R2", "R3"), None),
        ),
    ),
}

_RESIDUALS = {
    "2": lambda i, s2: 2 + 0 * i,
    "1 + (1 - 2*sqrt2)*i": lambda i, s2: 1 + (1 - 2 * s2) * i,
    "2*(i - 1)*(sqrt2 - 1)": lambda i, s2: 2 * (i - 1) * (s2 - 1),
}


@dataclass
class StepRecord:
    substitution: Tuple[str, str, str]
    solve_for: Optional[str]
    equation: str
    solution: Optional[str] = None
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "substitution": list(self.substitution),
            "solve_for": self.solve_for,
            "equation": self.equation,
            "solution": self.solution,
            "degenerate": self.degenerate,
        }


@dataclass
class IndecomposabilityArgumentReport:
    """
    Outcome of one substitution argument. `forms` maps each solved unknown to its affine form and `residual_value`
    is the constant left by a final check whose equation has no free unknown.
    """

    target: str
    expression: str
    field: str
    steps: List[StepRecord] = dataclasses.field(default_factory=list)
    residual: Optional[str] = None
    expected_residual: Optional[str] = None
    residual_ratio: Optional[str] = None
    final_equation: Optional[str] = None
    final_solution: Optional[str] = None
    contradiction_characteristics: List[int] = dataclasses.field(default_factory=list)
    verdict: str = ""
    passed: bool = False
    forms: Dict[str, AffineForm] = dataclasses.field(default_factory=dict, repr=False)
    residual_value: Optional[Scalar] = dataclasses.field(default=None, repr=False)

    @property
    def degenerate(self) -> bool:
        return any(step.degenerate for step in self.steps)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "expression": self.expression,
            "field": self.field,
            "steps": [step.to_dict() for step in self.steps],
            "solutions": {name: form.text() for name, form in sorted(self.forms.items())},
            "residual": self.residual,
            "expected_residual": self.expected_residual,
            "residual_ratio": self.residual_ratio,
            "final_equation": self.final_equation,
            "final_solution": self.final_solution,
            "contradiction_characteristics": self.contradiction_characteristics,
            "verdict": self.verdict,
            "pass": self.passed,
        }


def _step_equation(
    argument: IndecomposabilityArgument,
    solver: AffineSolver,
    suite: NilpotentTestSuite,
    substitution: Tuple[str, str, str],
) -> AffineForm:
    matrices = suite.tuple_of(substitution)
    value = evaluate(argument.expression, matrices)
    coefficients = {}
    for term in argument.ansatz:
        product = suite.field(1)
        for factor in term.factors:
            product = product * evaluate(factor, matrices)
        coefficients[term.unknown] = product
    return solver.equation(value, coefficients)


def _rational_value(field: FieldDescriptor, value: Scalar) -> Optional[Fraction]:
    if isinstance(field, QAdjoinISqrt2):
        return field.rational_part(value.raw)
    return None


def _finish_residual(report: IndecomposabilityArgumentReport, argument, field, residual: Scalar):
    report.residual_value = residual
    report.residual = str(residual)
    if residual.is_zero():
        report.verdict = "not refuted: the final substitution is consistent"
        return
    report.verdict = f"{argument.expression} = ansatz refuted: the final substitution leaves {residual} = 0"
    report.passed = True
    if argument.expected_residual is None:
        return
    i, s2 = embed_special("i", field), embed_special("sqrt2", field)
    expected = _RESIDUALS[argument.expected_residual](i, s2)
    report.expected_residual = argument.expected_residual
    ratio = residual / expected
    report.residual_ratio = str(ratio)
    if isinstance(field, QAdjoinISqrt2) and _rational_value(field, ratio) is None:
        report.passed = False
        report.verdict += f", which is not a rational multiple of {argument.expected_residual}"


def _finish_equation(report: IndecomposabilityArgumentReport, field, form: AffineForm):
    """`c * u + e = 0` in one free unknown u."""
    (name,) = form.unknowns
    c, e = form.coefficient(name), form.constant
    report.final_equation = f"{form.text()} = 0"
    if e.is_zero():
        report.final_solution = f"{name} = 0"
        report.verdict = f"consistent with {name} = 0"
        return
    value = -e / c
    report.final_solution = f"{name} = {value}"
    report.passed = True
    ratio = _rational_value(field, c / e)
    if ratio is not None:
        a, b = abs(ratio.numerator), ratio.denominator
        report.final_equation = f"{a}*{name} {'+' if ratio > 0 else '-'} {b} = 0"
        report.contradiction_characteristics = [q for q in primefactors(a) if q != 2 and b % q != 0]
    if field.characteristic in report.contradiction_characteristics:
        report.verdict = f"contradiction in characteristic {field.characteristic}"
    elif report.contradiction_characteristics:
        chars = ", ".join(str(q) for q in report.contradiction_characteristics)
        report.verdict = f"consistent over {field.name} ({name} = {value}); contradictory in characteristic {chars}"
    else:
        report.verdict = f"no contradiction over {field.name}: {name} = {value}"


def verify_indecomposability_argument(target: str, field: FieldDescriptor) -> IndecomposabilityArgumentReport:
    """
    Replays the substitution argument for `target` (one of f1, f2, f3, f4) over `field`, which should contain i
    and sqrt(2).
    """
    if target not in NILPOTENT_ARGUMENTS:
        raise ValueError(f"Unknown target {target!r}, expected one of {', '.join(NILPOTENT_ARGUMENTS)}.")
    argument = NILPOTENT_ARGUMENTS[target]
    suite = nilpotent_test_matrices(field)
    solver = AffineSolver(field, argument.unknowns)
    report = IndecomposabilityArgumentReport(target, argument.expression, field.name)
    final = None
    for substitution, name in argument.schedule:
        form = _step_equation(argument, solver, suite, substitution)
        step = StepRecord(substitution, name, f"{form.text()} = 0")
        report.steps.append(step)
        if name is None:
            final = form
            continue
        solution = solver.solve(form, name)
        if solution is None:
            step.degenerate = True
            LOGGER.warning(f"{target}: the pivot of {name} vanishes under {substitution} over {field.name}.")
            continue
        step.solution = f"{name} = {solution}"
        LOGGER.debug(f"{target}: {substitution} gives {step.solution}.")
    report.forms = dict(solver.solutions)
    if report.degenerate:
        report.verdict = "degenerate elimination"
    elif final.is_constant():
        _finish_residual(report, argument, field, final.constant)
    elif len(final.unknowns) == 1:
        _finish_equation(report, field, final)
    else:
        report.final_equation = f"{final.text()} = 0"
        report.verdict = f"underdetermined in {', '.join(final.unknowns)}"
    LOGGER.info(f"{target} over {field.name}: {report.verdict}.")
    return report


@dataclass
class AnsatzReport:
    target: str
    multidegree: MultiDegree
    ansatz: List[str]
    derived: List[str]
    extras: List[str]
    missing: List[str]

    @property
    def passed(self) -> bool:
        return not self.missing

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "multidegree": multidegree_str(self.multidegree),
            "ansatz": self.ansatz,
            "derived": self.derived,
            "extras": self.extras,
            "missing": self.missing,
            "pass": self.passed,
        }


def _canonical_text(expr: InvariantExpr) -> str:
    return InvariantExpr(expr.sigma_index(3), canonical_word(expr.word, MatrixKind.SYMMETRIC)).text(3)


def derive_ansatz(target: str) -> AnsatzReport:
    """
    Lists every product of at least two invariants of three 3x3 symmetric matrices with the multidegree of
    `target`, keeping only factors that involve at least two generators (the others vanish on nilpotent tuples),
    and compares the list with the ansatz the substitution argument assumes.
    """
    if target not in NILPOTENT_ARGUMENTS:
        raise ValueError(f"Unknown target {target!r}, expected one of {', '.join(NILPOTENT_ARGUMENTS)}.")
    argument = NILPOTENT_ARGUMENTS[target]
    expr = parse_expr(argument.expression)
    s = expr.multidegree(3, 3)
    degree = sum(s)
    pool = build_pool(MatrixKind.SYMMETRIC, 3, 3, RATIONALS, max(degree - 1, 1))
    items = [
        (item.index, item.mdeg)
        for item in pool
        if item.degree < degree and sum(1 for a in item.mdeg if a) >= 2 and all(a <= b for a, b in zip(item.mdeg, s))
    ]
    derived = {}
    for key in pool_multisets(items, s, 0):
        if len(key) >= 2:
            factors = tuple(sorted(pool.text(index) for index in key))
            derived[factors] = " * ".join(factors)
    ansatz = {}
    for term in argument.ansatz:
        factors = tuple(sorted(_canonical_text(parse_expr(factor)) for factor in term.factors))
        ansatz[factors] = " * ".join(factors)
    report = AnsatzReport(
        target=target,
        multidegree=s,
        ansatz=sorted(ansatz.values()),
        derived=sorted(derived.values()),
        extras=sorted(text for key, text in derived.items() if key not in ansatz),
        missing=sorted(text for key, text in ansatz.items() if key not in derived),
    )
    LOGGER.info(
        f"{target}: {len(report.derived)} products at {multidegree_str(s)}, {len(report.ansatz)} in the ansatz, "
        f"{len(report.extras)} extra."
    )
    return report
