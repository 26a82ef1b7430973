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
The verification items behind `invkit-cli verify`: witness tables, the decomposition lemma, the reduction to the
generating set of three symmetric 3x3 matrices and the indecomposability of its members.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Type

from .decomp import (
    LEMMA_PARTS,
    DecompositionReport,
    SpanEngine,
    build_pool,
    verify_generating_set,
    verify_lemma_dec,
    verify_reduction,
)
from .nilpotent import NILPOTENT_ARGUMENTS, derive_ansatz, verify_indecomposability_argument
from .polyring import MatrixKind
from .scalars import EXTENSION, FieldDescriptor, PrimeField, PrimeFieldWithRoots
from .septest import check_characteristic, verify_minimality
from .verification_base import InvariantVerifier, VerificationResult


LOGGER = logging.getLogger(__name__)

WITNESS_CASES = ("gl2", "gl3-d2", "o3-skew", "o4-skew-d2", "o3-sym-d2")


def _select(value: Optional[str], choices: Sequence[str], what: str) -> Sequence[str]:
    if value is None or value == "all":
        return tuple(choices)
    if value not in choices:
        raise ValueError(f"Unknown {what} {value!r}, expected one of {', '.join(choices)} or all.")
    return (value,)


class TheoremVerifier(InvariantVerifier):
    """Minimality of the separating sets: every built-in witness pair, over the field and optionally mod p."""

    name = "theorem"

    def verify(self, case: Optional[str] = None, with_primes: bool = False, **kwargs) -> VerificationResult:
        result = self.new_result()
        fields = [self.field]
        if with_primes:
            fields += [PrimeField(p) for p in self.config.primes if p != self.field.characteristic]
        for case_name in _select(case, WITNESS_CASES, "case"):
            for field in fields:
                check_characteristic(case_name, field)
                result.add(verify_minimality(case_name, field, show_progress=self.config.decomposition.show_progress))
        return result


class LemmaVerifier(InvariantVerifier):
    name = "lemma"

    def verify(self, part: Optional[str] = None, **kwargs) -> VerificationResult:
        result = self.new_result()
        for name in _select(part, LEMMA_PARTS, "lemma part"):
            result.add(verify_lemma_dec(name, self.field, self.config.lemma_schedule, self.config.decomposition))
        return result


@dataclass
class SpanVerdict:
    """`is_decomposable` on one generator, compared with the expected verdict in the characteristic at hand."""

    target: str
    expected_decomposable: bool
    report: DecompositionReport
    conclusive: bool = True

    @property
    def passed(self) -> bool:
        return self.conclusive and self.report.decomposable == self.expected_decomposable

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "expected_decomposable": self.expected_decomposable,
            "pass": self.passed,
            "conclusive": self.conclusive,
            "decomposition": self.report.to_dict(),
        }


def argument_field(field: FieldDescriptor) -> FieldDescriptor:
    """A field holding i and sqrt(2) of the same characteristic as `field`, or QiS2 when none is available."""
    if field.contains_roots:
        return field
    p = field.characteristic
    if p > 0 and p % 8 == 1:
        return PrimeFieldWithRoots(p)
    return EXTENSION


class IndecomposabilityVerifier(InvariantVerifier):
    """
    For f1 = tr(Y1 Y2 Y3), f2 = tr(Y1^2 Y2 Y3), f3 = tr(Y1^2 Y2^2 Y3) and f4 = tr(Y1^2 Y2^2 Y3^2): the span verdict
    over the field, and the substitution argument with nilpotent test matrices. f4 is decomposable unless the
    characteristic is 3.
    """

    name = "indecomposable"

    def verify(self, target: Optional[str] = None, **kwargs) -> VerificationResult:
        result = self.new_result()
        targets = _select(target, tuple(NILPOTENT_ARGUMENTS), "target")
        pool = build_pool(MatrixKind.SYMMETRIC, 3, 3, self.field, 5, deduplicate=True)
        engine = SpanEngine(pool, self.config.decomposition)
        roots_field = argument_field(self.field)
        if roots_field.characteristic != self.field.characteristic:
            LOGGER.warning(
                f"{self.field.name} has no square roots of -1 and 2; the substitution arguments run over "
                f"{roots_field.name}."
            )
        for name in targets:
            argument = NILPOTENT_ARGUMENTS[name]
            expected = name == "f4" and self.field.characteristic != 3
            verdict = engine.decide(argument.expression)
            conclusive = verdict.conclusive(engine.config.certify, engine.config.exact)
            result.add(SpanVerdict(argument.expression, expected, verdict, conclusive))
            result.add(verify_indecomposability_argument(name, roots_field))
        return result


class ReductionVerifier(InvariantVerifier):
    name = "reduction"

    def verify(self, **kwargs) -> VerificationResult:
        result = self.new_result()
        result.add(verify_reduction(self.field, self.config.decomposition))
        return result


class AnsatzVerifier(InvariantVerifier):
    """Products of invariants at the multidegree of each target, against the ansatz of its argument."""

    name = "ansatz"

    def verify(self, target: Optional[str] = None, **kwargs) -> VerificationResult:
        result = self.new_result()
        for name in _select(target, tuple(NILPOTENT_ARGUMENTS), "target"):
            result.add(derive_ansatz(name))
        return result


class GeneratingSetVerifier(InvariantVerifier):
    name = "generating-set"

    def verify(self, **kwargs) -> VerificationResult:
        result = self.new_result()
        result.add(verify_generating_set(self.field, self.config.decomposition))
        return result


class SuiteVerifier(InvariantVerifier):
    """Every verification item in turn, over one field."""

    name = "all"

    def verify(self, **kwargs) -> VerificationResult:
        result = self.new_result()
        for name, verifier_class in VERIFIERS.items():
            if verifier_class is SuiteVerifier:
                continue
            LOGGER.info(f"Running verification item {name} over {self.field.name}.")
            item = verifier_class(self.config, self.field).verify()
            result.extend(item)
            LOGGER.info(f"Verification item {name}: {'pass' if item.passed else 'FAIL'}.")
        return result


VERIFIERS: Dict[str, Type[InvariantVerifier]] = {
    TheoremVerifier.name: TheoremVerifier,
    LemmaVerifier.name: LemmaVerifier,
    ReductionVerifier.name: ReductionVerifier,
    GeneratingSetVerifier.name: GeneratingSetVerifier,
    IndecomposabilityVerifier.name: IndecomposabilityVerifier,
    AnsatzVerifier.name: AnsatzVerifier,
    SuiteVerifier.name: SuiteVerifier,
}
