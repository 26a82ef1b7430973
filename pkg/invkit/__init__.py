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

from .configuration import (
    AutoVerificationConfig,
    DecompositionConfig,
    InvkitConfig,
    LemmaScheduleConfig,
    VerificationConfig,
    WitnessSearchConfig,
)
from .decomp import build_pool, brute_force_decomposable, is_decomposable, verify_lemma_dec, verify_reduction
from .genmat import ConcreteMatrix, GenericMatrix, concrete_from_rows, generic, sigma_t, sym6
from .invlang import InvariantExpr, InvariantSet, evaluate, expand, list_cases, parse_expr, standard_set
from .nilpotent import derive_ansatz, nilpotent_test_matrices, verify_indecomposability_argument
from .polyring import MatrixKind, Polynomial, PolynomialRing
from .scalars import EXTENSION, RATIONALS, PrimeField, PrimeFieldWithRoots, QAdjoinISqrt2, Scalar, parse_field
from .septest import MatrixTuple, WitnessPair, builtin_witness, search_witness, separates, verify_minimality
from .utils import (
    CharacteristicError,
    ExpressionSyntaxError,
    FieldMismatchError,
    InvkitError,
    PoolInsufficientError,
    ResourceCapError,
    WitnessNotFoundError,
)
from .verification import VERIFIERS
from .version import __version__
