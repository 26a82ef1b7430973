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
from pathlib import Path


CONFIG_NAME = "invkit_config.json"

WITNESS_DIR = Path(__file__).parent / "data" / "witnesses"
REPORT_SCHEMA = Path(__file__).parent / "data" / "report.schema.json"

RESOURCE_CAP_ENV = "INVKIT_RESOURCE_CAP"
DEFAULT_RESOURCE_CAP = 200_000

# Packed monomials keep one byte per exponent.
EXPONENT_BITS = 8
MAX_EXPONENT = (1 << EXPONENT_BITS) - 1

# Largest prime below 2**31; the evaluation field for characteristic 0.
EVALUATION_PRIME = 2147483647
EVALUATION_FIELD_MIN_SIZE = 2**31

STANDING_HYPOTHESIS = "all orthogonal-group content assumes the characteristic is different from 2"


class InvkitError(Exception):
    """Base class for every error raised by invkit."""


class FieldMismatchError(InvkitError, ValueError):
    """Operands live in different fields, rings or matrix kinds."""


class CharacteristicError(InvkitError, ValueError):
    """The characteristic (or the roots available in a field) is not admissible for a computation."""


class ExpressionSyntaxError(InvkitError, ValueError):
    """An invariant expression could not be parsed.

    Args:
        message (`str`):
            Human readable description of the problem.
        text (`str`):
            The text being parsed.
        position (`int`):
            Zero-based offset of the offending character in `text`.
    """

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


class ResourceCapError(InvkitError, RuntimeError):
    """A graded component needed by a computation is larger than the configured monomial cap."""


class PoolInsufficientError(InvkitError, ValueError):
    """The invariant pool does not cover all degrees below the target degree."""


class WitnessNotFoundError(InvkitError, KeyError):
    """No built-in witness pair exists for the requested (case, expression)."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


def resolve_resource_cap(value=None) -> int:
    """
    Returns the monomial cap for a single graded component.

    An explicit `value` wins, then the `INVKIT_RESOURCE_CAP` environment variable, then `DEFAULT_RESOURCE_CAP`.
    """
    if value is None:
        env_value = os.environ.get(RESOURCE_CAP_ENV)
        if env_value is None or env_value.strip() == "":
            return DEFAULT_RESOURCE_CAP
        try:
            value = int(env_value)
        except ValueError:
            raise ValueError(f"{RESOURCE_CAP_ENV} should be an integer (got: {env_value!r}).")
    if value < 1:
        raise ValueError(f"Provided resource cap should be >= 1 (got: {value}).")
    return value


def multidegree_str(t) -> str:
    return "(" + ",".join(str(x) for x in t) + ")"
