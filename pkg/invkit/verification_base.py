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

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

from .configuration import InvkitConfig, VerificationConfig
from .scalars import FieldDescriptor


LOGGER = logging.getLogger(__name__)


@dataclass
class VerificationResult:
    """
    Collected reports of one verification item.

    Args:
        name (`str`):
            The verification item, e.g. `lemma` or `theorem`.
        field (`str`):
            Name of the field the item ran over.
        reports (`List[dict]`):
            The serialized reports, in a fixed order.
        passed (`bool`):
            Whether every report passed.
    """

    name: str
    field: str
    reports: List[dict] = field(default_factory=list)
    passed: bool = True

    def add(self, report) -> dict:
        entry = report.to_dict()
        self.reports.append(entry)
        self.passed = self.passed and bool(report.passed)
        return entry

    def extend(self, other: "VerificationResult"):
        self.reports.append(other.to_dict())
        self.passed = self.passed and other.passed

    def to_dict(self) -> dict:
        return {"name": self.name, "field": self.field, "pass": self.passed, "reports": self.reports}


class InvariantVerifier(ABC):
    """Base class of the verification items run by `invkit-cli verify`."""

    name: str = ""

    def __init__(self, config: Optional[VerificationConfig] = None, field: Optional[FieldDescriptor] = None):
        self.config = config or VerificationConfig()
        self.field = field or self.config.field_descriptor()

    @classmethod
    def from_pretrained(cls, config_path: Union[str, Path], field: Optional[FieldDescriptor] = None):
        """Builds the verifier from a directory or a file holding an `invkit_config.json` document."""
        config = InvkitConfig.from_pretrained(config_path).verification_config()
        return cls(config, field)

    def new_result(self) -> VerificationResult:
        return VerificationResult(self.name, self.field.name)

    @abstractmethod
    def verify(self, **kwargs) -> VerificationResult:
        """Overwrite this method in subclass to define how to run the verification"""
        raise NotImplementedError("Overwrite this method in subclass to define how to run the verification")
