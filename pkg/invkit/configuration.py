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

import dataclasses
import json
import logging
import os
from dataclasses import asdict, dataclass, fields
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

from .scalars import FieldDescriptor, parse_field
from .utils import CONFIG_NAME, resolve_resource_cap
from .version import __version__


LOGGER = logging.getLogger(__name__)


@dataclass
class DecompositionConfig:
    """
    DecompositionConfig handles the parameters of the graded span solver used to decide decomposability.

    Args:
        max_degree (`int`, defaults to 8):
            Largest degree of the invariants put in the pool.
        resource_cap (`Optional[int]`, defaults to `None`):
            Largest monomial count of a component whose certificate is expanded. `None` reads `INVKIT_RESOURCE_CAP`
            and falls back to 200000.
        certify (`bool`, defaults to `True`):
            Whether a decomposable verdict is re-expanded symbolically and compared with the target.
        exact (`bool`, defaults to `True`):
            Whether indecomposable verdicts, and decomposable ones whose coefficients do not lift, are settled by exact
            elimination on the expanded products. Components above the resource cap stay probabilistic.
        seed (`int`, defaults to 2016):
            Seed of the evaluation points.
        initial_points (`int`, defaults to 96):
            Number of evaluation points of the first attempt.
        max_points (`int`, defaults to 4096):
            The number of points doubles while some component saturates, up to this bound.
        margin (`int`, defaults to 8):
            A component saturates when its rank exceeds the number of points minus this margin.
        show_progress (`bool`, defaults to `False`):
            Whether to display tqdm progress bars.
    """

    max_degree: int = 8
    resource_cap: Optional[int] = None
    certify: bool = True
    exact: bool = True
    seed: int = 2016
    initial_points: int = 96
    max_points: int = 4096
    margin: int = 8
    show_progress: bool = False

    def __post_init__(self):
        if self.max_degree < 1:
            raise ValueError(f"Provided max_degree should be >= 1 (got: {self.max_degree}).")
        if self.initial_points <= self.margin:
            raise ValueError(
                f"Provided initial_points should exceed the margin {self.margin} (got: {self.initial_points})."
            )
        if self.max_points < self.initial_points:
            raise ValueError(
                f"Provided max_points should be >= initial_points (got: {self.max_points} < {self.initial_points})."
            )

    @property
    def cap(self) -> int:
        return resolve_resource_cap(self.resource_cap)


@dataclass
class LemmaScheduleConfig:
    """
    The finite schedule of words instantiating the universally quantified parts of the decomposition lemma.

    Args:
        max_word_length (`int`, defaults to 2):
            Longest word used for x and y.
        max_tail_length (`int`, defaults to 2):
            Longest word used for the tail q (which is never empty).
        max_degree (`int`, defaults to 8):
            Largest degree of an instance.
        generators (`int`, defaults to 3):
            Letters are taken among Y_1, ..., Y_generators.
    """

    max_word_length: int = 2
    max_tail_length: int = 2
    max_degree: int = 8
    generators: int = 3


@dataclass
class WitnessSearchConfig:
    """
    WitnessSearchConfig handles the random search of witness pairs.

    Args:
        budget (`int`, defaults to 100000):
            Number of sampled pairs.
        seed (`int`, defaults to 2016):
            Seed of `numpy.random.default_rng`.
        entries (`Sequence[int]`, defaults to `(-2, -1, 0, 1, 2)`):
            Matrix entries are drawn uniformly from these values.
        strategy (`str`, defaults to `"resample"`):
            `resample` redraws only the matrices occurring in the separator for the second tuple,
            `independent` draws both tuples from scratch.
    """

    budget: int = 100000
    seed: int = 2016
    entries: Tuple[int, ...] = (-2, -1, 0, 1, 2)
    strategy: str = "resample"

    def __post_init__(self):
        self.entries = tuple(self.entries)
        if self.budget < 0:
            raise ValueError(f"Provided budget should be >= 0 (got: {self.budget}).")
        if self.strategy not in ("resample", "independent"):
            raise ValueError(f"Unknown search strategy {self.strategy!r}, expected resample or independent.")


@dataclass
class VerificationConfig:
    """
    VerificationConfig gathers everything a verification run needs.

    Args:
        field (`str`, defaults to `"Q"`):
            The coefficient field, in the `Q | F<p> | QiS2 | F<p>iS2[:i,s]` syntax.
        primes (`Sequence[int]`, defaults to `(3, 5, 7)`):
            Primes over which witness tables are additionally checked.
        decomposition (`DecompositionConfig`):
            Span solver parameters.
        lemma_schedule (`LemmaScheduleConfig`):
            Word schedule of the universally quantified lemma parts.
        search (`WitnessSearchConfig`):
            Witness search parameters.
    """

    field: str = "Q"
    primes: Tuple[int, ...] = (3, 5, 7)
    decomposition: DecompositionConfig = dataclasses.field(default_factory=DecompositionConfig)
    lemma_schedule: LemmaScheduleConfig = dataclasses.field(default_factory=LemmaScheduleConfig)
    search: WitnessSearchConfig = dataclasses.field(default_factory=WitnessSearchConfig)

    def __post_init__(self):
        self.primes = tuple(self.primes)
        if isinstance(self.decomposition, dict):
            self.decomposition = DecompositionConfig(**self.decomposition)
        if isinstance(self.lemma_schedule, dict):
            self.lemma_schedule = LemmaScheduleConfig(**self.lemma_schedule)
        if isinstance(self.search, dict):
            self.search = WitnessSearchConfig(**self.search)

    def field_descriptor(self) -> FieldDescriptor:
        return parse_field(self.field)


class AutoVerificationConfig:
    @staticmethod
    def create_verification_config(
        field: str = "Q",
        primes: Sequence[int] = (3, 5, 7),
        max_word_length: int = 2,
        max_tail_length: int = 2,
        budget: int = 100000,
        show_progress: bool = False,
    ) -> VerificationConfig:
        return VerificationConfig(
            field=field,
            primes=tuple(primes),
            decomposition=DecompositionConfig(show_progress=show_progress),
            lemma_schedule=LemmaScheduleConfig(max_word_length=max_word_length, max_tail_length=max_tail_length),
            search=WitnessSearchConfig(budget=budget),
        )

    @staticmethod
    def default(field: str = "Q") -> VerificationConfig:
        """
        Args:
            field (`str`):
                The coefficient field.

        Returns:
            The verification configuration with the default schedule.
        """
        return AutoVerificationConfig.create_verification_config(field)

    @staticmethod
    def fast(field: str = "Q") -> VerificationConfig:
        """
        Args:
            field (`str`):
                The coefficient field.

        Returns:
            A configuration with one-letter lemma words, one prime and a small search budget, for smoke runs.
        """
        return AutoVerificationConfig.create_verification_config(
            field, primes=(5,), max_word_length=1, max_tail_length=1, budget=2000
        )

    @staticmethod
    def full_suite(field: str = "Q") -> VerificationConfig:
        """
        Args:
            field (`str`):
                The coefficient field.

        Returns:
            The configuration of the complete verification suite, with progress bars.
        """
        return AutoVerificationConfig.create_verification_config(field, show_progress=True)


class InvkitConfig:
    CONFIG_NAME = CONFIG_NAME
    FULL_CONFIGURATION_FILE = CONFIG_NAME

    def __init__(self, verification: Optional[Union[VerificationConfig, dict]] = None, **kwargs):
        self.verification = self.dataclass_to_dict(verification or VerificationConfig())
        self.invkit_version = kwargs.pop("invkit_version", __version__)

    @staticmethod
    def dataclass_to_dict(config) -> dict:
        new_config = {}
        if config is None:
            return new_config
        if isinstance(config, dict):
            return config
        for k, v in asdict(config).items():
            if isinstance(v, Enum):
                v = v.name
            elif isinstance(v, (list, tuple)):
                v = [elem.name if isinstance(elem, Enum) else elem for elem in v]
            new_config[k] = v
        return new_config

    def verification_config(self) -> VerificationConfig:
        known = {f.name for f in fields(VerificationConfig)}
        unknown = set(self.verification) - known
        if unknown:
            raise ValueError(f"Unknown verification options {sorted(unknown)} in {self.CONFIG_NAME}.")
        return VerificationConfig(**self.verification)

    def to_dict(self) -> dict:
        return {"verification": self.verification, "invkit_version": self.invkit_version}

    def save_pretrained(self, save_directory: Union[str, Path]):
        if os.path.isfile(save_directory):
            raise ValueError(f"Provided path ({save_directory}) should be a directory, not a file.")
        os.makedirs(save_directory, exist_ok=True)
        path = Path(save_directory) / self.CONFIG_NAME
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        LOGGER.info(f"Configuration saved in {path}")

    @classmethod
    def from_pretrained(cls, config_path: Union[str, Path]) -> "InvkitConfig":
        """Loads a configuration from a directory holding `invkit_config.json` or from a JSON file path."""
        path = Path(config_path)
        if path.is_dir():
            path = path / cls.CONFIG_NAME
        if not path.is_file():
            raise FileNotFoundError(f"Could not find a configuration file at {path}")
        with open(path) as f:
            obj = json.load(f)
        return cls(**obj)
