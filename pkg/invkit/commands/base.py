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

import json
import logging
from abc import ABC, abstractmethod
from argparse import ArgumentParser, Namespace
from functools import cached_property
from pathlib import Path
from typing import Optional

from ..configuration import InvkitConfig, VerificationConfig
from ..scalars import FieldDescriptor, parse_field
from ..septest import MatrixTuple


LOGGER = logging.getLogger(__name__)

LOG_LEVELS = ("debug", "info", "warning", "error")


def global_options() -> ArgumentParser:
    """Options accepted by every command."""
    parser = ArgumentParser(add_help=False)
    group = parser.add_argument_group("global options")
    group.add_argument("--log-level", default="warning", choices=LOG_LEVELS, help="Logging level.")
    group.add_argument("--config", type=Path, help="Path to an invkit_config.json file or its directory.")
    group.add_argument("--json", type=Path, help="Write the structured report to this path.")
    group.add_argument("--progress", action="store_true", help="Display progress bars on long computations.")
    group.add_argument("--field", type=str, help="Coefficient field: Q, F<p>, QiS2 or F<p>iS2[:<i>,<sqrt2>].")
    return parser


class BaseInvkitCLICommand(ABC):
    COMMAND: str = ""
    HELP: str = ""
    GLOBAL_OPTIONS: bool = True

    def __init__(self, args: Namespace):
        self.args = args

    @classmethod
    def register(cls, subparsers):
        parents = [global_options()] if cls.GLOBAL_OPTIONS else []
        parser = subparsers.add_parser(cls.COMMAND, help=cls.HELP, description=cls.HELP, parents=parents)
        cls.parse_args(parser)
        parser.set_defaults(command_class=cls)
        return parser

    @staticmethod
    @abstractmethod
    def parse_args(parser: ArgumentParser):
        raise NotImplementedError()

    @abstractmethod
    def run(self) -> int:
        """Returns the exit status: 0 when every requested check passed, 1 otherwise."""
        raise NotImplementedError()

    @cached_property
    def verification_config(self) -> VerificationConfig:
        if self.args.config is not None:
            config = InvkitConfig.from_pretrained(self.args.config).verification_config()
        else:
            config = VerificationConfig()
        if self.args.progress:
            config.decomposition.show_progress = True
        return config

    def field(self, default: Optional[str] = None) -> FieldDescriptor:
        text = self.args.field or default or self.verification_config.field
        return parse_field(text)

    def read_tuples(self, path: Path):
        """Reads `{n, d, kind, field, tuples: [[matrix, ...], ...]}`; `--field` wins over the file's field."""
        with open(path) as f:
            obj = json.load(f)
        if not isinstance(obj, dict) or "tuples" not in obj:
            raise ValueError(f"{path} should hold an object with a `tuples` list.")
        field = self.field(obj.get("field"))
        tuples = [MatrixTuple.from_json(t, field, obj.get("kind")) for t in obj["tuples"]]
        for point in tuples:
            if "n" in obj and point.n != obj["n"]:
                raise ValueError(f"{path} declares n={obj['n']} but holds {point.n}x{point.n} matrices.")
            if "d" in obj and len(point) != obj["d"]:
                raise ValueError(f"{path} declares d={obj['d']} but a tuple holds {len(point)} matrices.")
        return field, tuples

    def emit(self, result: dict, passed: bool = True) -> int:
        if self.args.json is not None:
            payload = {"command": self.COMMAND, "pass": passed, "result": result}
            with open(self.args.json, "w") as f:
                json.dump(payload, f, indent=2, sort_keys=True)
                f.write("\n")
            LOGGER.info(f"Report written to {self.args.json}")
        return 0 if passed else 1
