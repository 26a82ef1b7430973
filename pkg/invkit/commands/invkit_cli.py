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
import sys
from argparse import ArgumentParser
from typing import List, Optional

from ..utils import InvkitError
from .decompose import DecomposeCommand
from .evaluate import EvalCommand, ExpandCommand, ListSetsCommand
from .separate import SearchWitnessCommand, SeparateCommand
from .verify import VerifyCommand


COMMANDS = [
    EvalCommand,
    ExpandCommand,
    SeparateCommand,
    ListSetsCommand,
    DecomposeCommand,
    SearchWitnessCommand,
    VerifyCommand,
]


def build_parser() -> ArgumentParser:
    parser = ArgumentParser("invkit-cli", usage="invkit-cli <command> [<args>]")
    commands_parser = parser.add_subparsers(dest="command", metavar="<command>")
    for command_class in COMMANDS:
        command_class.register(commands_parser)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "command_class"):
        parser.print_help()
        return 2
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s:%(name)s:%(message)s")
    try:
        return args.command_class(args).run()
    except (InvkitError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"invkit-cli: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
