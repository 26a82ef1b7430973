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
from argparse import ArgumentParser

from ..decomp import build_pool, is_decomposable
from ..invlang import parse_expr
from ..polyring import MatrixKind
from .base import BaseInvkitCLICommand


LOGGER = logging.getLogger(__name__)


class DecomposeCommand(BaseInvkitCLICommand):
    COMMAND = "decompose"
    HELP = "Decide whether an invariant is a polynomial in invariants of lower degree."

    @staticmethod
    def parse_args(parser: ArgumentParser):
        parser.add_argument("--expr", required=True, help='Invariant expression, e.g. "tr(1 1 2 2 1 2)".')
        parser.add_argument("--kind", default="symmetric", choices=[k.value for k in MatrixKind])
        parser.add_argument("--n", type=int, default=3, help="Matrix size.")
        parser.add_argument("--d", type=int, help="Number of generic matrices; defaults to the largest index used.")
        parser.add_argument("--certificate", action="store_true", help="Print the certificate of a decomposition.")
        parser.add_argument(
            "--expect",
            choices=("decomposable", "indecomposable"),
            help="Exit with status 1 when the verdict differs.",
        )

    def run(self) -> int:
        expr = parse_expr(self.args.expr)
        n = self.args.n
        d = self.args.d or expr.word.max_index
        config = self.verification_config.decomposition
        degree = expr.degree(n)
        pool = build_pool(self.args.kind, n, d, self.field(), max(min(degree - 1, config.max_degree), 1))
        report = is_decomposable(expr, pool, config)
        print(f"{report.target} over {report.field}: {'decomposable' if report.decomposable else 'indecomposable'}")
        if self.args.certificate and report.decomposable:
            print(report.certificate_text())
        passed = self.args.expect is None or (self.args.expect == "decomposable") == report.decomposable
        if self.args.expect is not None and not report.conclusive(config.certify, config.exact):
            LOGGER.warning(f"The verdict on {report.target} is not certified; --expect fails.")
            passed = False
        return self.emit(report.to_dict(), passed)
