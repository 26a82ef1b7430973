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

from argparse import ArgumentParser
from pathlib import Path

from ..invlang import CASES, evaluate, expand, list_cases, parse_expr, standard_set
from ..polyring import MatrixKind
from .base import BaseInvkitCLICommand


class EvalCommand(BaseInvkitCLICommand):
    COMMAND = "eval"
    HELP = "Evaluate an invariant on the matrix tuples of an input file."

    @staticmethod
    def parse_args(parser: ArgumentParser):
        parser.add_argument("--expr", required=True, help='Invariant expression, e.g. "tr(1 2 3)".')
        parser.add_argument("--input", type=Path, required=True, help="JSON file holding the matrix tuples.")

    def run(self) -> int:
        expr = parse_expr(self.args.expr)
        _, tuples = self.read_tuples(self.args.input)
        values = []
        for point in tuples:
            value = evaluate(expr, list(point))
            values.append({"value": str(value), "encoding": value.encode()})
            print(value)
        return self.emit({"expr": expr.text(), "values": values})


class ExpandCommand(BaseInvkitCLICommand):
    COMMAND = "expand"
    HELP = "Expand an invariant over generic matrices."

    @staticmethod
    def parse_args(parser: ArgumentParser):
        parser.add_argument("--expr", required=True, help='Invariant expression, e.g. "tr(1 1 2)".')
        parser.add_argument("--kind", default="general", choices=[k.value for k in MatrixKind])
        parser.add_argument("--n", type=int, required=True, help="Matrix size.")
        parser.add_argument("--d", type=int, help="Number of generic matrices; defaults to the largest index used.")

    def run(self) -> int:
        expr = parse_expr(self.args.expr)
        d = self.args.d or expr.word.max_index
        polynomial = expand(expr, self.args.kind, self.args.n, d, self.field())
        print(polynomial.pretty())
        return self.emit({"expr": expr.text(self.args.n), "terms": polynomial.to_json(), "monomials": len(polynomial)})


class ListSetsCommand(BaseInvkitCLICommand):
    COMMAND = "list-sets"
    HELP = "List the shipped invariant sets."

    @staticmethod
    def parse_args(parser: ArgumentParser):
        parser.add_argument("--case", choices=list_cases(), help="Print the members of one set.")
        parser.add_argument("--d", type=int, help="Number of matrices, for the cases defined for every d.")

    def run(self) -> int:
        names = [self.args.case] if self.args.case else list_cases()
        field = self.field()
        sets = []
        for name in names:
            inv_set = standard_set(name, self.args.d, field.characteristic)
            print(f"{name}: {CASES[name].description} ({len(inv_set)} invariants, n={inv_set.n}, d={inv_set.d})")
            if self.args.case:
                for expr in inv_set:
                    print(f"  {inv_set.text(expr):<28} {inv_set.render(expr)}")
            sets.append(inv_set.to_json())
        return self.emit({"sets": sets})
