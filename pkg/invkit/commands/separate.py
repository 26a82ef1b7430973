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

from ..invlang import list_cases, parse_expr, standard_set
from ..septest import check_characteristic, search_witness, separates
from .base import BaseInvkitCLICommand


class SeparateCommand(BaseInvkitCLICommand):
    COMMAND = "separate"
    HELP = "Check whether a shipped invariant set separates the two tuples of an input file."

    @staticmethod
    def parse_args(parser: ArgumentParser):
        parser.add_argument("--case", required=True, choices=list_cases(), help="The invariant set.")
        parser.add_argument("--input", type=Path, required=True, help="JSON file holding exactly two tuples.")

    def run(self) -> int:
        field, tuples = self.read_tuples(self.args.input)
        if len(tuples) != 2:
            raise ValueError(f"separate needs two tuples in {self.args.input} (got: {len(tuples)}).")
        check_characteristic(self.args.case, field)
        u, v = tuples
        inv_set = standard_set(self.args.case, len(u), field.characteristic)
        report = separates(inv_set, u, v)
        if report.separated:
            print(f"separated by {report.first_separator}")
        else:
            print(f"not separated by {self.args.case}")
        return self.emit(report.to_dict(), report.separated)


class SearchWitnessCommand(BaseInvkitCLICommand):
    COMMAND = "search-witness"
    HELP = "Randomly search a pair of tuples separated by one member of a set and by no other."

    @staticmethod
    def parse_args(parser: ArgumentParser):
        parser.add_argument("--case", required=True, choices=list_cases(), help="The invariant set.")
        parser.add_argument("--expr", required=True, help="The member the pair should be separated by.")
        parser.add_argument("--d", type=int, help="Number of matrices, for the cases defined for every d.")
        parser.add_argument("--budget", type=int, help="Number of attempts; defaults to the configured budget.")
        parser.add_argument("--seed", type=int, help="Seed of the sampler; defaults to the configured seed.")
        parser.add_argument("--strategy", choices=("resample", "independent"), help="How the second tuple is drawn.")

    def run(self) -> int:
        field = self.field()
        search = self.verification_config.search
        check_characteristic(self.args.case, field)
        inv_set = standard_set(self.args.case, self.args.d, field.characteristic)
        pair = search_witness(
            inv_set,
            parse_expr(self.args.expr),
            budget=search.budget if self.args.budget is None else self.args.budget,
            seed=search.seed if self.args.seed is None else self.args.seed,
            entries=search.entries,
            strategy=self.args.strategy or search.strategy,
            field=field,
            show_progress=self.args.progress,
        )
        if pair is None:
            print(f"no witness found for {self.args.expr}")
            return self.emit({"found": False}, False)
        print(f"witness found for {pair.separator.text(inv_set.n)}")
        for name, point in (("u", pair.u), ("v", pair.v)):
            print(f"  {name} = " + ", ".join(str(matrix) for matrix in point))
        return self.emit({"found": True, "pair": pair.to_json()})
