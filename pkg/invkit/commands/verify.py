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

from ..decomp import LEMMA_PARTS
from ..nilpotent import NILPOTENT_ARGUMENTS
from ..verification import VERIFIERS, WITNESS_CASES
from ..verification_base import VerificationResult
from .base import BaseInvkitCLICommand, global_options


def _statuses(report: dict) -> str:
    rows = report.get("entries") or report.get("instances") or []
    counts = {}
    for row in rows:
        if isinstance(row, dict):
            status = row.get("status") or ("pass" if row.get("pass") is True else "fail")
            counts[status] = counts.get(status, 0) + 1
    return ", ".join(f"{count} {status}" for status, count in sorted(counts.items()))


def summarize(result: VerificationResult, indent: str = "") -> None:
    print(f"{indent}{result.name} over {result.field}: {'PASS' if result.passed else 'FAIL'}")
    for report in result.reports:
        if "reports" in report:
            summarize(VerificationResult(report["name"], report["field"], report["reports"], report["pass"]), "  ")
            continue
        label = report.get("case") or report.get("part") or report.get("target") or result.name
        if "part" in report:
            label = f"part ({label})"
        details = [_statuses(report), report.get("verdict", "")]
        details = "; ".join(detail for detail in details if detail)
        status = "pass" if report.get("pass") else "FAIL"
        print(f"{indent}  {label}: {status}" + (f" ({details})" if details else ""))


class VerifyCommand(BaseInvkitCLICommand):
    COMMAND = "verify"
    HELP = "Machine-check the witness tables, the decomposition lemma and the generating set."
    GLOBAL_OPTIONS = False

    @staticmethod
    def parse_args(parser: ArgumentParser):
        items = parser.add_subparsers(dest="item", metavar="{" + ",".join(VERIFIERS) + "}")
        items.required = True
        for name, verifier_class in VERIFIERS.items():
            doc = (verifier_class.__doc__ or name).strip().splitlines()[0]
            item = items.add_parser(name, help=doc, parents=[global_options()])
            if name == "theorem":
                item.add_argument("--case", choices=WITNESS_CASES + ("all",), default="all")
                item.add_argument(
                    "--with-primes", action="store_true", help="Also check modulo the configured primes."
                )
            elif name == "lemma":
                item.add_argument("--part", choices=LEMMA_PARTS + ("all",), default="all")
            elif name in ("indecomposable", "ansatz"):
                item.add_argument("--target", choices=tuple(NILPOTENT_ARGUMENTS) + ("all",), default="all")

    def run(self) -> int:
        args = self.args
        verifier = VERIFIERS[args.item](self.verification_config, self.field())
        options = {key: getattr(args, key) for key in ("case", "with_primes", "part", "target") if hasattr(args, key)}
        result = verifier.verify(**options)
        summarize(result)
        return self.emit(result.to_dict(), result.passed)
