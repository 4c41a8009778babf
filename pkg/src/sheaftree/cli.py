# SPDX-FileCopyrightText: Copyright (c) 2024 NVIDIA CORPORATION & AFFILIATES. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Command line entry point.

Exit codes: 0 success, 1 invalid input, 2 hypothesis violated, 3 certification
failed, 4 internal assertion.
"""

import argparse
import dataclasses
import logging
import pathlib
import sys

from sheaftree.__about__ import __version__
from sheaftree.common import digest
from sheaftree.config import configure_logging, load_settings
from sheaftree.decompose import (
    elliptic_subsheaf,
    induction_decompose,
    is_multifacial,
    verify_decomposition,
)
from sheaftree.equivariant import EquivariantSheaf, rep_on_h0, rep_on_h1
from sheaftree.error import (
    CertificationFailed,
    ConstructionMismatch,
    InternalAssertion,
    SheafTreeError,
    ValidationError,
    report_internal_failure,
)
from sheaftree.exactla import FieldSpec
from sheaftree.fixtures import FIXTURES, build_fixture
from sheaftree.generate import CONSTRAINTS, GeneratorParams, random_instance
from sheaftree.instance import parse_instance, serialize_instance
from sheaftree.rep import character
from sheaftree.report import emit, failure_report, make_report, orbit_tables
from sheaftree.selftest import run_selftest
from sheaftree.sheaf import euler_check

logger = logging.getLogger("sheaftree")


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors become reports with exit code 1 instead of argparse's exit 2."""

    def error(self, message):
        raise ValidationError("UsageError", message)


@dataclasses.dataclass
class Invocation:
    command: str | None = None
    digest: str | None = None
    pretty: bool = False
    out: str | None = None


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    try:
        return pathlib.Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError("ReadError", f"Cannot read {path}: {e.strerror}") from None
    except UnicodeDecodeError as e:
        raise ValidationError(
            "ReadError", f"{path} is not UTF-8 text (byte {e.start}: {e.reason})"
        ) from None


def _load(inv, path):
    instance = parse_instance(_read_text(path))
    inv.digest = instance.digest
    return instance


def _format_character(rho):
    return [rho.field.format_scalar(x) for x in character(rho)]


def cmd_validate(inv, args, settings):
    instance = _load(inv, args.instance)
    s = instance.sheaf
    results = {
        "field": str(instance.field),
        "vertices": instance.tree.n_vertices,
        "edges": instance.tree.n_edges,
        "vertex_dims": list(s.vdim),
        "edge_dims": list(s.edim),
        "group_order": instance.equivariant.group.order if instance.has_group else None,
    }
    if instance.has_group:
        results.update(orbit_tables(instance.equivariant.action))
    return make_report(inv.command, inv.digest, results), 0


def cmd_cohomology(inv, args, settings):
    instance = _load(inv, args.instance)
    s = instance.sheaf
    coh = s.cohomology
    lhs, rhs = euler_check(s)
    results = {
        "h0_dim": coh.h0_dim,
        "h1_dim": coh.h1_dim,
        "euler": {"h0_minus_h1": lhs, "vdim_minus_edim": rhs, "holds": lhs == rhs},
        "h0_basis": coh.h0.basis.to_strings(),
    }
    if instance.has_group:
        es = instance.equivariant
        results["elements"] = es.group.elements
        results["character_h0"] = _format_character(rep_on_h0(es))
        results["character_h1"] = _format_character(rep_on_h1(es))
    return make_report(inv.command, inv.digest, results), 0


def cmd_decompose(inv, args, settings):
    instance = _load(inv, args.instance)
    es = instance.equivariant
    if es is None:
        logger.info("No group section; decomposing for the trivial group")
        es = EquivariantSheaf.with_trivial_group(instance.sheaf)
    result = induction_decompose(es, norton_attempts=settings.norton_attempts, seed=settings.seed)
    decomposition = result.as_dict()
    assertions = decomposition.pop("assertions")
    results = {"decomposition": decomposition}
    try:
        certificate = verify_decomposition(
            es,
            result,
            sweep_terms=settings.iso_sweep_terms,
            enumeration_exponent=settings.iso_enumeration_exponent,
            enumeration_limit=settings.iso_enumeration_limit,
        )
    except CertificationFailed as e:
        e.assertions = assertions
        return failure_report(inv.command, inv.digest, e, results=results), e.exit_code
    results["certificate"] = certificate.as_dict()
    return make_report(inv.command, inv.digest, results, assertions=assertions), 0


def _generator_params(args, settings):
    return GeneratorParams(
        field=FieldSpec.parse(settings.field),
        max_vertices=settings.max_vertices,
        max_stalk_dim=settings.max_stalk_dim,
        constraint=args.constraint,
        leaf_dim=args.leaf_dim,
        equivariant=args.equivariant,
    )


def cmd_random(inv, args, settings):
    params = _generator_params(args, settings)
    inv.digest = digest(
        {"seed": settings.seed, **dataclasses.asdict(params), "field": str(params.field)}
    )
    s, es = random_instance(settings.seed, 0, params)
    if params.constraint == "multifacial" and not is_multifacial(s):
        raise ConstructionMismatch("GeneratorPostCheck", "generated sheaf is not multifacial")
    if params.constraint == "no-elliptic" and not all(
        w.is_zero() for w in elliptic_subsheaf(s).vertex_spaces
    ):
        raise ConstructionMismatch("GeneratorPostCheck", "generated sheaf has elliptic elements")
    return serialize_instance(s, es), 0


def cmd_fixture(inv, args, settings):
    s, es = build_fixture(args.name)
    return serialize_instance(s, es), 0


def cmd_selftest(inv, args, settings):
    inv.digest = digest(dataclasses.asdict(settings))
    result = run_selftest(settings)
    assertions = [
        {
            "name": f"{f.suite}[{f.index}]",
            "ok": False,
            "detail": f"{f.kind}: {f.message}",
        }
        for f in result.failures
    ]
    exit_code = 0 if result.ok else InternalAssertion.exit_code
    report = make_report(
        inv.command, inv.digest, result.as_dict(), assertions, exit_code=exit_code
    )
    return report, exit_code


COMMANDS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "decompose": cmd_decompose,
    "selftest": cmd_selftest,
    "random": cmd_random,
    "fixture": cmd_fixture,
}


def build_parser():
    output = ArgumentParser(add_help=False)
    fmt = output.add_mutually_exclusive_group()
    fmt.add_argument(
        "--json",
        dest="pretty",
        action="store_const",
        const=False,
        help="Compact canonical JSON (default)",
    )
    fmt.add_argument(
        "--pretty", dest="pretty", action="store_const", const=True, help="Indented JSON"
    )
    output.add_argument("--out", help="Write the document here instead of stdout")

    generator = ArgumentParser(add_help=False)
    generator.add_argument("--field", help="Q or Fp:<p>")
    generator.add_argument("--seed", type=int)
    generator.add_argument("--max-vertices", type=int)
    generator.add_argument("--max-stalk-dim", type=int)

    parser = ArgumentParser(
        prog="sheaftree",
        description="Cohomology and induction decomposition of equivariant sheaves on trees",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("validate", "Check an instance and report its orbits"),
        ("cohomology", "Compute H^0, H^1 and the characters of the group on them"),
        ("decompose", "Find the cell H^0 is induced from and certify it"),
    ):
        p = sub.add_parser(name, parents=[output], help=text)
        p.add_argument("instance", help="Instance file, or - for stdin")
        p.add_argument("--seed", type=int, help="Seed for the randomised irreducibility search")
    p = sub.add_parser("selftest", parents=[output, generator], help="Run the property suites")
    p.add_argument("--count", type=int)
    p = sub.add_parser("random", parents=[output, generator], help="Emit a random instance")
    p.add_argument("--constraint", choices=CONSTRAINTS, default="none")
    p.add_argument(
        "--equivariant",
        action="store_true",
        help="Draw the group action from the built-in catalog",
    )
    p.add_argument("--leaf-dim", type=int, help="Stalk dimension at every leaf")
    p = sub.add_parser("fixture", parents=[output], help="Emit a named instance")
    p.add_argument("name", choices=sorted(FIXTURES))
    return parser


def _overrides(args):
    names = ("field", "seed", "count", "max_vertices", "max_stalk_dim", "pretty")
    return {name: getattr(args, name, None) for name in names}


def main(argv=None):
    configure_logging()
    inv = Invocation()
    exception = None
    try:
        args = build_parser().parse_args(argv)
        inv.command = args.command
        inv.out = args.out
        settings = load_settings(command=args.command).replace(**_overrides(args))
        inv.pretty = settings.pretty
        logger.info("sheaftree %s: starting", inv.command)
        document, exit_code = COMMANDS[args.command](inv, args, settings)
    except SheafTreeError as e:
        exception = e
        document, exit_code = failure_report(inv.command, inv.digest, e), e.exit_code
    if isinstance(exception, InternalAssertion):
        sys.stderr.write(report_internal_failure(inv.command, inv.digest, exception))
    emit(document, pretty=inv.pretty, out=inv.out)
    logger.info("sheaftree %s: exit %d", inv.command, exit_code)
    return exit_code
