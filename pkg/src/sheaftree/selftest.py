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
"""Randomised property suites over generated instances.

Each suite draws its own instance for every index, so a failure is reproduced by
``(seed, suite, index)`` alone. A failing draw is shrunk by regenerating it with
smaller vertex bounds; the smallest failing instance is written to the failure
directory.
"""

import dataclasses
import logging
import pathlib

from sheaftree import fixtures
from sheaftree.common import dump_json
from sheaftree.decompose import (
    Step,
    build_R_T,
    elliptic_subsheaf,
    induction_decompose,
    is_multifacial,
    t_cohomology,
    unifacial_data,
    verify_decomposition,
)
from sheaftree.equivariant import (
    EquivariantSheaf,
    check_coboundary_equivariance,
    rep_on_h0,
    rep_on_h1,
    validate_representation,
)
from sheaftree.error import (
    EquivarianceBroken,
    HypothesisViolated,
    InfeasibleConstraint,
    InternalAssertion,
    SheafTreeError,
)
from sheaftree.exactla import (
    FieldSpec,
    Matrix,
    Subspace,
    is_zero_vector,
    kernel_basis,
    rref,
    solve,
)
from sheaftree.generate import (
    GeneratorParams,
    random_instance,
    random_matrix,
    random_scalar,
    random_subsheaf,
    rng_for,
    search,
)
from sheaftree.instance import serialize_instance
from sheaftree.rep import Verdict, is_irreducible
from sheaftree.sheaf import (
    ShortExactSeq,
    build_quotient,
    euler_check,
    les_connecting,
    subsheaf_as_sheaf,
)
from sheaftree.tree import convex_hull, leaves

logger = logging.getLogger("sheaftree")

SKIPPED = "skipped"


def require(condition, message):
    if not condition:
        raise InternalAssertion("PropertyFailed", message)


@dataclasses.dataclass(frozen=True)
class Suite:
    name: str
    check: object
    constraint: str = "none"
    equivariant: bool = False
    # suites that check a fixed instance run at index 0 only
    once: bool = False


SUITES = {}


def suite(name, constraint="none", equivariant=False, once=False):
    def register(fn):
        SUITES[name] = Suite(name, fn, constraint, equivariant, once)
        return fn

    return register


@suite("euler")
def check_euler(s, es, rng, settings):
    lhs, rhs = euler_check(s)
    require(lhs == rhs, f"h0 - h1 = {lhs} but sum vdim - sum edim = {rhs}")


@suite("elliptic")
def check_elliptic(s, es, rng, settings):
    ell = elliptic_subsheaf(s)
    sheaf, _ = subsheaf_as_sheaf(ell)
    coh = sheaf.cohomology
    expected = sum(w.dim for w in ell.vertex_spaces)
    require(coh.h1_dim == 0, f"H^1 of the elliptic subsheaf has dimension {coh.h1_dim}")
    require(coh.h0_dim == expected, f"H^0 of the elliptic subsheaf is {coh.h0_dim}, not {expected}")


@suite("unifacial", constraint="no-elliptic")
def check_unifacial(s, es, rng, settings):
    require(
        all(w.is_zero() for w in elliptic_subsheaf(s).vertex_spaces),
        "generator produced elliptic elements",
    )
    rt = build_R_T(s, unifacial_data(s))
    coh = rt.suni.cohomology
    require(coh.h1_dim == 0, f"H^1 of the unifacial subsheaf has dimension {coh.h1_dim}")
    t_total = sum(rt.T.edim)
    require(coh.h0_dim == t_total, f"H^0 of the unifacial subsheaf is {coh.h0_dim}, not {t_total}")
    tc = t_cohomology(EquivariantSheaf.with_trivial_group(s), rt)
    require(tc.delta.is_square() and tc.delta.is_invertible(), "connecting map not invertible")


@suite("multifacial", constraint="multifacial")
def check_multifacial(s, es, rng, settings):
    require(is_multifacial(s), "generator produced a sheaf that is not multifacial")
    h0 = s.cohomology.h0_dim
    require(h0 == 0, f"multifacial sheaf has H^0 of dimension {h0}")


@suite("les")
def check_les(s, es, rng, settings):
    sub = random_subsheaf(rng, s)
    _, inclusion = subsheaf_as_sheaf(sub)
    quotient = build_quotient(s, sub)
    _, report = les_connecting(ShortExactSeq(inclusion, quotient.projection))
    require(report.exact, f"long exact sequence fails: {report.as_dict()}")


@suite("equivariance", equivariant=True)
def check_equivariance(s, es, rng, settings):
    check_coboundary_equivariance(es)
    validate_representation(rep_on_h0(es))
    validate_representation(rep_on_h1(es))


@suite("decompose", equivariant=True)
def check_decompose(s, es, rng, settings):
    rho = rep_on_h0(es)
    verdict = is_irreducible(rho, norton_attempts=settings.norton_attempts, seed=0).verdict
    if verdict == Verdict.INCONCLUSIVE:
        return SKIPPED
    if verdict == Verdict.NO and rho.dim > 0:
        try:
            induction_decompose(es, norton_attempts=settings.norton_attempts)
        except HypothesisViolated as e:
            require(e.evidence is not None, "reducible H^0 reported without evidence")
            return None
        require(False, "reducible H^0 was decomposed")
    result = induction_decompose(es, norton_attempts=settings.norton_attempts)
    verify_decomposition(
        es,
        result,
        sweep_terms=settings.iso_sweep_terms,
        enumeration_exponent=settings.iso_enumeration_exponent,
        enumeration_limit=settings.iso_enumeration_limit,
    )
    return None


@suite("exactla")
def check_exactla(s, es, rng, settings):
    field = s.field
    rows, cols = rng.randint(0, 4), rng.randint(0, 4)
    m = random_matrix(rng, field, rows, cols)
    kernel = kernel_basis(m)
    require(m.rank() + kernel.dim == cols, "rank and nullity do not add up")
    require(
        all(is_zero_vector(field, m.apply(v)) for v in kernel.vectors()),
        "a kernel vector is not killed",
    )
    x = [field.scalar(random_scalar(rng, field)) for _ in range(cols)]
    b = m.apply(x)
    solution = solve(m, b)
    require(solution is not None and m.apply(solution) == b, "solve missed a consistent system")
    if m.is_square() and m.is_invertible():
        require(m @ m.inverse() == Matrix.identity(field, rows), "inverse does not invert")
    reduced, pivots, rank = rref(m)
    require(rref(reduced) == (reduced, pivots, rank), "rref is not idempotent")


def _random_subspace(rng, field, n):
    k = rng.randint(0, n)
    return Subspace.span(field, n, random_matrix(rng, field, k, n).entries)


@suite("subspace")
def check_subspace(s, es, rng, settings):
    field = s.field
    n = rng.randint(0, 4)
    u, w = _random_subspace(rng, field, n), _random_subspace(rng, field, n)
    total, meet = u.sum(w), u.intersect(w)
    require(
        total.dim + meet.dim == u.dim + w.dim,
        f"dim(U+W) + dim(U∩W) = {total.dim} + {meet.dim}, dim U + dim W = {u.dim} + {w.dim}",
    )
    require(
        total.contains_subspace(u) and total.contains_subspace(w),
        "the sum misses a summand",
    )
    require(
        u.contains_subspace(meet) and w.contains_subspace(meet),
        "the intersection leaves a subspace",
    )


@suite("tree")
def check_tree(s, es, rng, settings):
    t = s.tree
    w = rng.sample(t.vertices, rng.randint(1, t.n_vertices))
    hull = convex_hull(t, w)
    vertices, edges = set(w), set()
    for a in w:
        for b in w:
            path_vertices, path_edges = t.path(a, b)
            vertices.update(path_vertices)
            edges.update(path_edges)
    require(set(hull.vertices) == vertices, "hull vertices differ from the union of paths")
    require(set(hull.edges) == edges, "hull edges differ from the union of paths")
    require(len(hull.edges) == len(hull.vertices) - 1, "hull is not a subtree")
    require(set(leaves(hull)) <= set(w), "hull has a leaf outside the set")


@suite("sign-mutation", once=True)
def check_sign_mutation(s, es, rng, settings):
    es = fixtures.star2_reversed()
    check_coboundary_equivariance(es)
    try:
        rep_on_h1(es, signed=False)
    except EquivarianceBroken:
        return
    require(False, "dropping the orientation sign went unnoticed")


# one-dimensional stalks on the catalog actions of at most three vertices
QUOTIENT_SEARCH = GeneratorParams(
    field=FieldSpec.parse("Q"), max_vertices=3, max_stalk_dim=1, equivariant=True
)


def recurses_through_a_quotient(s, es):
    """Whether the decomposition of ``es`` passes to a quotient at least once."""
    try:
        result = induction_decompose(es)
    except HypothesisViolated:
        return False
    return Step.QUOTIENT_RECURSED in result.trace


@suite("quotient-recursed", once=True)
def check_quotient_recursed(s, es, rng, settings):
    index, _, found = search(
        f"{settings.seed}/quotient", QUOTIENT_SEARCH, recurses_through_a_quotient
    )
    logger.debug("Draw %d decomposes through a quotient", index)
    result = induction_decompose(found, norton_attempts=settings.norton_attempts)
    certificate = verify_decomposition(
        found,
        result,
        sweep_terms=settings.iso_sweep_terms,
        enumeration_exponent=settings.iso_enumeration_exponent,
        enumeration_limit=settings.iso_enumeration_limit,
    )
    require(certificate.intertwiner.is_invertible(), "certificate is not invertible")


@dataclasses.dataclass
class Tally:
    passed: int = 0
    failed: int = 0
    skipped: int = 0

    def as_dict(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class Failure:
    suite: str
    index: int
    kind: str
    message: str
    max_vertices: int
    dump: str | None

    def as_dict(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass
class SelftestResult:
    seed: object
    count: int
    tallies: dict
    failures: list

    @property
    def ok(self):
        return not self.failures

    def as_dict(self):
        return {
            "seed": self.seed,
            "count": self.count,
            "suites": {name: t.as_dict() for name, t in self.tallies.items()},
            "failures": [f.as_dict() for f in self.failures],
        }


def _fields(settings):
    configured = FieldSpec.parse(settings.field)
    other = FieldSpec.parse("Fp:5")
    return (configured,) if configured == other else (configured, other)


def _params(st, field, settings, max_vertices):
    return GeneratorParams(
        field=field,
        max_vertices=max_vertices,
        max_stalk_dim=settings.max_stalk_dim,
        constraint=st.constraint,
        equivariant=st.equivariant,
    )


def _run_one(st, index, field, settings, max_vertices):
    """None if the property holds, SKIPPED, or the error that broke it."""
    seed = f"{settings.seed}/{st.name}"
    s, es = random_instance(seed, index, _params(st, field, settings, max_vertices))
    rng = rng_for(f"{seed}/extra", index)
    try:
        outcome = st.check(s, es, rng, settings)
    except SheafTreeError as e:
        return (s, es), e
    return (s, es), outcome


def _shrink(st, index, field, settings, failing):
    """Regenerate the draw with smaller vertex bounds; keep the smallest that still fails."""
    smallest = failing
    for bound in range(settings.max_vertices - 1, 0, -1):
        try:
            instance, outcome = _run_one(st, index, field, settings, bound)
        except InfeasibleConstraint:
            break
        if isinstance(outcome, SheafTreeError):
            smallest = (bound, instance, outcome)
    return smallest


def _dump(settings, st, index, instance):
    s, es = instance
    path = pathlib.Path(settings.failure_dir) / f"sheaftree-failure-{st.name}-{index}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_json(serialize_instance(s, es), pretty=True), encoding="utf-8")
    return str(path)


def run_selftest(settings):
    fields = _fields(settings)
    tallies = {name: Tally() for name in SUITES}
    failures = []
    for index in range(settings.count):
        field = fields[index % len(fields)]
        for st in SUITES.values():
            tally = tallies[st.name]
            if st.once and index:
                continue
            instance, outcome = _run_one(st, index, field, settings, settings.max_vertices)
            if outcome == SKIPPED:
                tally.skipped += 1
                continue
            if not isinstance(outcome, SheafTreeError):
                tally.passed += 1
                continue
            tally.failed += 1
            bound, instance, outcome = _shrink(
                st, index, field, settings, (settings.max_vertices, instance, outcome)
            )
            dump = _dump(settings, st, index, instance)
            logger.error("Suite %s failed at index %d: %s", st.name, index, outcome)
            failures.append(
                Failure(st.name, index, outcome.kind, outcome.message, bound, dump)
            )
    logger.info("Selftest: %d draws, %d failures", settings.count, len(failures))
    return SelftestResult(settings.seed, settings.count, tallies, failures)
