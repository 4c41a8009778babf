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
"""Representations of finite groups: induction, intertwiners, irreducibility."""

import enum
import itertools
import logging
import random
from dataclasses import dataclass

from sympy import Poly, Symbol

from sheaftree.equivariant import Representation
from sheaftree.error import GroupError, InternalAssertion
from sheaftree.exactla import Matrix, Subspace, kernel_basis

logger = logging.getLogger("sheaftree")


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class InducedRep:
    base: Representation
    subgroup: tuple
    transversal: tuple
    rep: Representation


@dataclass(frozen=True, eq=False)
class IsomorphismResult:
    verdict: Verdict
    # A with rho2(g) A = A rho1(g), invertible
    intertwiner: Matrix | None = None
    reason: str = ""


@dataclass(frozen=True, eq=False)
class IrreducibilityResult:
    verdict: Verdict
    # a proper nonzero invariant subspace when the verdict is NO
    witness: Subspace | None = None
    reason: str = ""


def trivial_representation(group, field, dim=1, elements=None):
    elements = tuple(elements if elements is not None else group.elements)
    identity = Matrix.identity(field, dim)
    return Representation(group, field, dim, {g: identity for g in elements}, elements)


def direct_sum(*reps):
    first = reps[0]
    dims = [r.dim for r in reps]
    matrices = {
        g: Matrix.block(first.field, dims, dims, {(i, i): r(g) for i, r in enumerate(reps)})
        for g in first.elements
    }
    return Representation(first.group, first.field, sum(dims), matrices, first.elements)


def restrict(rho, elements):
    elements = tuple(sorted(elements))
    if not set(elements) <= set(rho.elements):
        raise GroupError("NotASubgroup", f"{list(elements)} is not inside the acting group")
    return Representation(
        rho.group, rho.field, rho.dim, {g: rho(g) for g in elements}, elements
    )


def generators(group, elements):
    """A generating set of the subgroup ``elements``, chosen greedily in element order."""
    gens, generated = [], {0}
    for g in sorted(elements):
        if g in generated:
            continue
        gens.append(g)
        generated.add(g)
        frontier = list(generated)
        while frontier:
            a = frontier.pop()
            for b in gens:
                for c in (group.mul[a][b], group.mul[b][a]):
                    if c not in generated:
                        generated.add(c)
                        frontier.append(c)
    return gens


def _check_same_group(rho1, rho2):
    if rho1.group != rho2.group or tuple(rho1.elements) != tuple(rho2.elements):
        raise GroupError("GroupMismatch", "the representations are of different groups")
    if rho1.field != rho2.field:
        raise GroupError("GroupMismatch", "the representations are over different fields")


def induce(group, subgroup, sigma, ambient=None):
    """Induce ``sigma`` from ``subgroup`` to ``ambient``, all of ``group`` by default.

    The basis is indexed by (coset, basis vector of sigma), cosets in the order of a
    greedy least-element-first left transversal. If g g_i = g_j k with k in the
    subgroup, block (j, i) of the matrix of g is sigma(k).
    """
    subgroup = tuple(sorted(subgroup))
    elements = tuple(group.elements) if ambient is None else tuple(sorted(ambient))
    if not group.is_subgroup(elements):
        raise GroupError("NotASubgroup", f"{list(elements)} is not a subgroup", ids=elements)
    if not group.is_subgroup(subgroup) or not set(subgroup) <= set(elements):
        raise GroupError(
            "NotASubgroup",
            f"{list(subgroup)} is not a subgroup of {list(elements)}",
            ids=subgroup,
        )
    members = set(subgroup)
    transversal, covered = [], set()
    for g in elements:
        if g not in covered:
            transversal.append(g)
            covered.update(group.mul[g][k] for k in subgroup)
    m, d, field = len(transversal), sigma.dim, sigma.field
    matrices = {}
    for g in elements:
        blocks = {}
        for i, gi in enumerate(transversal):
            ggi = group.mul[g][gi]
            for j, gj in enumerate(transversal):
                k = group.mul[group.inv[gj]][ggi]
                if k in members:
                    blocks[(j, i)] = sigma(k)
                    break
        matrices[g] = Matrix.block(field, [d] * m, [d] * m, blocks)
    rep = Representation(group, field, m * d, matrices, elements)
    return InducedRep(sigma, subgroup, tuple(transversal), rep)


def hom_space(rho1, rho2):
    """All A with rho2(g) A = A rho1(g), as a subspace of row-major flattened matrices."""
    _check_same_group(rho1, rho2)
    d1, d2, field = rho1.dim, rho2.dim, rho1.field
    zero = field.zero
    rows = []
    for g in generators(rho1.group, rho1.elements):
        r1, r2 = rho1(g), rho2(g)
        for i in range(d2):
            for j in range(d1):
                row = [zero] * (d1 * d2)
                for k in range(d2):
                    row[k * d1 + j] += r2.entry(i, k)
                for l in range(d1):
                    row[i * d1 + l] -= r1.entry(l, j)
                rows.append(row)
    return kernel_basis(Matrix.from_rows(field, rows, cols=d1 * d2))


def unflatten(field, vector, rows, cols):
    return Matrix.from_rows(
        field, [vector[i * cols : (i + 1) * cols] for i in range(rows)], cols=cols
    )


def is_intertwiner(rho1, rho2, a):
    return all(rho2(g) @ a == a @ rho1(g) for g in rho1.elements)


def character(rho):
    chi = {g: rho(g).trace() for g in rho.elements}
    group = rho.group
    for g in rho.elements:
        for h in rho.elements:
            conjugate = group.mul[group.mul[h][g]][group.inv[h]]
            if chi[conjugate] != chi[g]:
                raise InternalAssertion(
                    "NotClassFunction",
                    f"trace differs on conjugate elements {g} and {conjugate}",
                    ids=(g, conjugate),
                )
    return tuple(chi[g] for g in rho.elements)


def commutant_dim(rho):
    return hom_space(rho, rho).dim


def _enumerable(field, m, enumeration_exponent, enumeration_limit):
    """Whether every combination of an m-element basis is within the search limits."""
    return (
        field.is_finite
        and m <= enumeration_exponent
        and field.p**m <= enumeration_limit
    )


def _invertible_combinations(field, basis, sweep_terms, exhaustive):
    """Candidate elements of the hom space, in a fixed order."""
    m = len(basis)
    yield from basis
    one = field.one
    for r in range(2, min(sweep_terms, m) + 1):
        for subset in itertools.combinations(range(m), r):
            for signs in itertools.product((one, -one), repeat=r - 1):
                total = basis[subset[0]]
                for s, i in zip(signs, subset[1:]):
                    total = total + basis[i].scale(s)
                yield total
    if exhaustive:
        for coeffs in itertools.product(field.elements(), repeat=m):
            if all(field.is_zero(c) for c in coeffs):
                continue
            yield _combine(field, basis, coeffs)
        return
    # points (1, t, t^2, ...) on the moment curve
    d = basis[0].rows
    for t in range(2, d * m + 2):
        yield _combine(field, basis, [field.scalar(t**i) for i in range(m)])


def _combine(field, basis, coeffs):
    total = Matrix.zeros(field, basis[0].rows, basis[0].cols)
    for c, b in zip(coeffs, basis):
        if not field.is_zero(c):
            total = total + b.scale(c)
    return total


def is_isomorphic(
    rho1, rho2, sweep_terms=3, enumeration_exponent=4, enumeration_limit=10_000
):
    """Search the hom space for an invertible intertwiner.

    Over a finite field the hom space is enumerated in full only when it has
    dimension at most ``enumeration_exponent`` and at most ``enumeration_limit``
    elements; only a full search can end in NO.
    """
    _check_same_group(rho1, rho2)
    field = rho1.field
    if rho1.dim != rho2.dim:
        return IsomorphismResult(Verdict.NO, reason="dimensions differ")
    if rho1.dim == 0:
        return IsomorphismResult(Verdict.YES, Matrix.identity(field, 0), "both are zero")
    if character(rho1) != character(rho2):
        return IsomorphismResult(Verdict.NO, reason="characters differ")
    space = hom_space(rho1, rho2)
    if space.is_zero():
        return IsomorphismResult(Verdict.NO, reason="no nonzero intertwiner")
    d = rho1.dim
    basis = [unflatten(field, v, d, d) for v in space.vectors()]
    exhaustive = _enumerable(field, len(basis), enumeration_exponent, enumeration_limit)
    for tried, candidate in enumerate(
        _invertible_combinations(field, basis, sweep_terms, exhaustive)
    ):
        if candidate.is_invertible():
            logger.debug("Invertible intertwiner found after %d candidates", tried + 1)
            return IsomorphismResult(Verdict.YES, candidate, "invertible intertwiner found")
    if exhaustive:
        return IsomorphismResult(
            Verdict.NO, reason="every intertwiner is singular (exhaustive search)"
        )
    return IsomorphismResult(
        Verdict.INCONCLUSIVE,
        reason=f"no invertible element among the searched combinations of a "
        f"{space.dim}-dimensional hom space",
    )


def spin(rho, vectors, transpose=False):
    """The smallest invariant subspace containing ``vectors``."""
    field, dim = rho.field, rho.dim
    gens = [rho(g) for g in generators(rho.group, rho.elements)]
    if transpose:
        gens = [m.transpose() for m in gens]
    space = Subspace.span(field, dim, vectors)
    frontier = list(space.vectors())
    while frontier and not space.is_full():
        v = frontier.pop()
        for m in gens:
            w = m.apply(v)
            if not space.contains(w):
                space = Subspace.span(field, dim, [*space.vectors(), w])
                frontier.append(w)
    return space


def is_invariant(rho, space):
    return all(space.contains(rho(g).apply(v)) for g in rho.elements for v in space.vectors())


def _proper(space, dim):
    return 0 < space.dim < dim


def _eval_poly(coeffs, b):
    """Horner evaluation of a polynomial, leading coefficient first, at a square matrix."""
    field = b.field
    identity = Matrix.identity(field, b.rows)
    total = Matrix.zeros(field, b.rows, b.cols)
    for c in coeffs:
        total = total @ b + identity.scale(c)
    return total


def _factor_candidates(b):
    """q(b) for every irreducible factor q of the characteristic polynomial of b."""
    field = b.field
    K = field.domain
    x = Symbol("x")
    poly = Poly.from_list([K.to_sympy(c) for c in b.charpoly()], x, domain=K)
    _, factors = poly.factor_list()
    for q, _multiplicity in factors:
        yield _eval_poly([field.scalar(c) for c in q.all_coeffs()], b)


def _zero_divisor_witness(rho, commutant):
    field, d = rho.field, rho.dim
    basis = [unflatten(field, v, d, d) for v in commutant.vectors()]
    candidates = list(basis)
    for a, b in itertools.combinations(basis, 2):
        candidates.extend((a + b, a - b))
    for b in candidates:
        options = [b] if not b.is_invertible() else list(_factor_candidates(b))
        for c in options:
            if c.is_zero():
                continue
            kernel = kernel_basis(c)
            if _proper(kernel, d):
                return kernel
    return None


def _kernel_lines(field, kernel, limit):
    """Representatives of the lines of ``kernel``; None when there are more than ``limit``."""
    k = kernel.dim
    if k == 1:
        return kernel.vectors()
    if not field.is_finite or (field.p**k - 1) // (field.p - 1) > limit:
        return None
    lines = []
    for lead in range(k):
        for tail in itertools.product(field.elements(), repeat=k - lead - 1):
            coeffs = [field.zero] * lead + [field.one, *tail]
            lines.append(kernel.combine(coeffs))
    return lines


def _norton(rho, attempts, seed, line_limit=64):
    field, d = rho.field, rho.dim
    rng = random.Random(seed)
    elements = list(rho.elements)
    for attempt in range(attempts):
        if field.is_finite:
            coeffs = [field.scalar(rng.randrange(field.p)) for _ in elements]
        else:
            coeffs = [field.scalar(rng.randint(-2, 2)) for _ in elements]
        a = _combine(field, [rho(g) for g in elements], coeffs)
        kernel = kernel_basis(a)
        if kernel.is_zero():
            continue
        lines = _kernel_lines(field, kernel, line_limit)
        if lines is None:
            continue
        logger.debug("Norton attempt %d: kernel of dimension %d", attempt, kernel.dim)
        for v in lines:
            w = spin(rho, [v])
            if _proper(w, d):
                return IrreducibilityResult(Verdict.NO, w, "spin of a kernel vector")
        u = kernel_basis(a.transpose()).vectors()[0]
        dual = spin(rho, [u], transpose=True)
        if _proper(dual, d):
            annihilator = kernel_basis(dual.basis)
            return IrreducibilityResult(
                Verdict.NO, annihilator, "annihilator of a dual spin"
            )
        return IrreducibilityResult(Verdict.YES, reason="Norton criterion")
    return None


def is_irreducible(rho, norton_attempts=24, seed=0):
    field, d = rho.field, rho.dim
    if d == 0:
        return IrreducibilityResult(Verdict.NO, reason="the zero representation")
    if d == 1:
        return IrreducibilityResult(Verdict.YES, reason="one-dimensional")
    for j in range(d):
        standard = [field.zero] * d
        standard[j] = field.one
        w = spin(rho, [standard])
        if _proper(w, d):
            return IrreducibilityResult(Verdict.NO, w, "spin of a standard basis vector")
    order = len(rho.elements)
    semisimple = field.characteristic == 0 or order % field.characteristic != 0
    commutant = hom_space(rho, rho)
    if commutant.dim == 1 and semisimple:
        return IrreducibilityResult(Verdict.YES, reason="scalar commutant, semisimple")
    if commutant.dim > 1:
        kernel = _zero_divisor_witness(rho, commutant)
        if kernel is not None:
            return IrreducibilityResult(Verdict.NO, kernel, "kernel of a commuting matrix")
    result = _norton(rho, norton_attempts, seed)
    if result is not None:
        return result
    return IrreducibilityResult(
        Verdict.INCONCLUSIVE,
        reason=f"commutant of dimension {commutant.dim}; no decisive group-algebra element "
        f"in {norton_attempts} attempts",
    )
