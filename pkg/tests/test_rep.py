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

import pytest

from sheaftree import catalog
from sheaftree.equivariant import Representation, rep_on_h0, validate_representation
from sheaftree.error import GroupError
from sheaftree.exactla import FieldSpec, Matrix
from sheaftree.rep import (
    Verdict,
    character,
    commutant_dim,
    direct_sum,
    generators,
    induce,
    is_intertwiner,
    is_invariant,
    is_irreducible,
    is_isomorphic,
    restrict,
    spin,
    trivial_representation,
)

C2 = catalog.path_reflection(2).group
S3 = catalog.symmetric_star(3).group


def sign(group, field, elements, odd):
    one = Matrix.identity(field, 1)
    return Representation(
        group, field, 1, {g: -one if g in odd else one for g in elements}, tuple(elements)
    )


def regular_c2(field):
    return induce(C2, [0], trivial_representation(C2, field, elements=[0])).rep


def test_regular_representation(Q):
    rho = regular_c2(Q)
    validate_representation(rho)
    assert rho.dim == 2
    assert [Q.format_scalar(x) for x in character(rho)] == ["2", "0"]
    assert commutant_dim(rho) == 2


def test_induce_from_a_transposition(Q):
    induced = induce(S3, [0, 1], sign(S3, Q, [0, 1], {1}))
    validate_representation(induced.rep)
    assert induced.rep.dim == 3
    assert len(induced.transversal) == 3
    assert induced.transversal[0] == 0
    assert character(induced.rep)[0] == Q.scalar(3)


def test_induce_needs_a_subgroup(Q):
    with pytest.raises(GroupError):
        induce(S3, [0, 1, 2], trivial_representation(S3, Q, elements=[0, 1, 2]))


def test_regular_is_trivial_plus_sign(Q):
    rho = regular_c2(Q)
    other = direct_sum(trivial_representation(C2, Q), sign(C2, Q, [0, 1], {1}))
    result = is_isomorphic(rho, other)
    assert result.verdict == Verdict.YES
    assert result.intertwiner.is_invertible()
    assert is_intertwiner(rho, other, result.intertwiner)


def test_trivial_and_sign(Q):
    trivial = trivial_representation(C2, Q)
    assert is_isomorphic(trivial, sign(C2, Q, [0, 1], {1})).verdict == Verdict.NO
    assert is_isomorphic(trivial, regular_c2(Q)).verdict == Verdict.NO
    f3 = FieldSpec.parse("Fp:3")
    result = is_isomorphic(trivial_representation(C2, f3), sign(C2, f3, [0, 1], {1}))
    assert result.verdict == Verdict.NO
    # -1 = 1 in characteristic two
    f2 = FieldSpec.parse("Fp:2")
    result = is_isomorphic(trivial_representation(C2, f2), sign(C2, f2, [0, 1], {1}))
    assert result.verdict == Verdict.YES


def test_isomorphism_over_a_large_prime():
    field = FieldSpec.parse("Fp:10007")
    trivial = trivial_representation(C2, field)
    mixed = direct_sum(trivial, sign(C2, field, [0, 1], {1}))
    result = is_isomorphic(direct_sum(trivial, trivial), mixed)
    assert result.verdict == Verdict.NO
    assert result.reason == "characters differ"
    result = is_isomorphic(regular_c2(field), mixed)
    assert result.verdict == Verdict.YES
    assert is_intertwiner(regular_c2(field), mixed, result.intertwiner)


def test_full_search_respects_the_size_limit():
    # equal characters in characteristic two, but every intertwiner is singular
    f2 = FieldSpec.parse("Fp:2")
    trivial = trivial_representation(C2, f2)
    pair = direct_sum(trivial, trivial)
    result = is_isomorphic(pair, regular_c2(f2))
    assert result.verdict == Verdict.NO
    assert "exhaustive" in result.reason
    result = is_isomorphic(pair, regular_c2(f2), enumeration_limit=3)
    assert result.verdict == Verdict.INCONCLUSIVE
    result = is_isomorphic(pair, regular_c2(f2), enumeration_exponent=1)
    assert result.verdict == Verdict.INCONCLUSIVE


@pytest.mark.parametrize("field_name", ["Q", "Fp:3", "Fp:2"])
def test_regular_is_reducible(field_name):
    field = FieldSpec.parse(field_name)
    rho = regular_c2(field)
    result = is_irreducible(rho)
    assert result.verdict == Verdict.NO
    assert result.witness.dim == 1
    assert is_invariant(rho, result.witness)


def test_standard_representation_is_irreducible(star3_es):
    rho = rep_on_h0(star3_es)
    result = is_irreducible(rho)
    assert result.verdict == Verdict.YES
    assert commutant_dim(rho) == 1


def test_small_dimensions(Q):
    assert is_irreducible(trivial_representation(C2, Q)).verdict == Verdict.YES
    assert is_irreducible(trivial_representation(C2, Q, dim=0)).verdict == Verdict.NO


def test_spin(Q):
    rho = regular_c2(Q)
    assert spin(rho, [[Q.one, Q.zero]]).is_full()
    assert spin(rho, [[Q.one, Q.one]]).dim == 1


def test_generators_and_restriction(Q):
    assert generators(S3, S3.elements) == [1, 2]
    assert generators(S3, [0, 4, 5]) == [4]
    rho = restrict(trivial_representation(S3, Q), [0, 4, 5])
    assert rho.elements == (0, 4, 5)
    with pytest.raises(GroupError):
        restrict(rho, [0, 1])


def test_different_dimensions(Q):
    result = is_isomorphic(trivial_representation(C2, Q), regular_c2(Q))
    assert result.verdict == Verdict.NO
    assert result.reason == "dimensions differ"


C3 = catalog.cyclic_star(3).group
D4 = catalog.square_star().group


def cyclic_subgroup(group, g):
    powers, x = [0], g
    while x != 0:
        powers.append(x)
        x = group.mul[x][g]
    return sorted(powers)


def element_of_order(group, order):
    return next(g for g in group.elements if group.element_order(g) == order)


def permutation_reps(group, field):
    """Ind of the trivial representation from every cyclic subgroup, one per subgroup."""
    subgroups = sorted({tuple(cyclic_subgroup(group, g)) for g in group.elements})
    return [
        induce(group, k, trivial_representation(group, field, elements=k)).rep
        for k in subgroups
    ]


def test_induce_to_an_intermediate_subgroup(Q):
    rotations = cyclic_subgroup(S3, 4)
    trivial = trivial_representation(S3, Q, elements=[0])
    inner = induce(S3, [0], trivial, ambient=rotations)
    validate_representation(inner.rep)
    assert inner.rep.elements == tuple(rotations)
    assert inner.rep.dim == 3
    with pytest.raises(GroupError):
        induce(S3, [0, 1], sign(S3, Q, [0, 1], {1}), ambient=rotations)


def _stages(group, field):
    """(K, H, sigma) with K inside H inside the group and sigma a character of K."""
    if group is D4:
        turn = element_of_order(D4, 4)
        h = cyclic_subgroup(D4, turn)
        half = D4.mul[turn][turn]
        return [
            ([0, half], h, sign(D4, field, [0, half], {half})),
            ([0, half], h, trivial_representation(D4, field, elements=[0, half])),
            ([0], h, trivial_representation(D4, field, elements=[0])),
        ]
    rotations = cyclic_subgroup(S3, 4)
    return [
        ([0], rotations, trivial_representation(S3, field, elements=[0])),
        ([0], [0, 1], trivial_representation(S3, field, elements=[0])),
        ([0, 1], [0, 1], sign(S3, field, [0, 1], {1})),
    ]


@pytest.mark.parametrize("group", [S3, D4], ids=["S3", "D4"])
@pytest.mark.parametrize("field_name", ["Q", "Fp:7"])
def test_induction_in_stages(group, field_name):
    field = FieldSpec.parse(field_name)
    for k, h, sigma in _stages(group, field):
        direct = induce(group, k, sigma).rep
        inner = induce(group, k, sigma, ambient=h).rep
        staged = induce(group, h, inner).rep
        validate_representation(staged)
        assert staged.dim == direct.dim
        assert character(staged) == character(direct)
        result = is_isomorphic(staged, direct)
        assert result.verdict == Verdict.YES
        assert is_intertwiner(staged, direct, result.intertwiner)


@pytest.mark.parametrize("group", [C2, C3, S3, D4], ids=["C2", "C3", "S3", "D4"])
def test_isomorphic_exactly_when_characters_agree(group, Q):
    reps = permutation_reps(group, Q)
    reps.append(trivial_representation(group, Q, dim=2))
    for i, rho in enumerate(reps):
        for other in reps[i:]:
            if rho.dim != other.dim:
                continue
            result = is_isomorphic(rho, other)
            same = character(rho) == character(other)
            assert (result.verdict == Verdict.YES) == same
            assert result.verdict != Verdict.INCONCLUSIVE
            if same:
                assert is_intertwiner(rho, other, result.intertwiner)
                assert result.intertwiner.is_invertible()


def leaf_permutation_rep(action, field):
    """The permutation representation of the group on the leaves of a star."""
    n = action.tree.n_vertices - 1
    matrices = {}
    for g in action.group.elements:
        perm = action.vertex_perms[g]
        rows = [[0] * n for _ in range(n)]
        for leaf in range(1, n + 1):
            rows[perm[leaf] - 1][leaf - 1] = 1
        matrices[g] = Matrix.from_rows(field, rows, cols=n)
    return Representation(action.group, field, n, matrices, tuple(action.group.elements))


def test_permutation_rep_is_trivial_plus_standard(Q, star3_es):
    perm = leaf_permutation_rep(catalog.symmetric_star(3), Q)
    validate_representation(perm)
    standard = rep_on_h0(star3_es)
    target = direct_sum(trivial_representation(S3, Q), standard)
    assert [Q.format_scalar(x) for x in character(perm)] == ["3", "1", "1", "1", "0", "0"]
    result = is_isomorphic(perm, target)
    assert result.verdict == Verdict.YES
    assert is_intertwiner(perm, target, result.intertwiner)
    assert is_irreducible(standard).verdict == Verdict.YES
    assert is_irreducible(perm).verdict == Verdict.NO
