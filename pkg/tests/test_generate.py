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
from sheaftree.decompose import elliptic_subsheaf, is_multifacial
from sheaftree.error import InfeasibleConstraint, ValidationError
from sheaftree.exactla import FieldSpec
from sheaftree.generate import (
    GeneratorParams,
    _character,
    random_instance,
    random_subsheaf,
    rng_for,
    search,
)
from sheaftree.instance import serialize_instance
from sheaftree.tree import leaves

Q = FieldSpec.parse("Q")


@pytest.mark.parametrize("equivariant", [False, True])
def test_draws_are_reproducible(equivariant):
    params = GeneratorParams(field=Q, max_vertices=6, equivariant=equivariant)
    first = serialize_instance(*random_instance(11, 3, params))
    second = serialize_instance(*random_instance(11, 3, params))
    assert first == second


@pytest.mark.parametrize(
    "params,error,kind",
    [
        (GeneratorParams(field=Q, constraint="bogus"), ValidationError, "UsageError"),
        (GeneratorParams(field=Q, max_vertices=0), ValidationError, "UsageError"),
        (GeneratorParams(field=Q, leaf_dim=-1), ValidationError, "UsageError"),
        (
            GeneratorParams(field=Q, constraint="multifacial", leaf_dim=1),
            InfeasibleConstraint,
            "InfeasibleConstraint",
        ),
        (
            GeneratorParams(field=Q, max_stalk_dim=2, leaf_dim=3),
            InfeasibleConstraint,
            "InfeasibleConstraint",
        ),
    ],
)
def test_bad_parameters(params, error, kind):
    with pytest.raises(error) as excinfo:
        random_instance(0, 0, params)
    assert excinfo.value.kind == kind


@pytest.mark.parametrize("seed", range(8))
def test_leaf_dimension(seed):
    params = GeneratorParams(field=Q, max_vertices=7, leaf_dim=2)
    s, _ = random_instance(seed, 0, params)
    assert all(s.vdim[v] == 2 for v in leaves(s.tree))


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("field_name", ["Q", "Fp:2"])
def test_no_elliptic_constraint(seed, field_name):
    params = GeneratorParams(
        field=FieldSpec.parse(field_name), max_vertices=7, constraint="no-elliptic"
    )
    s, _ = random_instance(seed, 0, params)
    assert all(w.is_zero() for w in elliptic_subsheaf(s).vertex_spaces)


@pytest.mark.parametrize("seed", range(8))
def test_multifacial_constraint(seed):
    params = GeneratorParams(
        field=FieldSpec.parse("Fp:3"), max_vertices=7, constraint="multifacial"
    )
    s, _ = random_instance(seed, 0, params)
    assert is_multifacial(s)
    assert all(s.vdim[v] == 0 for v in leaves(s.tree))


@pytest.mark.parametrize("seed", range(8))
def test_equivariant_draws_use_the_catalog(seed):
    params = GeneratorParams(field=Q, max_vertices=5, equivariant=True)
    s, es = random_instance(seed, 0, params)
    assert es is not None
    assert es.group.order > 1
    assert s.tree.n_vertices <= 5
    # dimensions are constant on orbits
    for g in es.group.elements:
        for v in s.tree.vertices:
            assert s.vdim[es.action.act_vertex(g, v)] == s.vdim[v]


@pytest.mark.parametrize("seed", range(8))
def test_random_subsheaf_is_closed(seed):
    s, _ = random_instance(seed, 0, GeneratorParams(field=Q, max_vertices=6))
    sub = random_subsheaf(rng_for(seed, "sub"), s)
    sub.check_closed()
    for v, w in enumerate(sub.vertex_spaces):
        assert w.ambient_dim == s.vdim[v]


def test_sign_character_follows_the_vertex_permutation():
    action = catalog.symmetric_star(3)
    assert _character(action, "sign") == {0: 1, 1: -1, 2: -1, 3: -1, 4: 1, 5: 1}
    assert set(_character(action, "trivial").values()) == {1}
    # the quarter turns of the square are 4-cycles on the leaves
    square = catalog.square_star()
    signs = _character(square, "sign")
    group = square.group
    quarter_turns = [g for g in group.elements if group.element_order(g) == 4]
    assert quarter_turns
    assert all(signs[g] == -1 for g in quarter_turns)


def test_search_accepts_the_first_matching_draw():
    params = GeneratorParams(field=Q, max_vertices=4)
    index, s, _ = search("find", params, lambda s, es: s.tree.n_vertices >= 3)
    assert s.tree.n_vertices >= 3
    for earlier in range(index):
        assert random_instance("find", earlier, params)[0].tree.n_vertices < 3


def test_search_exhausted():
    params = GeneratorParams(field=Q, max_vertices=3)
    with pytest.raises(InfeasibleConstraint) as e:
        search(0, params, lambda s, es: False, attempts=3)
    assert e.value.kind == "SearchExhausted"
