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
from test_util import matrix

from sheaftree import catalog
from sheaftree.error import SheafError
from sheaftree.exactla import FieldSpec, Matrix, Subspace
from sheaftree.generate import GeneratorParams, random_instance, random_subsheaf, rng_for
from sheaftree.sheaf import (
    Sheaf,
    ShortExactSeq,
    Subsheaf,
    build_quotient,
    constant_sheaf,
    euler_check,
    les_connecting,
    subsheaf_as_sheaf,
    validate_ses,
    zero_sheaf,
)


def test_coboundary_signs(Q):
    s = constant_sheaf(catalog.path_tree(2), Q)
    assert matrix(s.coboundary) == [["1", "-1"]]


def test_constant_sheaf_has_one_section(Q):
    s = constant_sheaf(catalog.path_tree(5), Q, dim=2)
    coh = s.cohomology
    assert coh.h0_dim == 2
    assert coh.h1_dim == 0
    assert euler_check(s) == (2, 2)


def test_multifacial_path(path3_multi):
    coh = path3_multi.cohomology
    assert coh.h0_dim == 0
    assert coh.h1_dim == 1
    assert euler_check(path3_multi) == (-1, -1)


def test_zero_sheaf(Q):
    s = zero_sheaf(catalog.star_tree(3), Q)
    assert s.is_zero()
    assert s.cohomology.h0_dim == s.cohomology.h1_dim == 0


def test_h1_section_represents_the_basis(path3_multi):
    coh = path3_multi.cohomology
    assert coh.h1_proj @ coh.h1_section == Matrix.identity(path3_multi.field, 1)


def _path2(field, gamma, vdim=(1, 1), edim=(1,)):
    return Sheaf.build(catalog.path_tree(2), field, vdim, edim, gamma)


def test_missing_restriction(Q):
    with pytest.raises(SheafError) as excinfo:
        _path2(Q, {(0, 0): Matrix.identity(Q, 1)})
    assert excinfo.value.kind == "MissingRestriction"
    assert excinfo.value.ids == (1, 0)


def test_restriction_of_the_wrong_shape(Q):
    gamma = {(0, 0): Matrix.zeros(Q, 2, 1), (1, 0): Matrix.identity(Q, 1)}
    with pytest.raises(SheafError) as excinfo:
        _path2(Q, gamma)
    assert excinfo.value.kind == "ShapeMismatch"


def test_restriction_on_a_non_incident_pair(Q):
    tree = catalog.path_tree(3)
    gamma = {pair: Matrix.identity(Q, 1) for pair in tree.incident_pairs()}
    gamma[(0, 1)] = Matrix.identity(Q, 1)
    with pytest.raises(SheafError) as excinfo:
        Sheaf.build(tree, Q, [1, 1, 1], [1, 1], gamma)
    assert excinfo.value.kind == "NotIncident"


def test_restriction_over_another_field(Q, F5):
    gamma = {(0, 0): Matrix.identity(F5, 1), (1, 0): Matrix.identity(Q, 1)}
    with pytest.raises(SheafError) as excinfo:
        _path2(Q, gamma)
    assert excinfo.value.kind == "FieldMismatch"


def test_negative_dimension(Q):
    with pytest.raises(SheafError):
        _path2(Q, {}, vdim=(1, -1))


def test_subsheaf_must_be_closed(Q):
    s = constant_sheaf(catalog.path_tree(2), Q)
    sub = Subsheaf(
        s,
        (Subspace.full(Q, 1), Subspace.zero(Q, 1)),
        (Subspace.zero(Q, 1),),
    )
    with pytest.raises(SheafError) as excinfo:
        sub.check_closed()
    assert excinfo.value.kind == "NotASubsheaf"


def test_quotient_by_a_half_edge(Q):
    s = constant_sheaf(catalog.path_tree(2), Q)
    sub = Subsheaf(
        s,
        (Subspace.full(Q, 1), Subspace.zero(Q, 1)),
        (Subspace.full(Q, 1),),
    )
    a, inclusion = subsheaf_as_sheaf(sub)
    quotient = build_quotient(s, sub)
    assert a.vdim == (1, 0)
    assert quotient.sheaf.vdim == (0, 1)
    assert quotient.sheaf.edim == (0,)
    assert quotient.sheaf.cohomology.h0_dim == 1
    ses = ShortExactSeq(inclusion, quotient.projection)
    validate_ses(ses)
    delta, report = les_connecting(ses)
    assert report.exact
    assert a.cohomology.h0_dim == a.cohomology.h1_dim == 0
    assert delta.shape == (0, 1)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("field_name", ["Q", "Fp:5"])
def test_random_euler_characteristic(seed, field_name):
    params = GeneratorParams(field=FieldSpec.parse(field_name), max_vertices=7)
    s, es = random_instance(seed, 0, params)
    assert es is None
    lhs, rhs = euler_check(s)
    assert lhs == rhs


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("field_name", ["Q", "Fp:3"])
def test_random_long_exact_sequence(seed, field_name):
    params = GeneratorParams(field=FieldSpec.parse(field_name), max_vertices=6)
    s, _ = random_instance(seed, 1, params)
    sub = random_subsheaf(rng_for(seed, "sub"), s)
    _, inclusion = subsheaf_as_sheaf(sub)
    quotient = build_quotient(s, sub)
    _, report = les_connecting(ShortExactSeq(inclusion, quotient.projection))
    assert report.exact, report.as_dict()
