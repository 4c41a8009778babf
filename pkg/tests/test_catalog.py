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

from sheaftree import catalog, fixtures
from sheaftree.error import ValidationError


def test_catalog_respects_the_vertex_bound():
    assert catalog.catalog(1) == []
    names = [entry.name for entry in catalog.catalog(3)]
    assert names == ["c2-path-2", "c2-path-3", "c2-binary-1", "c2-star-2"]
    for entry in catalog.catalog(7):
        assert entry.tree.n_vertices <= 7


def test_catalog_groups():
    orders = {entry.name: entry.action.group.order for entry in catalog.catalog(5)}
    assert orders["c3-star-3"] == 3
    assert orders["s3-star-3"] == 6
    assert orders["d4-star-4"] == 8
    assert orders["c2-path-5"] == 2


@pytest.mark.parametrize("entry", catalog.catalog(8), ids=lambda entry: entry.name)
def test_left_action_convention(entry):
    action = entry.action
    group = action.group
    assert action.vertex_perms[0] == tuple(range(action.tree.n_vertices))
    for g in group.elements:
        for h in group.elements:
            gh = group.multiply(g, h)
            for v in action.tree.vertices:
                assert action.act_vertex(gh, v) == action.act_vertex(g, action.act_vertex(h, v))


def test_binary_mirror():
    action = catalog.binary_mirror(2)
    assert action.vertex_perms[1] == (0, 2, 1, 6, 5, 4, 3)
    assert action.edge_perms[1] == (1, 0, 5, 4, 3, 2)


def test_star_numbering():
    tree = catalog.star_tree(3)
    assert [e.endpoints for e in tree.edges] == [(0, 1), (0, 2), (0, 3)]
    action = catalog.cyclic_star(3)
    assert action.vertex_perms[1] == (0, 2, 3, 1)


def test_unknown_fixture():
    with pytest.raises(ValidationError) as excinfo:
        fixtures.build_fixture("no-such-thing")
    assert excinfo.value.kind == "UnknownFixture"


def test_plain_fixture_has_no_group():
    sheaf, es = fixtures.build_fixture("path3-multi")
    assert es is None
    assert sheaf.vdim == (0, 1, 0)
