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
"""Named instances used by the test-suite and the ``fixture`` command."""

from sheaftree import catalog
from sheaftree.equivariant import EquivariantSheaf
from sheaftree.error import ValidationError
from sheaftree.exactla import FieldSpec, Matrix
from sheaftree.sheaf import Sheaf, constant_sheaf
from sheaftree.tree import Tree

Q = FieldSpec.parse("Q")


def _identity_eta(action, sheaf, vertex_maps=None):
    """Identity stalk maps everywhere except where ``vertex_maps(g, v)`` says otherwise."""
    field = sheaf.field
    eta_v, eta_e = {}, {}
    for g in action.group.elements:
        for v, d in enumerate(sheaf.vdim):
            m = vertex_maps(g, v) if vertex_maps is not None else None
            eta_v[(g, v)] = m if m is not None else Matrix.identity(field, d)
        for e, d in enumerate(sheaf.edim):
            eta_e[(g, e)] = Matrix.identity(field, d)
    return eta_v, eta_e


def _equivariant(sheaf, action, vertex_maps=None):
    eta_v, eta_e = _identity_eta(action, sheaf, vertex_maps)
    return EquivariantSheaf.build(sheaf, action, eta_v, eta_e)


def _leaf_permutation(action, g):
    """The permutation of leaf indices 0..k-1 induced by g on a star."""
    perm = action.vertex_perms[g]
    return [perm[i + 1] - 1 for i in range(len(perm) - 1)]


def _star_sheaf(field, k, centre_dim, leaf_dim=1):
    """Centre restrictions zero, leaf restrictions the identity."""
    tree = catalog.star_tree(k)
    vdim = [centre_dim] + [leaf_dim] * k
    edim = [leaf_dim] * k
    gamma = {}
    for e in range(k):
        gamma[(0, e)] = Matrix.zeros(field, leaf_dim, centre_dim)
        gamma[(e + 1, e)] = Matrix.identity(field, leaf_dim)
    return Sheaf.build(tree, field, vdim, edim, gamma)


def edge():
    action = catalog.path_reflection(2)
    return _equivariant(constant_sheaf(action.tree, Q), action)


def star3_elliptic():
    """S3 on the 3-star, the centre carrying the sum-zero plane of Q^3."""
    action = catalog.symmetric_star(3)
    sheaf = _star_sheaf(Q, 3, 2, leaf_dim=0)

    def centre(g, v):
        if v != 0:
            return None
        pi = _leaf_permutation(action, g)
        columns = []
        # basis (1, -1, 0), (0, 1, -1); w has coordinates (w0, w0 + w1)
        for u in ((1, -1, 0), (0, 1, -1)):
            w = [0, 0, 0]
            for i in range(3):
                w[pi[i]] = u[i]
            columns.append((w[0], w[0] + w[1]))
        return Matrix.from_columns(Q, columns, 2)

    return _equivariant(sheaf, action, centre)


def path3_multifacial():
    tree = catalog.path_tree(3)
    gamma = {
        (0, 0): Matrix.zeros(Q, 1, 0),
        (1, 0): Matrix.identity(Q, 1),
        (1, 1): Matrix.identity(Q, 1),
        (2, 1): Matrix.zeros(Q, 1, 0),
    }
    return Sheaf.build(tree, Q, [0, 1, 0], [1, 1], gamma)


def c3_star_character():
    """C3 on the 3-star over F7, the centre carrying r^k -> 2^k."""
    field = FieldSpec.parse("Fp:7")
    action = catalog.cyclic_star(3)
    group = action.group
    sheaf = _star_sheaf(field, 3, 1)
    powers = {}
    x = 0
    for k in range(group.order):
        powers[x] = k
        x = group.mul[x][1]

    def centre(g, v):
        if v != 0:
            return None
        return Matrix.from_rows(field, [[2 ** powers[g]]])

    return _equivariant(sheaf, action, centre)


def c3_star_constant():
    action = catalog.cyclic_star(3)
    return _equivariant(constant_sheaf(action.tree, Q), action)


def path3_flip():
    action = catalog.path_reflection(3)
    return _equivariant(constant_sheaf(action.tree, Q), action)


def d4_star4():
    """D4 on the 4-star, the centre carrying the plane in which the square lives."""
    action = catalog.square_star()
    sheaf = _star_sheaf(Q, 4, 2)
    corners = [(1, 0), (0, 1), (-1, 0), (0, -1)]

    def centre(g, v):
        if v != 0:
            return None
        pi = _leaf_permutation(action, g)
        return Matrix.from_columns(Q, [corners[pi[0]], corners[pi[1]]], 2)

    return _equivariant(sheaf, action, centre)


def star2_reversed():
    """C2 swapping the leaves of a 2-star whose second edge points at the centre."""
    tree = Tree.build(3, [(0, 0, 1), (1, 2, 0)])
    action = catalog.action_from_permutations(tree, [[0, 2, 1]])
    return _equivariant(constant_sheaf(tree, Q), action)


def edge_reducible():
    """The edge with 2-dimensional stalks on which the swap acts by exchanging coordinates."""
    action = catalog.path_reflection(2)
    sheaf = constant_sheaf(action.tree, Q, dim=2)
    swap = Matrix.from_rows(Q, [[0, 1], [1, 0]])
    eta_v, eta_e = {}, {}
    for g in action.group.elements:
        m = swap if g else Matrix.identity(Q, 2)
        eta_v.update({(g, v): m for v in range(2)})
        eta_e[(g, 0)] = m
    return EquivariantSheaf.build(sheaf, action, eta_v, eta_e)


FIXTURES = {
    "edge": edge,
    "star3-ell": star3_elliptic,
    "path3-multi": path3_multifacial,
    "c3-star-f7": c3_star_character,
    "c3-star-constant": c3_star_constant,
    "path3-flip": path3_flip,
    "d4-star4": d4_star4,
    "star2-reversed": star2_reversed,
    "edge-reducible": edge_reducible,
}


def build_fixture(name):
    """The named fixture as ``(sheaf, equivariant sheaf or None)``."""
    try:
        builder = FIXTURES[name]
    except KeyError:
        raise ValidationError(
            "UnknownFixture", f"No fixture named {name!r}; known: {', '.join(FIXTURES)}"
        ) from None
    built = builder()
    if isinstance(built, EquivariantSheaf):
        return built.sheaf, built
    return built, None
