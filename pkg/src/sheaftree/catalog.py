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
"""Built-in trees and group actions on them.

Groups come from ``sympy.combinatorics`` permutation groups acting on vertices.
Elements are numbered identity first, then by order, then by the image list of
the vertex permutation, so the numbering does not depend on sympy's internals.
"""

import functools
from dataclasses import dataclass

from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.named_groups import CyclicGroup, DihedralGroup, SymmetricGroup

from sheaftree.equivariant import GroupTable, TreeAction
from sheaftree.tree import Tree


def path_tree(n):
    return Tree.build(n, [(i, i, i + 1) for i in range(n - 1)])


def star_tree(k):
    """Centre 0, leaves 1..k, edge i joining 0 to leaf i + 1."""
    return Tree.build(k + 1, [(i, 0, i + 1) for i in range(k)])


def binary_tree(depth):
    """Complete binary tree in heap order; edge c - 1 runs from the parent to child c."""
    n = 2 ** (depth + 1) - 1
    return Tree.build(n, [(c - 1, (c - 1) // 2, c) for c in range(1, n)])


def _sorted_elements(group):
    return sorted(group.elements, key=lambda p: (p.order(), p.array_form))


def action_from_permutations(tree, generators):
    """The action of the group generated by vertex permutations of ``tree``."""
    n = tree.n_vertices
    perms = [Permutation(list(g), size=n) for g in generators] or [Permutation(n - 1)]
    elements = _sorted_elements(PermutationGroup(perms))
    index = {tuple(p.array_form): i for i, p in enumerate(elements)}
    # sympy's h * g applies h first, so it is the composite g o h
    table = [[index[tuple((h * g).array_form)] for h in elements] for g in elements]
    group = GroupTable.build(table)
    vertex_perms = [list(p.array_form) for p in elements]
    edge_perms = [
        [tree.edge_between(p[e.x], p[e.y]) for e in tree.edges] for p in vertex_perms
    ]
    return TreeAction.build(tree, group, vertex_perms, edge_perms)


def trivial_action(tree):
    return action_from_permutations(tree, [])


def path_reflection(n):
    tree = path_tree(n)
    return action_from_permutations(tree, [[n - 1 - v for v in range(n)]])


def binary_mirror(depth):
    tree = binary_tree(depth)
    mirror = []
    for v in range(tree.n_vertices):
        level = (v + 1).bit_length() - 1
        first = 2**level - 1
        mirror.append(first + (2**level - 1 - (v - first)))
    return action_from_permutations(tree, [mirror])


def star_action(k, leaf_group):
    """Lift a permutation group on k points to the k-star, point i being leaf i + 1."""
    generators = [[0] + [p.array_form[i] + 1 for i in range(k)] for p in leaf_group.generators]
    return action_from_permutations(star_tree(k), generators)


def leaf_swap(k=2):
    return star_action(k, PermutationGroup([Permutation([1, 0] + list(range(2, k)))]))


def cyclic_star(k=3):
    return star_action(k, CyclicGroup(k))


def symmetric_star(k=3):
    return star_action(k, SymmetricGroup(k))


def square_star():
    """D4 on the 4-star, leaves 1..4 being the corners of a square in cyclic order."""
    return star_action(4, DihedralGroup(4))


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    action: TreeAction

    @property
    def tree(self):
        return self.action.tree


@functools.lru_cache
def catalog(max_vertices):
    """Every built-in action whose tree has at most ``max_vertices`` vertices."""
    entries = []
    for n in range(2, min(max_vertices, 12) + 1):
        entries.append(CatalogEntry(f"c2-path-{n}", path_reflection(n)))
    for depth in (1, 2, 3):
        if 2 ** (depth + 1) - 1 <= max_vertices:
            entries.append(CatalogEntry(f"c2-binary-{depth}", binary_mirror(depth)))
    if max_vertices >= 3:
        entries.append(CatalogEntry("c2-star-2", leaf_swap(2)))
    if max_vertices >= 4:
        entries.append(CatalogEntry("c3-star-3", cyclic_star(3)))
        entries.append(CatalogEntry("s3-star-3", symmetric_star(3)))
    if max_vertices >= 5:
        entries.append(CatalogEntry("d4-star-4", square_star()))
    return entries
