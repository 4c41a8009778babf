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
"""Finite groups acting on trees, equivariant structures, and the actions on cohomology.

A group is a multiplication table with 0 as identity and ``mul[g][h] = gh``. It acts
on the left: ``perm(gh) = perm(g) o perm(h)``. On vertex cochains g moves the stalk
at v to the stalk at gv through eta. On edge cochains it does the same, times -1
when g reverses the orientation of the edge; without that sign the coboundary is
not equivariant.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

from sheaftree.error import (
    ActionError,
    EquivarianceBroken,
    GroupError,
    InternalAssertion,
    NotInvariant,
)
from sheaftree.exactla import Matrix
from sheaftree.sheaf import Sheaf

logger = logging.getLogger("sheaftree")

VERTEX = "vertex"
EDGE = "edge"


@dataclass(frozen=True)
class GroupTable:
    order: int
    mul: tuple

    @classmethod
    def build(cls, table):
        group = cls(len(table), tuple(tuple(int(x) for x in row) for row in table))
        validate_group(group)
        return group

    @classmethod
    def trivial(cls):
        return cls(1, ((0,),))

    @property
    def elements(self):
        return list(range(self.order))

    @cached_property
    def inv(self):
        inverses = []
        for g in range(self.order):
            inverses.append(next(h for h in range(self.order) if self.mul[g][h] == 0))
        return tuple(inverses)

    def multiply(self, g, h):
        return self.mul[g][h]

    def inverse(self, g):
        return self.inv[g]

    def element_order(self, g):
        k, x = 1, g
        while x != 0:
            x = self.mul[x][g]
            k += 1
        return k

    def is_subgroup(self, elements):
        elements = set(elements)
        if 0 not in elements:
            return False
        return all(self.mul[a][b] in elements for a in elements for b in elements) and all(
            self.inv[a] in elements for a in elements
        )


def validate_group(group):
    n = group.order
    if n < 1:
        raise GroupError("EmptyGroup", "a group has at least the identity")
    if len(group.mul) != n or any(len(row) != n for row in group.mul):
        raise GroupError("ShapeMismatch", f"multiplication table must be {n}x{n}")
    for g, row in enumerate(group.mul):
        if sorted(row) != list(range(n)):
            raise GroupError(
                "NotLatinSquare", f"row {g} of the table is not a permutation", ids=(g,)
            )
    for g in range(n):
        if group.mul[0][g] != g or group.mul[g][0] != g:
            raise GroupError("IdentityLaw", f"0 is not an identity for {g}", ids=(g,))
    for g in range(n):
        h = group.inv[g]
        if group.mul[h][g] != 0:
            raise GroupError("InverseLaw", f"{g} has no two-sided inverse", ids=(g,))
    mul = group.mul
    for a in range(n):
        for b in range(n):
            ab = mul[a][b]
            for c in range(n):
                if mul[ab][c] != mul[a][mul[b][c]]:
                    raise GroupError(
                        "NotAssociative", f"({a}{b}){c} != {a}({b}{c})", ids=(a, b, c)
                    )


@dataclass(frozen=True)
class TreeAction:
    tree: object
    group: GroupTable
    vertex_perms: tuple
    edge_perms: tuple

    @classmethod
    def build(cls, tree, group, vertex_perms, edge_perms):
        action = cls(
            tree,
            group,
            tuple(tuple(p) for p in vertex_perms),
            tuple(tuple(p) for p in edge_perms),
        )
        validate_tree_action(action)
        return action

    @classmethod
    def trivial(cls, tree):
        return cls(
            tree,
            GroupTable.trivial(),
            (tuple(range(tree.n_vertices)),),
            (tuple(range(tree.n_edges)),),
        )

    def act_vertex(self, g, v):
        return self.vertex_perms[g][v]

    def act_edge(self, g, e):
        return self.edge_perms[g][e]

    def act(self, g, kind, cell):
        return self.act_vertex(g, cell) if kind == VERTEX else self.act_edge(g, cell)

    def osgn(self, g, e):
        """+1 if g carries the first endpoint of e to the first endpoint of ge."""
        edge = self.tree.edge(e)
        image = self.tree.edge(self.edge_perms[g][e])
        return 1 if self.vertex_perms[g][edge.x] == image.x else -1


def validate_tree_action(action):
    t, group = action.tree, action.group
    if len(action.vertex_perms) != group.order or len(action.edge_perms) != group.order:
        raise ActionError("ShapeMismatch", "one vertex and one edge permutation per element")
    for g in range(group.order):
        if sorted(action.vertex_perms[g]) != t.vertices:
            raise ActionError(
                "NotPermutation", f"element {g} does not permute the vertices", ids=(g,)
            )
        if sorted(action.edge_perms[g]) != t.edge_ids:
            raise ActionError(
                "NotPermutation", f"element {g} does not permute the edges", ids=(g,)
            )
    for g in range(group.order):
        for h in range(group.order):
            gh = group.mul[g][h]
            vg, vh, vgh = action.vertex_perms[g], action.vertex_perms[h], action.vertex_perms[gh]
            eg, eh, egh = action.edge_perms[g], action.edge_perms[h], action.edge_perms[gh]
            if any(vgh[v] != vg[vh[v]] for v in t.vertices) or any(
                egh[e] != eg[eh[e]] for e in t.edge_ids
            ):
                raise ActionError(
                    "NotHomomorphism", f"perm({g}{h}) != perm({g}) o perm({h})", ids=(g, h)
                )
    for g in range(group.order):
        for e in t.edges:
            image = t.edge(action.edge_perms[g][e.id])
            moved = {action.vertex_perms[g][e.x], action.vertex_perms[g][e.y]}
            if moved != {image.x, image.y}:
                raise ActionError(
                    "IncidenceBroken",
                    f"element {g} sends edge {e.id} to {image.id} but its endpoints elsewhere",
                    ids=(g, e.id),
                )


@dataclass(frozen=True, eq=False)
class Representation:
    """A matrix representation of the subgroup ``elements`` of ``group``."""

    group: GroupTable
    field: object
    dim: int
    matrices: dict
    elements: tuple = ()

    def __post_init__(self):
        if not self.elements:
            object.__setattr__(self, "elements", tuple(sorted(self.matrices)))

    def __call__(self, g):
        return self.matrices[g]

    def is_whole_group(self):
        return len(self.elements) == self.group.order

    def as_dict(self):
        return {
            "dim": self.dim,
            "elements": list(self.elements),
            "matrices": {str(g): self.matrices[g].to_strings() for g in self.elements},
        }


def validate_representation(rho):
    group, field = rho.group, rho.field
    if not group.is_subgroup(rho.elements):
        raise InternalAssertion("NotASubgroup", f"{list(rho.elements)} is not a subgroup")
    identity = Matrix.identity(field, rho.dim)
    if rho(0) != identity:
        raise InternalAssertion("NotARepresentation", "the identity does not act trivially")
    for g in rho.elements:
        for h in rho.elements:
            if rho(g) @ rho(h) != rho(group.mul[g][h]):
                raise InternalAssertion(
                    "NotARepresentation", f"rho({g})rho({h}) != rho({g}{h})", ids=(g, h)
                )


@dataclass(frozen=True, eq=False)
class EquivariantSheaf:
    sheaf: Sheaf
    action: TreeAction
    # (g, v) -> stalk map S_v -> S_gv
    eta_v: dict
    # (g, e) -> stalk map S_e -> S_ge
    eta_e: dict

    @property
    def group(self):
        return self.action.group

    @property
    def tree(self):
        return self.sheaf.tree

    @property
    def field(self):
        return self.sheaf.field

    @classmethod
    def build(cls, sheaf, action, eta_v, eta_e):
        es = cls(sheaf, action, dict(eta_v), dict(eta_e))
        validate_action(es)
        return es

    @classmethod
    def with_trivial_group(cls, sheaf):
        action = TreeAction.trivial(sheaf.tree)
        field = sheaf.field
        return cls(
            sheaf,
            action,
            {(0, v): Matrix.identity(field, d) for v, d in enumerate(sheaf.vdim)},
            {(0, e): Matrix.identity(field, d) for e, d in enumerate(sheaf.edim)},
        )

    def eta(self, g, kind, cell):
        return self.eta_v[(g, cell)] if kind == VERTEX else self.eta_e[(g, cell)]

    def dim(self, kind, cell):
        return self.sheaf.vdim[cell] if kind == VERTEX else self.sheaf.edim[cell]

    def cells(self):
        return [(VERTEX, v) for v in self.tree.vertices] + [
            (EDGE, e) for e in self.tree.edge_ids
        ]

    @cached_property
    def vertex_cochain_matrices(self):
        return {g: vertex_cochain_action(self, g) for g in self.group.elements}

    @cached_property
    def edge_cochain_matrices(self):
        return {g: edge_cochain_action(self, g) for g in self.group.elements}


def _check_eta(es):
    field = es.field
    for g in es.group.elements:
        for kind, cell in es.cells():
            key = (g, cell)
            table = es.eta_v if kind == VERTEX else es.eta_e
            if key not in table:
                raise ActionError(
                    "MissingEta", f"no stalk map for element {g} on {kind} {cell}", ids=key
                )
            m = table[key]
            expected = (es.dim(kind, es.action.act(g, kind, cell)), es.dim(kind, cell))
            if m.field != field or m.shape != expected:
                raise ActionError(
                    "ShapeMismatch",
                    f"stalk map for element {g} on {kind} {cell} is {m.shape} over "
                    f"{m.field}, expected {expected} over {field}",
                    ids=key,
                )


def validate_action(es):
    """Check the tree action and the three families of equivariance axioms exhaustively."""
    validate_tree_action(es.action)
    if es.action.tree != es.tree:
        raise ActionError("TreeMismatch", "the action and the sheaf live on different trees")
    _check_eta(es)
    group, action, s = es.group, es.action, es.sheaf
    for kind, cell in es.cells():
        if es.eta(0, kind, cell) != Matrix.identity(es.field, es.dim(kind, cell)):
            raise ActionError(
                "EtaIdentity", f"the identity does not act trivially on {kind} {cell}", ids=(cell,)
            )
    for g in group.elements:
        for h in group.elements:
            gh = group.mul[g][h]
            for kind, cell in es.cells():
                hc = action.act(h, kind, cell)
                if es.eta(g, kind, hc) @ es.eta(h, kind, cell) != es.eta(gh, kind, cell):
                    raise ActionError(
                        "EtaComposition",
                        f"eta({g}) o eta({h}) != eta({g}{h}) on {kind} {cell}",
                        ids=(g, h, cell),
                    )
    for g in group.elements:
        for (v, e), gamma in sorted(s.gamma.items()):
            gv, ge = action.act_vertex(g, v), action.act_edge(g, e)
            if s.gamma[(gv, ge)] @ es.eta_v[(g, v)] != es.eta_e[(g, e)] @ gamma:
                raise ActionError(
                    "EtaGammaSquare",
                    f"element {g} does not commute with the restriction {v}:{e}",
                    ids=(g, v, e),
                )
    check_coboundary_equivariance(es)


def vertex_cochain_action(es, g):
    s, action = es.sheaf, es.action
    blocks = {(action.act_vertex(g, v), v): es.eta_v[(g, v)] for v in es.tree.vertices}
    return Matrix.block(es.field, s.vdim, s.vdim, blocks)


def edge_cochain_action(es, g, signed=True):
    s, action = es.sheaf, es.action
    blocks = {}
    for e in es.tree.edge_ids:
        eta = es.eta_e[(g, e)]
        if signed and action.osgn(g, e) < 0:
            eta = -eta
        blocks[(action.act_edge(g, e), e)] = eta
    return Matrix.block(es.field, s.edim, s.edim, blocks)


def check_coboundary_equivariance(es, signed=True):
    delta = es.sheaf.coboundary
    for g in es.group.elements:
        rho0 = es.vertex_cochain_matrices[g]
        rho1 = (
            es.edge_cochain_matrices[g] if signed else edge_cochain_action(es, g, signed=False)
        )
        if delta @ rho0 != rho1 @ delta:
            raise EquivarianceBroken(
                "EquivarianceBroken",
                f"the coboundary does not intertwine the action of element {g}",
                ids=(g,),
            )


def orbits(action, kind):
    """(representative, members) per orbit, representatives the least ids, ascending."""
    cells = action.tree.vertices if kind == VERTEX else action.tree.edge_ids
    seen, result = set(), []
    for c in cells:
        if c in seen:
            continue
        members = sorted({action.act(g, kind, c) for g in action.group.elements})
        seen.update(members)
        result.append((c, members))
    return result


def stabilizer(action, kind, cell):
    cells = action.tree.vertices if kind == VERTEX else action.tree.edge_ids
    if cell not in cells:
        raise ActionError("UnknownCell", f"no {kind} with id {cell}", ids=(cell,))
    return [g for g in action.group.elements if action.act(g, kind, cell) == cell]


def orientation_character(action, e):
    """+1 on stabilizer elements fixing both endpoints of e, -1 on those swapping them."""
    return {g: action.osgn(g, e) for g in stabilizer(action, EDGE, e)}


def restrict_on_subspace(field, group, matrices, space, elements=None):
    """Matrices of the action restricted to an invariant subspace, in its stored basis."""
    elements = list(elements if elements is not None else group.elements)
    result = {}
    for g in elements:
        columns = []
        for b in space.vectors():
            coords = space.coordinates(matrices[g].apply(b))
            if coords is None:
                raise NotInvariant(
                    "NotInvariant", f"element {g} moves a vector out of the subspace", ids=(g,)
                )
            columns.append(coords)
        result[g] = Matrix.from_columns(field, columns, space.dim)
    return Representation(group, field, space.dim, result, tuple(elements))


def rep_on_h0(es):
    h0 = es.sheaf.cohomology.h0
    rho = restrict_on_subspace(es.field, es.group, es.vertex_cochain_matrices, h0)
    logger.debug("Action on H^0 has dimension %d", rho.dim)
    return rho


def rep_on_h1(es, signed=True):
    check_coboundary_equivariance(es, signed=signed)
    coh = es.sheaf.cohomology
    matrices = {}
    for g in es.group.elements:
        rho1 = (
            es.edge_cochain_matrices[g] if signed else edge_cochain_action(es, g, signed=False)
        )
        matrices[g] = coh.h1_proj @ rho1 @ coh.h1_section
    return Representation(es.group, es.field, coh.h1_dim, matrices, tuple(es.group.elements))


def _transport_structure(es, sheaf, vertex_map, edge_map):
    eta_v, eta_e = {}, {}
    for g in es.group.elements:
        for v in es.tree.vertices:
            eta_v[(g, v)] = vertex_map(g, v, es.action.act_vertex(g, v))
        for e in es.tree.edge_ids:
            eta_e[(g, e)] = edge_map(g, e, es.action.act_edge(g, e))
    return EquivariantSheaf.build(sheaf, es.action, eta_v, eta_e)


def _restricted_stalk_map(field, eta, source, target, where):
    columns = []
    for b in source.vectors():
        coords = target.coordinates(eta.apply(b))
        if coords is None:
            raise NotInvariant("NotInvariant", f"the subsheaf is not invariant at {where}")
        columns.append(coords)
    return Matrix.from_columns(field, columns, target.dim)


def restrict_to_subsheaf(es, sub, sub_sheaf):
    """Equivariant structure on an invariant subsheaf, given as a sheaf in its own bases."""
    field = es.field
    return _transport_structure(
        es,
        sub_sheaf,
        lambda g, v, gv: _restricted_stalk_map(
            field, es.eta_v[(g, v)], sub.vertex_spaces[v], sub.vertex_spaces[gv], (g, VERTEX, v)
        ),
        lambda g, e, ge: _restricted_stalk_map(
            field, es.eta_e[(g, e)], sub.edge_spaces[e], sub.edge_spaces[ge], (g, EDGE, e)
        ),
    )


def pass_to_quotient(es, sub, quotient):
    """Equivariant structure on the quotient by an invariant subsheaf."""
    for g in es.group.elements:
        for kind, cell in es.cells():
            spaces = sub.vertex_spaces if kind == VERTEX else sub.edge_spaces
            target = spaces[es.action.act(g, kind, cell)]
            image = spaces[cell].image(es.eta(g, kind, cell))
            if not target.contains_subspace(image):
                raise NotInvariant(
                    "NotInvariant",
                    f"element {g} moves the subsheaf at {kind} {cell}",
                    ids=(g, cell),
                )
    p = quotient.projection
    return _transport_structure(
        es,
        quotient.sheaf,
        lambda g, v, gv: p.vertex_maps[gv] @ es.eta_v[(g, v)] @ quotient.vertex_sections[v],
        lambda g, e, ge: p.edge_maps[ge] @ es.eta_e[(g, e)] @ quotient.edge_sections[e],
    )
