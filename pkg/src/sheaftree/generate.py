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
"""Deterministic random trees, sheaves, equivariant sheaves and subsheaves.

Draw ``i`` under seed ``s`` uses its own ``random.Random(f"{s}:{i}")``, so a draw
can be regenerated alone, with different size bounds, when shrinking a failure.

Sheaf data is drawn one orbit at a time: stalk dimensions are constant on
vertex and edge orbits, and a restriction is drawn once per orbit of incident
(vertex, edge) pairs and copied along the orbit. Every group element then acts
by the same scalar ``chi(g)`` on every stalk, with ``chi`` trivial or the sign of
the vertex permutation. A plain random sheaf is the case of the trivial group.
"""

import dataclasses
import logging
import random

import networkx as nx
from sympy.combinatorics import Permutation

from sheaftree import catalog
from sheaftree.equivariant import EDGE, VERTEX, EquivariantSheaf, orbits, stabilizer
from sheaftree.error import InfeasibleConstraint, ValidationError
from sheaftree.exactla import Matrix, Subspace
from sheaftree.sheaf import Sheaf, Subsheaf
from sheaftree.tree import Tree, incident_edges, leaves

logger = logging.getLogger("sheaftree")

CONSTRAINTS = ("none", "no-elliptic", "multifacial")
CHARACTERS = ("trivial", "sign")
# draws of a restriction block before giving up on full column rank
RANK_ATTEMPTS = 32


@dataclasses.dataclass(frozen=True)
class GeneratorParams:
    field: object
    max_vertices: int = 8
    max_stalk_dim: int = 3
    constraint: str = "none"
    leaf_dim: int | None = None
    equivariant: bool = False

    def check(self):
        if self.constraint not in CONSTRAINTS:
            raise ValidationError(
                "UsageError",
                f"Unknown constraint {self.constraint!r}; choose from {', '.join(CONSTRAINTS)}",
            )
        if self.max_vertices < 1 or self.max_stalk_dim < 0:
            raise ValidationError(
                "UsageError", "max_vertices must be >= 1 and max_stalk_dim >= 0"
            )
        if self.leaf_dim is not None:
            if self.leaf_dim < 0:
                raise ValidationError("UsageError", "leaf_dim must be >= 0")
            if self.constraint == "multifacial" and self.leaf_dim > 0:
                raise InfeasibleConstraint(
                    "InfeasibleConstraint",
                    "a multifacial sheaf has zero leaf stalks; "
                    f"leaf_dim={self.leaf_dim} contradicts it",
                )
            if self.leaf_dim > self.max_stalk_dim:
                raise InfeasibleConstraint(
                    "InfeasibleConstraint",
                    f"leaf_dim={self.leaf_dim} exceeds max_stalk_dim={self.max_stalk_dim}",
                )


def rng_for(seed, index):
    return random.Random(f"{seed}:{index}")


def random_scalar(rng, field):
    if field.is_finite:
        return rng.randrange(field.characteristic)
    return rng.randint(-2, 2)


def random_matrix(rng, field, rows, cols):
    return Matrix.from_rows(
        field, [[random_scalar(rng, field) for _ in range(cols)] for _ in range(rows)], cols
    )


def random_tree(rng, n):
    """A uniformly random labelled tree on n vertices, each edge randomly oriented."""
    if n == 1:
        return Tree.build(1, [])
    if n == 2:
        pairs = [(0, 1)]
    else:
        g = nx.from_prufer_sequence([rng.randrange(n) for _ in range(n - 2)])
        pairs = sorted(tuple(sorted(p)) for p in g.edges)
    triples = []
    for i, (u, v) in enumerate(pairs):
        triples.append((i, u, v) if rng.random() < 0.5 else (i, v, u))
    return Tree.build(n, triples)


def _choose_action(rng, params):
    if params.equivariant:
        entries = catalog.catalog(params.max_vertices)
        if entries:
            entry = rng.choice(entries)
            logger.debug("Drew catalog action %s", entry.name)
            return entry.action
    low = 2 if (params.leaf_dim or 0) > 0 and params.constraint != "none" else 1
    if params.max_vertices < low:
        raise InfeasibleConstraint(
            "InfeasibleConstraint", "an isolated vertex cannot carry a nonzero leaf stalk here"
        )
    tree = random_tree(rng, rng.randint(low, params.max_vertices))
    return catalog.trivial_action(tree)


def _pair_classes(action, v):
    """Incident edges of v grouped into orbits of the stabilizer of v."""
    g_v = stabilizer(action, VERTEX, v)
    seen, classes = set(), []
    for e in incident_edges(action.tree, v):
        if e in seen:
            continue
        members = sorted({action.act_edge(g, e) for g in g_v})
        seen.update(members)
        classes.append(members)
    return classes


def _full_column_rank(rng, field, rows, cols, blocks):
    """Draw ``blocks`` stacked blocks whose stack has rank ``cols``, or None."""
    for _ in range(RANK_ATTEMPTS):
        drawn = [random_matrix(rng, field, rows[i], cols) for i in range(blocks)]
        if not drawn:
            return drawn if cols == 0 else None
        stacked = drawn[0].vstack(*drawn[1:])
        if stacked.rank() == cols:
            return drawn
    return None


def _padded_identity(field, rows, cols):
    return Matrix.from_rows(
        field,
        [[field.one if i == j else field.zero for j in range(cols)] for i in range(rows)],
        cols,
    )


def _draw_dims(rng, action, params):
    tree, hi = action.tree, params.max_stalk_dim
    leaf_set = set(leaves(tree))
    edim = [0] * tree.n_edges
    vdim = [0] * tree.n_vertices
    if params.constraint == "multifacial":
        for v, members in orbits(action, VERTEX):
            d = 0 if v in leaf_set else rng.randint(0, hi)
            for m in members:
                vdim[m] = d
        for e, members in orbits(action, EDGE):
            edge = tree.edge(e)
            d = rng.randint(max(vdim[edge.x], vdim[edge.y]), max(hi, vdim[edge.x], vdim[edge.y]))
            for m in members:
                edim[m] = d
        return vdim, edim
    leaf_dim = params.leaf_dim
    for e, members in orbits(action, EDGE):
        edge = tree.edge(e)
        low = 0
        if leaf_dim and (edge.x in leaf_set or edge.y in leaf_set):
            low = leaf_dim if params.constraint == "no-elliptic" else 0
        d = rng.randint(low, hi)
        for m in members:
            edim[m] = d
    for v, members in orbits(action, VERTEX):
        if leaf_dim is not None and v in leaf_set:
            d = leaf_dim
        elif params.constraint == "no-elliptic":
            cap = sum(edim[cls[0]] for cls in _pair_classes(action, v))
            d = rng.randint(0, min(hi, cap))
        else:
            d = rng.randint(0, hi)
        for m in members:
            vdim[m] = d
    return vdim, edim


def _draw_restrictions(rng, action, params, vdim, edim):
    field, tree = params.field, action.tree
    gamma = {}
    for v, members in orbits(action, VERTEX):
        classes = _pair_classes(action, v)
        rows = [edim[cls[0]] for cls in classes]
        if params.constraint == "multifacial":
            blocks = []
            for r in rows:
                drawn = _full_column_rank(rng, field, [r], vdim[v], 1)
                blocks.append(drawn[0] if drawn else _padded_identity(field, r, vdim[v]))
        elif params.constraint == "no-elliptic":
            d = vdim[v]
            blocks = _full_column_rank(rng, field, rows, d, len(rows))
            while blocks is None:
                # shrink the stalk until the stacked restriction can be injective
                d -= 1
                blocks = _full_column_rank(rng, field, rows, d, len(rows))
            if d != vdim[v]:
                for m in members:
                    vdim[m] = d
        else:
            blocks = [random_matrix(rng, field, r, vdim[v]) for r in rows]
        for cls, block in zip(classes, blocks):
            for g in action.group.elements:
                for e in cls:
                    gamma[(action.act_vertex(g, v), action.act_edge(g, e))] = block
    for v, e in tree.incident_pairs():
        gamma.setdefault((v, e), Matrix.zeros(field, edim[e], vdim[v]))
    return gamma


def _character(action, kind):
    if kind == "trivial":
        return {g: 1 for g in action.group.elements}
    return {
        g: Permutation(list(perm)).signature()
        for g, perm in enumerate(action.vertex_perms)
    }


def random_instance(seed, index, params):
    """Draw ``(sheaf, equivariant sheaf or None)`` number ``index`` under ``seed``."""
    params.check()
    rng = rng_for(seed, index)
    action = _choose_action(rng, params)
    vdim, edim = _draw_dims(rng, action, params)
    gamma = _draw_restrictions(rng, action, params, vdim, edim)
    field = params.field
    sheaf = Sheaf.build(action.tree, field, vdim, edim, gamma)
    if not params.equivariant:
        return sheaf, None
    chi = _character(action, rng.choice(CHARACTERS))
    eta_v = {
        (g, v): Matrix.identity(field, d).scale(chi[g])
        for g in action.group.elements
        for v, d in enumerate(vdim)
    }
    eta_e = {
        (g, e): Matrix.identity(field, d).scale(chi[g])
        for g in action.group.elements
        for e, d in enumerate(edim)
    }
    return sheaf, EquivariantSheaf.build(sheaf, action, eta_v, eta_e)


def search(seed, params, accept, attempts=200):
    """The first draw under ``seed`` accepted by ``accept(sheaf, es)``.

    Returns ``(index, sheaf, es)``.
    """
    for index in range(attempts):
        s, es = random_instance(seed, index, params)
        if accept(s, es):
            logger.debug("Search under seed %s accepted draw %d", seed, index)
            return index, s, es
    raise InfeasibleConstraint(
        "SearchExhausted", f"no accepted draw among {attempts} under seed {seed!r}"
    )


def random_subsheaf(rng, s):
    """A random restriction-closed subsheaf of ``s``."""
    field = s.field
    vertex_spaces = []
    for d in s.vdim:
        k = rng.randint(0, d)
        vectors = [[random_scalar(rng, field) for _ in range(d)] for _ in range(k)]
        vertex_spaces.append(Subspace.span(field, d, vectors))
    edge_spaces = []
    for e, d in enumerate(s.edim):
        vectors = []
        for v in s.tree.edge(e).endpoints:
            vectors.extend(vertex_spaces[v].image(s.gamma[(v, e)]).vectors())
        if d and rng.random() < 0.5:
            vectors.append([random_scalar(rng, field) for _ in range(d)])
        edge_spaces.append(Subspace.span(field, d, vectors))
    sub = Subsheaf(s, tuple(vertex_spaces), tuple(edge_spaces))
    sub.check_closed()
    return sub
