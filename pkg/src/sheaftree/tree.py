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
"""Finite trees with a fixed orientation (first endpoint x, second endpoint y) per edge."""

from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from sheaftree.error import TreeError


@dataclass(frozen=True)
class Edge:
    id: int
    x: int
    y: int

    @property
    def endpoints(self):
        return (self.x, self.y)


@dataclass(frozen=True)
class Tree:
    n_vertices: int
    edges: tuple

    @classmethod
    def build(cls, n_vertices, triples):
        """Build and validate a tree from ``(id, x, y)`` triples."""
        edges = tuple(sorted((Edge(*map(int, t)) for t in triples), key=lambda e: e.id))
        tree = cls(int(n_vertices), edges)
        validate_tree(tree)
        return tree

    @property
    def vertices(self):
        return list(range(self.n_vertices))

    @property
    def edge_ids(self):
        return [e.id for e in self.edges]

    @property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def _edge_by_id(self):
        return {e.id: e for e in self.edges}

    @cached_property
    def _incidence(self):
        incidence = {v: [] for v in range(self.n_vertices)}
        for e in self.edges:
            for v in e.endpoints:
                if v in incidence:
                    incidence[v].append(e.id)
        return {v: sorted(ids) for v, ids in incidence.items()}

    @cached_property
    def graph(self):
        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        for e in self.edges:
            g.add_edge(e.x, e.y, id=e.id)
        return g

    def edge(self, e):
        try:
            return self._edge_by_id[e]
        except KeyError:
            raise TreeError("UnknownEdge", f"No edge with id {e}", ids=(e,)) from None

    def has_vertex(self, v):
        return isinstance(v, int) and 0 <= v < self.n_vertices

    def edge_between(self, u, v):
        return self.graph.edges[u, v]["id"]

    def incident_pairs(self):
        """All incident (vertex, edge) pairs, sorted."""
        return sorted((v, e.id) for e in self.edges for v in e.endpoints)

    def path(self, u, v):
        """Vertices and edges of the unique path from u to v."""
        vertices = nx.shortest_path(self.graph, u, v)
        edges = [self.edge_between(a, b) for a, b in zip(vertices, vertices[1:])]
        return vertices, edges


@dataclass(frozen=True)
class Subtree:
    tree: Tree
    vertices: tuple
    edges: tuple

    def degree(self, v):
        return sum(1 for e in self.edges if v in self.tree.edge(e).endpoints)


def validate_tree(t):
    if t.n_vertices < 1:
        raise TreeError("Empty", "a tree needs at least one vertex")
    seen_ids = set()
    seen_pairs = {}
    for e in t.edges:
        if e.id in seen_ids:
            raise TreeError("DuplicateEdge", f"Edge id {e.id} appears twice", ids=(e.id,))
        seen_ids.add(e.id)
        for v in e.endpoints:
            if not t.has_vertex(v):
                raise TreeError(
                    "DanglingEndpoint",
                    f"Edge {e.id} names vertex {v}, which does not exist",
                    ids=(e.id, v),
                )
        if e.x == e.y:
            raise TreeError("HasCycle", f"Edge {e.id} is a loop at {e.x}", ids=(e.id,))
        pair = frozenset(e.endpoints)
        if pair in seen_pairs:
            raise TreeError(
                "DuplicateEdge",
                f"Edges {seen_pairs[pair]} and {e.id} join the same vertices",
                ids=(seen_pairs[pair], e.id),
            )
        seen_pairs[pair] = e.id
    if sorted(seen_ids) != list(range(len(t.edges))):
        raise TreeError(
            "NonDenseIds", f"Edge ids must be 0..{len(t.edges) - 1}", ids=sorted(seen_ids)
        )
    if len(t.edges) >= t.n_vertices:
        cycle = nx.find_cycle(t.graph)
        ids = sorted(t.edge_between(u, v) for u, v in cycle)
        raise TreeError("HasCycle", f"Edges {ids} form a cycle", ids=ids)
    if not nx.is_connected(t.graph):
        components = sorted(min(c) for c in nx.connected_components(t.graph))
        raise TreeError(
            "Disconnected",
            f"The graph has {len(components)} components, rooted at {components}",
            ids=components,
        )


def _check_vertex(t, v):
    if not t.has_vertex(v):
        raise TreeError("UnknownVertex", f"No vertex with id {v}", ids=(v,))


def or_sign(t, v, e):
    """+1 if v is the first endpoint of e, -1 if it is the second."""
    edge = t.edge(e)
    if v == edge.x:
        return 1
    if v == edge.y:
        return -1
    raise TreeError("NotIncident", f"Vertex {v} is not an endpoint of edge {e}", ids=(v, e))


def incident_edges(t, v):
    _check_vertex(t, v)
    return list(t._incidence[v])


def leaves(t):
    if isinstance(t, Subtree):
        return [v for v in t.vertices if t.degree(v) <= 1]
    return [v for v in t.vertices if len(t._incidence[v]) <= 1]


def convex_hull(t, w):
    """The smallest subtree containing every vertex of ``w``."""
    w = sorted(set(w))
    if not w:
        raise TreeError("EmptySet", "the convex hull of no vertices is undefined")
    for v in w:
        _check_vertex(t, v)
    root = w[0]
    vertices, edges = {root}, set()
    for v in w[1:]:
        path_vertices, path_edges = t.path(root, v)
        vertices.update(path_vertices)
        edges.update(path_edges)
    return Subtree(t, tuple(sorted(vertices)), tuple(sorted(edges)))
