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
"""Cellular sheaves on trees and their compactly supported cohomology.

Cochains are flat vectors. The total vertex space orders stalks by vertex id, the
total edge space by edge id, and each stalk contributes its coordinates in order.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

from sheaftree.error import ConstructionMismatch, SheafError
from sheaftree.exactla import (
    Matrix,
    Subspace,
    column_space,
    kernel_basis,
    quotient_map,
    solve,
)
from sheaftree.tree import or_sign

logger = logging.getLogger("sheaftree")


def _offsets(dims):
    offsets, total = [], 0
    for d in dims:
        offsets.append(total)
        total += d
    return tuple(offsets), total


@dataclass(frozen=True, eq=False)
class Sheaf:
    tree: object
    field: object
    vdim: tuple
    edim: tuple
    gamma: dict

    @classmethod
    def build(cls, tree, field, vdim, edim, gamma):
        sheaf = cls(tree, field, tuple(vdim), tuple(edim), dict(gamma))
        validate_sheaf(sheaf)
        return sheaf

    @cached_property
    def _vertex_layout(self):
        return _offsets(self.vdim)

    @cached_property
    def _edge_layout(self):
        return _offsets(self.edim)

    @property
    def total_vdim(self):
        return self._vertex_layout[1]

    @property
    def total_edim(self):
        return self._edge_layout[1]

    def vertex_range(self, v):
        start = self._vertex_layout[0][v]
        return range(start, start + self.vdim[v])

    def edge_range(self, e):
        start = self._edge_layout[0][e]
        return range(start, start + self.edim[e])

    def vertex_part(self, vector, v):
        return tuple(vector[i] for i in self.vertex_range(v))

    def edge_part(self, vector, e):
        return tuple(vector[i] for i in self.edge_range(e))

    @cached_property
    def coboundary(self):
        blocks = {
            (e, v): g.scale(or_sign(self.tree, v, e)) for (v, e), g in self.gamma.items()
        }
        return Matrix.block(self.field, self.edim, self.vdim, blocks)

    @cached_property
    def cohomology(self):
        delta = self.coboundary
        h0 = kernel_basis(delta)
        h1_proj, h1_section = quotient_map(self.total_edim, column_space(delta))
        logger.debug(
            "Cohomology of a sheaf with %d/%d vertex/edge coordinates: h0=%d h1=%d",
            self.total_vdim,
            self.total_edim,
            h0.dim,
            h1_proj.rows,
        )
        return CohomologyResult(h0, h1_proj, h1_section, delta)

    def is_zero(self):
        return self.total_vdim == 0 and self.total_edim == 0


@dataclass(frozen=True, eq=False)
class CohomologyResult:
    h0: Subspace
    h1_proj: Matrix
    # columns are edge cochains representing the H^1 basis
    h1_section: Matrix
    coboundary: Matrix

    @property
    def h0_dim(self):
        return self.h0.dim

    @property
    def h1_dim(self):
        return self.h1_proj.rows


def validate_sheaf(s):
    t = s.tree
    if len(s.vdim) != t.n_vertices or len(s.edim) != t.n_edges:
        raise SheafError(
            "ShapeMismatch",
            f"{len(s.vdim)} vertex and {len(s.edim)} edge stalks for a tree with "
            f"{t.n_vertices} vertices and {t.n_edges} edges",
        )
    for kind, dims in (("vertex", s.vdim), ("edge", s.edim)):
        for cell, d in enumerate(dims):
            if not isinstance(d, int) or isinstance(d, bool) or d < 0:
                raise SheafError(
                    "ShapeMismatch", f"{kind} {cell} has stalk dimension {d!r}", ids=(cell,)
                )
    expected = set(t.incident_pairs())
    extra = sorted(set(s.gamma) - expected)
    if extra:
        key = extra[0]
        raise SheafError(
            "NotIncident", f"restriction {key[0]}:{key[1]} is not an incident pair", ids=key
        )
    for v, e in sorted(expected):
        if (v, e) not in s.gamma:
            raise SheafError(
                "MissingRestriction", f"no restriction for vertex {v}, edge {e}", ids=(v, e)
            )
        g = s.gamma[(v, e)]
        if g.field != s.field:
            raise SheafError(
                "FieldMismatch",
                f"restriction {v}:{e} is over {g.field}, the sheaf over {s.field}",
                ids=(v, e),
            )
        if g.shape != (s.edim[e], s.vdim[v]):
            raise SheafError(
                "ShapeMismatch",
                f"restriction {v}:{e} is {g.rows}x{g.cols}, expected "
                f"{s.edim[e]}x{s.vdim[v]}",
                ids=(v, e),
            )


def coboundary_matrix(s):
    """Rows grouped by edge, columns by vertex; block (e, v) is OR(v, e) times the restriction."""
    return s.coboundary


def h0(s):
    return s.cohomology


def h1(s):
    return s.cohomology


def euler_check(s):
    result = s.cohomology
    return result.h0_dim - result.h1_dim, sum(s.vdim) - sum(s.edim)


def constant_sheaf(tree, field, dim=1):
    return Sheaf.build(
        tree,
        field,
        [dim] * tree.n_vertices,
        [dim] * tree.n_edges,
        {pair: Matrix.identity(field, dim) for pair in tree.incident_pairs()},
    )


def zero_sheaf(tree, field):
    return Sheaf.build(
        tree,
        field,
        [0] * tree.n_vertices,
        [0] * tree.n_edges,
        {pair: Matrix.zeros(field, 0, 0) for pair in tree.incident_pairs()},
    )


@dataclass(frozen=True, eq=False)
class SheafMap:
    source: Sheaf
    target: Sheaf
    vertex_maps: tuple
    edge_maps: tuple

    @cached_property
    def vertex_matrix(self):
        return Matrix.block(
            self.source.field,
            self.target.vdim,
            self.source.vdim,
            {(v, v): m for v, m in enumerate(self.vertex_maps)},
        )

    @cached_property
    def edge_matrix(self):
        return Matrix.block(
            self.source.field,
            self.target.edim,
            self.source.edim,
            {(e, e): m for e, m in enumerate(self.edge_maps)},
        )


def validate_sheaf_map(f):
    src, dst = f.source, f.target
    if src.tree != dst.tree:
        raise ConstructionMismatch("NotASheafMap", "source and target live on different trees")
    for v, m in enumerate(f.vertex_maps):
        if m.shape != (dst.vdim[v], src.vdim[v]):
            raise ConstructionMismatch("NotASheafMap", f"vertex map {v} has shape {m.shape}", ids=(v,))
    for e, m in enumerate(f.edge_maps):
        if m.shape != (dst.edim[e], src.edim[e]):
            raise ConstructionMismatch("NotASheafMap", f"edge map {e} has shape {m.shape}", ids=(e,))
    for (v, e), g in src.gamma.items():
        if dst.gamma[(v, e)] @ f.vertex_maps[v] != f.edge_maps[e] @ g:
            raise ConstructionMismatch(
                "NotASheafMap",
                f"the map does not commute with the restriction at {v}:{e}",
                ids=(v, e),
            )


@dataclass(frozen=True, eq=False)
class Subsheaf:
    """Per-cell subspaces of the stalks of ``sheaf``."""

    sheaf: Sheaf
    vertex_spaces: tuple
    edge_spaces: tuple

    @classmethod
    def zero(cls, s):
        return cls(
            s,
            tuple(Subspace.zero(s.field, d) for d in s.vdim),
            tuple(Subspace.zero(s.field, d) for d in s.edim),
        )

    @classmethod
    def full(cls, s):
        return cls(
            s,
            tuple(Subspace.full(s.field, d) for d in s.vdim),
            tuple(Subspace.full(s.field, d) for d in s.edim),
        )

    @property
    def vertex_dims(self):
        return tuple(w.dim for w in self.vertex_spaces)

    @property
    def edge_dims(self):
        return tuple(w.dim for w in self.edge_spaces)

    def is_zero(self):
        return not any(self.vertex_dims) and not any(self.edge_dims)

    def check_closed(self):
        for (v, e), g in sorted(self.sheaf.gamma.items()):
            image = self.vertex_spaces[v].image(g)
            if not self.edge_spaces[e].contains_subspace(image):
                raise SheafError(
                    "NotASubsheaf",
                    f"restriction {v}:{e} leaves the chosen subspaces",
                    ids=(v, e),
                )


def subsheaf_as_sheaf(sub):
    """The subsheaf in its own stalk bases, with its inclusion into the ambient sheaf."""
    sub.check_closed()
    s = sub.sheaf
    gamma = {}
    for (v, e), g in s.gamma.items():
        target = sub.edge_spaces[e]
        columns = [target.coordinates(g.apply(b)) for b in sub.vertex_spaces[v].vectors()]
        gamma[(v, e)] = Matrix.from_columns(s.field, columns, target.dim)
    a = Sheaf.build(s.tree, s.field, sub.vertex_dims, sub.edge_dims, gamma)
    inclusion = SheafMap(
        a,
        s,
        tuple(w.inclusion() for w in sub.vertex_spaces),
        tuple(w.inclusion() for w in sub.edge_spaces),
    )
    validate_sheaf_map(inclusion)
    return a, inclusion


@dataclass(frozen=True, eq=False)
class Quotient:
    sheaf: Sheaf
    projection: SheafMap
    vertex_sections: tuple
    edge_sections: tuple


def build_quotient(s, sub):
    """The quotient sheaf stalkwise S/sub, with its projection and per-cell sections."""
    sub.check_closed()
    vertex_pairs = [quotient_map(s.vdim[v], w) for v, w in enumerate(sub.vertex_spaces)]
    edge_pairs = [quotient_map(s.edim[e], w) for e, w in enumerate(sub.edge_spaces)]
    gamma = {
        (v, e): edge_pairs[e][0] @ g @ vertex_pairs[v][1] for (v, e), g in s.gamma.items()
    }
    q = Sheaf.build(
        s.tree,
        s.field,
        [p.rows for p, _ in vertex_pairs],
        [p.rows for p, _ in edge_pairs],
        gamma,
    )
    projection = SheafMap(
        s, q, tuple(p for p, _ in vertex_pairs), tuple(p for p, _ in edge_pairs)
    )
    validate_sheaf_map(projection)
    return Quotient(
        q,
        projection,
        tuple(sec for _, sec in vertex_pairs),
        tuple(sec for _, sec in edge_pairs),
    )


@dataclass(frozen=True, eq=False)
class ShortExactSeq:
    inclusion: SheafMap
    projection: SheafMap


def validate_ses(ses):
    i, p = ses.inclusion, ses.projection
    validate_sheaf_map(i)
    validate_sheaf_map(p)
    if i.target is not p.source:
        raise ConstructionMismatch("InvalidSES", "the two maps are not composable")
    cells = [("vertex", v, i.vertex_maps[v], p.vertex_maps[v]) for v in range(len(i.vertex_maps))]
    cells += [("edge", e, i.edge_maps[e], p.edge_maps[e]) for e in range(len(i.edge_maps))]
    for kind, cell, a, b in cells:
        if a.rank() != a.cols or b.rank() != b.rows or not (b @ a).is_zero():
            raise ConstructionMismatch(
                "InvalidSES", f"the sequence is not exact at {kind} {cell}", ids=(cell,)
            )
        if a.rows != a.cols + b.rows:
            raise ConstructionMismatch(
                "InvalidSES", f"dimensions do not add up at {kind} {cell}", ids=(cell,)
            )


@dataclass(frozen=True)
class NodeCheck:
    node: str
    dim: int
    rank_in: int
    rank_out: int
    composite_zero: bool

    @property
    def exact(self):
        return self.composite_zero and self.rank_in + self.rank_out == self.dim


@dataclass(frozen=True)
class ExactnessReport:
    nodes: tuple = field(default_factory=tuple)

    @property
    def exact(self):
        return all(n.exact for n in self.nodes)

    def as_dict(self):
        return {
            n.node: {
                "dim": n.dim,
                "rank_in": n.rank_in,
                "rank_out": n.rank_out,
                "exact": n.exact,
            }
            for n in self.nodes
        }


def _h0_map(f0, source, target):
    """Matrix of a cochain map on H^0, in the stored H^0 bases."""
    columns = []
    for b in source.h0.vectors():
        coords = target.h0.coordinates(f0.apply(b))
        if coords is None:
            raise ConstructionMismatch("NotACochainMap", "image of an H^0 vector is not closed")
        columns.append(coords)
    return Matrix.from_columns(f0.field, columns, target.h0_dim)


def _h1_map(f1, source, target):
    return target.h1_proj @ f1 @ source.h1_section


def les_connecting(ses):
    """Connecting map H^0(C) -> H^1(A) of ``A -> B -> C`` and the exactness report."""
    validate_ses(ses)
    i, p = ses.inclusion, ses.projection
    a, b, c = i.source, i.target, p.target
    ca, cb, cc = a.cohomology, b.cohomology, c.cohomology
    field_ = a.field

    columns = []
    for h in cc.h0.vectors():
        lift = solve(p.vertex_matrix, h)
        if lift is None:
            raise ConstructionMismatch("InvalidSES", "vertex projection is not onto")
        boundary = cb.coboundary.apply(lift)
        pullback = solve(i.edge_matrix, boundary)
        if pullback is None:
            raise ConstructionMismatch(
                "InvalidSES", "coboundary of a lifted class leaves the subsheaf"
            )
        columns.append(ca.h1_proj.apply(pullback))
    delta = Matrix.from_columns(field_, columns, ca.h1_dim)

    f1 = _h0_map(i.vertex_matrix, ca, cb)
    f2 = _h0_map(p.vertex_matrix, cb, cc)
    f4 = _h1_map(i.edge_matrix, ca, cb)
    f5 = _h1_map(p.edge_matrix, cb, cc)

    def node(name, dim, m_in, m_out):
        composite = m_in is None or m_out is None or (m_out @ m_in).is_zero()
        return NodeCheck(
            name,
            dim,
            0 if m_in is None else m_in.rank(),
            0 if m_out is None else m_out.rank(),
            composite,
        )

    report = ExactnessReport(
        (
            node("H0(A)", ca.h0_dim, None, f1),
            node("H0(B)", cb.h0_dim, f1, f2),
            node("H0(C)", cc.h0_dim, f2, delta),
            node("H1(A)", ca.h1_dim, delta, f4),
            node("H1(B)", cb.h1_dim, f4, f5),
            node("H1(C)", cc.h1_dim, f5, None),
        )
    )
    logger.debug("Long exact sequence: %s", report.as_dict())
    return delta, report
