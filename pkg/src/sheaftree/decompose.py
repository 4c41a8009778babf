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
"""Decompose H^0 of an equivariant sheaf on a tree as an induced representation.

The elliptic part of a vertex stalk is what every restriction kills; the unifacial
part at (v, e) is what every restriction except the one to e kills. If the elliptic
subsheaf is nonzero, H^0 is induced from a vertex stabilizer. Otherwise H^0 of the
unifacial subsheaf is identified, through the auxiliary sheaves R and T, with a sum
of edge stalks T_e, and H^0 is induced from an edge stabilizer. If that H^0 vanishes
the unifacial subsheaf is divided out, which lowers the 0-rank, and the loop repeats.
"""

import enum
import logging
from dataclasses import dataclass, field

from sheaftree.equivariant import (
    EDGE,
    VERTEX,
    EquivariantSheaf,
    Representation,
    orbits,
    pass_to_quotient,
    rep_on_h0,
    rep_on_h1,
    restrict_on_subspace,
    restrict_to_subsheaf,
    stabilizer,
)
from sheaftree.error import (
    CertificationFailed,
    ConstructionMismatch,
    EquivarianceBroken,
    HypothesisViolated,
    InternalAssertion,
    NotInvariant,
    PreconditionFailed,
    SheafTreeError,
    TheoremViolated,
)
from sheaftree.exactla import Matrix, Subspace, format_vector, kernel_basis, solve
from sheaftree.rep import (
    Verdict,
    induce,
    is_intertwiner,
    is_invariant,
    is_irreducible,
    is_isomorphic,
    trivial_representation,
)
from sheaftree.sheaf import (
    Sheaf,
    SheafMap,
    ShortExactSeq,
    Subsheaf,
    build_quotient,
    les_connecting,
    subsheaf_as_sheaf,
)
from sheaftree.tree import convex_hull, incident_edges, leaves

logger = logging.getLogger("sheaftree")


class Step(str, enum.Enum):
    ELLIPTIC = "Elliptic"
    UNIFACIAL_KEPT = "UnifacialKept"
    QUOTIENT_RECURSED = "QuotientRecursed"


class Variant(str, enum.Enum):
    ZERO = "Zero"
    VERTEX_INDUCED = "VertexInduced"
    EDGE_INDUCED = "EdgeInduced"


@dataclass(frozen=True)
class AssertionRecord:
    name: str
    ok: bool
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


class AssertionLog:
    """Records every internal check; a failing check raises the error it names."""

    def __init__(self):
        self.records = []

    def check(self, name, condition, detail, error=None):
        self.records.append(AssertionRecord(name, bool(condition), detail))
        logger.debug("check %s: %s (%s)", name, "ok" if condition else "FAILED", detail)
        if not condition and error is not None:
            raise error

    def as_list(self):
        return [r.as_dict() for r in self.records]


def rank0(es):
    """Sum of vertex stalk dimensions over one vertex per orbit."""
    return sum(es.sheaf.vdim[rep] for rep, _ in orbits(es.action, VERTEX))


def _kernel_of_restrictions(s, v, edges):
    if not edges:
        return Subspace.full(s.field, s.vdim[v])
    stacked = s.gamma[(v, edges[0])].vstack(*(s.gamma[(v, f)] for f in edges[1:]))
    return kernel_basis(stacked)


def elliptic_subsheaf(s):
    return Subsheaf(
        s,
        tuple(
            _kernel_of_restrictions(s, v, incident_edges(s.tree, v)) for v in s.tree.vertices
        ),
        tuple(Subspace.zero(s.field, d) for d in s.edim),
    )


def elliptic_h0(es):
    """(x, G_x acting on the elliptic part of S_x) for each vertex orbit carrying one."""
    ell = elliptic_subsheaf(es.sheaf)
    entries = []
    for x, _members in orbits(es.action, VERTEX):
        space = ell.vertex_spaces[x]
        if space.is_zero():
            continue
        g_x = stabilizer(es.action, VERTEX, x)
        matrices = {g: es.eta_v[(g, x)] for g in g_x}
        entries.append(
            (x, restrict_on_subspace(es.field, es.group, matrices, space, elements=g_x))
        )
    return entries


@dataclass(frozen=True, eq=False)
class UnifacialData:
    sheaf: Sheaf
    # (v, e) -> part of S_v killed by every restriction except the one to e
    pair_spaces: dict
    vertex_spaces: tuple
    edge_spaces: tuple
    elliptic_zero: bool = True

    def as_subsheaf(self):
        return Subsheaf(self.sheaf, self.vertex_spaces, self.edge_spaces)

    def is_zero(self):
        return all(w.is_zero() for w in self.vertex_spaces)


def unifacial_data(s):
    ell = elliptic_subsheaf(s)
    for v, space in enumerate(ell.vertex_spaces):
        if not space.is_zero():
            raise PreconditionFailed(
                "EllipticNonzero", f"vertex {v} has a nonzero elliptic part", ids=(v,)
            )
    field_ = s.field
    pair_spaces = {}
    vertex_spaces = []
    for v in s.tree.vertices:
        edges = incident_edges(s.tree, v)
        total = Subspace.zero(field_, s.vdim[v])
        expected = 0
        for e in edges:
            space = _kernel_of_restrictions(s, v, [f for f in edges if f != e])
            image = space.image(s.gamma[(v, e)])
            if image.dim != space.dim:
                raise ConstructionMismatch(
                    "NotInjective",
                    f"restriction {v}:{e} is not injective on its unifacial part",
                    ids=(v, e),
                )
            pair_spaces[(v, e)] = space
            total = total.sum(space)
            expected += space.dim
        if total.dim != expected:
            raise ConstructionMismatch(
                "NotDirect", f"unifacial parts at vertex {v} are not independent", ids=(v,)
            )
        vertex_spaces.append(total)
    edge_spaces = []
    for edge in s.tree.edges:
        image_x = pair_spaces[(edge.x, edge.id)].image(s.gamma[(edge.x, edge.id)])
        image_y = pair_spaces[(edge.y, edge.id)].image(s.gamma[(edge.y, edge.id)])
        edge_spaces.append(image_x.sum(image_y))
    return UnifacialData(s, pair_spaces, tuple(vertex_spaces), tuple(edge_spaces))


@dataclass(frozen=True, eq=False)
class RTConstruction:
    unifacial: UnifacialData
    R: Sheaf
    T: Sheaf
    ses: ShortExactSeq
    suni: Sheaf
    suni_inclusion: SheafMap
    # (v, e) -> image of the unifacial part at (v, e) in S_e
    images: dict
    # per edge: intersection of the two images, a subspace of S_e
    t_spaces: tuple
    # vertex -> square block of the coboundary of R on the star of v
    star_blocks: dict


def _block_offset(rt_images, edge, v):
    return 0 if v == edge.x else rt_images[(edge.x, edge.id)].dim


def build_R_T(s, u):
    field_ = s.field
    t = s.tree
    images = {(v, e): space.image(s.gamma[(v, e)]) for (v, e), space in u.pair_spaces.items()}
    suni, suni_inclusion = subsheaf_as_sheaf(u.as_subsheaf())

    r_edim = [images[(e.x, e.id)].dim + images[(e.y, e.id)].dim for e in t.edges]
    r_gamma = {}
    for (v, e), g in s.gamma.items():
        edge = t.edge(e)
        own = images[(v, e)]
        offset = _block_offset(images, edge, v)
        columns = []
        for b in u.vertex_spaces[v].vectors():
            column = [field_.zero] * r_edim[e]
            coords = own.coordinates(g.apply(b))
            if coords is None:
                raise ConstructionMismatch(
                    "ImageMismatch", f"restriction {v}:{e} leaves its image", ids=(v, e)
                )
            column[offset : offset + own.dim] = coords
            columns.append(column)
        r_gamma[(v, e)] = Matrix.from_columns(field_, columns, r_edim[e])
    R = Sheaf.build(t, field_, [w.dim for w in u.vertex_spaces], r_edim, r_gamma)

    t_spaces = tuple(images[(e.x, e.id)].intersect(images[(e.y, e.id)]) for e in t.edges)
    T = Sheaf.build(
        t,
        field_,
        [0] * t.n_vertices,
        [w.dim for w in t_spaces],
        {(v, e): Matrix.zeros(field_, t_spaces[e].dim, 0) for (v, e) in s.gamma},
    )

    inclusion_edges = []
    projection_edges = []
    for edge in t.edges:
        ix, iy = images[(edge.x, edge.id)], images[(edge.y, edge.id)]
        columns = [
            ix.coordinates(w) + tuple(-c for c in iy.coordinates(w))
            for w in t_spaces[edge.id].vectors()
        ]
        inclusion_edges.append(Matrix.from_columns(field_, columns, r_edim[edge.id]))
        target = u.edge_spaces[edge.id]
        columns = [target.coordinates(w) for w in [*ix.vectors(), *iy.vectors()]]
        projection_edges.append(Matrix.from_columns(field_, columns, target.dim))
    inclusion = SheafMap(
        T,
        R,
        tuple(Matrix.zeros(field_, d, 0) for d in R.vdim),
        tuple(inclusion_edges),
    )
    projection = SheafMap(
        R,
        suni,
        tuple(Matrix.identity(field_, d) for d in R.vdim),
        tuple(projection_edges),
    )
    ses = ShortExactSeq(inclusion, projection)

    star_blocks = {}
    delta_r = R.coboundary
    for v in t.vertices:
        rows = []
        for e in incident_edges(t, v):
            offset = _block_offset(images, t.edge(e), v)
            start = R.edge_range(e).start + offset
            rows.extend(range(start, start + images[(v, e)].dim))
        block = delta_r.select(rows, R.vertex_range(v))
        if not block.is_invertible():
            raise ConstructionMismatch(
                "StarBlockSingular",
                f"the coboundary of R on the star of vertex {v} is not invertible",
                ids=(v,),
            )
        star_blocks[v] = block
    coh = R.cohomology
    if coh.h0_dim or coh.h1_dim:
        raise ConstructionMismatch(
            "RCohomologyNonzero",
            f"R has h0={coh.h0_dim}, h1={coh.h1_dim}; both must vanish",
        )
    return RTConstruction(
        u, R, T, ses, suni, suni_inclusion, images, t_spaces, star_blocks
    )


@dataclass(frozen=True, eq=False)
class TCohomology:
    # (edge orbit representative e, G_e acting on T_e)
    entries: list
    delta: Matrix
    exactness: object
    suni_structure: EquivariantSheaf
    t_structure: EquivariantSheaf


def _stalk_map(field_, eta, source, target):
    columns = [target.coordinates(eta.apply(b)) for b in source.vectors()]
    if any(c is None for c in columns):
        raise NotInvariant("NotInvariant", "a stalk map leaves the unifacial images")
    return Matrix.from_columns(field_, columns, target.dim)


def t_cohomology(es, rt):
    """Identify H^0 of the unifacial subsheaf with the sum of the T_e, G-equivariantly."""
    field_, t, action = es.field, es.tree, es.action
    u = rt.unifacial
    es_uni = restrict_to_subsheaf(es, u.as_subsheaf(), rt.suni)

    eta_r_v, eta_r_e = {}, {}
    for g in es.group.elements:
        for v in t.vertices:
            eta_r_v[(g, v)] = es_uni.eta_v[(g, v)]
        for edge in t.edges:
            target = t.edge(action.act_edge(g, edge.id))
            blocks = {}
            for v in edge.endpoints:
                gv = action.act_vertex(g, v)
                source_block = 0 if v == edge.x else 1
                target_block = 0 if gv == target.x else 1
                blocks[(target_block, source_block)] = _stalk_map(
                    field_,
                    es.eta_e[(g, edge.id)],
                    rt.images[(v, edge.id)],
                    rt.images[(gv, target.id)],
                )
            eta_r_e[(g, edge.id)] = Matrix.block(
                field_,
                [rt.images[(target.x, target.id)].dim, rt.images[(target.y, target.id)].dim],
                [rt.images[(edge.x, edge.id)].dim, rt.images[(edge.y, edge.id)].dim],
                blocks,
            )
    EquivariantSheaf.build(rt.R, action, eta_r_v, eta_r_e)

    inclusion = rt.ses.inclusion
    eta_t_v, eta_t_e = {}, {}
    for g in es.group.elements:
        for v in t.vertices:
            eta_t_v[(g, v)] = Matrix.zeros(field_, 0, 0)
        for e in t.edge_ids:
            ge = action.act_edge(g, e)
            moved = eta_r_e[(g, e)] @ inclusion.edge_maps[e]
            columns = [solve(inclusion.edge_maps[ge], moved.column(j)) for j in range(moved.cols)]
            if any(c is None for c in columns):
                raise NotInvariant("NotInvariant", f"element {g} moves T at edge {e}", ids=(g, e))
            eta_t_e[(g, e)] = Matrix.from_columns(field_, columns, rt.T.edim[ge])
    es_t = EquivariantSheaf.build(rt.T, action, eta_t_v, eta_t_e)

    delta, report = les_connecting(rt.ses)
    if not report.exact:
        raise ConstructionMismatch("NotExact", f"long exact sequence fails: {report.as_dict()}")
    if not delta.is_invertible():
        raise ConstructionMismatch(
            "ConnectingNotInvertible",
            f"connecting map of shape {delta.shape} is not invertible",
        )
    rho_uni = rep_on_h0(es_uni)
    rho_t = rep_on_h1(es_t)
    for g in es.group.elements:
        if delta @ rho_uni(g) != rho_t(g) @ delta:
            raise EquivarianceBroken(
                "EquivarianceBroken",
                f"the connecting map does not intertwine element {g}",
                ids=(g,),
            )

    entries = []
    for e, _members in orbits(action, EDGE):
        if rt.T.edim[e] == 0:
            continue
        g_e = stabilizer(action, EDGE, e)
        matrices = {g: eta_t_e[(g, e)].scale(action.osgn(g, e)) for g in g_e}
        entries.append(
            (e, Representation(es.group, field_, rt.T.edim[e], matrices, tuple(g_e)))
        )
    return TCohomology(entries, delta, report, es_uni, es_t)


def is_multifacial(s):
    if not all(w.is_zero() for w in elliptic_subsheaf(s).vertex_spaces):
        return False
    return unifacial_data(s).is_zero()


@dataclass(frozen=True)
class SupportWitness:
    support: tuple
    hull_vertices: tuple
    hull_edges: tuple
    hull_leaves: tuple
    # leaf -> {edge: restriction of the leaf component to that edge}
    leaf_restrictions: dict

    def as_dict(self, field_):
        return {
            "support": list(self.support),
            "hull_vertices": list(self.hull_vertices),
            "hull_edges": list(self.hull_edges),
            "hull_leaves": list(self.hull_leaves),
            "leaf_restrictions": {
                str(leaf): {str(e): format_vector(field_, w) for e, w in values.items()}
                for leaf, values in self.leaf_restrictions.items()
            },
        }


def support_witness(s, vector):
    """Support of an H^0 vector, its convex hull, and the restrictions at the hull's leaves."""
    vector = tuple(vector)
    if all(s.field.is_zero(c) for c in vector):
        raise PreconditionFailed("ZeroVector", "the vector is zero")
    if not s.cohomology.h0.contains(vector):
        raise PreconditionFailed("NotInH0", "the vector is not a global section")
    support = [
        v
        for v in s.tree.vertices
        if not all(s.field.is_zero(c) for c in s.vertex_part(vector, v))
    ]
    hull = convex_hull(s.tree, support)
    hull_leaves = leaves(hull)
    restrictions = {}
    for leaf in hull_leaves:
        part = s.vertex_part(vector, leaf)
        restrictions[leaf] = {
            e: s.gamma[(leaf, e)].apply(part) for e in incident_edges(s.tree, leaf)
        }
    return SupportWitness(
        tuple(support), hull.vertices, hull.edges, tuple(hull_leaves), restrictions
    )


@dataclass(frozen=True, eq=False)
class Evidence:
    """A proper nonzero invariant subspace of H^0, verified invariant."""

    reason: str
    cochains: Subspace
    h0_coordinates: Subspace

    def as_dict(self):
        field_ = self.cochains.field
        return {
            "reason": self.reason,
            "dim": self.cochains.dim,
            "cochain_basis": self.cochains.basis.to_strings(),
            "h0_basis": self.h0_coordinates.basis.to_strings(),
            "verified_invariant": True,
            "field": str(field_),
        }


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    variant: Variant
    cell: int | None = None
    stabilizer: tuple = ()
    sigma: Representation | None = None
    trace: list = field(default_factory=list)
    irreducibility: object = None
    assertions: list = field(default_factory=list)

    @property
    def cell_kind(self):
        if self.variant == Variant.VERTEX_INDUCED:
            return VERTEX
        if self.variant == Variant.EDGE_INDUCED:
            return EDGE
        return None

    def as_dict(self):
        result = {
            "variant": self.variant.value,
            "trace": [step.value for step in self.trace],
            "assertions": [a.as_dict() for a in self.assertions],
        }
        if self.irreducibility is not None:
            result["irreducible"] = {
                "verdict": self.irreducibility.verdict.value,
                "reason": self.irreducibility.reason,
            }
        if self.variant != Variant.ZERO:
            result["cell"] = {"kind": self.cell_kind, "id": self.cell}
            result["stabilizer"] = list(self.stabilizer)
            result["sigma"] = self.sigma.as_dict()
        return result


def _h0_comparison(es0, projection, current):
    """Matrix of the map H^0(original) -> H^0(current) induced by ``projection``."""
    h0_orig = es0.sheaf.cohomology.h0
    h0_cur = current.sheaf.cohomology.h0
    columns = []
    for b in h0_orig.vectors():
        coords = h0_cur.coordinates(projection.apply(b))
        if coords is None:
            raise ConstructionMismatch("NotACochainMap", "the quotient map leaves H^0")
        columns.append(coords)
    phi = Matrix.from_columns(es0.field, columns, h0_cur.dim)
    if not phi.is_invertible():
        raise ConstructionMismatch(
            "H0NotPreserved", "dividing out the unifacial subsheaf changed H^0"
        )
    return phi


def _evidence(es0, projection, current, vectors, reason):
    """Pull an invariant subspace of the current H^0 back to the original one."""
    phi = _h0_comparison(es0, projection, current)
    h0_orig = es0.sheaf.cohomology.h0
    h0_cur = current.sheaf.cohomology.h0
    coordinates = []
    for w in vectors:
        coords = h0_cur.coordinates(w)
        if coords is None:
            raise ConstructionMismatch("NotInH0", "evidence vector is not a global section")
        coordinates.append(solve(phi, coords))
    in_h0 = Subspace.span(es0.field, h0_orig.dim, coordinates)
    return _verified_evidence(es0, in_h0, reason)


def _verified_evidence(es0, in_h0, reason):
    rho = rep_on_h0(es0)
    if not (0 < in_h0.dim < rho.dim) or not is_invariant(rho, in_h0):
        raise NotInvariant(
            "NotInvariant", f"evidence for {reason} is not a proper invariant subspace"
        )
    h0 = es0.sheaf.cohomology.h0
    cochains = Subspace.span(
        es0.field, es0.sheaf.total_vdim, [h0.combine(c) for c in in_h0.vectors()]
    )
    return Evidence(reason, cochains, in_h0)


def _orbit_vectors(s, members, spaces, ranges, total):
    vectors = []
    for c in members:
        for b in spaces[c].vectors():
            w = [s.field.zero] * total
            for i, x in zip(ranges(c), b):
                w[i] = x
            vectors.append(tuple(w))
    return vectors


def _elliptic_step(es0, projection, current, log):
    s = current.sheaf
    ell = elliptic_subsheaf(s)
    ell_sheaf, _ = subsheaf_as_sheaf(ell)
    ell_coh = ell_sheaf.cohomology
    log.check(
        "elliptic_cohomology",
        ell_coh.h1_dim == 0 and ell_coh.h0_dim == sum(w.dim for w in ell.vertex_spaces),
        f"h0={ell_coh.h0_dim}, h1={ell_coh.h1_dim}",
        ConstructionMismatch("EllipticCohomology", "H^1 of the elliptic subsheaf is nonzero"),
    )
    entries = elliptic_h0(current)
    carrying = [x for x, _ in entries]
    if len(entries) > 1:
        x = carrying[0]
        members = next(m for rep, m in orbits(current.action, VERTEX) if rep == x)
        vectors = _orbit_vectors(s, members, ell.vertex_spaces, s.vertex_range, s.total_vdim)
        evidence = _evidence(es0, projection, current, vectors, "two vertex orbits")
        log.check("single_vertex_orbit", False, f"orbits of {carrying} carry elliptic parts")
        raise HypothesisViolated(
            "TwoVertexOrbits",
            f"elliptic parts on the vertex orbits of {carrying}",
            evidence=evidence,
            ids=carrying,
        )
    log.check("single_vertex_orbit", True, f"orbit of vertex {carrying[0]}")
    h0_dim = s.cohomology.h0_dim
    if ell_coh.h0_dim != h0_dim:
        vectors = _elliptic_sections(s, ell)
        evidence = _evidence(
            es0, projection, current, vectors, "elliptic sections form a subrepresentation"
        )
        log.check("elliptic_is_everything", False, f"{ell_coh.h0_dim} of {h0_dim}")
        raise HypothesisViolated(
            "ProperSubrepresentation",
            "the elliptic sections are a proper subrepresentation of H^0",
            evidence=evidence,
        )
    log.check("elliptic_is_everything", True, f"dimension {h0_dim}")
    return entries[0]


def _elliptic_sections(s, ell):
    vectors = []
    for v in s.tree.vertices:
        vectors.extend(
            _orbit_vectors(s, [v], ell.vertex_spaces, s.vertex_range, s.total_vdim)
        )
    return vectors


def _unifacial_step(es0, projection, current, rt, log):
    s = current.sheaf
    uni_coh = rt.suni.cohomology
    h0 = s.cohomology.h0
    inclusion = rt.suni_inclusion.vertex_matrix
    image = Subspace.span(
        s.field, s.total_vdim, [inclusion.apply(b) for b in uni_coh.h0.vectors()]
    )
    if image.dim != h0.dim:
        log.check("unifacial_is_everything", False, f"{image.dim} of {h0.dim}")
        evidence = _evidence(
            es0,
            projection,
            current,
            image.vectors(),
            "unifacial sections form a subrepresentation",
        )
        raise HypothesisViolated(
            "ProperSubrepresentation",
            "the unifacial sections are a proper subrepresentation of H^0",
            evidence=evidence,
        )
    log.check("unifacial_is_everything", True, f"dimension {h0.dim}")
    tc = t_cohomology(current, rt)
    log.check("connecting_map", True, f"{tc.delta.rows}x{tc.delta.cols}, invertible, equivariant")
    carrying = [e for e, _ in tc.entries]
    if len(carrying) > 1:
        e = carrying[0]
        members = next(m for rep, m in orbits(current.action, EDGE) if rep == e)
        t_full = [Subspace.full(s.field, d) for d in rt.T.edim]
        t_vectors = _orbit_vectors(rt.T, members, t_full, rt.T.edge_range, rt.T.total_edim)
        vectors = []
        for w in t_vectors:
            coords = solve(tc.delta, w)
            vectors.append(inclusion.apply(uni_coh.h0.combine(coords)))
        evidence = _evidence(es0, projection, current, vectors, "two edge orbits")
        log.check("single_edge_orbit", False, f"orbits of {carrying} carry T")
        raise HypothesisViolated(
            "TwoEdgeOrbits",
            f"T is nonzero on the edge orbits of {carrying}",
            evidence=evidence,
            ids=carrying,
        )
    log.check("single_edge_orbit", True, f"orbit of edge {carrying[0]}")
    return tc.entries[0]


def induction_decompose(es, norton_attempts=24, seed=0):
    """Run the induction on the 0-rank and return where H^0 is induced from.

    Errors raised along the way carry the assertions made so far in ``assertions``.
    """
    log = AssertionLog()
    try:
        return _decompose(es, log, norton_attempts, seed)
    except SheafTreeError as e:
        e.assertions = log.as_list()
        raise


def _decompose(es, log, norton_attempts, seed):
    trace = []
    rho = rep_on_h0(es)
    irreducibility = is_irreducible(rho, norton_attempts=norton_attempts, seed=seed)
    logger.info("H^0 has dimension %d; irreducible: %s", rho.dim, irreducibility.verdict.value)

    def finish(variant, cell=None, g_cell=(), sigma=None):
        logger.info("Decomposition: %s after %s", variant.value, [s.value for s in trace])
        return DecompositionResult(
            variant, cell, tuple(g_cell), sigma, list(trace), irreducibility, log.records
        )

    if rho.dim == 0:
        log.check("h0_zero", True, "H^0 vanishes")
        return finish(Variant.ZERO)
    if irreducibility.verdict == Verdict.NO:
        log.check("irreducible", False, irreducibility.reason)
        evidence = _verified_evidence(es, irreducibility.witness, irreducibility.reason)
        raise HypothesisViolated(
            "Reducible", f"H^0 is reducible ({irreducibility.reason})", evidence=evidence
        )
    if irreducibility.verdict == Verdict.INCONCLUSIVE:
        logger.warning("Irreducibility of H^0 is inconclusive: %s", irreducibility.reason)
    log.check("irreducible", True, irreducibility.reason)

    current = es
    projection = Matrix.identity(es.field, es.sheaf.total_vdim)
    max_steps = rank0(es)
    for _ in range(max_steps + 1):
        s = current.sheaf
        logger.debug("Step %d: rank0=%d", len(trace), rank0(current))
        ell = elliptic_subsheaf(s)
        if any(not w.is_zero() for w in ell.vertex_spaces):
            x, sigma = _elliptic_step(es, projection, current, log)
            trace.append(Step.ELLIPTIC)
            return finish(Variant.VERTEX_INDUCED, x, sigma.elements, sigma)

        u = unifacial_data(s)
        log.check(
            "unifacial_nonzero",
            not u.is_zero(),
            "multifacial sheaves have no global sections",
            TheoremViolated(
                "MultifacialWithSections", "a multifacial sheaf has nonzero H^0"
            ),
        )
        rt = build_R_T(s, u)
        log.check("star_blocks", True, f"{len(rt.star_blocks)} invertible blocks")
        uni_coh = rt.suni.cohomology
        log.check(
            "unifacial_h1_vanishes",
            uni_coh.h1_dim == 0,
            f"h1={uni_coh.h1_dim}",
            TheoremViolated("UnifacialH1", "H^1 of the unifacial subsheaf is nonzero"),
        )
        if uni_coh.h0_dim > 0:
            e, sigma = _unifacial_step(es, projection, current, rt, log)
            trace.append(Step.UNIFACIAL_KEPT)
            return finish(Variant.EDGE_INDUCED, e, sigma.elements, sigma)

        sub = u.as_subsheaf()
        quotient = build_quotient(s, sub)
        next_es = pass_to_quotient(current, sub, quotient)
        before, after = rank0(current), rank0(next_es)
        log.check(
            "rank0_decreases",
            after < before,
            f"{before} -> {after}",
            ConstructionMismatch("RankNotDecreasing", f"0-rank went from {before} to {after}"),
        )
        projection = quotient.projection.vertex_matrix @ projection
        _h0_comparison(es, projection, next_es)
        trace.append(Step.QUOTIENT_RECURSED)
        current = next_es
    raise ConstructionMismatch("NoTermination", f"no result after {max_steps + 1} steps")


@dataclass(frozen=True, eq=False)
class Certificate:
    induced: Representation
    transversal: tuple
    h0: Representation
    # induced(g) A = A h0(g)
    intertwiner: Matrix

    def as_dict(self):
        field_ = self.h0.field
        return {
            "dim": self.h0.dim,
            "transversal": list(self.transversal),
            "intertwiner": self.intertwiner.to_strings(),
            "determinant": field_.format_scalar(self.intertwiner.det()),
            "induced": self.induced.as_dict(),
            "h0": self.h0.as_dict(),
        }


def verify_decomposition(
    es, result, sweep_terms=3, enumeration_exponent=4, enumeration_limit=10_000
):
    h0 = rep_on_h0(es)
    field_ = es.field
    if result.variant == Variant.ZERO:
        if h0.dim != 0:
            raise CertificationFailed(
                "NonzeroH0", f"result is Zero but H^0 has dimension {h0.dim}"
            )
        zero = trivial_representation(es.group, field_, dim=0)
        return Certificate(zero, (), h0, Matrix.identity(field_, 0))
    induced = induce(es.group, result.stabilizer, result.sigma)
    iso = is_isomorphic(
        h0,
        induced.rep,
        sweep_terms=sweep_terms,
        enumeration_exponent=enumeration_exponent,
        enumeration_limit=enumeration_limit,
    )
    if iso.verdict != Verdict.YES:
        raise CertificationFailed(
            "NoIntertwiner",
            f"no invertible intertwiner between H^0 and the induced representation "
            f"({iso.verdict.value}: {iso.reason})",
        )
    a = iso.intertwiner
    if not is_intertwiner(h0, induced.rep, a) or not a.is_invertible():
        raise InternalAssertion("BadIntertwiner", "the returned intertwiner does not check")
    logger.info("Certified %s with a %dx%d intertwiner", result.variant.value, a.rows, a.cols)
    return Certificate(induced.rep, induced.transversal, h0, a)
