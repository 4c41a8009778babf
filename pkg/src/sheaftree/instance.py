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
"""The ``sheaftree/1`` instance document.

A JSON object with ``format``, ``field`` (``"Q"`` or ``"Fp:<p>"``), ``tree``
(``vertices`` and ``[id, x, y]`` edges), ``sheaf`` (``vertex_dims``, ``edge_dims``
and ``restrictions`` keyed ``"v:e"``) and an optional ``group`` (``order``, the
row-major multiplication ``table``, ``vertex_perms``, ``edge_perms`` and ``eta``
keyed ``"g:v:<id>"`` or ``"g:e:<id>"``). Matrices are row-major lists of scalar
strings. A matrix with no entries may be left out.
"""

import json
import logging
from dataclasses import dataclass
from typing import Literal

import pydantic
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt

from sheaftree.common import FORMAT_VERSION, digest
from sheaftree.equivariant import EDGE, VERTEX, EquivariantSheaf, GroupTable, TreeAction
from sheaftree.error import ScalarParseError, SchemaError, SheafError
from sheaftree.exactla import FieldSpec, Matrix
from sheaftree.sheaf import Sheaf
from sheaftree.tree import Tree

logger = logging.getLogger("sheaftree")

MatrixRows = list[list[str | int]]


class TreeModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vertices: PositiveInt
    edges: list[tuple[int, int, int]] = Field(default_factory=list)


class SheafModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vertex_dims: list[NonNegativeInt]
    edge_dims: list[NonNegativeInt]
    restrictions: dict[str, MatrixRows] = Field(default_factory=dict)


class GroupModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    order: PositiveInt
    table: list[int]
    vertex_perms: list[list[int]]
    edge_perms: list[list[int]]
    eta: dict[str, MatrixRows] = Field(default_factory=dict)


class InstanceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: Literal["sheaftree/1"]
    field: str = "Q"
    tree: TreeModel
    sheaf: SheafModel
    group: GroupModel | None = None


@dataclass(frozen=True, eq=False)
class Instance:
    field: FieldSpec
    tree: Tree
    sheaf: Sheaf
    equivariant: EquivariantSheaf | None
    digest: str

    @property
    def has_group(self):
        return self.equivariant is not None


def _parse_key(key, parts, where):
    pieces = key.split(":")
    if len(pieces) != parts:
        raise SchemaError("BadKey", f"{where} key {key!r} is malformed")
    return pieces


def _parse_matrix(field, rows, shape, where):
    """Parse a row-major matrix; an empty row list stands for any empty shape."""
    if not rows:
        return Matrix.zeros(field, *shape) if 0 in shape else Matrix.zeros(field, 0, 0)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SheafError("ShapeMismatch", f"{where} has rows of different lengths")
    try:
        return Matrix.from_rows(field, rows, cols=width)
    except ScalarParseError as e:
        raise ScalarParseError(e.kind, f"{where}: {e.message}") from None


def _first_schema_error(error):
    first = error.errors()[0]
    location = ".".join(str(p) for p in first["loc"]) or "<document>"
    return SchemaError("SchemaError", f"{location}: {first['msg']}")


def _build_sheaf(field, tree, model):
    sm = model.sheaf
    vdim, edim = list(sm.vertex_dims), list(sm.edge_dims)
    if len(vdim) != tree.n_vertices or len(edim) != tree.n_edges:
        raise SheafError(
            "ShapeMismatch",
            f"{len(vdim)} vertex and {len(edim)} edge dimensions for a tree with "
            f"{tree.n_vertices} vertices and {tree.n_edges} edges",
        )
    gamma = {}
    for key, rows in sorted(sm.restrictions.items()):
        v, e = _parse_key(key, 2, "restriction")
        if not (v.isdigit() and e.isdigit()):
            raise SchemaError("BadKey", f"restriction key {key!r} must be 'vertex:edge'")
        v, e = int(v), int(e)
        shape = (
            edim[e] if 0 <= e < len(edim) else 0,
            vdim[v] if 0 <= v < len(vdim) else 0,
        )
        gamma[(v, e)] = _parse_matrix(field, rows, shape, f"restriction {key}")
    for v, e in tree.incident_pairs():
        if (v, e) not in gamma and 0 in (edim[e], vdim[v]):
            gamma[(v, e)] = Matrix.zeros(field, edim[e], vdim[v])
    return Sheaf.build(tree, field, vdim, edim, gamma)


def _build_equivariant(field, tree, sheaf, gm):
    n = gm.order
    if len(gm.table) != n * n:
        raise SchemaError("SchemaError", f"group.table needs {n * n} entries, got {len(gm.table)}")
    group = GroupTable.build([gm.table[i * n : (i + 1) * n] for i in range(n)])
    action = TreeAction.build(tree, group, gm.vertex_perms, gm.edge_perms)
    dims = {VERTEX: sheaf.vdim, EDGE: sheaf.edim}
    eta = {VERTEX: {}, EDGE: {}}
    for key, rows in sorted(gm.eta.items()):
        g, kind, cell = _parse_key(key, 3, "eta")
        kind = {"v": VERTEX, "e": EDGE}.get(kind)
        if kind is None or not g.isdigit() or not cell.isdigit():
            raise SchemaError("BadKey", f"eta key {key!r} must be 'g:v:<id>' or 'g:e:<id>'")
        g, cell = int(g), int(cell)
        if g >= n or cell >= len(dims[kind]):
            raise SchemaError("BadKey", f"eta key {key!r} names an unknown element or cell")
        shape = (dims[kind][action.act(g, kind, cell)], dims[kind][cell])
        eta[kind][(g, cell)] = _parse_matrix(field, rows, shape, f"eta {key}")
    for g in group.elements:
        for kind, count in ((VERTEX, tree.n_vertices), (EDGE, tree.n_edges)):
            for cell in range(count):
                shape = (dims[kind][action.act(g, kind, cell)], dims[kind][cell])
                if (g, cell) not in eta[kind] and 0 in shape:
                    eta[kind][(g, cell)] = Matrix.zeros(field, *shape)
    return EquivariantSheaf.build(sheaf, action, eta[VERTEX], eta[EDGE])


def load_document(document):
    """Validate an already decoded instance document."""
    try:
        model = InstanceModel.model_validate(document)
    except pydantic.ValidationError as e:
        raise _first_schema_error(e) from None
    field = FieldSpec.parse(model.field)
    tree = Tree.build(model.tree.vertices, model.tree.edges)
    sheaf = _build_sheaf(field, tree, model)
    es = None
    if model.group is not None:
        es = _build_equivariant(field, tree, sheaf, model.group)
    instance = Instance(field, tree, sheaf, es, digest(document))
    logger.debug(
        "Loaded instance %s: %d vertices, %d edges, group of order %s",
        instance.digest[:12],
        tree.n_vertices,
        tree.n_edges,
        es.group.order if es is not None else "-",
    )
    return instance


def parse_instance(text):
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("BadJson", f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return load_document(document)


def serialize_instance(sheaf, es=None):
    """The instance document of a sheaf and optional equivariant structure."""
    field = sheaf.field
    tree = sheaf.tree
    document = {
        "format": FORMAT_VERSION,
        "field": str(field),
        "tree": {
            "vertices": tree.n_vertices,
            "edges": [[e.id, e.x, e.y] for e in tree.edges],
        },
        "sheaf": {
            "vertex_dims": list(sheaf.vdim),
            "edge_dims": list(sheaf.edim),
            "restrictions": {
                f"{v}:{e}": g.to_strings() for (v, e), g in sorted(sheaf.gamma.items())
            },
        },
    }
    if es is not None:
        group = es.group
        eta = {f"{g}:v:{v}": m.to_strings() for (g, v), m in sorted(es.eta_v.items())}
        eta.update({f"{g}:e:{e}": m.to_strings() for (g, e), m in sorted(es.eta_e.items())})
        document["group"] = {
            "order": group.order,
            "table": [x for row in group.mul for x in row],
            "vertex_perms": [list(p) for p in es.action.vertex_perms],
            "edge_perms": [list(p) for p in es.action.edge_perms],
            "eta": eta,
        }
    return document
