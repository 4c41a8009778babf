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
"""Exact linear algebra over the rationals and prime fields.

Scalars are elements of a sympy ground domain (``QQ`` or ``GF(p)``). Matrices keep
their entries as tuples so they compare structurally; products, row reduction,
determinants and inverses go through ``DomainMatrix``. Subspaces are stored by a
basis in reduced row echelon form, so two subspaces are equal exactly when their
stored bases are equal.
"""

import functools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

from sympy import Basic, isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

from sheaftree.error import (
    DimensionMismatch,
    FieldError,
    InternalAssertion,
    ScalarParseError,
)

RATIONALS = "Q"
PRIME_FIELD = "Fp"

# An element of FieldSpec.domain.
Scalar = Any


@functools.lru_cache(maxsize=None)
def _domain(kind, p):
    if kind == RATIONALS:
        return QQ
    return GF(p)


@dataclass(frozen=True)
class FieldSpec:
    kind: str = RATIONALS
    p: int | None = None

    def __post_init__(self):
        if self.kind == RATIONALS:
            if self.p is not None:
                raise FieldError("BadField", "the rationals take no characteristic")
        elif self.kind == PRIME_FIELD:
            if (
                not isinstance(self.p, int)
                or isinstance(self.p, bool)
                or self.p < 2
                or not isprime(self.p)
            ):
                raise FieldError("NotPrime", f"{self.p} is not a prime", ids=(self.p,))
        else:
            raise FieldError("BadField", f"Unknown field kind {self.kind!r}")

    @classmethod
    def parse(cls, text):
        """Parse ``Q`` or ``Fp:<p>``."""
        text = str(text).strip()
        if text in ("Q", "QQ"):
            return cls(RATIONALS)
        prefix, sep, rest = text.partition(":")
        if prefix in ("Fp", "GF") and sep:
            try:
                p = int(rest)
            except ValueError:
                raise FieldError(
                    "BadField", f"Cannot parse the characteristic in {text!r}"
                ) from None
            return cls(PRIME_FIELD, p)
        raise FieldError("BadField", f"Expected 'Q' or 'Fp:<p>', got {text!r}")

    def __str__(self):
        return "Q" if self.kind == RATIONALS else f"Fp:{self.p}"

    @property
    def domain(self):
        return _domain(self.kind, self.p)

    @property
    def characteristic(self):
        return 0 if self.kind == RATIONALS else self.p

    @property
    def is_finite(self):
        return self.kind == PRIME_FIELD

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def is_zero(self, x):
        return self.domain.is_zero(x)

    def scalar(self, value):
        """Coerce an int, Fraction, string, sympy number or domain element."""
        K = self.domain
        if isinstance(value, str):
            return self.parse_scalar(value)
        if K.of_type(value):
            return value
        if isinstance(value, bool):
            raise ScalarParseError("BadScalar", f"{value!r} is not a scalar")
        if isinstance(value, int):
            return K.convert(value)
        if isinstance(value, Fraction):
            return self._quotient(value.numerator, value.denominator, value)
        if isinstance(value, Basic):
            return K.from_sympy(value)
        raise ScalarParseError("BadScalar", f"Cannot coerce {value!r} into {self}")

    def _quotient(self, n, d, text):
        if d == 0 or (self.kind == PRIME_FIELD and d % self.p == 0):
            raise ScalarParseError("BadScalar", f"{text!r} has a zero denominator in {self}")
        K = self.domain
        return K.quo(K.convert(n), K.convert(d))

    def parse_scalar(self, text):
        """Parse ``a`` or ``a/b``; prime-field values are reduced to residues."""
        text = text.strip()
        num, sep, den = text.partition("/")
        try:
            n = int(num)
            d = int(den) if sep else 1
        except ValueError:
            raise ScalarParseError("BadScalar", f"{text!r} is not a {self} scalar") from None
        return self._quotient(n, d, text)

    def residue(self, x):
        """Canonical residue in [0, p) of a prime-field element."""
        return int(self.domain.to_int(x)) % self.p

    def format_scalar(self, x):
        if self.kind == RATIONALS:
            K = self.domain
            n, d = int(K.numer(x)), int(K.denom(x))
            return str(n) if d == 1 else f"{n}/{d}"
        return str(self.residue(x))

    def elements(self):
        """All elements of a prime field, in residue order."""
        if not self.is_finite:
            raise FieldError("BadField", "the rationals cannot be enumerated")
        return [self.domain.convert(i) for i in range(self.p)]


def _offsets(sizes):
    offsets, total = [], 0
    for size in sizes:
        offsets.append(total)
        total += size
    return offsets, total


@dataclass(frozen=True, eq=False)
class Matrix:
    field: FieldSpec
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatch(
                "ShapeMismatch", f"entries do not form a {self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(cls, field, rows, cols=None):
        rows = [tuple(field.scalar(x) for x in row) for row in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(field, len(rows), cols, tuple(rows))

    @classmethod
    def from_columns(cls, field, columns, rows):
        columns = [tuple(c) for c in columns]
        return cls.from_rows(
            field, [[c[i] for c in columns] for i in range(rows)], cols=len(columns)
        )

    @classmethod
    def zeros(cls, field, rows, cols):
        zero = field.zero
        return cls(field, rows, cols, tuple((zero,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, field, n):
        zero, one = field.zero, field.one
        return cls(
            field,
            n,
            n,
            tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)),
        )

    @classmethod
    def block(cls, field, row_sizes, col_sizes, blocks):
        """Assemble a block matrix; ``blocks`` maps (block row, block column) to a Matrix."""
        row_offsets, total_rows = _offsets(row_sizes)
        col_offsets, total_cols = _offsets(col_sizes)
        grid = [[field.zero] * total_cols for _ in range(total_rows)]
        for (i, j), m in blocks.items():
            if m.shape != (row_sizes[i], col_sizes[j]):
                raise DimensionMismatch(
                    "ShapeMismatch",
                    f"block ({i},{j}) is {m.shape}, expected {(row_sizes[i], col_sizes[j])}",
                )
            for a, row in enumerate(m.entries):
                target = grid[row_offsets[i] + a]
                for b, x in enumerate(row):
                    target[col_offsets[j] + b] = x
        return cls(field, total_rows, total_cols, tuple(map(tuple, grid)))

    @classmethod
    def _from_dm(cls, field, dm):
        return cls.from_rows(field, dm.to_list(), cols=dm.shape[1])

    @cached_property
    def _dm(self):
        return DomainMatrix(
            [list(r) for r in self.entries], (self.rows, self.cols), self.field.domain
        )

    @property
    def shape(self):
        return (self.rows, self.cols)

    def entry(self, i, j):
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return tuple(r[j] for r in self.entries)

    def _check_same_field(self, other):
        if self.field != other.field:
            raise DimensionMismatch(
                "FieldMismatch", f"cannot combine matrices over {self.field} and {other.field}"
            )

    def __matmul__(self, other):
        self._check_same_field(other)
        if self.cols != other.rows:
            raise DimensionMismatch(
                "ShapeMismatch", f"cannot multiply {self.shape} by {other.shape}"
            )
        if 0 in (self.rows, self.cols, other.cols):
            return Matrix.zeros(self.field, self.rows, other.cols)
        return Matrix._from_dm(self.field, self._dm.matmul(other._dm))

    def _elementwise(self, other, op):
        self._check_same_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(
                "ShapeMismatch", f"cannot combine {self.shape} and {other.shape}"
            )
        return Matrix(
            self.field,
            self.rows,
            self.cols,
            tuple(
                tuple(op(a, b) for a, b in zip(r1, r2))
                for r1, r2 in zip(self.entries, other.entries)
            ),
        )

    def __add__(self, other):
        return self._elementwise(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._elementwise(other, lambda a, b: a - b)

    def __neg__(self):
        return Matrix(
            self.field, self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.entries)
        )

    def scale(self, c):
        c = self.field.scalar(c)
        return Matrix(
            self.field,
            self.rows,
            self.cols,
            tuple(tuple(c * a for a in r) for r in self.entries),
        )

    def transpose(self):
        return Matrix(
            self.field,
            self.cols,
            self.rows,
            tuple(
                tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)
            ),
        )

    def apply(self, vector):
        vector = tuple(vector)
        if len(vector) != self.cols:
            raise DimensionMismatch(
                "ShapeMismatch", f"cannot apply a {self.shape} matrix to a {len(vector)}-vector"
            )
        zero = self.field.zero
        return tuple(sum((a * b for a, b in zip(r, vector)), zero) for r in self.entries)

    def select(self, rows, cols):
        rows, cols = list(rows), list(cols)
        return Matrix(
            self.field,
            len(rows),
            len(cols),
            tuple(tuple(self.entries[i][j] for j in cols) for i in rows),
        )

    def hstack(self, *others):
        for other in others:
            self._check_same_field(other)
            if other.rows != self.rows:
                raise DimensionMismatch("ShapeMismatch", "hstack needs equal row counts")
        return Matrix(
            self.field,
            self.rows,
            self.cols + sum(o.cols for o in others),
            tuple(
                sum((o.entries[i] for o in others), self.entries[i]) for i in range(self.rows)
            ),
        )

    def vstack(self, *others):
        for other in others:
            self._check_same_field(other)
            if other.cols != self.cols:
                raise DimensionMismatch("ShapeMismatch", "vstack needs equal column counts")
        return Matrix(
            self.field,
            self.rows + sum(o.rows for o in others),
            self.cols,
            sum((o.entries for o in others), self.entries),
        )

    def is_zero(self):
        return all(self.field.is_zero(x) for r in self.entries for x in r)

    def is_square(self):
        return self.rows == self.cols

    def trace(self):
        return sum((self.entries[i][i] for i in range(min(self.rows, self.cols))), self.field.zero)

    def det(self):
        if not self.is_square():
            raise DimensionMismatch("ShapeMismatch", f"det of a non-square {self.shape} matrix")
        if self.rows == 0:
            return self.field.one
        return self._dm.det()

    def is_invertible(self):
        return self.is_square() and not self.field.is_zero(self.det())

    def inverse(self):
        if not self.is_invertible():
            raise InternalAssertion("Singular", f"matrix of shape {self.shape} is not invertible")
        if self.rows == 0:
            return self
        return Matrix._from_dm(self.field, self._dm.inv())

    def charpoly(self):
        """Characteristic polynomial coefficients, leading coefficient first."""
        if not self.is_square():
            raise DimensionMismatch("ShapeMismatch", "charpoly of a non-square matrix")
        if self.rows == 0:
            return [self.field.one]
        return list(self._dm.charpoly())

    def rank(self):
        return rref(self)[2]

    def to_strings(self):
        fmt = self.field.format_scalar
        return [[fmt(x) for x in r] for r in self.entries]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and self.entries == other.entries
        )

    __hash__ = None

    def __repr__(self):
        return f"Matrix({self.field}, {self.rows}x{self.cols}, {self.to_strings()})"


def zero_vector(field, n):
    return (field.zero,) * n


def is_zero_vector(field, vector):
    return all(field.is_zero(x) for x in vector)


def format_vector(field, vector):
    return [field.format_scalar(x) for x in vector]


def rref(m):
    """Reduced row echelon form of ``m`` with its pivot columns and rank."""
    if m.rows == 0 or m.cols == 0:
        return m, [], 0
    reduced, pivots = m._dm.rref()
    pivots = [int(p) for p in pivots]
    return Matrix._from_dm(m.field, reduced), pivots, len(pivots)


@dataclass(frozen=True, eq=False)
class Subspace:
    field: FieldSpec
    ambient_dim: int
    basis: Matrix
    pivots: tuple

    @classmethod
    def span(cls, field, ambient_dim, vectors):
        m = Matrix.from_rows(field, list(vectors), cols=ambient_dim)
        reduced, pivots, rank = rref(m)
        return cls(
            field, ambient_dim, reduced.select(range(rank), range(ambient_dim)), tuple(pivots)
        )

    @classmethod
    def zero(cls, field, ambient_dim):
        return cls(field, ambient_dim, Matrix.zeros(field, 0, ambient_dim), ())

    @classmethod
    def full(cls, field, ambient_dim):
        return cls(
            field, ambient_dim, Matrix.identity(field, ambient_dim), tuple(range(ambient_dim))
        )

    @property
    def dim(self):
        return self.basis.rows

    def is_zero(self):
        return self.dim == 0

    def is_full(self):
        return self.dim == self.ambient_dim

    def vectors(self):
        return list(self.basis.entries)

    def non_pivots(self):
        pivots = set(self.pivots)
        return [j for j in range(self.ambient_dim) if j not in pivots]

    def reduce(self, vector):
        """Residual of ``vector`` after clearing its pivot coordinates."""
        residual = list(vector)
        if len(residual) != self.ambient_dim:
            raise DimensionMismatch(
                "AmbientMismatch",
                f"{len(residual)}-vector against a subspace of dimension {self.ambient_dim}",
            )
        for i, p in enumerate(self.pivots):
            c = vector[p]
            if self.field.is_zero(c):
                continue
            row = self.basis.entries[i]
            residual = [r - c * b for r, b in zip(residual, row)]
        return tuple(residual)

    def contains(self, vector):
        return is_zero_vector(self.field, self.reduce(vector))

    def contains_subspace(self, other):
        return all(self.contains(v) for v in other.vectors())

    def coordinates(self, vector):
        """Coordinates of ``vector`` in the stored basis, or None if it is not a member."""
        if not self.contains(vector):
            return None
        return tuple(vector[p] for p in self.pivots)

    def combine(self, coordinates):
        """The member of the subspace with the given basis coordinates."""
        coordinates = tuple(coordinates)
        if len(coordinates) != self.dim:
            raise DimensionMismatch(
                "ShapeMismatch", f"{len(coordinates)} coordinates for a {self.dim}-dim subspace"
            )
        return self.basis.transpose().apply(coordinates)

    def inclusion(self):
        """The ambient_dim x dim matrix whose columns are the basis vectors."""
        return self.basis.transpose()

    def image(self, m):
        return Subspace.span(self.field, m.rows, [m.apply(v) for v in self.vectors()])

    def sum(self, other):
        return _zassenhaus(self, other)[0]

    def intersect(self, other):
        return _zassenhaus(self, other)[1]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.field == other.field
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    __hash__ = None

    def __repr__(self):
        return f"Subspace({self.field}, dim {self.dim} in {self.ambient_dim}, {self.basis.to_strings()})"


def _check_ambient(a, b):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(
            "AmbientMismatch",
            f"subspaces live in dimensions {a.ambient_dim} and {b.ambient_dim}",
        )
    if a.field != b.field:
        raise DimensionMismatch("FieldMismatch", f"subspaces over {a.field} and {b.field}")


def _zassenhaus(a, b):
    """Sum and intersection from one row reduction of [[A, A], [B, 0]]."""
    _check_ambient(a, b)
    n, field = a.ambient_dim, a.field
    padding = zero_vector(field, n)
    rows = [v + v for v in a.vectors()] + [v + padding for v in b.vectors()]
    reduced, pivots, _rank = rref(Matrix.from_rows(field, rows, cols=2 * n))
    sum_rows = [reduced.row(i)[:n] for i, p in enumerate(pivots) if p < n]
    meet_rows = [reduced.row(i)[n:] for i, p in enumerate(pivots) if p >= n]
    return Subspace.span(field, n, sum_rows), Subspace.span(field, n, meet_rows)


def kernel_basis(m):
    reduced, pivots, _rank = rref(m)
    field = m.field
    free = [j for j in range(m.cols) if j not in set(pivots)]
    vectors = []
    for f in free:
        v = [field.zero] * m.cols
        v[f] = field.one
        for i, p in enumerate(pivots):
            v[p] = -reduced.entry(i, f)
        vectors.append(v)
    return Subspace.span(field, m.cols, vectors)


def column_space(m):
    return Subspace.span(m.field, m.rows, [m.column(j) for j in range(m.cols)])


def intersect(a, b):
    return a.intersect(b)


def subspace_sum(a, b):
    return a.sum(b)


def quotient_map(ambient_dim, sub):
    """Projection onto the non-pivot coordinates of ``sub``, and its section.

    ``proj`` kills exactly ``sub`` and ``proj @ section`` is the identity.
    """
    if sub.ambient_dim != ambient_dim:
        raise DimensionMismatch(
            "AmbientMismatch",
            f"subspace of dimension {sub.ambient_dim} in a {ambient_dim}-dim space",
        )
    field = sub.field
    free = sub.non_pivots()
    proj = [[field.zero] * ambient_dim for _ in free]
    section = [[field.zero] * len(free) for _ in range(ambient_dim)]
    for k, c in enumerate(free):
        proj[k][c] = field.one
        section[c][k] = field.one
    for i, p in enumerate(sub.pivots):
        row = sub.basis.row(i)
        for k, c in enumerate(free):
            proj[k][p] = -row[c]
    return (
        Matrix.from_rows(field, proj, cols=ambient_dim),
        Matrix.from_rows(field, section, cols=len(free)),
    )


def solve(m, rhs):
    """Some v with m v = rhs, or None when the system is inconsistent."""
    rhs = tuple(rhs)
    if len(rhs) != m.rows:
        raise DimensionMismatch(
            "ShapeMismatch", f"right-hand side of length {len(rhs)} for {m.rows} equations"
        )
    augmented = m.hstack(Matrix.from_columns(m.field, [rhs], m.rows))
    reduced, pivots, _rank = rref(augmented)
    if m.cols in pivots:
        return None
    v = [m.field.zero] * m.cols
    for i, p in enumerate(pivots):
        v[p] = reduced.entry(i, m.cols)
    return tuple(v)
