"""Finite-dimensional Lie algebras given by a sparse structure-constant table."""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import DimensionMismatchError, PreconditionError
from .linalg import (
    QQ,
    Field,
    Matrix,
    RowReducer,
    Scalar,
    SparseRow,
    Subspace,
    _axpy,
    kernel_of_rows,
)


logger = logging.getLogger(__name__)

Element = Union[SparseRow, Sequence]
Pair = Tuple[int, int]


@dataclass(frozen=True)
class IdentityCheck:
    """Outcome of an exhaustive identity check, with the first failing indices."""

    passed: bool
    witness: Optional[Tuple[int, ...]] = None
    checked: int = 0

    def __bool__(self) -> bool:
        return self.passed


class LieAlgebra:
    """
    Lie algebra over a field with basis e_0..e_{dim-1}.

    The table maps ordered index pairs to sparse coefficient rows of the
    bracket. Builders store each unordered pair once with a < b; a missing
    (b, a) entry is read as the negative of (a, b). Elements are sparse
    {basis index: scalar} maps; dense sequences of length dim are accepted.
    """

    def __init__(
        self,
        labels: Sequence[str],
        table: Dict[Pair, SparseRow],
        field: Field = QQ,
    ):
        self.labels = list(labels)
        self.field = field
        self._table: Dict[Pair, SparseRow] = {}
        for (a, b), row in table.items():
            if not (0 <= a < self.dim and 0 <= b < self.dim):
                raise DimensionMismatchError(f"Structure constant index ({a},{b}) out of range")
            clean = {k: field.element(v) for k, v in row.items() if v}
            clean = {k: v for k, v in clean.items() if v}
            if clean:
                self._table[(a, b)] = clean

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def table(self) -> Dict[Pair, SparseRow]:
        return {key: dict(row) for key, row in self._table.items()}

    @cached_property
    def _brackets(self) -> Dict[Pair, SparseRow]:
        full: Dict[Pair, SparseRow] = {}
        for (a, b), row in self._table.items():
            full[(a, b)] = row
            if (b, a) not in self._table:
                full[(b, a)] = {k: -v for k, v in row.items()}
        return full

    @cached_property
    def _right(self) -> List[Dict[int, SparseRow]]:
        """_right[b][a] = [e_a, e_b] for the nonzero brackets."""
        right: List[Dict[int, SparseRow]] = [{} for _ in range(self.dim)]
        for (a, b), row in self._brackets.items():
            right[b][a] = row
        return right

    @cached_property
    def _left(self) -> List[Dict[int, SparseRow]]:
        """_left[a][b] = [e_a, e_b] for the nonzero brackets."""
        left: List[Dict[int, SparseRow]] = [{} for _ in range(self.dim)]
        for (a, b), row in self._brackets.items():
            left[a][b] = row
        return left

    def structure_constant(self, a: int, b: int) -> SparseRow:
        """[e_a, e_b] as a sparse row."""
        return dict(self._brackets.get((a, b), {}))

    def as_sparse(self, x: Element) -> SparseRow:
        if isinstance(x, dict):
            items = x.items()
        else:
            if len(x) != self.dim:
                raise DimensionMismatchError(
                    f"Element of length {len(x)} in algebra of dimension {self.dim}"
                )
            items = enumerate(x)
        out = {}
        for idx, value in items:
            if value:
                out[idx] = self.field.element(value)
        return out

    def as_dense(self, x: Element) -> List[Scalar]:
        zero = self.field.zero
        sparse = self.as_sparse(x)
        return [sparse.get(i, zero) for i in range(self.dim)]

    def basis_element(self, index: int) -> SparseRow:
        return {index: self.field.one}

    def bracket(self, x: Element, y: Element) -> SparseRow:
        """Bilinear extension of the structure table."""
        return self.bracket_values(self.as_sparse(x), self.as_sparse(y))

    def bracket_values(self, x: SparseRow, y: SparseRow) -> SparseRow:
        """Bracket of sparse elements with arbitrary numeric coefficients, uncoerced."""
        out: SparseRow = {}
        for a, xa in x.items():
            left = self._left[a]
            for b, yb in y.items():
                row = left.get(b)
                if row:
                    _axpy(out, xa * yb, row)
        return out

    def adjoint_columns(self, x: Element) -> Dict[int, SparseRow]:
        """Nonzero columns {b: [x, e_b]} of ad_x."""
        x = self.as_sparse(x)
        cols: Dict[int, SparseRow] = {}
        for a, xa in x.items():
            for b, row in self._left[a].items():
                col = cols.setdefault(b, {})
                _axpy(col, xa, row)
        return {b: col for b, col in cols.items() if col}

    def adjoint_matrix(self, x: Element) -> Matrix:
        """Matrix of ad_x; column b holds the coordinates of [x, e_b]."""
        data = np.full((self.dim, self.dim), 0, dtype=object)
        for b, col in self.adjoint_columns(x).items():
            for i, v in col.items():
                data[i, b] = v
        return Matrix(data, self.field)

    def trace_ad(self, x: Element) -> Scalar:
        total = self.field.zero
        for b, col in self.adjoint_columns(x).items():
            total = total + col.get(b, 0)
        return total

    def trace_form(self, x: Element, y: Element) -> Scalar:
        """tr(ad_x ad_y)."""
        ad_x, ad_y = self.adjoint_columns(x), self.adjoint_columns(y)
        total = self.field.zero
        for b, col in ad_y.items():
            for i, v in col.items():
                entry = ad_x.get(i, {}).get(b)
                if entry:
                    total = total + entry * v
        return total

    def basis_adjoint(self, a: int) -> Dict[int, SparseRow]:
        """Nonzero columns {b: [e_a, e_b]} of ad_{e_a}; shared, do not mutate."""
        return self._left[a]

    def structure_tensor(self) -> np.ndarray:
        """Float array C with C[a, b, k] = coefficient of e_k in [e_a, e_b]; cached."""
        return self._structure_tensor

    @cached_property
    def _structure_tensor(self) -> np.ndarray:
        c = np.zeros((self.dim, self.dim, self.dim))
        for (a, b), row in self._brackets.items():
            for k, v in row.items():
                c[a, b, k] = float(v)
        return c

    def verify_antisymmetry(self) -> IdentityCheck:
        """[e_a, e_a] = 0 and stored (a, b), (b, a) entries are negatives."""
        checked = 0
        for (a, b), row in sorted(self._table.items()):
            checked += 1
            if a == b:
                return IdentityCheck(False, (a, b), checked)
            other = self._table.get((b, a))
            if other is not None and {k: -v for k, v in other.items()} != row:
                return IdentityCheck(False, (min(a, b), max(a, b)), checked)
        return IdentityCheck(True, None, checked)

    def jacobiator(self, a: int, b: int, c: int) -> SparseRow:
        """[e_a,[e_b,e_c]] + [e_b,[e_c,e_a]] + [e_c,[e_a,e_b]]."""
        out: SparseRow = {}
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            inner = self._brackets.get((y, z))
            if not inner:
                continue
            left = self._left[x]
            for k, v in inner.items():
                row = left.get(k)
                if row:
                    _axpy(out, v, row)
        return out

    def verify_jacobi(self) -> IdentityCheck:
        """
        Exhaustive Jacobi identity over basis triples a < b < c.

        Returns:
            IdentityCheck with the first failing triple as witness.
        """
        checked = 0
        for a, b, c in combinations(range(self.dim), 3):
            checked += 1
            if self.jacobiator(a, b, c):
                logger.debug("Jacobi fails on (%d, %d, %d)", a, b, c)
                return IdentityCheck(False, (a, b, c), checked)
        return IdentityCheck(True, None, checked)

    def full_space(self) -> Subspace:
        return Subspace.full(self.dim, self.field)

    def bracket_spaces(self, first: Subspace, second: Subspace) -> Subspace:
        """[A, B] = span of brackets of basis vectors."""
        reducer = RowReducer(self.dim, self.field)
        second_rows = second.basis_rows()
        for x in first.basis_rows():
            for y in second_rows:
                reducer.add(self.bracket(x, y))
        return Subspace(self.dim, self.field, reducer)

    def derived_series(self) -> List[Subspace]:
        """g, [g,g], [g',g'], ... ending with the first term equal to its successor."""
        series = [self.full_space()]
        while True:
            nxt = self.bracket_spaces(series[-1], series[-1])
            if nxt.dim == series[-1].dim:
                break
            series.append(nxt)
            if nxt.dim == 0:
                break
        logger.debug("Derived series dims: %s", [s.dim for s in series])
        return series

    def lower_central_series(self) -> List[Subspace]:
        """g, [g,g], [g,[g,g]], ... ending once the series stabilises."""
        full = self.full_space()
        series = [full]
        while True:
            nxt = self.bracket_spaces(full, series[-1])
            if nxt.dim == series[-1].dim:
                break
            series.append(nxt)
            if nxt.dim == 0:
                break
        logger.debug("Lower central series dims: %s", [s.dim for s in series])
        return series

    def center_oracle(self) -> Subspace:
        """Joint kernel of all basis adjoints: {l : [l, e_b] = 0 for every b}."""
        rows: Dict[Pair, SparseRow] = {}
        for b in range(self.dim):
            for a, row in self._right[b].items():
                for k, v in row.items():
                    rows.setdefault((b, k), {})[a] = v
        return kernel_of_rows(rows.values(), self.dim, self.field)

    def centralizer_of(self, space: Subspace) -> Subspace:
        """{l : [l, s] = 0 for s in space}."""
        rows: List[SparseRow] = []
        for s in space.basis_rows():
            per_k: Dict[int, SparseRow] = {}
            for a in range(self.dim):
                for k, v in self.bracket({a: self.field.one}, s).items():
                    per_k.setdefault(k, {})[a] = v
            rows.extend(per_k.values())
        return kernel_of_rows(rows, self.dim, self.field)

    def is_subalgebra(self, space: Subspace) -> bool:
        return self.bracket_spaces(space, space).is_subspace_of(space)

    def is_ideal(self, space: Subspace) -> bool:
        return self.bracket_spaces(self.full_space(), space).is_subspace_of(space)

    def is_nilpotent_subalgebra(self, space: Subspace) -> bool:
        """
        Iterates S, [S,S], [S,[S,S]], ... and reports whether it reaches zero.
        """
        if not self.is_subalgebra(space):
            return False
        term = space
        for _ in range(space.dim + 1):
            if term.dim == 0:
                return True
            nxt = self.bracket_spaces(space, term)
            if nxt.dim == term.dim:
                return False
            term = nxt
        return term.dim == 0

    def subalgebra(self, indices: Sequence[int]) -> "LieAlgebra":
        """
        Subalgebra spanned by a set of basis vectors, re-indexed in the given order.

        Raises:
            PreconditionError: If the span is not closed under the bracket.
        """
        position = {old: new for new, old in enumerate(indices)}
        table: Dict[Pair, SparseRow] = {}
        for a, b in combinations(indices, 2):
            row = self._brackets.get((a, b))
            if not row:
                continue
            if any(k not in position for k in row):
                raise PreconditionError(
                    f"Span is not a subalgebra: [{self.labels[a]}, {self.labels[b]}] leaves it"
                )
            pa, pb = position[a], position[b]
            mapped = {position[k]: v for k, v in row.items()}
            if pa < pb:
                table[(pa, pb)] = mapped
            else:
                table[(pb, pa)] = {k: -v for k, v in mapped.items()}
        return LieAlgebra([self.labels[i] for i in indices], table, self.field)

    def restrict(self, space: Subspace) -> "LieAlgebra":
        """
        Subalgebra on the RREF basis of a subspace. The coordinates of a vector
        of the space are its entries at the pivot columns.

        Raises:
            PreconditionError: If the space is not closed under the bracket.
        """
        rows = space.basis_rows()
        pivots = space.pivots
        table: Dict[Pair, SparseRow] = {}
        for i, j in combinations(range(len(rows)), 2):
            value = self.bracket_values(rows[i], rows[j])
            if not value:
                continue
            if not space.contains(value):
                raise PreconditionError("Space is not closed under the bracket")
            table[(i, j)] = {
                idx: value[p] for idx, p in enumerate(pivots) if value.get(p)
            }
        labels = [
            self.labels[min(row)] if len(row) == 1 else f"v{i}"
            for i, row in enumerate(rows)
        ]
        return LieAlgebra(labels, table, self.field)

    def with_structure_constant(self, a: int, b: int, row: SparseRow) -> "LieAlgebra":
        """Copy with the raw table entry (a, b) replaced; (b, a) is left untouched."""
        table = self.table
        table[(a, b)] = dict(row)
        return LieAlgebra(self.labels, table, self.field)

    def _leibniz_rows(self, a: int, b: int) -> Dict[int, SparseRow]:
        """
        Rows of D[e_a,e_b] - [D e_a, e_b] - [e_a, D e_b] = 0 for one pair,
        one per output coordinate, over unknowns D[i][j] at column i*dim + j.
        """
        n = self.dim
        rows: Dict[int, SparseRow] = {}

        def add(k: int, col: int, value: Scalar) -> None:
            row = rows.setdefault(k, {})
            updated = row.get(col, 0) + value
            if updated:
                row[col] = updated
            else:
                row.pop(col, None)

        for m, v in self._brackets.get((a, b), {}).items():
            for k in range(n):
                add(k, k * n + m, v)
        for i, row in self._right[b].items():
            for k, v in row.items():
                add(k, i * n + a, -v)
        for i, row in self._left[a].items():
            for k, v in row.items():
                add(k, i * n + b, -v)
        return rows

    def derivation_space(self) -> Subspace:
        """
        All derivations, as flattened matrices (entry D[i][j] at index i*dim + j).

        Solves the Leibniz system over every basis pair a < b exactly.
        """
        def rows() -> Iterable[SparseRow]:
            for a, b in combinations(range(self.dim), 2):
                for row in self._leibniz_rows(a, b).values():
                    if row:
                        yield row

        space = kernel_of_rows(rows(), self.dim * self.dim, self.field)
        logger.debug("Derivation space of dim-%d algebra: %d", self.dim, space.dim)
        return space

    def flatten(self, m: Matrix) -> SparseRow:
        if m.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"Expected {self.dim}x{self.dim}, got {m.shape}")
        return {
            i * self.dim + j: v for (i, j), v in np.ndenumerate(m.data) if v
        }

    def unflatten(self, flat: SparseRow) -> Matrix:
        data = np.full((self.dim, self.dim), 0, dtype=object)
        for idx, v in flat.items():
            data[divmod(idx, self.dim)] = v
        return Matrix(data, self.field)

    def leibniz_defect(self, d: Matrix) -> Dict[Pair, SparseRow]:
        """Nonzero D[e_a,e_b] - [D e_a, e_b] - [e_a, D e_b] for a < b."""
        columns = [
            {i: d.data[i, j] for i in range(self.dim) if d.data[i, j]}
            for j in range(self.dim)
        ]
        defects: Dict[Pair, SparseRow] = {}
        for a, b in combinations(range(self.dim), 2):
            out: SparseRow = {}
            for m, v in self._brackets.get((a, b), {}).items():
                _axpy(out, v, columns[m])
            _axpy(out, -self.field.one, self.bracket(columns[a], {b: self.field.one}))
            _axpy(out, -self.field.one, self.bracket({a: self.field.one}, columns[b]))
            if out:
                defects[(a, b)] = out
        return defects

    def is_derivation(self, d: Matrix) -> IdentityCheck:
        defects = self.leibniz_defect(d)
        if defects:
            return IdentityCheck(False, min(defects), len(defects))
        return IdentityCheck(True)

    def leibniz_vector(self, d: Matrix) -> List[Scalar]:
        """Leibniz defect flattened over (pair, coordinate); the map is linear in d."""
        defects = self.leibniz_defect(d)
        zero = self.field.zero
        out: List[Scalar] = []
        for pair in combinations(range(self.dim), 2):
            row = defects.get(pair, {})
            out.extend(row.get(k, zero) for k in range(self.dim))
        return out

    def __repr__(self) -> str:
        return f"LieAlgebra(dim={self.dim}, {self.field.tag})"
