"""Exact linear algebra over the rationals and prime fields."""

import logging
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import DimensionMismatchError, InvalidParameterError, PreconditionError


logger = logging.getLogger(__name__)

MAX_PRIME = 2 ** 61 - 1

_MILLER_RABIN_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin, exact for every p below 3.3e24."""
    if p < 2:
        return False
    for q in _MILLER_RABIN_BASES:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MILLER_RABIN_BASES:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


class Residue:
    """Element of the prime field F_p, stored as a residue in [0, p)."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _other(self, other) -> Optional[int]:
        if isinstance(other, Residue):
            if other.p != self.p:
                raise InvalidParameterError(
                    f"Cannot combine residues mod {self.p} and mod {other.p}"
                )
            return other.value
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return None

    def __add__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else Residue(self.value + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else Residue(self.value - v, self.p)

    def __rsub__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else Residue(v - self.value, self.p)

    def __mul__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else Residue(self.value * v, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._other(other)
        if v is None:
            return NotImplemented
        if v == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return Residue(self.value * pow(v, -1, self.p), self.p)

    def __rtruediv__(self, other):
        v = self._other(other)
        if v is None:
            return NotImplemented
        if self.value == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return Residue(v * pow(self.value, -1, self.p), self.p)

    def __neg__(self):
        return Residue(-self.value, self.p)

    def __eq__(self, other) -> bool:
        v = self._other(other)
        return v is not None and v == self.value

    def __hash__(self) -> int:
        return hash((self.value, self.p))

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"Residue({self.value}, {self.p})"

    def __str__(self) -> str:
        return str(self.value)


Scalar = Union[Fraction, Residue]
SparseRow = Dict[int, Scalar]


def parse_rational(text: str) -> Fraction:
    """
    Parse a rational literal such as "3", "-2/5" or "0.25".

    Raises:
        InvalidParameterError: If the literal is malformed or has zero denominator.
    """
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidParameterError(f"Invalid rational literal: {text!r}") from None


class Field:
    """The rationals (characteristic 0) or a prime field F_p."""

    def __init__(self, characteristic: int = 0):
        """
        Args:
            characteristic: 0 for the rationals, otherwise a prime p <= 2**61 - 1.

        Raises:
            InvalidParameterError: If the characteristic is not 0 or a valid prime.
        """
        if characteristic != 0:
            if characteristic > MAX_PRIME or not _is_prime(characteristic):
                raise InvalidParameterError(
                    f"Field characteristic must be 0 or a prime <= 2**61-1, "
                    f"got {characteristic}"
                )
        self.characteristic = characteristic

    @classmethod
    def rationals(cls) -> "Field":
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(p)

    @classmethod
    def parse(cls, tag: str) -> "Field":
        """Build a field from a CLI tag: "q", "f2" or "fp:P"."""
        tag = tag.strip().lower()
        if tag == "q":
            return cls.rationals()
        if tag == "f2":
            return cls.prime(2)
        if tag.startswith("fp:"):
            try:
                return cls.prime(int(tag[3:]))
            except ValueError:
                pass
        raise InvalidParameterError(f"Unknown field tag {tag!r} (use q, f2 or fp:P)")

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    @property
    def tag(self) -> str:
        if self.characteristic == 0:
            return "q"
        if self.characteristic == 2:
            return "f2"
        return f"fp:{self.characteristic}"

    @property
    def zero(self) -> Scalar:
        return self.element(0)

    @property
    def one(self) -> Scalar:
        return self.element(1)

    def element(self, value: Union[int, str, Fraction, Residue]) -> Scalar:
        """Coerce an integer, rational literal or fraction into this field."""
        if self.characteristic == 0:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, Residue):
                raise InvalidParameterError("Cannot embed a residue into the rationals")
            if isinstance(value, str):
                return parse_rational(value)
            return Fraction(value)
        if isinstance(value, Residue) and value.p == self.characteristic:
            return value
        if isinstance(value, str):
            value = parse_rational(value)
        if isinstance(value, Fraction):
            if value.denominator % self.characteristic == 0:
                raise InvalidParameterError(
                    f"{value} has no image in F_{self.characteristic}"
                )
            return Residue(
                value.numerator * pow(value.denominator, -1, self.characteristic),
                self.characteristic,
            )
        return Residue(int(value), self.characteristic)

    @staticmethod
    def to_string(value: Scalar) -> str:
        return str(value)

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.characteristic == self.characteristic

    def __hash__(self) -> int:
        return hash(("Field", self.characteristic))

    def __repr__(self) -> str:
        return f"Field({self.tag})"


QQ = Field.rationals()


def _axpy(target: SparseRow, a: Scalar, source: SparseRow) -> None:
    """target += a * source, dropping entries that cancel."""
    for col, value in source.items():
        updated = target.get(col, 0) + a * value
        if updated:
            target[col] = updated
        else:
            target.pop(col, None)


class RowReducer:
    """
    Incremental reduced row echelon form over a field.

    Rows are sparse {column: scalar} maps. Pivot rows are kept fully reduced
    (pivot 1, zero in every other pivot column), so the stored rows are the
    unique RREF of everything added so far.
    """

    def __init__(self, ncols: int, field: Field = QQ):
        self.ncols = ncols
        self.field = field
        self._pivots: Dict[int, SparseRow] = {}

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def _coerce(self, row: Union[SparseRow, Sequence]) -> SparseRow:
        element = self.field.element
        items = row.items() if isinstance(row, dict) else enumerate(row)
        out = {}
        for col, value in items:
            if value:
                if not 0 <= col < self.ncols:
                    raise DimensionMismatchError(
                        f"Column {col} outside 0..{self.ncols - 1}"
                    )
                out[col] = element(value)
        return out

    def reduce(self, row: Union[SparseRow, Sequence]) -> SparseRow:
        """Return the remainder of row after reduction by the current pivots."""
        out = self._coerce(row)
        for col in [c for c in out if c in self._pivots]:
            coeff = out.get(col)
            if coeff:
                _axpy(out, -coeff, self._pivots[col])
        return out

    def add(self, row: Union[SparseRow, Sequence]) -> Optional[int]:
        """
        Add a row to the span.

        Returns:
            The new pivot column, or None when the row was already in the span.
        """
        row = self.reduce(row)
        if not row:
            return None
        pivot = min(row)
        inv = self.field.one / row[pivot]
        row = {c: v * inv for c, v in row.items()}
        for prow in self._pivots.values():
            coeff = prow.get(pivot)
            if coeff:
                _axpy(prow, -coeff, row)
        self._pivots[pivot] = row
        return pivot

    def add_all(self, rows: Iterable) -> "RowReducer":
        for row in rows:
            self.add(row)
        return self

    def pivot_columns(self) -> List[int]:
        return sorted(self._pivots)

    def rows(self) -> List[SparseRow]:
        return [dict(self._pivots[p]) for p in sorted(self._pivots)]

    def kernel_rows(self) -> List[SparseRow]:
        """Basis of {x : r.x = 0 for every stored row r}, one vector per free column."""
        one = self.field.one
        basis = []
        for free in range(self.ncols):
            if free in self._pivots:
                continue
            vec = {free: one}
            for pivot, prow in self._pivots.items():
                value = prow.get(free)
                if value:
                    vec[pivot] = -value
            basis.append(vec)
        return basis


class Matrix:
    """Dense matrix of exact scalars sharing one field."""

    def __init__(self, data: np.ndarray, field: Field = QQ):
        data = np.asarray(data, dtype=object)
        if data.ndim != 2:
            raise DimensionMismatchError(f"Matrix data must be 2-D, got {data.ndim}-D")
        self.field = field
        self.data = np.empty(data.shape, dtype=object)
        for idx, value in np.ndenumerate(data):
            self.data[idx] = field.element(value)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field: Field = QQ) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(np.empty((0, 0), dtype=object), field)
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionMismatchError("Ragged rows")
        data = np.empty((len(rows), width), dtype=object)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                data[i, j] = v
        return cls(data, field)

    @classmethod
    def from_sparse_rows(
        cls, rows: Sequence[SparseRow], cols: int, field: Field = QQ
    ) -> "Matrix":
        data = np.full((len(rows), cols), 0, dtype=object)
        for i, row in enumerate(rows):
            for j, v in row.items():
                data[i, j] = v
        return cls(data, field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: Field = QQ) -> "Matrix":
        return cls(np.full((rows, cols), 0, dtype=object), field)

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "Matrix":
        data = np.full((n, n), 0, dtype=object)
        for i in range(n):
            data[i, i] = 1
        return cls(data, field)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __getitem__(self, idx):
        return self.data[idx]

    def sparse_rows(self) -> List[SparseRow]:
        return [
            {j: v for j, v in enumerate(row) if v}
            for row in self.data
        ]

    def transpose(self) -> "Matrix":
        return Matrix(self.data.T.copy(), self.field)

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise DimensionMismatchError(
                    f"Cannot multiply {self.shape} by {other.shape}"
                )
            if self.cols == 0:
                return Matrix.zeros(self.rows, other.cols, self.field)
            return Matrix(np.dot(self.data, other.data), self.field)
        vec = list(other)
        if len(vec) != self.cols:
            raise DimensionMismatchError(
                f"Vector of length {len(vec)} for matrix with {self.cols} columns"
            )
        zero = self.field.zero
        return [
            sum((a * b for a, b in zip(row, vec) if a and b), zero)
            for row in self.data
        ]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.shape == other.shape
            and all(a == b for a, b in zip(self.data.flat, other.data.flat))
        )

    def is_zero(self) -> bool:
        return not any(self.data.flat)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self.data[i, j] == self.data[j, i]
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )

    def to_float(self) -> np.ndarray:
        if not self.field.is_rational:
            raise PreconditionError("Only rational matrices convert to floats")
        return np.array(
            [[float(v) for v in row] for row in self.data], dtype=float
        ).reshape(self.shape)

    def to_json(self) -> dict:
        """Sparse triplet encoding with 0-based indices and exact string scalars."""
        return {
            "rows": self.rows,
            "cols": self.cols,
            "field": self.field.tag,
            "entries": [
                [i, j, str(v)]
                for (i, j), v in np.ndenumerate(self.data)
                if v
            ],
        }

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, {self.field.tag})"


def rref(m: Matrix) -> Tuple[Matrix, int]:
    """
    Reduced row echelon form.

    Args:
        m: Input matrix.

    Returns:
        Tuple of (RREF matrix with the same shape, rank).
    """
    reducer = RowReducer(m.cols, m.field).add_all(m.sparse_rows())
    rows = reducer.rows()
    rows += [{} for _ in range(m.rows - len(rows))]
    return Matrix.from_sparse_rows(rows, m.cols, m.field), reducer.rank


def rank(m: Matrix) -> int:
    return RowReducer(m.cols, m.field).add_all(m.sparse_rows()).rank


def kernel(m: Matrix) -> "Subspace":
    """Right null space {x : m x = 0}."""
    return kernel_of_rows(m.sparse_rows(), m.cols, m.field)


def kernel_of_rows(rows: Iterable, ncols: int, field: Field = QQ) -> "Subspace":
    """
    Null space of a (possibly very tall, sparse) system given row by row.

    Args:
        rows: Iterable of sparse rows {column: scalar} or dense sequences.
        ncols: Number of unknowns.
        field: Scalar field.

    Returns:
        Subspace of dimension ncols - rank.
    """
    reducer = RowReducer(ncols, field)
    count = 0
    for row in rows:
        reducer.add(row)
        count += 1
    logger.debug("Kernel of %d rows x %d columns: rank %d", count, ncols, reducer.rank)
    return Subspace.span(reducer.kernel_rows(), ncols, field)


def det(m: Matrix) -> Scalar:
    """
    Exact determinant by Bareiss fraction-free elimination.

    Raises:
        DimensionMismatchError: If m is not square.
    """
    if m.rows != m.cols:
        raise DimensionMismatchError(f"Determinant of non-square {m.shape} matrix")
    field = m.field
    n = m.rows
    if n == 0:
        return field.one
    a = [list(row) for row in m.data]
    sign = field.one
    prev = field.one
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return field.zero
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


class AffineSolution(NamedTuple):
    """Solution set particular + kernel of a linear system."""

    particular: List[Scalar]
    kernel: "Subspace"


def solve(m: Matrix, b: Sequence) -> Optional[AffineSolution]:
    """
    Solve m x = b exactly.

    Returns:
        The affine solution set, or None when the system is inconsistent.

    Raises:
        DimensionMismatchError: If len(b) differs from the row count.
    """
    if len(b) != m.rows:
        raise DimensionMismatchError(
            f"Right-hand side of length {len(b)} for {m.rows} equations"
        )
    field = m.field
    reducer = RowReducer(m.cols + 1, field)
    for row, rhs in zip(m.sparse_rows(), b):
        augmented = dict(row)
        if rhs:
            augmented[m.cols] = rhs
        reducer.add(augmented)
    if m.cols in reducer.pivot_columns():
        return None
    particular = [field.zero] * m.cols
    for prow in reducer.rows():
        pivot = min(prow)
        particular[pivot] = prow.get(m.cols, field.zero)
    return AffineSolution(particular, kernel(m))


def inverse(m: Matrix) -> Matrix:
    """
    Exact inverse by Gauss-Jordan elimination.

    Raises:
        PreconditionError: If m is singular.
    """
    if m.rows != m.cols:
        raise DimensionMismatchError(f"Inverse of non-square {m.shape} matrix")
    n = m.rows
    reducer = RowReducer(2 * n, m.field)
    for i, row in enumerate(m.sparse_rows()):
        augmented = dict(row)
        augmented[n + i] = 1
        reducer.add(augmented)
    rows = reducer.rows()
    if [min(r) for r in rows[:n]] != list(range(n)):
        raise PreconditionError("Matrix is singular")
    return Matrix.from_sparse_rows(
        [{c - n: v for c, v in r.items() if c >= n} for r in rows], n, m.field
    )


def positive_definite(m: Matrix) -> bool:
    """
    Exact positive-definiteness test for a symmetric rational matrix.

    Symmetric elimination without pivoting; the pivots are the ratios of
    consecutive leading principal minors, so all are positive iff every
    leading minor is.
    """
    if not m.field.is_rational or not m.is_symmetric():
        return False
    a = [list(row) for row in m.data]
    n = m.rows
    for k in range(n):
        pivot = a[k][k]
        if pivot <= 0:
            return False
        for i in range(k + 1, n):
            factor = a[i][k] / pivot
            if factor:
                for j in range(k + 1, n):
                    a[i][j] -= factor * a[k][j]
    return True


class Subspace:
    """Subspace of k^n stored by its RREF spanning rows."""

    def __init__(self, ambient: int, field: Field, reducer: RowReducer):
        self.ambient = ambient
        self.field = field
        self._reducer = reducer

    @classmethod
    def span(cls, vectors: Iterable, ambient: int, field: Field = QQ) -> "Subspace":
        return cls(ambient, field, RowReducer(ambient, field).add_all(vectors))

    @classmethod
    def zero(cls, ambient: int, field: Field = QQ) -> "Subspace":
        return cls(ambient, field, RowReducer(ambient, field))

    @classmethod
    def full(cls, ambient: int, field: Field = QQ) -> "Subspace":
        return cls.coordinate(range(ambient), ambient, field)

    @classmethod
    def coordinate(cls, indices: Iterable[int], ambient: int, field: Field = QQ) -> "Subspace":
        """Span of the standard basis vectors with the given indices."""
        return cls.span(({i: 1} for i in indices), ambient, field)

    @property
    def dim(self) -> int:
        return self._reducer.rank

    @property
    def pivots(self) -> List[int]:
        return self._reducer.pivot_columns()

    def basis_rows(self) -> List[SparseRow]:
        return self._reducer.rows()

    @property
    def basis(self) -> Matrix:
        return Matrix.from_sparse_rows(self.basis_rows(), self.ambient, self.field)

    def vectors(self) -> List[List[Scalar]]:
        zero = self.field.zero
        return [
            [row.get(i, zero) for i in range(self.ambient)]
            for row in self.basis_rows()
        ]

    def _check(self, other: "Subspace") -> None:
        if other.ambient != self.ambient or other.field != self.field:
            raise DimensionMismatchError(
                f"Subspaces live in different spaces: {self.ambient} vs {other.ambient}"
            )

    def contains(self, vector: Union[SparseRow, Sequence]) -> bool:
        return not self._reducer.reduce(vector)

    def is_subspace_of(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(row) for row in self.basis_rows())

    def coordinate_indices(self) -> Optional[List[int]]:
        """Indices when the space is spanned by standard basis vectors, else None."""
        rows = self.basis_rows()
        if all(len(r) == 1 for r in rows):
            return [min(r) for r in rows]
        return None

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(
            self.basis_rows() + other.basis_rows(), self.ambient, self.field
        )

    def intersection(self, other: "Subspace") -> "Subspace":
        self._check(other)
        mine, theirs = self.basis_rows(), other.basis_rows()
        offset = len(mine)
        system = []
        for coord in range(self.ambient):
            row = {}
            for i, vec in enumerate(mine):
                if coord in vec:
                    row[i] = vec[coord]
            for j, vec in enumerate(theirs):
                if coord in vec:
                    row[offset + j] = -vec[coord]
            if row:
                system.append(row)
        combos = kernel_of_rows(system, offset + len(theirs), self.field)
        vectors = []
        for combo in combos.basis_rows():
            vec: SparseRow = {}
            for i, coeff in combo.items():
                if i < offset:
                    _axpy(vec, coeff, mine[i])
            vectors.append(vec)
        return Subspace.span(vectors, self.ambient, self.field)

    def orthogonal_complement(self, gram: Optional[Matrix] = None) -> "Subspace":
        """
        Complement with respect to the standard dot product, or to the
        bilinear form with the given Gram matrix.
        """
        rows = self.basis_rows()
        if gram is not None:
            rows = [
                {
                    j: value
                    for j, value in enumerate(
                        sum(
                            (v * gram.data[i] for i, v in row.items()),
                            np.full(self.ambient, self.field.zero, dtype=object),
                        )
                    )
                    if value
                }
                for row in rows
            ]
        return kernel_of_rows(rows, self.ambient, self.field)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and other.ambient == self.ambient
            and other.field == self.field
            and other.basis_rows() == self.basis_rows()
        )

    def __iter__(self) -> Iterator[SparseRow]:
        return iter(self.basis_rows())

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient}, {self.field.tag})"
