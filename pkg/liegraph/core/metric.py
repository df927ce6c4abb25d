"""
Left-invariant metric geometry: connection, curvature, Ricci and Iwasawa type.

Exact metrics (rational Gram matrices) keep every quantity through Ricci in
Fractions; float metrics run the same sparse loops in floating point. Floats
always enter at eigen-decompositions and the five-term sectional formula.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import DEFAULT_SEED, FLOAT_TOL, STABLY_DIAGONAL_TRIALS
from ..exceptions import DimensionMismatchError, InvalidParameterError, PreconditionError
from .eigen import sym_eigen
from .graph_algebra import GraphLieAlgebra
from .graphs import every_vertex_in_clique
from .lie_algebra import LieAlgebra
from .linalg import (
    QQ,
    Matrix,
    RowReducer,
    SparseRow,
    Subspace,
    _axpy,
    inverse,
    positive_definite,
)
from .rng import XorShift64Star


logger = logging.getLogger(__name__)

Pair = Tuple[int, int]
Quad = Tuple[int, int, int, int]


def _dot(x: SparseRow, y: SparseRow) -> Any:
    if len(x) > len(y):
        x, y = y, x
    return sum((v * y[k] for k, v in x.items() if k in y), 0)


class MetricTensor:
    """
    Symmetric positive-definite Gram matrix on the algebra basis.

    A Matrix over the rationals gives an exact metric, checked by exact
    pivots; a float array gives a numeric metric, checked by Cholesky.
    """

    def __init__(self, gram: Union[Matrix, np.ndarray, Sequence[Sequence[float]]]):
        """
        Args:
            gram: Exact rational Matrix or float array.

        Raises:
            DimensionMismatchError: If gram is not square.
            PreconditionError: If gram is not symmetric positive definite.
        """
        if isinstance(gram, Matrix):
            if not gram.field.is_rational:
                raise InvalidParameterError("Exact metrics need rational entries")
            if gram.rows != gram.cols:
                raise DimensionMismatchError(f"Metric must be square, got {gram.shape}")
            if not positive_definite(gram):
                raise PreconditionError("Metric is not symmetric positive definite")
            self.exact = True
            self.gram = gram
        else:
            array = np.array(gram, dtype=float)
            if array.ndim != 2 or array.shape[0] != array.shape[1]:
                raise DimensionMismatchError(f"Metric must be square, got {array.shape}")
            scale = max(float(np.max(np.abs(array))), 1.0) if array.size else 1.0
            if array.size and np.max(np.abs(array - array.T)) > FLOAT_TOL * scale:
                raise PreconditionError("Metric is not symmetric")
            try:
                np.linalg.cholesky(array)
            except np.linalg.LinAlgError:
                raise PreconditionError("Metric is not positive definite") from None
            self.exact = False
            self.gram = 0.5 * (array + array.T)

    @classmethod
    def identity(cls, dim: int) -> "MetricTensor":
        return cls(Matrix.identity(dim, QQ))

    @classmethod
    def diagonal(cls, values: Sequence) -> "MetricTensor":
        """Diagonal metric; exact unless some value is a float."""
        if any(isinstance(v, float) for v in values):
            return cls(np.diag([float(v) for v in values]))
        data = np.full((len(values), len(values)), 0, dtype=object)
        for i, v in enumerate(values):
            data[i, i] = v
        return cls(Matrix(data, QQ))

    @classmethod
    def from_json(cls, obj: dict, dim: int) -> "MetricTensor":
        """
        Build from {"diag": [...]} or {"matrix": [[...]]}; strings and integers
        are exact rationals, any float makes the metric numeric.

        Raises:
            InvalidParameterError: Unknown layout or malformed entries.
            DimensionMismatchError: Size differs from the algebra dimension.
        """
        if "diag" in obj:
            values = [_metric_scalar(v) for v in obj["diag"]]
            if len(values) != dim:
                raise DimensionMismatchError(f"Expected {dim} diagonal entries, got {len(values)}")
            return cls.diagonal(values)
        if "matrix" in obj:
            rows = [[_metric_scalar(v) for v in row] for row in obj["matrix"]]
            if len(rows) != dim or any(len(r) != dim for r in rows):
                raise DimensionMismatchError(f"Expected a {dim}x{dim} metric matrix")
            if any(isinstance(v, float) for r in rows for v in r):
                return cls(np.array(rows, dtype=float))
            return cls(Matrix.from_rows(rows, QQ))
        raise InvalidParameterError("Metric JSON needs a 'diag' or 'matrix' key")

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @cached_property
    def is_diagonal(self) -> bool:
        n = self.dim
        return all(not self.entry(i, j) for i in range(n) for j in range(n) if i != j)

    def entry(self, i: int, j: int) -> Any:
        return self.gram[i, j] if self.exact else float(self.gram[i, j])

    @cached_property
    def inverse(self) -> Union[Matrix, np.ndarray]:
        return inverse(self.gram) if self.exact else np.linalg.inv(self.gram)

    @cached_property
    def rows(self) -> List[SparseRow]:
        """Sparse rows of G with Fraction or float values."""
        return _sparse_rows(self.gram, self.exact)

    @cached_property
    def inverse_rows(self) -> List[SparseRow]:
        return _sparse_rows(self.inverse, self.exact)

    def float_gram(self) -> np.ndarray:
        return self.gram.to_float() if self.exact else np.array(self.gram)

    def frame(self) -> np.ndarray:
        """Columns form a g-orthonormal basis: F = L^-T with G = L L^T."""
        chol = np.linalg.cholesky(self.float_gram())
        return np.linalg.inv(chol).T

    def lower(self, x: SparseRow) -> SparseRow:
        """Coordinates of g(x, .)."""
        out: SparseRow = {}
        for k, v in x.items():
            _axpy(out, v, self.rows[k])
        return out

    def raise_index(self, covector: SparseRow) -> SparseRow:
        out: SparseRow = {}
        for k, v in covector.items():
            _axpy(out, v, self.inverse_rows[k])
        return out

    def inner(self, x: SparseRow, y: SparseRow) -> Any:
        return _dot(self.lower(x), y)

    def induced(self, space: Subspace) -> "MetricTensor":
        """Restriction to a subspace, in its RREF basis."""
        if not self.exact:
            raise PreconditionError("Induced metrics are computed exactly")
        basis = space.basis
        return MetricTensor(basis @ self.gram @ basis.T)

    def to_json(self) -> dict:
        if self.is_diagonal:
            return {"diag": [_scalar_json(self.entry(i, i)) for i in range(self.dim)]}
        return {
            "matrix": [
                [_scalar_json(self.entry(i, j)) for j in range(self.dim)]
                for i in range(self.dim)
            ]
        }

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        return f"MetricTensor(dim={self.dim}, {kind})"


def _metric_scalar(value) -> Union[Fraction, float]:
    if isinstance(value, bool):
        raise InvalidParameterError(f"Invalid metric entry {value!r}")
    if isinstance(value, float):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise InvalidParameterError(f"Invalid metric entry {value!r}")


def _scalar_json(value) -> Union[str, float]:
    return value if isinstance(value, float) else str(value)


def _sparse_rows(m, exact: bool) -> List[SparseRow]:
    if exact:
        return m.sparse_rows()
    return [{j: float(v) for j, v in enumerate(row) if v != 0.0} for row in m]


def _resolve(alg: LieAlgebra, metric: Optional[MetricTensor]) -> MetricTensor:
    if not alg.field.is_rational:
        raise PreconditionError("Metric geometry needs an algebra over the rationals")
    if metric is None:
        return MetricTensor.identity(alg.dim)
    if metric.dim != alg.dim:
        raise DimensionMismatchError(
            f"Metric of size {metric.dim} for algebra of dimension {alg.dim}"
        )
    return metric


def _dense(entries: Dict[Pair, Any], n: int, exact: bool) -> Union[Matrix, np.ndarray]:
    if exact:
        data = np.full((n, n), 0, dtype=object)
        for (i, j), v in entries.items():
            data[i, j] = v
        return Matrix(data, QQ)
    out = np.zeros((n, n))
    for (i, j), v in entries.items():
        out[i, j] = float(v)
    return out


def _add(acc: Dict[Pair, Any], key: Pair, value) -> None:
    if value:
        acc[key] = acc.get(key, 0) + value


def to_float(m: Union[Matrix, np.ndarray]) -> np.ndarray:
    return m.to_float() if isinstance(m, Matrix) else np.asarray(m, dtype=float)


# -- connection and curvature ---------------------------------------------


def _lowered_brackets(alg: LieAlgebra, metric: MetricTensor) -> Dict[Pair, SparseRow]:
    """(p, q) -> coordinates of g([e_p, e_q], .) for nonzero brackets."""
    lowered = {}
    for p in range(alg.dim):
        for q, row in alg.basis_adjoint(p).items():
            value = metric.lower(row)
            if value:
                lowered[(p, q)] = value
    return lowered


def levi_civita(
    alg: LieAlgebra, metric: Optional[MetricTensor] = None
) -> Dict[Pair, SparseRow]:
    """
    Levi-Civita connection of a left-invariant metric.

    Uses 2 g(D_a b, c) = g([a,b],c) - g([b,c],a) + g([c,a],b) on basis fields.

    Returns:
        (a, b) -> nabla_{e_a} e_b as a sparse vector, nonzero entries only.
    """
    metric = _resolve(alg, metric)
    half = Fraction(1, 2) if metric.exact else 0.5
    lowered_k: Dict[Pair, SparseRow] = {}

    def bump(a: int, b: int, c: int, value) -> None:
        row = lowered_k.setdefault((a, b), {})
        updated = row.get(c, 0) + value
        if updated:
            row[c] = updated
        else:
            row.pop(c, None)

    for (p, q), row in _lowered_brackets(alg, metric).items():
        for r, value in row.items():
            value = value * half
            bump(p, q, r, value)
            bump(r, p, q, -value)
            bump(q, r, p, value)

    connection = {}
    for key, row in lowered_k.items():
        vec = metric.raise_index(row)
        if vec:
            connection[key] = vec
    return connection


def connection_defects(
    alg: LieAlgebra, metric: Optional[MetricTensor], connection: Dict[Pair, SparseRow]
) -> Dict[str, float]:
    """Largest violation of torsion-freeness and of metric compatibility."""
    metric = _resolve(alg, metric)
    n = alg.dim
    torsion = 0.0
    compat = 0.0
    for a in range(n):
        for b in range(n):
            diff = dict(connection.get((a, b), {}))
            _axpy(diff, -1, connection.get((b, a), {}))
            _axpy(diff, -1, alg.basis_adjoint(a).get(b, {}))
            torsion = max(torsion, max((abs(float(v)) for v in diff.values()), default=0.0))
    for z in range(n):
        for a in range(n):
            for b in range(a, n):
                value = metric.inner(connection.get((z, a), {}), {b: 1}) + metric.inner(
                    {a: 1}, connection.get((z, b), {})
                )
                compat = max(compat, abs(float(value)))
    return {"torsion": torsion, "metric_compatibility": compat}


@dataclass
class CurvatureData:
    """
    Curvature of a metric Lie algebra.

    components holds the nonzero g(R(e_a,e_b)e_c, e_d) with
    R(X,Y) = D_X D_Y - D_Y D_X - D_[X,Y].
    """

    metric: MetricTensor
    connection: Dict[Pair, SparseRow]
    components: Dict[Quad, Any]
    ricci: Union[Matrix, np.ndarray]
    mean_curvature: SparseRow

    @property
    def dim(self) -> int:
        return self.metric.dim

    @cached_property
    def tensor(self) -> np.ndarray:
        n = self.dim
        out = np.zeros((n, n, n, n))
        for key, value in self.components.items():
            out[key] = float(value)
        return out

    @property
    def ricci_operator(self) -> Union[Matrix, np.ndarray]:
        return ricci_operator(self.ricci, self.metric)

    def sectional(self, x: Sequence[float], y: Sequence[float]) -> float:
        """g(R(X,Y)Y, X) for float vectors X, Y."""
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return float(np.einsum("abcd,a,b,c,d->", self.tensor, x, y, y, x))

    def orthonormal_tensor(self) -> np.ndarray:
        frame = self.metric.frame()
        t = self.tensor
        for axis in range(4):
            t = np.moveaxis(np.tensordot(t, frame, axes=([axis], [0])), -1, axis)
        return t

    def operator_matrix(self) -> np.ndarray:
        """
        Curvature operator on Lambda^2 in a g-orthonormal frame, pairs (i, j)
        with i < j in lexicographic order. Entry ((i,j),(k,l)) is
        g(R(f_i,f_j)f_l, f_k), so the diagonal holds sectional curvatures.
        """
        pairs = list(combinations(range(self.dim), 2))
        if not pairs:
            return np.zeros((0, 0))
        t = self.orthonormal_tensor()
        first = np.array([p[0] for p in pairs])
        second = np.array([p[1] for p in pairs])
        return t[first[:, None], second[:, None], second[None, :], first[None, :]]

    def symmetry_defects(self) -> Dict[str, float]:
        """Largest violations of the algebraic curvature identities."""
        t = self.tensor
        if t.size == 0:
            return {"antisymmetry_ab": 0.0, "antisymmetry_cd": 0.0, "pair_symmetry": 0.0, "bianchi": 0.0}
        return {
            "antisymmetry_ab": float(np.max(np.abs(t + np.einsum("bacd->abcd", t)))),
            "antisymmetry_cd": float(np.max(np.abs(t + np.einsum("abdc->abcd", t)))),
            "pair_symmetry": float(np.max(np.abs(t - np.einsum("cdab->abcd", t)))),
            "bianchi": float(
                np.max(
                    np.abs(t + np.einsum("bcad->abcd", t) + np.einsum("cabd->abcd", t))
                )
            ),
        }


def curvature(alg: LieAlgebra, metric: Optional[MetricTensor] = None) -> CurvatureData:
    """
    Riemann tensor, Ricci tensor (trace over a g-orthonormal frame, i.e.
    Ric(x, y) = sum G^-1[a, b] R(x, a, b, y)) and mean curvature vector.
    """
    metric = _resolve(alg, metric)
    n = alg.dim
    nabla = levi_civita(alg, metric)

    def covariant(a: int, vec: SparseRow) -> SparseRow:
        out: SparseRow = {}
        for d, v in vec.items():
            row = nabla.get((a, d))
            if row:
                _axpy(out, v, row)
        return out

    components: Dict[Quad, Any] = {}
    for a, b in combinations(range(n), 2):
        bracket = alg.basis_adjoint(a).get(b, {})
        for c in range(n):
            vec = covariant(a, nabla.get((b, c), {}))
            _axpy(vec, -1, covariant(b, nabla.get((a, c), {})))
            for k, coeff in bracket.items():
                _axpy(vec, -coeff, nabla.get((k, c), {}))
            for d, value in metric.lower(vec).items():
                components[(a, b, c, d)] = value
                components[(b, a, c, d)] = -value

    ricci_entries: Dict[Pair, Any] = {}
    inv = metric.inverse_rows
    for (x, a, b, y), value in components.items():
        g_ab = inv[a].get(b)
        if g_ab:
            _add(ricci_entries, (x, y), g_ab * value)
    logger.debug("Curvature: %d nonzero components for dim %d", len(components), n)
    return CurvatureData(
        metric=metric,
        connection=nabla,
        components=components,
        ricci=_dense(ricci_entries, n, metric.exact),
        mean_curvature=mean_curvature(alg, metric),
    )


def ricci_operator(
    ricci: Union[Matrix, np.ndarray], metric: MetricTensor
) -> Union[Matrix, np.ndarray]:
    """Endomorphism with g(Ric(X), Y) = Ric(X, Y); column x is Ric(e_x)."""
    return metric.inverse @ ricci


def mean_curvature(alg: LieAlgebra, metric: Optional[MetricTensor] = None) -> SparseRow:
    """H with g(H, Y) = tr(ad_Y) for all Y."""
    metric = _resolve(alg, metric)
    traces = {}
    for y in range(alg.dim):
        t = alg.basis_adjoint(y)
        value = sum((row.get(b, 0) for b, row in t.items()), 0)
        if value:
            traces[y] = value
    return metric.raise_index(traces)


def sectional_formula(
    alg: LieAlgebra,
    metric: Optional[MetricTensor],
    x: Sequence[float],
    y: Sequence[float],
) -> float:
    """
    g(R(X,Y)Y, X) from brackets alone:

        -3/4 |[X,Y]|^2 - 1/2 g(ad_X^2 Y, Y) - 1/2 g(ad_Y^2 X, X)
        - g(ad_X^t X, ad_Y^t Y) + 1/4 |ad_X^t Y + ad_Y^t X|^2

    with ad^t the g-adjoint G^-1 ad^T G.
    """
    metric = _resolve(alg, metric)
    g = metric.float_gram()
    g_inv = np.linalg.inv(g)
    c = alg.structure_tensor()
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    ad_x = np.einsum("a,abk->kb", x, c)
    ad_y = np.einsum("a,abk->kb", y, c)
    adt_x = g_inv @ ad_x.T @ g
    adt_y = g_inv @ ad_y.T @ g

    def inner(u, v):
        return float(u @ g @ v)

    xy = ad_x @ y
    sym = adt_x @ y + adt_y @ x
    return (
        -0.75 * inner(xy, xy)
        - 0.5 * inner(ad_x @ (ad_x @ y), y)
        - 0.5 * inner(ad_y @ (ad_y @ x), x)
        - inner(adt_x @ x, adt_y @ y)
        + 0.25 * inner(sym, sym)
    )


# -- Ricci by bracket formulas --------------------------------------------


def ricci_scalar_form(
    alg: LieAlgebra, metric: Optional[MetricTensor] = None, nilpotent: bool = False
) -> Union[Matrix, np.ndarray]:
    """
    Ricci tensor of a left-invariant metric from brackets, with E_i a
    g-orthonormal basis:

        Ric(X,Y) = -1/2 sum_i g([X,E_i],[Y,E_i]) - 1/2 tr(ad_X ad_Y)
                   + 1/4 sum_{i,j} g([E_i,E_j],X) g([E_i,E_j],Y)
                   - 1/2 (g([H,X],Y) + g([H,Y],X))

    The double sum runs over ordered pairs. All sums over E_i are taken
    through G^-1, so exact metrics give exact results.

    Args:
        alg: The algebra.
        metric: Metric; identity when omitted.
        nilpotent: Drop the trace-form and mean-curvature terms, which vanish
            on nilpotent algebras.
    """
    metric = _resolve(alg, metric)
    n = alg.dim
    exact = metric.exact
    half = Fraction(1, 2) if exact else 0.5
    quarter = Fraction(1, 4) if exact else 0.25
    inv = metric.inverse_rows
    ricci: Dict[Pair, Any] = {}

    # -1/2 sum_{a,b} G^-1[a,b] g([x,e_a],[y,e_b])
    lowered_ad = [
        {a: metric.lower(row) for a, row in alg.basis_adjoint(x).items()}
        for x in range(n)
    ]
    raised_ad = []
    for y in range(n):
        cols: Dict[int, SparseRow] = {}
        for b, row in alg.basis_adjoint(y).items():
            for a, w in inv[b].items():
                _axpy(cols.setdefault(a, {}), w, row)
        raised_ad.append({a: col for a, col in cols.items() if col})
    for x in range(n):
        for y in range(n):
            total = sum(
                (_dot(low, raised_ad[y][a]) for a, low in lowered_ad[x].items() if a in raised_ad[y]),
                0,
            )
            _add(ricci, (x, y), -half * total)

    # 1/4 sum over ordered pairs
    for (a, b), low in _lowered_brackets(alg, metric).items():
        raised = metric.lower(alg.bracket_values(inv[a], inv[b]))
        if not raised:
            continue
        for x, u in low.items():
            for y, v in raised.items():
                _add(ricci, (x, y), quarter * u * v)

    if not nilpotent:
        for x in range(n):
            for y in range(x, n):
                value = alg.trace_form({x: 1}, {y: 1})
                if value:
                    _add(ricci, (x, y), -half * value)
                    if x != y:
                        _add(ricci, (y, x), -half * value)
        h = mean_curvature(alg, metric)
        if h:
            for x in range(n):
                row = metric.lower(alg.bracket_values(h, {x: 1}))
                for y, value in row.items():
                    _add(ricci, (x, y), -half * value)
                    _add(ricci, (y, x), -half * value)

    return _dense({k: v for k, v in ricci.items() if v}, n, exact)


# -- Iwasawa type, block Ricci, splitting ---------------------------------


@dataclass
class IwasawaReport:
    """Iwasawa-type conditions decided exactly on a subalgebra S of g."""

    a: bool
    b_symmetric: bool
    b_nonzero: bool
    c: bool
    b0_found: bool
    b0_diagonal: Optional[List[str]]
    dim_space: int
    dim_derived: int
    dim_complement: int
    restricted_to_g1: bool
    derived: Subspace = field(repr=False)
    complement: Subspace = field(repr=False)

    @property
    def b(self) -> bool:
        return self.b_symmetric and self.b_nonzero

    @property
    def passed(self) -> bool:
        return self.a and self.b and self.c

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "b_symmetric": self.b_symmetric,
            "b_nonzero": self.b_nonzero,
            "c": self.c,
            "B0_found": self.b0_found,
            "B0_diagonal": self.b0_diagonal,
            "dim_space": self.dim_space,
            "dim_derived": self.dim_derived,
            "dim_complement": self.dim_complement,
            "restricted_to_g1": self.restricted_to_g1,
            "passed": self.passed,
        }


def _require_exact(metric: MetricTensor, what: str) -> None:
    if not metric.exact:
        raise PreconditionError(f"{what} is decided exactly and needs a rational metric")


def b0_candidate(alg: GraphLieAlgebra) -> SparseRow:
    """B0 = -(sum of all clique basis vectors)."""
    return {idx: -alg.field.one for idx in alg.clique_indices}


def iwasawa_check(
    alg: LieAlgebra,
    metric: Optional[MetricTensor] = None,
    space: Optional[Subspace] = None,
    b0: Optional[SparseRow] = None,
    restrict_to_g1: Optional[bool] = None,
) -> IwasawaReport:
    """
    Decide (a) g' has an abelian g-orthogonal complement a in S, (b) ad_B is
    g-symmetric on S and nonzero for every nonzero B in a, (c) ad_B0 restricted
    to g' is positive definite for the candidate B0 in a.

    Args:
        alg: The algebra.
        metric: Exact metric; identity when omitted.
        space: Subalgebra S to work in; the whole algebra when omitted.
        b0: Candidate for (c); defaults to minus the sum of the cliques for
            graph algebras.
        restrict_to_g1: For graph algebras, work in g1 = g' + (ker A)^perp.
            Defaults to True exactly when ker A is nonzero and every vertex
            lies in a clique.
    """
    metric = _resolve(alg, metric)
    _require_exact(metric, "Iwasawa type")
    restricted = False
    if isinstance(alg, GraphLieAlgebra):
        if b0 is None:
            b0 = b0_candidate(alg)
        if space is None:
            eligible = every_vertex_in_clique(alg.graph, alg.cliques)
            if restrict_to_g1 is None:
                restrict_to_g1 = eligible and alg.kernel_A().dim > 0
            if restrict_to_g1:
                space = split_g1_g2(alg).g1
                restricted = True
    if space is None:
        space = alg.full_space()
    b0 = b0 or {}

    derived = alg.bracket_spaces(space, space)
    complement = space.intersection(derived.orthogonal_complement(metric.gram))
    cond_a = (
        complement.dim + derived.dim == space.dim
        and alg.bracket_spaces(complement, complement).dim == 0
    )

    space_rows = space.basis_rows()
    symmetric = True
    for bvec in complement.basis_rows():
        images = [alg.bracket(bvec, s) for s in space_rows]
        for i, j in combinations(range(len(space_rows)), 2):
            if metric.inner(images[i], space_rows[j]) != metric.inner(space_rows[i], images[j]):
                symmetric = False
                break
        if not symmetric:
            break

    n = alg.dim
    reducer = RowReducer(n * max(len(space_rows), 1), alg.field)
    for bvec in complement.basis_rows():
        flat = {}
        for j, s in enumerate(space_rows):
            for k, v in alg.bracket(bvec, s).items():
                flat[j * n + k] = v
        reducer.add(flat)
    nonzero = reducer.rank == complement.dim

    b0 = alg.as_sparse(b0)
    b0_found = bool(b0) and complement.contains(b0)
    derived_rows = derived.basis_rows()
    size = len(derived_rows)
    form = np.full((size, size), 0, dtype=object)
    images = [alg.bracket(b0, p) for p in derived_rows]
    for i in range(size):
        for j in range(size):
            form[i, j] = metric.inner(images[i], derived_rows[j])
    cond_c = b0_found and size > 0 and positive_definite(Matrix(form, QQ))

    diagonal = None
    if all(len(p) == 1 for p in derived_rows):
        entries = []
        for p, image in zip(derived_rows, images):
            (idx,) = p
            if any(k != idx for k in image):
                entries = None
                break
            entries.append(str(image.get(idx, 0) / p[idx]))
        diagonal = entries

    report = IwasawaReport(
        a=cond_a,
        b_symmetric=symmetric,
        b_nonzero=nonzero,
        c=cond_c,
        b0_found=b0_found,
        b0_diagonal=diagonal,
        dim_space=space.dim,
        dim_derived=derived.dim,
        dim_complement=complement.dim,
        restricted_to_g1=restricted,
        derived=derived,
        complement=complement,
    )
    logger.debug("Iwasawa check: %s", report.to_json())
    return report


def ricci_blocks(alg: LieAlgebra, metric: Optional[MetricTensor] = None) -> Matrix:
    """
    Ricci tensor from the block formulas for metrics with (a) and the
    symmetry part of (b) on the whole algebra, with a the complement of g':

        Ric(B, C) = -tr(ad_B ad_C)          B, C in a
        Ric(B, X) = 0                       B in a, X in g'
        Ric(X, Y) = Ric_g'(X, Y) - g([H, X], Y)

    Ric_g' is the Ricci tensor of the nilpotent g' with the induced metric.

    Raises:
        PreconditionError: If the metric is not exact or (a)/(b) fail.
    """
    metric = _resolve(alg, metric)
    _require_exact(metric, "The block Ricci formula")
    report = iwasawa_check(alg, metric, space=alg.full_space(), b0={})
    if not (report.a and report.b_symmetric):
        raise PreconditionError(
            "Iwasawa conditions (a)/(b) fail; use the curvature Ricci tensor instead"
        )
    q_rows = report.complement.basis_rows()
    p_rows = report.derived.basis_rows()
    n_q = len(q_rows)

    nil = alg.restrict(report.derived)
    nil_ricci = ricci_scalar_form(nil, metric.induced(report.derived), nilpotent=True)
    h = mean_curvature(alg, metric)

    entries: Dict[Pair, Any] = {}
    for i, j in combinations(range(n_q), 2):
        value = -alg.trace_form(q_rows[i], q_rows[j])
        entries[(i, j)] = entries[(j, i)] = value
    for i in range(n_q):
        entries[(i, i)] = -alg.trace_form(q_rows[i], q_rows[i])
    for i, p in enumerate(p_rows):
        hp = alg.bracket(h, p)
        for j, r in enumerate(p_rows):
            entries[(n_q + i, n_q + j)] = nil_ricci[i, j] - metric.inner(hp, r)
    ric_ss = _dense({k: v for k, v in entries.items() if v}, alg.dim, True)

    s = Matrix.from_sparse_rows(q_rows + p_rows, alg.dim, QQ)
    s_inv = inverse(s)
    return s_inv @ ric_ss @ s_inv.T


@dataclass
class SplitResult:
    """g = g1 + g2 with g1 = g' + abar, abar = (ker A)^perp in U, g2 = ker A."""

    g1: Subspace = field(repr=False)
    g2: Subspace = field(repr=False)
    a_bar: Subspace = field(repr=False)
    g1_subalgebra: bool
    g2_is_center: bool
    g2_abelian: bool
    commute: bool
    direct: bool

    @property
    def passed(self) -> bool:
        return all(
            (self.g1_subalgebra, self.g2_is_center, self.g2_abelian, self.commute, self.direct)
        )

    def orthogonal(self, metric: MetricTensor) -> bool:
        return all(
            metric.inner(x, y) == 0
            for x in self.g1.basis_rows()
            for y in self.g2.basis_rows()
        )

    def to_json(self) -> dict:
        return {
            "dim_g1": self.g1.dim,
            "dim_g2": self.g2.dim,
            "g1_subalgebra": self.g1_subalgebra,
            "g2_is_center": self.g2_is_center,
            "g2_abelian": self.g2_abelian,
            "commute": self.commute,
            "direct": self.direct,
            "passed": self.passed,
        }


def split_g1_g2(alg: GraphLieAlgebra) -> SplitResult:
    """
    Raises:
        PreconditionError: If some vertex lies in no clique.
    """
    if not every_vertex_in_clique(alg.graph, alg.cliques):
        raise PreconditionError("Splitting needs every vertex in some clique")
    cliques = Subspace.coordinate(alg.clique_indices, alg.dim, alg.field)
    g2 = alg.kernel_A()
    a_bar = cliques.intersection(g2.orthogonal_complement())
    derived = alg.bracket_spaces(alg.full_space(), alg.full_space())
    g1 = derived.sum(a_bar)
    return SplitResult(
        g1=g1,
        g2=g2,
        a_bar=a_bar,
        g1_subalgebra=alg.is_subalgebra(g1),
        g2_is_center=g2 == alg.center_oracle(),
        g2_abelian=alg.bracket_spaces(g2, g2).dim == 0,
        commute=alg.bracket_spaces(g1, g2).dim == 0,
        direct=g1.intersection(g2).dim == 0 and g1.dim + g2.dim == alg.dim,
    )


# -- stably Ricci-diagonal and spectra -------------------------------------


@dataclass
class StablyDiagonalReport:
    """Ricci operators of random diagonal metrics in the standard basis."""

    trials: int
    seed: int
    diagonal: bool
    max_offdiag: float
    derived_block_diagonal: bool
    clique_block_matches_trace_form: bool

    @property
    def passed(self) -> bool:
        return self.derived_block_diagonal and self.clique_block_matches_trace_form

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "diagonal": self.diagonal,
            "max_offdiag": self.max_offdiag,
            "derived_block_diagonal": self.derived_block_diagonal,
            "clique_block_matches_trace_form": self.clique_block_matches_trace_form,
            "passed": self.passed,
        }


def random_diagonal_metric(dim: int, rng: XorShift64Star) -> MetricTensor:
    return MetricTensor.diagonal([rng.rational() for _ in range(dim)])


def stably_ricci_diagonal_test(
    alg: GraphLieAlgebra,
    trials: int = STABLY_DIAGONAL_TRIALS,
    seed: int = DEFAULT_SEED,
) -> StablyDiagonalReport:
    """
    Exact Ricci operators for random diagonal rational metrics.

    Off-diagonal entries outside the clique-by-clique block must vanish; the
    clique block must equal -tr(ad_t ad_s) as a tensor, which is nonzero for
    two cliques sharing a vertex.

    Raises:
        PreconditionError: If some vertex lies in no clique.
        InvalidParameterError: If trials < 1.
    """
    if trials < 1:
        raise InvalidParameterError(f"trials must be positive, got {trials}")
    if not every_vertex_in_clique(alg.graph, alg.cliques):
        raise PreconditionError("Stably Ricci-diagonal test needs every vertex in some clique")
    rng = XorShift64Star(seed)
    cliques = set(alg.clique_indices)
    trace_block = {
        (t, s): -alg.trace_form({t: 1}, {s: 1}) for t in cliques for s in cliques
    }
    diagonal = True
    outside_ok = True
    block_ok = True
    max_offdiag = 0.0
    n = alg.dim
    for trial in range(trials):
        metric = random_diagonal_metric(n, rng)
        ric = ricci_scalar_form(alg, metric)
        op = ricci_operator(ric, metric)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                value = op[i, j]
                if value:
                    diagonal = False
                    max_offdiag = max(max_offdiag, abs(float(value)))
                    if not (i in cliques and j in cliques):
                        outside_ok = False
                if i in cliques and j in cliques and ric[i, j] != trace_block[(i, j)]:
                    block_ok = False
        logger.debug("Stably diagonal trial %d: diagonal so far %s", trial, diagonal)
    return StablyDiagonalReport(
        trials=trials,
        seed=seed,
        diagonal=diagonal,
        max_offdiag=max_offdiag,
        derived_block_diagonal=outside_ok,
        clique_block_matches_trace_form=block_ok,
    )


@dataclass
class SpectrumReport:
    """Spectrum of the curvature operator with a nonpositivity verdict."""

    eigenvalues: List[float]
    max_eig: float
    nonpositive: bool
    boundary: bool

    def to_json(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues,
            "max_eig": self.max_eig,
            "nonpositive": self.nonpositive,
            "boundary": self.boundary,
        }


def curvature_operator_spectrum(
    alg: LieAlgebra,
    metric: Optional[MetricTensor] = None,
    data: Optional[CurvatureData] = None,
    tol: float = FLOAT_TOL,
) -> SpectrumReport:
    """
    Ascending eigenvalues of the curvature operator. nonpositive means the
    largest eigenvalue is at most tol; boundary flags |max eigenvalue| < tol.
    """
    data = data or curvature(alg, metric)
    matrix = data.operator_matrix()
    if matrix.size == 0:
        return SpectrumReport([], 0.0, True, True)
    values, _ = sym_eigen(matrix)
    top = float(values[-1])
    return SpectrumReport(
        eigenvalues=[float(v) for v in values],
        max_eig=top,
        nonpositive=top <= tol,
        boundary=abs(top) < tol,
    )


def lie_derivative(
    alg: LieAlgebra, metric: Optional[MetricTensor], x: SparseRow
) -> Union[Matrix, np.ndarray]:
    """(L_X g)(e_a, e_b) = -g([X, e_a], e_b) - g(e_a, [X, e_b])."""
    metric = _resolve(alg, metric)
    x = alg.as_sparse(x) if metric.exact else x
    n = alg.dim
    lowered = {b: metric.lower(col) for b, col in _columns(alg, x).items()}
    entries: Dict[Pair, Any] = {}
    for a, row in lowered.items():
        for b, value in row.items():
            _add(entries, (a, b), -value)
            _add(entries, (b, a), -value)
    return _dense({k: v for k, v in entries.items() if v}, n, metric.exact)


def _columns(alg: LieAlgebra, x: SparseRow) -> Dict[int, SparseRow]:
    cols: Dict[int, SparseRow] = {}
    for a, xa in x.items():
        for b, row in alg.basis_adjoint(a).items():
            _axpy(cols.setdefault(b, {}), xa, row)
    return {b: c for b, c in cols.items() if c}


def ricci_dense(structure: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """
    Float Ricci tensor from a structure tensor C[a, b, k] and a Gram matrix;
    the same formula as ricci_scalar_form, vectorised for repeated use.
    """
    g_inv = np.linalg.inv(gram)
    c = structure
    first = np.einsum(
        "xal,yal->xy",
        np.einsum("xak,kl->xal", c, gram),
        np.einsum("ab,ybl->yal", g_inv, c),
    )
    killing = np.einsum("xac,yca->xy", c, c)
    lowered = np.einsum("abk,kx->abx", c, gram)
    raised = np.einsum("bd,cbx->cdx", g_inv, np.einsum("ac,abx->cbx", g_inv, lowered))
    third = np.einsum("cdx,cdy->xy", raised, lowered)
    h = g_inv @ np.einsum("ybb->y", c)
    m = np.einsum("h,hxk,ky->xy", h, c, gram)
    return -0.5 * first - 0.5 * killing + 0.25 * third - 0.5 * (m + m.T)
