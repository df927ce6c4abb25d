"""The solvable Lie algebra V + W + U attached to a graph and its k-cliques."""

import logging
from collections import Counter
from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    PreconditionError,
)
from .graphs import (
    CliqueSet,
    Graph,
    GraphDecomposition,
    check_permutation,
    decompose,
    enumerate_k_cliques,
    every_vertex_in_clique,
)
from .lie_algebra import LieAlgebra
from .linalg import QQ, Field, Matrix, Scalar, SparseRow, Subspace, kernel, rank


logger = logging.getLogger(__name__)


def term(series: List[Subspace], idx: int) -> Subspace:
    """Term idx of a computed series; series stop once they stabilise."""
    return series[idx] if idx < len(series) else series[-1]


class BasisElement(NamedTuple):
    """Vertex e_i, edge e_i^e_j (i < j) or clique e_t (sorted k-tuple)."""

    kind: str
    vertices: Tuple[int, ...]

    @property
    def label(self) -> str:
        if self.kind == "vertex":
            return f"e{self.vertices[0]}"
        if self.kind == "edge":
            return "e{}^e{}".format(*self.vertices)
        return "e[" + ",".join(str(v) for v in self.vertices) + "]"


@dataclass(frozen=True)
class Fingerprint:
    """Isomorphism-invariant record of a graph algebra."""

    n_isolated: int
    dim_V: int
    dim_W: int
    dim_U: int
    dim_derived_1: int
    dim_derived_2: int
    dim_derived_3: int
    dim_lower_central_stable: int
    dim_center: int
    dim_nilradical: int
    dim_derivations: Optional[int]
    clique_spectra: Tuple[Tuple[Tuple[str, int], ...], ...]

    def to_json(self) -> dict:
        return {
            "n_isolated": self.n_isolated,
            "dim_V": self.dim_V,
            "dim_W": self.dim_W,
            "dim_U": self.dim_U,
            "dim_derived_1": self.dim_derived_1,
            "dim_derived_2": self.dim_derived_2,
            "dim_derived_3": self.dim_derived_3,
            "dim_lower_central_stable": self.dim_lower_central_stable,
            "dim_center": self.dim_center,
            "dim_nilradical": self.dim_nilradical,
            "dim_derivations": self.dim_derivations,
            "clique_spectra": [
                [[value, mult] for value, mult in spectrum]
                for spectrum in self.clique_spectra
            ],
        }


@dataclass
class SeriesReport:
    """Computed series next to their closed forms."""

    derived_dims: List[int]
    lower_central_dims: List[int]
    derived_1: bool
    derived_2: bool
    derived_3_zero: bool
    lower_central: bool
    derived_in_nilradical: bool
    clique_part_abelian: bool

    @property
    def passed(self) -> bool:
        return all(
            (
                self.derived_1,
                self.derived_2,
                self.derived_3_zero,
                self.lower_central,
                self.derived_in_nilradical,
                self.clique_part_abelian,
            )
        )

    def to_json(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


@dataclass
class CompletelySolvableReport:
    """Diagonal action of clique adjoints on V + W."""

    diagonals: Dict[Tuple[int, ...], List[Scalar]]
    all_diagonal: bool
    entries_allowed: bool
    derived_is_vw: Optional[bool]

    @property
    def passed(self) -> bool:
        return self.all_diagonal and self.entries_allowed and self.derived_is_vw is not False

    def to_json(self) -> dict:
        return {
            "diagonals": {
                ",".join(str(v) for v in t): [str(x) for x in diag]
                for t, diag in self.diagonals.items()
            },
            "all_diagonal": self.all_diagonal,
            "entries_allowed": self.entries_allowed,
            "derived_is_vw": self.derived_is_vw,
            "passed": self.passed,
        }


@dataclass
class IsomorphismResult:
    """Induced basis map of a vertex bijection, or the reason it fails."""

    sigma: Tuple[int, ...]
    matrix: Optional[Matrix] = None
    witness: Optional[Tuple[str, Tuple[int, ...]]] = None

    @property
    def is_isomorphism(self) -> bool:
        return self.matrix is not None

    def to_json(self) -> dict:
        return {
            "sigma": list(self.sigma),
            "verified": self.is_isomorphism,
            "witness": None
            if self.witness is None
            else {"kind": self.witness[0], "item": list(self.witness[1])},
        }


class GraphLieAlgebra(LieAlgebra):
    """
    Solvable Lie algebra g = V + W + U of a graph.

    Basis order: vertices ascending, then edges lexicographic, then k-cliques
    lexicographic. Nonzero brackets (a < b stored, the rest by antisymmetry):

        [e_i, e_j] = e_i^e_j                         for edges (i, j)
        [e_a, e_t] = w_a e_a                         for a in t
        [e_a^e_b, e_t] = (sum of w_s, s in {a,b} & t) e_a^e_b
    """

    def __init__(
        self,
        graph: Graph,
        k: int = 3,
        weights: Optional[Sequence] = None,
        field: Field = QQ,
        strict: bool = False,
    ):
        """
        Args:
            graph: Source graph.
            k: Clique size (>= 3).
            weights: Per-vertex weights; defaults to graph.weights, then all 1.
            field: Scalar field.
            strict: Reject zero weights instead of building a degenerate table.

        Raises:
            InvalidParameterError: k < 3, wrong weight count, or a zero weight
                in strict mode.
        """
        self.graph = graph
        self.k = k
        self.cliques: CliqueSet = enumerate_k_cliques(graph, k)
        self.decomposition: GraphDecomposition = decompose(graph, self.cliques)

        if weights is None:
            weights = graph.weights
        if weights is None:
            weights = [1] * graph.n
        if len(weights) != graph.n:
            raise InvalidParameterError(
                f"Expected {graph.n} weights, got {len(weights)}"
            )
        self.weights: Tuple[Scalar, ...] = tuple(field.element(w) for w in weights)
        if strict and not all(self.weights):
            zero_at = [v for v in graph.vertices if not self.weights[v - 1]]
            raise InvalidParameterError(f"Zero weight at vertices {zero_at}")

        self.basis: List[BasisElement] = (
            [BasisElement("vertex", (v,)) for v in graph.vertices]
            + [BasisElement("edge", e) for e in graph.edges]
            + [BasisElement("clique", t) for t in self.cliques]
        )
        self._index = {b: i for i, b in enumerate(self.basis)}

        table: Dict[Tuple[int, int], SparseRow] = {}
        for i, j in graph.edges:
            table[(i - 1, j - 1)] = {self.edge_index((i, j)): 1}
        for t in self.cliques:
            col = self.clique_index(t)
            members = set(t)
            for a in t:
                table[(a - 1, col)] = {a - 1: self.weights[a - 1]}
            for i, j in graph.edges:
                shared = [s for s in (i, j) if s in members]
                if shared:
                    table[(self.edge_index((i, j)), col)] = {
                        self.edge_index((i, j)): sum(
                            (self.weights[s - 1] for s in shared), field.zero
                        )
                    }
        super().__init__([b.label for b in self.basis], table, field)
        logger.debug(
            "Built algebra of dim %d (V=%d, W=%d, U=%d) over %s",
            self.dim, *self.dims, field.tag,
        )

    @property
    def dims(self) -> Tuple[int, int, int]:
        return (self.graph.n, len(self.graph.edges), len(self.cliques))

    @property
    def vertex_indices(self) -> range:
        return range(0, self.graph.n)

    @property
    def edge_indices(self) -> range:
        return range(self.graph.n, self.graph.n + len(self.graph.edges))

    @property
    def clique_indices(self) -> range:
        start = self.graph.n + len(self.graph.edges)
        return range(start, start + len(self.cliques))

    def vertex_index(self, v: int) -> int:
        return self._index[BasisElement("vertex", (v,))]

    def edge_index(self, edge: Tuple[int, int]) -> int:
        i, j = edge
        return self._index[BasisElement("edge", (min(i, j), max(i, j)))]

    def clique_index(self, clique: Sequence[int]) -> int:
        return self._index[BasisElement("clique", tuple(sorted(clique)))]

    def element(self, coefficients: Dict[Tuple[int, ...], Scalar]) -> SparseRow:
        """
        Build an element from vertex-tuple keys: (i,) vertex, (i, j) edge,
        longer tuples cliques.
        """
        out: SparseRow = {}
        for key, value in coefficients.items():
            key = tuple(key)
            if len(key) == 1:
                idx = self.vertex_index(key[0])
            elif len(key) == 2:
                idx = self.edge_index(key)
            else:
                idx = self.clique_index(key)
            value = self.field.element(value)
            if value:
                out[idx] = out.get(idx, 0) + value
        return {i: v for i, v in out.items() if v}

    # -- incidence matrix and center ------------------------------------

    def clique_incidence_matrix(self) -> Matrix:
        """n x |C_k| matrix with A[i, t] = 1 iff vertex i+1 lies in clique t."""
        data = np.full((self.graph.n, len(self.cliques)), 0, dtype=object)
        for col, t in enumerate(self.cliques):
            for v in t:
                data[v - 1, col] = 1
        return Matrix(data, self.field)

    def incidence_rank(self) -> int:
        return rank(self.clique_incidence_matrix())

    def incidence_kernel(self) -> Subspace:
        """ker A inside the clique coordinates (ambient |C_k|)."""
        return kernel(self.clique_incidence_matrix())

    def embed_clique_vectors(self, space: Subspace) -> Subspace:
        """Lift vectors in clique coordinates to the full algebra."""
        offset = self.clique_indices.start
        return Subspace.span(
            ({offset + c: v for c, v in row.items()} for row in space.basis_rows()),
            self.dim,
            self.field,
        )

    def kernel_A(self) -> Subspace:
        return self.embed_clique_vectors(self.incidence_kernel())

    def weight_conditions(self) -> Dict[str, bool]:
        """Nonzero weights, and nonzero weight sums along every edge."""
        return {
            "nonzero_weights": all(self.weights),
            "nonzero_edge_sums": all(
                self.weights[i - 1] + self.weights[j - 1] for i, j in self.graph.edges
            ),
        }

    def _require_formula_hypotheses(self, what: str) -> None:
        if self.field.characteristic == 2:
            raise PreconditionError(
                f"The {what} formula needs characteristic != 2; use center_oracle"
            )
        failed = [name for name, ok in self.weight_conditions().items() if not ok]
        if failed:
            raise PreconditionError(
                f"The {what} formula needs {' and '.join(failed)}; use center_oracle"
            )

    def center_formula(self) -> Subspace:
        """
        Isolated vertices + edges with both ends outside every clique + ker A.

        Raises:
            PreconditionError: In characteristic 2, or when a weight condition fails.
        """
        self._require_formula_hypotheses("center")
        rows: List[SparseRow] = [
            {self.vertex_index(v): 1} for v in self.graph.isolated_vertices()
        ]
        rows += [{self.edge_index(e): 1} for e in self.decomposition.E_gamma]
        rows += self.kernel_A().basis_rows()
        return Subspace.span(rows, self.dim, self.field)

    def nilradical(self) -> Subspace:
        """
        V + W + ker A.

        Raises:
            PreconditionError: In characteristic 2, or when a weight condition fails.
        """
        self._require_formula_hypotheses("nilradical")
        vw = Subspace.coordinate(
            list(self.vertex_indices) + list(self.edge_indices), self.dim, self.field
        )
        return vw.sum(self.kernel_A())

    def nilradical_certified(self) -> bool:
        """The nilradical formula is a nilpotent ideal (checked by iterated brackets)."""
        nr = self.nilradical()
        return self.is_ideal(nr) and self.is_nilpotent_subalgebra(nr)

    # -- series ----------------------------------------------------------

    def _coordinate_space(self, vertices=(), edges=()) -> Subspace:
        indices = [self.vertex_index(v) for v in vertices]
        indices += [self.edge_index(e) for e in edges]
        return Subspace.coordinate(indices, self.dim, self.field)

    def closed_form_derived(self) -> Tuple[Subspace, Subspace]:
        """(V_delta + W, E_delta)."""
        d = self.decomposition
        return (
            self._coordinate_space(d.V_delta, self.graph.edges),
            self._coordinate_space((), d.E_delta),
        )

    def closed_form_lower_central(self) -> Subspace:
        """V_delta + E_delta + E_delta_gamma (the terms from index 2 on)."""
        d = self.decomposition
        return self._coordinate_space(d.V_delta, d.E_delta | d.E_delta_gamma)

    def series_report(self) -> SeriesReport:
        """
        Compare the computed derived and lower central series with their
        closed forms; valid for any field and any k as long as weights are
        nonzero.

        Raises:
            PreconditionError: If some weight is zero.
        """
        if not all(self.weights):
            raise PreconditionError("Series closed forms need nonzero weights")
        derived = self.derived_series()
        lower = self.lower_central_series()
        zero = Subspace.zero(self.dim, self.field)

        d1, d2 = self.closed_form_derived()
        stable = self.closed_form_lower_central()
        lower_ok = term(lower, 1) == d1 and all(
            term(lower, idx) == stable for idx in range(2, max(len(lower), 3))
        )
        vw = Subspace.coordinate(
            list(self.vertex_indices) + list(self.edge_indices), self.dim, self.field
        )
        nilradical = vw.sum(self.kernel_A())
        cliques = Subspace.coordinate(self.clique_indices, self.dim, self.field)
        return SeriesReport(
            derived_dims=[s.dim for s in derived],
            lower_central_dims=[s.dim for s in lower],
            derived_1=term(derived, 1) == d1,
            derived_2=term(derived, 2) == d2,
            derived_3_zero=term(derived, 3) == zero,
            lower_central=lower_ok,
            derived_in_nilradical=term(derived, 1).is_subspace_of(nilradical),
            clique_part_abelian=self.bracket_spaces(cliques, cliques).dim == 0,
        )

    def verify_series_closed_form(self) -> bool:
        return self.series_report().passed

    # -- trace identity and complete solvability --------------------------

    def trace_identity_check(self, z: SparseRow) -> bool:
        """
        For z in ker A: the clique coefficients of z sum to zero.

        Raises:
            PreconditionError: If z has a vertex or edge component or A z != 0.
        """
        z = self.as_sparse(z)
        offset = self.clique_indices.start
        if any(idx < offset for idx in z):
            raise PreconditionError("Element has components outside the clique part")
        coeffs = [z.get(offset + c, self.field.zero) for c in range(len(self.cliques))]
        if any(self.clique_incidence_matrix() @ coeffs):
            raise PreconditionError("Element is not in ker A")
        return sum(coeffs, self.field.zero) == 0

    def completely_solvable_check(self) -> CompletelySolvableReport:
        """
        Each clique adjoint acts diagonally on V + W with entries in
        {0, -w_a, -(w_a + w_b)}; with every vertex in a clique, also g' = V + W.
        """
        vw = list(self.vertex_indices) + list(self.edge_indices)
        diagonals: Dict[Tuple[int, ...], List[Scalar]] = {}
        all_diagonal = True
        allowed = True
        zero = self.field.zero
        for t in self.cliques:
            idx = self.clique_index(t)
            columns = self.adjoint_columns({idx: self.field.one})
            diagonal = []
            for b in range(self.dim):
                col = columns.get(b, {})
                if any(i != b for i in col):
                    all_diagonal = False
                diagonal.append(col.get(b, zero))
            for b in vw:
                element = self.basis[b]
                members = element.vertices
                options = {zero, -sum((self.weights[v - 1] for v in members), zero)}
                options |= {-self.weights[v - 1] for v in members}
                if diagonal[b] not in options:
                    allowed = False
            if any(diagonal[c] for c in self.clique_indices):
                allowed = False
            diagonals[t] = diagonal

        derived_is_vw = None
        if every_vertex_in_clique(self.graph, self.cliques):
            derived = self.bracket_spaces(self.full_space(), self.full_space())
            derived_is_vw = derived == Subspace.coordinate(vw, self.dim, self.field)
        return CompletelySolvableReport(diagonals, all_diagonal, allowed, derived_is_vw)

    # -- invariants and isomorphisms -------------------------------------

    def clique_spectra(self) -> Tuple[Tuple[Tuple[str, int], ...], ...]:
        """Sorted multiset of (eigenvalue, multiplicity) lists of the clique adjoints."""
        spectra = []
        for t in self.cliques:
            columns = self.adjoint_columns({self.clique_index(t): self.field.one})
            diagonal = [columns.get(b, {}).get(b, self.field.zero) for b in range(self.dim)]
            counts = Counter(str(v) for v in diagonal)
            spectra.append(tuple(sorted(counts.items())))
        return tuple(sorted(spectra))

    def fingerprint(self, include_derivations: bool = True) -> Fingerprint:
        """
        Ordered invariant record; equal for algebras of isomorphic graphs.

        Args:
            include_derivations: Also solve the Leibniz system for the
                derivation dimension (the expensive part).

        Raises:
            PreconditionError: In characteristic 2.
        """
        if self.field.characteristic == 2:
            raise PreconditionError("Fingerprints need characteristic != 2")
        derived = self.derived_series()
        lower = self.lower_central_series()
        return Fingerprint(
            n_isolated=len(self.graph.isolated_vertices()),
            dim_V=self.dims[0],
            dim_W=self.dims[1],
            dim_U=self.dims[2],
            dim_derived_1=term(derived, 1).dim,
            dim_derived_2=term(derived, 2).dim,
            dim_derived_3=term(derived, 3).dim,
            dim_lower_central_stable=lower[-1].dim,
            dim_center=self.center_oracle().dim,
            dim_nilradical=self.nilradical().dim,
            dim_derivations=self.derivation_space().dim if include_derivations else None,
            clique_spectra=self.clique_spectra(),
        )

    def _basis_image(self, sigma: Sequence[int], b: BasisElement) -> Tuple[int, Scalar]:
        one = self.field.one
        if b.kind == "vertex":
            return self.vertex_index(sigma[b.vertices[0] - 1]), one
        if b.kind == "edge":
            i, j = (sigma[v - 1] for v in b.vertices)
            return (i, j), (one if i < j else -one)
        return tuple(sorted(sigma[v - 1] for v in b.vertices)), one

    def isomorphism_from_permutation(
        self, target: "GraphLieAlgebra", sigma: Sequence[int]
    ) -> IsomorphismResult:
        """
        Basis map induced by the vertex bijection sigma (vertex i -> sigma[i-1]):
        e_i -> e_sigma(i), e_i^e_j -> sign e_min^e_max, e_t -> e_sorted(sigma(t)).

        Returns:
            IsomorphismResult carrying the verified matrix (column j = image of
            basis j), or a witness: ("edge", e) for an edge image missing from
            the target, ("clique", t) likewise, ("bracket", (a, b)) when the map
            is not a homomorphism on that basis pair.

        Raises:
            InvalidParameterError: If sigma is not a bijection of 1..n.
            DimensionMismatchError: If the graphs differ in vertex count or k.
        """
        sigma = tuple(sigma)
        check_permutation(sigma, self.graph.n)
        if target.graph.n != self.graph.n or target.k != self.k:
            raise DimensionMismatchError("Algebras come from graphs of different size or k")
        if target.field != self.field:
            raise DimensionMismatchError("Algebras are defined over different fields")

        for i, j in self.graph.edges:
            if not target.graph.has_edge(sigma[i - 1], sigma[j - 1]):
                image = (sigma[i - 1], sigma[j - 1])
                return IsomorphismResult(sigma, witness=("edge", (min(image), max(image))))
        inverse = {s: v for v, s in enumerate(sigma, start=1)}
        for i, j in target.graph.edges:
            if not self.graph.has_edge(inverse[i], inverse[j]):
                return IsomorphismResult(sigma, witness=("edge", (i, j)))

        data = np.full((self.dim, self.dim), 0, dtype=object)
        for col, b in enumerate(self.basis):
            key, sign = self._basis_image(sigma, b)
            if b.kind == "vertex":
                row = key
            elif b.kind == "edge":
                row = target.edge_index(key)
            else:
                if BasisElement("clique", key) not in target._index:
                    return IsomorphismResult(sigma, witness=("clique", key))
                row = target.clique_index(key)
            data[row, col] = sign
        phi = Matrix(data, self.field)

        columns = [
            {i: phi.data[i, j] for i in range(self.dim) if phi.data[i, j]}
            for j in range(self.dim)
        ]
        for a, b in combinations(range(self.dim), 2):
            lhs: SparseRow = {}
            for m, v in self.structure_constant(a, b).items():
                for i, w in columns[m].items():
                    lhs[i] = lhs.get(i, 0) + v * w
            lhs = {i: v for i, v in lhs.items() if v}
            if lhs != target.bracket(columns[a], columns[b]):
                return IsomorphismResult(sigma, witness=("bracket", (a, b)))
        logger.debug("Verified isomorphism induced by %s", sigma)
        return IsomorphismResult(sigma, matrix=phi)

    def permutation_action(self, sigma: Sequence[int]) -> Matrix:
        """
        Basis map of a graph automorphism acting on this algebra.

        Raises:
            PreconditionError: If sigma is not an automorphism preserving the bracket.
        """
        result = self.isomorphism_from_permutation(self, sigma)
        if not result.is_isomorphism:
            raise PreconditionError(
                f"Permutation {list(sigma)} does not act on this algebra: {result.witness}"
            )
        return result.matrix

    def apply(self, m: Matrix, x: SparseRow) -> SparseRow:
        dense = m @ self.as_dense(x)
        return {i: v for i, v in enumerate(dense) if v}

    def format_element(self, x: SparseRow) -> str:
        """Human-readable linear combination, e.g. "e[1,2,3] - e[1,3,4]"."""
        terms = []
        for idx in sorted(x):
            value = x[idx]
            if not value:
                continue
            coeff = str(value)
            label = self.labels[idx]
            if coeff == "1":
                terms.append(f"+ {label}")
            elif coeff == "-1":
                terms.append(f"- {label}")
            elif coeff.startswith("-"):
                terms.append(f"- {coeff[1:]}*{label}")
            else:
                terms.append(f"+ {coeff}*{label}")
        if not terms:
            return "0"
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return (
            f"GraphLieAlgebra(n={self.graph.n}, k={self.k}, dim={self.dim}, "
            f"{self.field.tag})"
        )


def build(
    g: Graph,
    k: int = 3,
    weights: Optional[Sequence] = None,
    field: Field = QQ,
    strict: bool = False,
) -> GraphLieAlgebra:
    """Construct the graph Lie algebra; see GraphLieAlgebra for the bracket table."""
    return GraphLieAlgebra(g, k=k, weights=weights, field=field, strict=strict)
