"""Ricci soliton certificates and a derivative-free search over invariant metrics."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import (
    DEFAULT_SEED,
    FLOAT_TOL,
    RATIONAL_MAX_DENOMINATOR,
    SEARCH_INITIAL_STEP,
    SEARCH_ITERS,
    SEARCH_TOL,
)
from ..exceptions import (
    ConsistencyError,
    InvalidParameterError,
    PreconditionError,
    SizeGuardError,
)
from .canonical import CanonicalLabeler
from .graph_algebra import GraphLieAlgebra
from .graphs import every_vertex_in_clique
from .lie_algebra import LieAlgebra
from .linalg import QQ, Matrix, SparseRow, inverse, solve
from .metric import (
    MetricTensor,
    _resolve,
    lie_derivative,
    ricci_dense,
    ricci_operator,
    ricci_scalar_form,
)
from .rng import XorShift64Star


logger = logging.getLogger(__name__)

CLIQUE_BLOCK_MODES = ("trace_form", "diagonal")


@dataclass
class SolitonCertificate:
    """
    Decomposition Ric = c Id + D of a Ricci operator.

    An exact certificate has residual 0 and a D that passed the Leibniz
    check. A refusal keeps the least-squares c and its positive residual.
    """

    c: object
    D: Optional[Matrix]
    residual: float
    is_derivation: bool
    metric: Optional[MetricTensor] = field(default=None, repr=False)
    inner_generator: Optional[SparseRow] = None
    ricci_soliton_field: bool = False

    @property
    def certified(self) -> bool:
        return self.is_derivation and self.residual == 0

    def to_json(self) -> dict:
        out = {
            "found": self.certified,
            "c": str(self.c),
            "residual": float(self.residual),
            "is_derivation": self.is_derivation,
            "ricci_soliton_field": self.ricci_soliton_field,
        }
        if self.D is not None:
            out["D"] = self.D.to_json()
        if self.inner_generator is not None:
            out["inner_generator"] = {str(k): str(v) for k, v in sorted(self.inner_generator.items())}
        if self.metric is not None:
            out["metric"] = self.metric.to_json()
        return out


def certify_soliton(
    alg: LieAlgebra, ric_op: Matrix, metric: Optional[MetricTensor] = None
) -> SolitonCertificate:
    """
    Solve Leibniz(Ric - c Id) = 0 for the scalar c.

    The Leibniz defect is linear, so this is the one-column system
    c * Leibniz(Id) = Leibniz(Ric). On an abelian algebra every operator is a
    derivation and c = 0 is returned.

    Args:
        alg: Algebra over the rationals.
        ric_op: Exact Ricci operator (or any operator to decompose).
        metric: Metric recorded on the certificate.
    """
    identity = Matrix.identity(alg.dim, alg.field)
    lhs = alg.leibniz_vector(identity)
    rhs = alg.leibniz_vector(ric_op)
    solution = solve(Matrix.from_rows([[v] for v in lhs], alg.field), rhs) if lhs else None
    if solution is None and lhs:
        norm = sum(float(v) ** 2 for v in lhs)
        c_ls = sum(float(a) * float(b) for a, b in zip(lhs, rhs)) / norm if norm else 0.0
        residual = sum((float(b) - c_ls * float(a)) ** 2 for a, b in zip(lhs, rhs))
        logger.info("No soliton decomposition; least-squares c = %.6g", c_ls)
        return SolitonCertificate(c_ls, None, residual, False, metric)

    c = solution.particular[0] if solution is not None else alg.field.zero
    d = Matrix(ric_op.data - c * identity.data, alg.field)
    is_derivation = bool(alg.is_derivation(d))
    exact_match = Matrix(c * identity.data + d.data, alg.field) == ric_op
    if not (is_derivation and exact_match):
        raise ConsistencyError("Solved soliton decomposition fails re-verification")

    generator = inner_derivation_generator(alg, d)
    soliton_field = False
    if generator is not None and metric is not None and metric.exact:
        half = Fraction(1, 2)
        ric = metric.gram @ ric_op
        lie = lie_derivative(alg, metric, generator)
        soliton_field = Matrix(c * metric.gram.data - half * lie.data, QQ) == ric
    return SolitonCertificate(c, d, 0, True, metric, generator, soliton_field)


def inner_derivation_generator(alg: LieAlgebra, d: Matrix) -> Optional[SparseRow]:
    """X with ad_X = D, or None when D is outer."""
    n = alg.dim
    rows: Dict[Tuple[int, int], SparseRow] = {}
    for a in range(n):
        for b, col in alg.basis_adjoint(a).items():
            for k, v in col.items():
                rows.setdefault((k, b), {})[a] = v
    keys = sorted(set(rows) | {(k, b) for k in range(n) for b in range(n) if d[k, b]})
    if not keys:
        return {}
    system = Matrix.from_sparse_rows([rows.get(key, {}) for key in keys], n, alg.field)
    solution = solve(system, [d[k, b] for k, b in keys])
    if solution is None:
        return None
    return {i: v for i, v in enumerate(solution.particular) if v}


def soliton_check(alg: LieAlgebra, metric: Optional[MetricTensor] = None) -> SolitonCertificate:
    """
    Decide exactly whether the Ricci operator of an exact metric is c Id + D.

    Raises:
        PreconditionError: For float metrics; use SolitonSearch instead.
    """
    metric = _resolve(alg, metric)
    if not metric.exact:
        raise PreconditionError("soliton_check needs an exact metric; use the soliton search")
    ric_op = ricci_operator(ricci_scalar_form(alg, metric), metric)
    return certify_soliton(alg, ric_op, metric)


def nilsoliton_check(alg: LieAlgebra, metric: Optional[MetricTensor] = None) -> SolitonCertificate:
    """soliton_check on g' with the induced metric."""
    metric = _resolve(alg, metric)
    if not metric.exact:
        raise PreconditionError("nilsoliton_check needs an exact metric")
    full = alg.full_space()
    derived = alg.bracket_spaces(full, full)
    return soliton_check(alg.restrict(derived), metric.induced(derived))


@dataclass
class SolitonSearchResult:
    """Outcome of SolitonSearch.run."""

    parameters: List[float]
    metric: MetricTensor
    residual: float
    iterations: int
    converged: bool
    history: Dict[str, List[float]]
    clique_block: str
    exact_metric: Optional[MetricTensor] = None
    certificate: Optional[SolitonCertificate] = None

    def to_json(self) -> dict:
        out = {
            "converged": self.converged,
            "residual": self.residual,
            "iterations": self.iterations,
            "clique_block": self.clique_block,
            "parameters": self.parameters,
            "metric": self.metric.to_json(),
            "history": self.history,
            "found": bool(self.certificate and self.certificate.certified),
        }
        if self.exact_metric is not None:
            out["exact_metric"] = self.exact_metric.to_json()
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
            out["c"] = str(self.certificate.c)
        return out


class SolitonSearch:
    """
    Coordinate descent over log-scaled invariant metrics of a graph algebra.

    Vertex and edge basis vectors get one log-scale per automorphism orbit.
    The clique block is either one log-scale per clique orbit ("diagonal") or
    a single scale s times tr(ad_t ad_s) + P, P the projector onto ker A
    ("trace_form"). The residual is the squared distance of the Ricci operator
    from span{Id} + Der(g), relative to its squared norm.
    """

    def __init__(
        self,
        alg: GraphLieAlgebra,
        iters: int = SEARCH_ITERS,
        tol: float = SEARCH_TOL,
        seed: int = DEFAULT_SEED,
        initial_step: float = SEARCH_INITIAL_STEP,
        clique_block: str = "trace_form",
        use_symmetry: bool = True,
        max_denominator: int = RATIONAL_MAX_DENOMINATOR,
    ):
        """
        Args:
            alg: Graph algebra over the rationals.
            iters: Maximum number of coordinate sweeps.
            tol: Stop once the residual drops below tol.
            seed: Seed of the initial perturbation.
            initial_step: First log-scale step; halved whenever a sweep fails.
            clique_block: "trace_form" or "diagonal".
            use_symmetry: Tie parameters along automorphism orbits.
            max_denominator: Largest denominator tried when rationalising.

        Raises:
            PreconditionError: If some vertex lies in no clique or the field
                is not the rationals.
            InvalidParameterError: For an unknown clique_block or bad counts.
        """
        if clique_block not in CLIQUE_BLOCK_MODES:
            raise InvalidParameterError(
                f"clique_block must be one of {CLIQUE_BLOCK_MODES}, got {clique_block!r}"
            )
        if iters < 1 or tol <= 0 or initial_step <= 0:
            raise InvalidParameterError("iters, tol and initial_step must be positive")
        if not alg.field.is_rational:
            raise PreconditionError("The soliton search needs an algebra over the rationals")
        if not every_vertex_in_clique(alg.graph, alg.cliques):
            raise PreconditionError("The soliton search needs every vertex in some clique")
        self.alg = alg
        self.iters = iters
        self.tol = tol
        self.seed = seed
        self.initial_step = initial_step
        self.clique_block = clique_block
        self.use_symmetry = use_symmetry
        self.max_denominator = max_denominator

        self.groups = self._parameter_groups()
        self.structure = alg.structure_tensor()
        self.trace_block = self._trace_block() if clique_block == "trace_form" else None
        self.basis = self._soliton_basis()
        self.history: Dict[str, List[float]] = {"residual": [], "step": []}

    # -- parametrisation --------------------------------------------------

    def _orbit_labels(self) -> Optional[List[int]]:
        alg = self.alg
        if not self.use_symmetry or any(w != 1 for w in alg.weights):
            return None
        sets = (
            [(v,) for v in alg.graph.vertices]
            + list(alg.graph.edges)
            + list(alg.cliques)
        )
        try:
            return CanonicalLabeler().set_orbits(alg.graph, sets)
        except SizeGuardError:
            logger.warning("Graph too large for orbit search; parameters left untied")
            return None

    def _parameter_groups(self) -> List[List[int]]:
        """Basis indices sharing one parameter; the trace-form clique block is last."""
        alg = self.alg
        n_vw = len(alg.vertex_indices) + len(alg.edge_indices)
        labels = self._orbit_labels()
        if labels is None:
            labels = list(range(alg.dim))
        tied = n_vw if self.clique_block == "trace_form" else alg.dim
        groups: Dict[int, List[int]] = {}
        for idx in range(tied):
            groups.setdefault(labels[idx], []).append(idx)
        out = [groups[key] for key in sorted(groups, key=lambda key: groups[key][0])]
        if self.clique_block == "trace_form" and len(alg.clique_indices):
            out.append(list(alg.clique_indices))
        return out

    def _trace_block(self) -> Matrix:
        """tr(ad_t ad_s) + projector onto ker A, on the clique coordinates."""
        alg = self.alg
        cliques = list(alg.clique_indices)
        m = len(cliques)
        data = np.full((m, m), 0, dtype=object)
        for i, t in enumerate(cliques):
            for j, s in enumerate(cliques):
                data[i, j] = alg.trace_form({t: 1}, {s: 1})
        block = Matrix(data, QQ)
        kernel_basis = alg.incidence_kernel().basis
        if kernel_basis.rows:
            k = kernel_basis
            block = Matrix(block.data + (k.T @ inverse(k @ k.T) @ k).data, QQ)
        return block

    def _soliton_basis(self) -> np.ndarray:
        """Orthonormal rows spanning flattened Id and all derivations."""
        n = self.alg.dim
        rows = [np.eye(n).ravel()]
        for flat in self.alg.derivation_space().basis_rows():
            vec = np.zeros(n * n)
            for idx, v in flat.items():
                vec[idx] = float(v)
            rows.append(vec)
        _, sing, vt = np.linalg.svd(np.array(rows), full_matrices=False)
        return vt[sing > FLOAT_TOL * max(sing[0], 1.0)]

    # -- evaluation ---------------------------------------------------------

    def gram(self, params: Sequence[float]) -> np.ndarray:
        scales = np.exp(np.asarray(params, dtype=float))
        return self._assemble(list(scales), float)

    def _assemble(self, values: Sequence, kind) -> np.ndarray:
        alg = self.alg
        n = alg.dim
        if kind is float:
            g = np.zeros((n, n))
        else:
            g = np.full((n, n), 0, dtype=object)
        for group, value in zip(self.groups, values):
            if self.trace_block is not None and group[0] in alg.clique_indices:
                for i, t in enumerate(group):
                    for j, s in enumerate(group):
                        entry = self.trace_block[i, j]
                        g[t, s] = value * (float(entry) if kind is float else entry)
            else:
                for idx in group:
                    g[idx, idx] = value
        return g

    def residual(self, params: Sequence[float]) -> float:
        """Relative squared distance of the Ricci operator from span{Id} + Der."""
        gram = self.gram(params)
        op = np.linalg.solve(gram, ricci_dense(self.structure, gram))
        vec = op.ravel()
        norm = float(vec @ vec)
        if norm == 0.0:
            return 0.0
        projected = self.basis.T @ (self.basis @ vec)
        diff = vec - projected
        return float(diff @ diff) / norm

    # -- search -------------------------------------------------------------

    def run(
        self, progress_callback: Optional[Callable[[int, float], None]] = None
    ) -> SolitonSearchResult:
        """
        Descend from a seeded perturbation of the identity metric, then
        gauge-fix, rationalise and certify the best metric exactly.

        Args:
            progress_callback: Called as (iteration, residual) after each sweep.
        """
        rng = XorShift64Star(self.seed)
        params = np.array([rng.uniform(-0.1, 0.1) for _ in self.groups])
        best = self.residual(params)
        step = self.initial_step
        self.history = {"residual": [], "step": []}
        iteration = 0
        while iteration < self.iters and best >= self.tol:
            iteration += 1
            improved = False
            for p in range(len(params)):
                for delta in (step, -step):
                    trial = params.copy()
                    trial[p] += delta
                    value = self.residual(trial)
                    if value < best:
                        params, best, improved = trial, value, True
                        break
            if not improved:
                step *= 0.5
            self.history["residual"].append(best)
            self.history["step"].append(step)
            if progress_callback:
                progress_callback(iteration, best)
            logger.debug("Soliton search iteration %d: residual %.3e", iteration, best)

        converged = best < self.tol
        logger.info(
            "Soliton search %s after %d iterations (residual %.3e)",
            "converged" if converged else "stopped", iteration, best,
        )
        values = self.gauge_fix(np.exp(params))
        result = SolitonSearchResult(
            parameters=[float(v) for v in values],
            metric=MetricTensor(self._assemble(values, float)),
            residual=best,
            iterations=iteration,
            converged=converged,
            history=self.history,
            clique_block=self.clique_block,
        )
        if converged:
            result.exact_metric, result.certificate = self.rationalize(values)
        return result

    def gauge_fix(self, values: Sequence[float]) -> List[float]:
        """
        Normalise group values: every vertex entry 1 and the first edge entry 1.

        Uses the automorphisms e_i -> l_i e_i, e_i^e_j -> l_i l_j e_i^e_j,
        e_t -> e_t and one overall scaling, which change the Ricci operator
        only by conjugation and a positive factor.
        """
        alg = self.alg
        entry = np.zeros(alg.dim)
        for group, value in zip(self.groups, values):
            for idx in group:
                entry[idx] = value
        vertex = {v: entry[alg.vertex_index(v)] for v in alg.graph.vertices}
        if alg.graph.edges:
            i, j = alg.graph.edges[0]
            scale = entry[alg.edge_index((i, j))] / (vertex[i] * vertex[j])
        else:
            scale = 1.0
        out = []
        for group, value in zip(self.groups, values):
            idx = group[0]
            if idx in alg.vertex_indices:
                out.append(1.0)
            elif idx in alg.edge_indices:
                a, b = alg.basis[idx].vertices
                out.append(value / (scale * vertex[a] * vertex[b]))
            else:
                out.append(value * scale)
        return out

    def rationalize(
        self, values: Sequence[float]
    ) -> Tuple[Optional[MetricTensor], Optional[SolitonCertificate]]:
        """
        Round group values to rationals with growing denominators until the
        exact Ricci operator certifies; (None, last attempt) when none does.
        """
        attempt = None
        limits = sorted({d for d in (10, 100, self.max_denominator) if d <= self.max_denominator})
        for limit in limits:
            rounded = [Fraction(v).limit_denominator(limit) for v in values]
            if any(r <= 0 for r in rounded):
                continue
            try:
                metric = MetricTensor(Matrix(self._assemble(rounded, Fraction), QQ))
            except PreconditionError:
                continue
            attempt = soliton_check(self.alg, metric)
            if attempt.certified:
                logger.info("Exact soliton certificate with c = %s", attempt.c)
                return metric, attempt
        return None, attempt


def soliton_search_diagonal(
    alg: GraphLieAlgebra,
    iters: int = SEARCH_ITERS,
    tol: float = SEARCH_TOL,
    seed: int = DEFAULT_SEED,
    clique_block: str = "diagonal",
    **kwargs,
) -> SolitonSearchResult:
    """
    Run SolitonSearch over diagonal metrics, one scale per clique orbit.

    Pass clique_block="trace_form" for the trace-form clique block that the
    CLI uses; graphs with two cliques sharing a vertex need it to converge.
    """
    return SolitonSearch(
        alg, iters=iters, tol=tol, seed=seed, clique_block=clique_block, **kwargs
    ).run()
