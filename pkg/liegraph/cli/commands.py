"""Subcommand implementations: build report dictionaries and write them out."""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

import numpy as np

from .. import __version__
from ..config import SPECTRUM_MAX_PAIRS
from ..core.canonical import CanonicalLabeler
from ..core.eigen import sym_eigen
from ..core.graph_algebra import GraphLieAlgebra
from ..core.graphs import (
    Graph,
    coherence_graph,
    every_vertex_in_clique,
    format_edge_list,
    generate,
    hypothesis_report,
    parse_weights,
    read_graph,
)
from ..core.linalg import QQ, Field, Matrix, Subspace
from ..core.metric import (
    MetricTensor,
    curvature,
    curvature_operator_spectrum,
    iwasawa_check,
    ricci_blocks,
    ricci_operator,
    split_g1_g2,
    stably_ricci_diagonal_test,
    to_float,
)
from ..core.soliton import SolitonSearch, nilsoliton_check, soliton_check
from ..exceptions import ConsistencyError, LieGraphError, PreconditionError
from ..report import atomic_write, format_report, graph_digest, parse_diag, read_metric, write_report


logger = logging.getLogger(__name__)


# -- shared helpers ---------------------------------------------------------


def load_graph(path: str, weights_path: Optional[str] = None) -> Graph:
    """Read an edge list and, optionally, a separate weight file."""
    g = read_graph(path)
    if weights_path:
        with open(weights_path, "r", encoding="utf-8") as handle:
            g = g.with_weights(parse_weights(handle.read(), g.n))
    return g


def report_header(command: str, g: Graph, config: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "tool": "liegraph",
        "version": __version__,
        "command": command,
        "input_digest": graph_digest(g),
        "config": config,
    }


def _refusal(warnings: List[str], section: str, error: LieGraphError) -> Dict[str, Any]:
    message = f"{section}: {error}"
    logger.warning(message)
    warnings.append(message)
    return {"refused": str(error)}


def emit(report: Dict[str, Any], args: argparse.Namespace) -> int:
    """Write JSON to --out or stdout; --pretty adds a table on the other stream."""
    text = write_report(report, args.out)
    if not args.out:
        sys.stdout.write(text)
    if args.pretty:
        stream = sys.stderr if not args.out else sys.stdout
        stream.write(format_report(report) + "\n")
    return 0


# -- sections ---------------------------------------------------------------


def graph_section(g: Graph, alg: GraphLieAlgebra) -> Dict[str, Any]:
    return {
        "n": g.n,
        "edges": [list(e) for e in g.edges],
        "weights": [str(w) for w in alg.weights],
        "k": alg.k,
        "cliques": [list(t) for t in alg.cliques],
        "decomposition": alg.decomposition.to_json(),
        "coherence": coherence_graph(g).to_json(),
        "hypotheses": hypothesis_report(g, alg.k),
    }


def algebra_section(
    alg: GraphLieAlgebra, include_derivations: bool = True
) -> Dict[str, Any]:
    """Structure constants checks, series, center, nilradical and fingerprint."""
    warnings: List[str] = []
    jacobi = alg.verify_jacobi()
    antisymmetry = alg.verify_antisymmetry()
    lower = alg.lower_central_series()
    derived = alg.derived_series()
    oracle = alg.center_oracle()
    section: Dict[str, Any] = {
        "field": alg.field.tag,
        "dim": alg.dim,
        "dim_V": alg.dims[0],
        "dim_W": alg.dims[1],
        "dim_U": alg.dims[2],
        "jacobi": {"passed": jacobi.passed, "checked": jacobi.checked,
                   "witness": list(jacobi.witness) if jacobi.witness else None},
        "antisymmetry": antisymmetry.passed,
        "derived_dims": [s.dim for s in derived],
        "lower_central_dims": [s.dim for s in lower],
        "solvable": derived[-1].dim == 0,
        "nilpotent": lower[-1].dim == 0,
        "incidence_rank": alg.incidence_rank(),
        "dim_kernel_A": alg.kernel_A().dim,
        "center_dim": oracle.dim,
        "completely_solvable": alg.completely_solvable_check().to_json(),
    }
    try:
        section["series"] = alg.series_report().to_json()
    except PreconditionError as e:
        section["series"] = _refusal(warnings, "series", e)
    try:
        formula = alg.center_formula()
        section["center_formula_dim"] = formula.dim
        section["center_formula_matches"] = formula == oracle
        section["nilradical_dim"] = alg.nilradical().dim
        section["nilradical_certified"] = alg.nilradical_certified()
    except PreconditionError as e:
        section["center_formula"] = _refusal(warnings, "center formula", e)
        if not formula_contained(alg, oracle):
            raise ConsistencyError("Center formula is not contained in the computed center")
    try:
        section["fingerprint"] = alg.fingerprint(include_derivations).to_json()
    except PreconditionError as e:
        section["fingerprint"] = _refusal(warnings, "fingerprint", e)
    section["warnings"] = warnings
    return section


def formula_contained(alg: GraphLieAlgebra, oracle) -> bool:
    """Isolated vertices, E_gamma edges and ker A are central in every characteristic."""
    rows = [{alg.vertex_index(v): 1} for v in alg.graph.isolated_vertices()]
    rows += [{alg.edge_index(e): 1} for e in alg.decomposition.E_gamma]
    rows += alg.kernel_A().basis_rows()
    return Subspace.span(rows, alg.dim, alg.field).is_subspace_of(oracle)


def ricci_section(alg: GraphLieAlgebra, metric: MetricTensor, data) -> Dict[str, Any]:
    ric = data.ricci
    op = ricci_operator(ric, metric)
    frame = metric.frame()
    sym = frame.T @ to_float(ric) @ frame
    values, _ = sym_eigen(0.5 * (sym + sym.T)) if alg.dim else (np.zeros(0), None)
    out: Dict[str, Any] = {
        "matrix": ric.to_json() if isinstance(ric, Matrix) else to_float(ric),
        "operator": op.to_json() if isinstance(op, Matrix) else to_float(op),
        "diagonal": [str(ric[i, i]) if metric.exact else float(ric[i, i]) for i in range(alg.dim)],
        "spectrum": [float(v) for v in values],
    }
    if metric.exact:
        try:
            out["block_formula_matches"] = ricci_blocks(alg, metric) == ric
        except PreconditionError as e:
            out["block_formula_matches"] = None
            out["block_formula"] = str(e)
    return out


# -- subcommands ------------------------------------------------------------


def cmd_analyze(args: argparse.Namespace) -> int:
    g = load_graph(args.input, args.weights)
    field = Field.parse(args.field)
    alg = GraphLieAlgebra(g, k=args.k, field=field)
    report = report_header(
        "analyze", g, {"k": args.k, "field": field.tag, "weights": [str(w) for w in alg.weights]}
    )
    report["graph"] = graph_section(g, alg)
    report["algebra"] = algebra_section(alg, include_derivations=not args.no_derivations)
    return emit(report, args)


def resolve_metric(args: argparse.Namespace, dim: int) -> MetricTensor:
    if args.metric:
        return read_metric(args.metric, dim)
    if args.diag:
        return parse_diag(args.diag, dim)
    return MetricTensor.identity(dim)


def metric_report(
    alg: GraphLieAlgebra,
    metric: MetricTensor,
    trials: int,
    seed: int,
) -> Dict[str, Any]:
    """Every metric section; hypothesis refusals are recorded, not raised."""
    warnings: List[str] = []
    hypothesis = every_vertex_in_clique(alg.graph, alg.cliques)
    if not hypothesis:
        warnings.append("hypothesis: some vertex lies in no clique")
    data = curvature(alg, metric)
    section: Dict[str, Any] = {
        "metric": {"exact": metric.exact, "gram": metric.to_json()},
        "hypothesis_every_vertex_in_clique": hypothesis,
        "mean_curvature": (
            alg.format_element(data.mean_curvature)
            if metric.exact
            else {str(k): float(v) for k, v in data.mean_curvature.items()}
        ),
        "ricci": ricci_section(alg, metric, data),
        "curvature_symmetry_defects": data.symmetry_defects(),
    }
    n_pairs = alg.dim * (alg.dim - 1) // 2
    if n_pairs <= SPECTRUM_MAX_PAIRS:
        section["curvature_operator"] = curvature_operator_spectrum(alg, metric, data).to_json()
    else:
        message = f"curvature_operator: {n_pairs} pairs exceed the limit of {SPECTRUM_MAX_PAIRS}"
        logger.warning(message)
        warnings.append(message)
        section["curvature_operator"] = {"refused": message}

    if metric.exact:
        try:
            section["iwasawa"] = iwasawa_check(alg, metric).to_json()
        except LieGraphError as e:
            section["iwasawa"] = _refusal(warnings, "iwasawa", e)
        section["soliton"] = soliton_check(alg, metric).to_json()
        section["soliton"].pop("metric", None)
        try:
            nil = nilsoliton_check(alg, metric).to_json()
            nil.pop("metric", None)
            section["nilsoliton"] = nil
        except LieGraphError as e:
            section["nilsoliton"] = _refusal(warnings, "nilsoliton", e)
    else:
        for name in ("iwasawa", "soliton", "nilsoliton"):
            section[name] = _refusal(
                warnings, name, PreconditionError("decided exactly; supply a rational metric")
            )

    try:
        split = split_g1_g2(alg)
        section["split"] = split.to_json()
        section["split"]["orthogonal"] = split.orthogonal(metric)
    except PreconditionError as e:
        section["split"] = _refusal(warnings, "split", e)
    try:
        section["stably_ricci_diagonal"] = stably_ricci_diagonal_test(alg, trials, seed).to_json()
    except PreconditionError as e:
        section["stably_ricci_diagonal"] = _refusal(warnings, "stably_ricci_diagonal", e)
    section["warnings"] = warnings
    return section


def cmd_metric(args: argparse.Namespace) -> int:
    g = load_graph(args.input, args.weights)
    alg = GraphLieAlgebra(g, k=args.k, field=QQ)
    metric = resolve_metric(args, alg.dim)
    report = report_header(
        "metric",
        g,
        {"k": args.k, "field": "q", "weights": [str(w) for w in alg.weights],
         "seed": args.seed, "trials": args.trials},
    )
    report["metric"] = metric_report(alg, metric, args.trials, args.seed)
    return emit(report, args)


def cmd_soliton(args: argparse.Namespace) -> int:
    g = load_graph(args.input, args.weights)
    alg = GraphLieAlgebra(g, k=args.k, field=QQ)
    search = SolitonSearch(
        alg,
        iters=args.iters,
        tol=args.tol,
        seed=args.seed,
        clique_block=args.clique_block,
    )
    result = search.run()
    report = report_header(
        "soliton",
        g,
        {"k": args.k, "field": "q", "weights": [str(w) for w in alg.weights],
         "seed": args.seed, "iters": args.iters, "tol": args.tol,
         "clique_block": args.clique_block},
    )
    section = result.to_json()
    if result.exact_metric is not None:
        nil = nilsoliton_check(alg, result.exact_metric).to_json()
        nil.pop("metric", None)
        section["nilsoliton"] = nil
    report["soliton"] = section
    return emit(report, args)


def compare_report(
    a: Graph, b: Graph, k: int = 3, max_n: Optional[int] = None
) -> Dict[str, Any]:
    """
    Decide graph isomorphism, build and verify the induced algebra map, and
    compare fingerprints.

    Weighted inputs only count as isomorphic under a vertex map that also
    carries weights onto equal weights. The canonical certificates describe
    the underlying unweighted graphs.

    Raises:
        ConsistencyError: If isomorphic graphs give unequal fingerprints or
            the induced map fails verification.
    """
    labeler = CanonicalLabeler(max_n)
    weighted = not (a.has_unit_weights and b.has_unit_weights)
    if weighted:
        sigma = labeler.weighted_isomorphism(a, b)
    else:
        sigma = labeler.isomorphism(a, b)
    alg_a = GraphLieAlgebra(a, k=k)
    alg_b = GraphLieAlgebra(b, k=k)
    fp_a, fp_b = alg_a.fingerprint(), alg_b.fingerprint()
    section: Dict[str, Any] = {
        "graphs_isomorphic": sigma is not None,
        "weighted": weighted,
        "fingerprints_equal": fp_a == fp_b,
        "fingerprint_a": fp_a.to_json(),
        "fingerprint_b": fp_b.to_json(),
        "canonical_a": labeler.canonical_form(a).certificate,
        "canonical_b": labeler.canonical_form(b).certificate,
        "witness": None,
        "fingerprint_collision": sigma is None and not weighted and fp_a == fp_b,
    }
    if sigma is not None:
        result = alg_a.isomorphism_from_permutation(alg_b, sigma)
        if not result.is_isomorphism:
            raise ConsistencyError(f"Induced map of {sigma} fails: {result.witness}")
        if fp_a != fp_b:
            raise ConsistencyError("Isomorphic graphs gave different fingerprints")
        section["witness"] = result.to_json()
    return section


def cmd_compare(args: argparse.Namespace) -> int:
    a = load_graph(args.input_a)
    b = load_graph(args.input_b)
    report = report_header("compare", a, {"k": args.k, "max_n": args.max_n})
    report["input_digest_b"] = graph_digest(b)
    report["comparison"] = compare_report(a, b, k=args.k, max_n=args.max_n)
    return emit(report, args)


def cmd_gen(args: argparse.Namespace) -> int:
    g = generate(args.family, seed=args.seed)
    text = format_edge_list(g)
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    if args.pretty:
        stream = sys.stderr if not args.out else sys.stdout
        stream.write(f"{args.family}: n = {g.n}, {len(g.edges)} edges, seed {args.seed}\n")
    logger.info("Generated %s with %d vertices and %d edges", args.family, g.n, len(g.edges))
    return 0

