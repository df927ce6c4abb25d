"""Core modules for graph Lie algebras and their metric geometry."""

from .graphs import (
    CliqueSet,
    CoherenceGraph,
    Graph,
    GraphDecomposition,
    coherence_graph,
    decompose,
    enumerate_k_cliques,
    every_vertex_in_clique,
    format_edge_list,
    generate,
    hypothesis_report,
    parse_edge_list,
    parse_weights,
    read_graph,
)
from .canonical import CanonicalForm, CanonicalLabeler, are_isomorphic, canonical_form
from .linalg import QQ, Field, Matrix, Subspace, det, inverse, kernel, rank, rref, solve
from .eigen import sym_eigen
from .lie_algebra import IdentityCheck, LieAlgebra
from .graph_algebra import Fingerprint, GraphLieAlgebra, IsomorphismResult, build
from .metric import (
    CurvatureData,
    IwasawaReport,
    MetricTensor,
    SplitResult,
    curvature,
    curvature_operator_spectrum,
    iwasawa_check,
    levi_civita,
    mean_curvature,
    ricci_blocks,
    ricci_scalar_form,
    sectional_formula,
    split_g1_g2,
    stably_ricci_diagonal_test,
)
from .soliton import (
    SolitonCertificate,
    SolitonSearch,
    nilsoliton_check,
    soliton_check,
    soliton_search_diagonal,
)

__all__ = [
    "CliqueSet",
    "CoherenceGraph",
    "Graph",
    "GraphDecomposition",
    "coherence_graph",
    "decompose",
    "enumerate_k_cliques",
    "every_vertex_in_clique",
    "format_edge_list",
    "generate",
    "hypothesis_report",
    "parse_edge_list",
    "parse_weights",
    "read_graph",
    "CanonicalForm",
    "CanonicalLabeler",
    "are_isomorphic",
    "canonical_form",
    "QQ",
    "Field",
    "Matrix",
    "Subspace",
    "det",
    "inverse",
    "kernel",
    "rank",
    "rref",
    "solve",
    "sym_eigen",
    "IdentityCheck",
    "LieAlgebra",
    "Fingerprint",
    "GraphLieAlgebra",
    "IsomorphismResult",
    "build",
    "CurvatureData",
    "IwasawaReport",
    "MetricTensor",
    "SplitResult",
    "curvature",
    "curvature_operator_spectrum",
    "iwasawa_check",
    "levi_civita",
    "mean_curvature",
    "ricci_blocks",
    "ricci_scalar_form",
    "sectional_formula",
    "split_g1_g2",
    "stably_ricci_diagonal_test",
    "SolitonCertificate",
    "SolitonSearch",
    "nilsoliton_check",
    "soliton_check",
    "soliton_search_diagonal",
]
