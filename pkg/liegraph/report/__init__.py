"""Report serialisation, text tables and metric-file parsing."""

from .serialize import atomic_write, dumps, graph_digest, to_jsonable, write_report
from .tables import format_matrix, format_report
from .metric_io import parse_diag, parse_matrix_input, read_metric

__all__ = [
    "atomic_write",
    "dumps",
    "graph_digest",
    "to_jsonable",
    "write_report",
    "format_matrix",
    "format_report",
    "parse_diag",
    "parse_matrix_input",
    "read_metric",
]
