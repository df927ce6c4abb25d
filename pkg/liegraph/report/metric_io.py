"""Metric input: JSON metric files, plain matrix text and --diag strings."""

import json
import logging
import os
from fractions import Fraction
from typing import List

from ..core.linalg import QQ, Matrix
from ..core.metric import MetricTensor
from ..exceptions import DimensionMismatchError, InvalidParameterError


logger = logging.getLogger(__name__)


def _rational(token: str) -> Fraction:
    try:
        return Fraction(token.strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidParameterError(f"Invalid metric entry {token!r}") from None


def parse_matrix_input(text: str) -> Matrix:
    """
    Parse matrix input text.

    Args:
        text: One row per line, entries separated by whitespace or commas;
            integers, decimals and fractions are read exactly.

    Returns:
        Exact rational Matrix.
    """
    rows: List[List[Fraction]] = []
    for line in text.strip().split("\n"):
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([_rational(tok) for tok in line.replace(",", " ").split()])
    return Matrix.from_rows(rows, QQ)


def parse_diag(text: str, dim: int) -> MetricTensor:
    """Diagonal metric from "a,b,..." with exact rational entries."""
    values = [_rational(tok) for tok in text.split(",") if tok.strip()]
    if len(values) != dim:
        raise DimensionMismatchError(f"--diag needs {dim} entries, got {len(values)}")
    return MetricTensor.diagonal(values)


def read_metric(path: str, dim: int) -> MetricTensor:
    """
    Read a metric file: JSON {"diag": [...]} / {"matrix": [[...]]}, or a plain
    whitespace matrix.

    Raises:
        FileNotFoundError: If the file does not exist.
        json.JSONDecodeError: For malformed JSON.
        InvalidParameterError, DimensionMismatchError, PreconditionError:
            For bad entries, sizes or a non positive-definite metric.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Metric file not found: {path}")
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    if text.lstrip().startswith("{"):
        metric = MetricTensor.from_json(json.loads(text), dim)
    else:
        metric = MetricTensor(parse_matrix_input(text))
        if metric.dim != dim:
            raise DimensionMismatchError(f"Metric of size {metric.dim}, algebra has dimension {dim}")
    logger.debug("Read %s metric of dimension %d from %s", "exact" if metric.exact else "float", dim, path)
    return metric
