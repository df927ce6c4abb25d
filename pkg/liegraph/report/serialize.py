"""Deterministic JSON reports."""

import hashlib
import json
import math
import os
import tempfile
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from ..core.graphs import Graph, format_edge_list
from ..core.linalg import Matrix, Residue


def to_jsonable(obj: Any) -> Any:
    """
    Convert report values to plain JSON types.

    Exact scalars become strings, tuples become lists, numpy scalars and
    arrays become Python floats and lists. Non-finite floats are written as
    the strings "inf", "-inf" and "nan".
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    if isinstance(obj, (Fraction, Residue)):
        return str(obj)
    if isinstance(obj, Matrix):
        return obj.to_json()
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    raise TypeError(f"Cannot serialise {type(obj).__name__}")


def dumps(report: Any, indent: Optional[int] = 2) -> str:
    """
    Byte-stable JSON text: sorted keys, fixed separators, floats written with
    the shortest representation that reads back to the same double.
    """
    return (
        json.dumps(
            to_jsonable(report),
            sort_keys=True,
            indent=indent,
            separators=(",", ": ") if indent is not None else (",", ":"),
            ensure_ascii=True,
            allow_nan=False,
        )
        + "\n"
    )


def atomic_write(path: str, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".liegraph-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: Any, path: Optional[str] = None) -> str:
    """Serialise a report to path (atomically) or return it for stdout."""
    text = dumps(report)
    if path:
        atomic_write(path, text)
    return text


def graph_digest(g: Graph) -> str:
    """sha256 of the canonical edge-list text."""
    return "sha256:" + hashlib.sha256(format_edge_list(g).encode("utf-8")).hexdigest()
