"""Plain-text views of reports for --pretty."""

from typing import Any, List, Sequence, Union

import numpy as np

from ..core.linalg import Matrix


def format_matrix(
    matrix: Union[Matrix, np.ndarray, Sequence[Sequence[Any]]],
    precision: int = 4,
    labels: Sequence[str] = (),
) -> str:
    """
    Format a matrix as a readable string.

    Exact entries are printed as fractions, floats with the given precision.

    Args:
        matrix: Exact Matrix, float array or nested rows.
        precision: Decimal precision for float entries.
        labels: Optional row labels.

    Returns:
        Formatted string representation.
    """
    rows = matrix.data if isinstance(matrix, Matrix) else matrix
    fmt = f"{{:.{precision}f}}"

    def cell(value: Any) -> str:
        if isinstance(value, (float, np.floating)):
            return fmt.format(float(value))
        return str(value)

    cells = [[cell(v) for v in row] for row in rows]
    width = max((len(c) for row in cells for c in row), default=1)
    label_width = max((len(lab) for lab in labels), default=0)
    lines = ["["]
    for idx, row in enumerate(cells):
        prefix = f"{labels[idx]:<{label_width}} " if labels else ""
        row_str = ", ".join(c.rjust(width) for c in row)
        lines.append(f"    {prefix}[{row_str}],")
    lines.append("]")
    return "\n".join(lines)


def _flatten(prefix: str, value: Any, out: List[tuple]) -> None:
    if isinstance(value, dict):
        if set(value) >= {"rows", "cols", "entries"}:
            out.append((prefix, f"{value['rows']}x{value['cols']} matrix, "
                                f"{len(value['entries'])} nonzero"))
            return
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else str(key), value[key], out)
    elif isinstance(value, list) and len(value) > 8:
        out.append((prefix, f"[{len(value)} items]"))
    else:
        out.append((prefix, value))


def format_report(report: dict) -> str:
    """Two-column key/value table of a JSON-ready report."""
    rows: List[tuple] = []
    _flatten("", report, rows)
    width = max((len(key) for key, _ in rows), default=0)
    return "\n".join(f"{key:<{width}}  {value}" for key, value in rows)
