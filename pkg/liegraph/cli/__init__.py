"""Command-line subcommands."""

from .commands import (
    cmd_analyze,
    cmd_compare,
    cmd_gen,
    cmd_metric,
    cmd_soliton,
    compare_report,
    metric_report,
)

__all__ = [
    "cmd_analyze",
    "cmd_compare",
    "cmd_gen",
    "cmd_metric",
    "cmd_soliton",
    "compare_report",
    "metric_report",
]
