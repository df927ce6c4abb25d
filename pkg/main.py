#!/usr/bin/env python3
"""
liegraph - Main Entry Point

Solvable Lie algebras of graphs: structure, isomorphism invariants and
left-invariant metric geometry, reported as deterministic JSON.

Usage:
    python main.py analyze graph.txt            # Algebra invariants
    python main.py metric graph.txt --diag ...  # Curvature, Ricci, Iwasawa type
    python main.py soliton graph.txt            # Soliton search
    python main.py compare a.txt b.txt          # Isomorphism and fingerprints
    python main.py gen kn:5 --out k5.txt        # Graph families
    python main.py --help                       # Show help
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from liegraph import __version__
from liegraph.config import (
    DEFAULT_SEED,
    SEARCH_ITERS,
    SEARCH_TOL,
    STABLY_DIAGONAL_TRIALS,
)
from liegraph.exceptions import ConsistencyError, LieGraphError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", metavar="PATH", help="Write output here instead of stdout")
    parser.add_argument(
        "--pretty", action="store_true", help="Also print a human-readable table"
    )


def _algebra_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="Edge-list file")
    parser.add_argument("--k", type=int, default=3, help="Clique size (default 3)")
    parser.add_argument("--weights", metavar="PATH", help="Vertex weight file")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    from liegraph.cli import cmd_analyze, cmd_compare, cmd_gen, cmd_metric, cmd_soliton

    parser = argparse.ArgumentParser(
        prog="liegraph",
        description="liegraph - Solvable Lie algebras of graphs and their metrics",
    )
    parser.add_argument(
        "--version", action="version", version=f"liegraph {__version__}"
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Debug logging on stderr"
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    analyze = subparsers.add_parser("analyze", help="Structure and invariants of the algebra")
    _algebra_flags(analyze)
    analyze.add_argument("--field", default="q", help="Scalar field: q, f2 or fp:P")
    analyze.add_argument(
        "--no-derivations",
        action="store_true",
        help="Skip the derivation dimension in the fingerprint",
    )
    _output_flags(analyze)
    analyze.set_defaults(func=cmd_analyze)

    metric = subparsers.add_parser("metric", help="Left-invariant metric geometry")
    _algebra_flags(metric)
    source = metric.add_mutually_exclusive_group()
    source.add_argument("--metric", metavar="PATH", help="Metric file (JSON or matrix text)")
    source.add_argument("--diag", metavar="A,B,...", help="Diagonal metric entries")
    metric.add_argument(
        "--trials", type=int, default=STABLY_DIAGONAL_TRIALS,
        help="Random metrics for the stably Ricci-diagonal test",
    )
    metric.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    _output_flags(metric)
    metric.set_defaults(func=cmd_metric)

    soliton = subparsers.add_parser("soliton", help="Search for a soliton metric")
    _algebra_flags(soliton)
    soliton.add_argument("--iters", type=int, default=SEARCH_ITERS, help="Maximum sweeps")
    soliton.add_argument("--tol", type=float, default=SEARCH_TOL, help="Residual tolerance")
    soliton.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    soliton.add_argument(
        "--clique-block",
        choices=["trace_form", "diagonal"],
        default="trace_form",
        help="Parametrisation of the clique block of the metric",
    )
    _output_flags(soliton)
    soliton.set_defaults(func=cmd_soliton)

    compare = subparsers.add_parser("compare", help="Compare the algebras of two graphs")
    compare.add_argument("input_a", help="First edge-list file")
    compare.add_argument("input_b", help="Second edge-list file")
    compare.add_argument("--k", type=int, default=3, help="Clique size (default 3)")
    compare.add_argument(
        "--max-n", type=int, default=None,
        help="Vertex limit for exhaustive search (default LIEGRAPH_MAX_N or 10)",
    )
    _output_flags(compare)
    compare.set_defaults(func=cmd_compare)

    gen = subparsers.add_parser("gen", help="Write a graph from a named family")
    gen.add_argument("family", help="e.g. kn:5, path:3, cycle:6, gnp:6:0.5, petersen")
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    _output_flags(gen)
    gen.set_defaults(func=cmd_gen)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for liegraph; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return args.func(args)
    except ConsistencyError as e:
        print(f"liegraph: internal consistency error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (LieGraphError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"liegraph: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
