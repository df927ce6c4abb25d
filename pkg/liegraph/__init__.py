"""
liegraph - Solvable Lie algebras attached to graphs.

This package provides tools for:
- Building the Lie algebra spanned by the vertices, edges and k-cliques of a graph
- Exact structural invariants (series, center, nilradical, derivations)
- Constructive isomorphisms and invariant fingerprints
- Left-invariant metric geometry (curvature, Ricci, Iwasawa type)
- Ricci soliton certification and search
"""

__version__ = "1.0.0"
__author__ = "xiaqianlong, duanzhenke"
