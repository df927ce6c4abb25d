"""Canonical labeling, isomorphism and automorphism search for small graphs."""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from networkx.algorithms.isomorphism import GraphMatcher, categorical_node_match

from ..config import max_exhaustive_n
from ..exceptions import ConsistencyError, SizeGuardError
from .graphs import Edge, Graph, check_permutation


logger = logging.getLogger(__name__)

_WEIGHT_MATCH = categorical_node_match("weight", 1)
_MARK_MATCH = categorical_node_match("mark", None)


@dataclass(frozen=True)
class CanonicalForm:
    """
    Canonical relabeling of a graph.

    labeling[v-1] is the new label of vertex v; edges is the relabeled edge
    set, which is equal for two graphs exactly when they are isomorphic.
    """

    n: int
    labeling: Tuple[int, ...]
    edges: Tuple[Edge, ...]

    @property
    def certificate(self) -> str:
        """Adjacency bit-string in column order (1,2),(1,3),(2,3),(1,4),..."""
        present = set(self.edges)
        return "".join(
            "1" if (i, j) in present else "0"
            for j in range(2, self.n + 1)
            for i in range(1, j)
        )

    def to_json(self) -> dict:
        return {
            "labeling": list(self.labeling),
            "edges": [list(e) for e in self.edges],
        }


def refine_colors(g: Graph) -> List[int]:
    """
    Equitable colouring by iterated neighbour-colour signatures, starting from
    degrees. Colours are ranks of sorted signatures, so the result does not
    depend on the vertex numbering.

    Returns:
        colors[v-1] for each vertex, numbered 0..(number of cells - 1).
    """
    colors = [g.degree(v) for v in g.vertices]
    n_cells = len(set(colors))
    while True:
        signatures = [
            (colors[v - 1], tuple(sorted(colors[u - 1] for u in g.neighbors(v))))
            for v in g.vertices
        ]
        ranks = {sig: idx for idx, sig in enumerate(sorted(set(signatures)))}
        colors = [ranks[sig] for sig in signatures]
        if len(ranks) == n_cells:
            return colors
        n_cells = len(ranks)


class CanonicalLabeler:
    """Exhaustive canonical labeling inside refined colour cells."""

    def __init__(self, max_n: Optional[int] = None):
        """
        Args:
            max_n: Largest vertex count accepted; defaults to LIEGRAPH_MAX_N or 10.
        """
        self.max_n = max_n if max_n is not None else max_exhaustive_n()

    def _guard(self, g: Graph) -> None:
        if g.n > self.max_n:
            raise SizeGuardError(
                f"Exhaustive search limited to n <= {self.max_n}, got n = {g.n}"
            )

    def canonical_form(self, g: Graph) -> CanonicalForm:
        """
        Minimise the column-order adjacency bit-string over all labelings that
        list the refined cells in colour order.

        Twins inside a cell are interchangeable (swapping them is an
        automorphism), so only one of them is tried at each position.

        Raises:
            SizeGuardError: If g.n exceeds max_n.
        """
        self._guard(g)
        colors = refine_colors(g)
        cells: Dict[int, List[int]] = {}
        for v in g.vertices:
            cells.setdefault(colors[v - 1], []).append(v)
        slot_cells = [c for c in sorted(cells) for _ in cells[c]]
        n = g.n

        best: List[Optional[Tuple[List[int], List[int]]]] = [None]
        order: List[int] = []
        used = set()
        leaves = [0]

        def prefix_bits(depth: int) -> List[int]:
            # bits of column `depth` (pairs (i, depth) for i < depth)
            v = order[depth - 1]
            return [1 if g.has_edge(order[i - 1], v) else 0 for i in range(1, depth)]

        def search(bits: List[int]) -> None:
            depth = len(order)
            if depth == n:
                leaves[0] += 1
                if best[0] is None or bits < best[0][0]:
                    best[0] = (bits, list(order))
                return
            tried: List[int] = []
            for v in cells[slot_cells[depth]]:
                if v in used:
                    continue
                if any(_twins(g, v, u) for u in tried):
                    continue
                tried.append(v)
                order.append(v)
                used.add(v)
                extended = bits + prefix_bits(depth + 1)
                if best[0] is None or extended <= best[0][0][: len(extended)]:
                    search(extended)
                order.pop()
                used.discard(v)

        search([])
        _, best_order = best[0]
        labeling = [0] * n
        for new_label, v in enumerate(best_order, start=1):
            labeling[v - 1] = new_label
        relabeled = g.permute(labeling)
        logger.debug("Canonical form of n=%d graph after %d leaves", n, leaves[0])
        return CanonicalForm(n, tuple(labeling), relabeled.edges)

    def isomorphism(self, a: Graph, b: Graph) -> Optional[Tuple[int, ...]]:
        """
        Vertex bijection sigma with a.permute(sigma) == b, or None.

        The witness is the composition of a's canonical labeling with the
        inverse of b's.
        """
        if a.n != b.n or len(a.edges) != len(b.edges):
            return None
        ca, cb = self.canonical_form(a), self.canonical_form(b)
        if ca.edges != cb.edges:
            return None
        inverse_b = {label: v for v, label in enumerate(cb.labeling, start=1)}
        sigma = tuple(inverse_b[ca.labeling[v - 1]] for v in a.vertices)
        if a.permute(sigma).edges != b.edges:
            raise ConsistencyError("Canonical witness does not map edges onto edges")
        return sigma

    def weighted_isomorphism(self, a: Graph, b: Graph) -> Optional[Tuple[int, ...]]:
        """
        Vertex bijection sigma with a.permute(sigma) == b that also carries
        every vertex weight onto an equal weight, or None.
        """
        self._guard(a)
        if a.n != b.n or len(a.edges) != len(b.edges):
            return None
        matcher = GraphMatcher(a.to_networkx(), b.to_networkx(), node_match=_WEIGHT_MATCH)
        mapping = next(matcher.isomorphisms_iter(), None)
        if mapping is None:
            return None
        sigma = tuple(mapping[v] for v in a.vertices)
        moved = a.permute(sigma)
        if moved.edges != b.edges or any(moved.weight(v) != b.weight(v) for v in b.vertices):
            raise ConsistencyError("Weighted isomorphism does not map weights onto weights")
        return sigma

    def find_automorphism(
        self, g: Graph, prescribed: Optional[Dict[int, int]] = None
    ) -> Optional[Tuple[int, ...]]:
        """First automorphism extending a partial vertex map, or None."""
        self._guard(g)
        prescribed = prescribed or {}
        source, target = g.to_networkx(), g.to_networkx()
        for mark, (src, dst) in enumerate(sorted(prescribed.items())):
            source.nodes[src]["mark"] = mark
            target.nodes[dst]["mark"] = mark
        matcher = GraphMatcher(source, target, node_match=_MARK_MATCH)
        mapping = next(matcher.isomorphisms_iter(), None)
        return None if mapping is None else tuple(mapping[v] for v in g.vertices)

    def automorphisms(self, g: Graph) -> Iterator[Tuple[int, ...]]:
        """All automorphisms as 1-based image tuples."""
        self._guard(g)
        graph = g.to_networkx()
        for mapping in GraphMatcher(graph, graph).isomorphisms_iter():
            yield tuple(mapping[v] for v in g.vertices)

    def set_orbits(self, g: Graph, sets: Sequence[Tuple[int, ...]]) -> List[int]:
        """
        Orbit index of each vertex tuple under the automorphism group.

        Tuples are compared as vertex sets; tuples of different length never
        share an orbit. Orbit indices are numbered in order of first appearance.
        """
        self._guard(g)
        reps: List[Tuple[int, ...]] = []
        labels: List[int] = []
        for item in sets:
            for idx, rep in enumerate(reps):
                if len(rep) == len(item) and self._maps_onto(g, rep, item):
                    labels.append(idx)
                    break
            else:
                reps.append(item)
                labels.append(len(reps) - 1)
        logger.debug("%d vertex sets fall into %d orbits", len(labels), len(reps))
        return labels

    def _maps_onto(self, g: Graph, src: Tuple[int, ...], dst: Tuple[int, ...]) -> bool:
        source, target = g.to_networkx(), g.to_networkx()
        for v in src:
            source.nodes[v]["mark"] = 0
        for v in dst:
            target.nodes[v]["mark"] = 0
        return GraphMatcher(source, target, node_match=_MARK_MATCH).is_isomorphic()


def _twins(g: Graph, a: int, b: int) -> bool:
    return g.neighbors(a) - {b} == g.neighbors(b) - {a}


def canonical_form(g: Graph, max_n: Optional[int] = None) -> CanonicalForm:
    return CanonicalLabeler(max_n).canonical_form(g)


def are_isomorphic(a: Graph, b: Graph, max_n: Optional[int] = None) -> bool:
    return CanonicalLabeler(max_n).isomorphism(a, b) is not None


def is_automorphism(g: Graph, sigma: Sequence[int]) -> bool:
    check_permutation(sigma, g.n)
    return g.permute(sigma).edges == g.edges
