"""Graph representation, edge-list I/O, generators and clique structure."""

import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from ..exceptions import GraphParseError, InvalidParameterError
from .rng import XorShift64Star


logger = logging.getLogger(__name__)

Edge = Tuple[int, int]

FAMILIES = (
    "kn", "complete", "path", "cycle", "star", "wheel", "empty",
    "gnp", "pendant", "dodecahedron", "petersen",
)


@dataclass(frozen=True)
class Graph:
    """
    Simple undirected graph on vertices 1..n with optional vertex weights.

    Edges are stored as sorted pairs (i, j) with i < j, in lexicographic order.
    """

    n: int
    edges: Tuple[Edge, ...] = ()
    weights: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError(f"Vertex count must be positive, got {self.n}")
        normalized = []
        for i, j in self.edges:
            if i == j:
                raise InvalidParameterError(f"Self-loop at vertex {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise InvalidParameterError(f"Edge ({i},{j}) outside 1..{self.n}")
            normalized.append((min(i, j), max(i, j)))
        if len(set(normalized)) != len(normalized):
            raise InvalidParameterError("Duplicate edge")
        object.__setattr__(self, "edges", tuple(sorted(normalized)))
        if self.weights is not None:
            if len(self.weights) != self.n:
                raise InvalidParameterError(
                    f"Expected {self.n} weights, got {len(self.weights)}"
                )
            object.__setattr__(
                self, "weights", tuple(Fraction(w) for w in self.weights)
            )

    @cached_property
    def adjacency(self) -> Dict[int, FrozenSet[int]]:
        neighbors: Dict[int, set] = {v: set() for v in self.vertices}
        for i, j in self.edges:
            neighbors[i].add(j)
            neighbors[j].add(i)
        return {v: frozenset(nb) for v, nb in neighbors.items()}

    @cached_property
    def edge_set(self) -> FrozenSet[Edge]:
        return frozenset(self.edges)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, v: int) -> FrozenSet[int]:
        return self.adjacency[v]

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edge_set

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def isolated_vertices(self) -> List[int]:
        return [v for v in self.vertices if not self.adjacency[v]]

    def weight(self, v: int) -> Fraction:
        return Fraction(1) if self.weights is None else self.weights[v - 1]

    @property
    def has_unit_weights(self) -> bool:
        return self.weights is None or all(w == 1 for w in self.weights)

    def with_weights(self, weights: Optional[Sequence[Fraction]]) -> "Graph":
        return Graph(self.n, self.edges, None if weights is None else tuple(weights))

    def permute(self, sigma: Sequence[int]) -> "Graph":
        """
        Relabel vertices: vertex i becomes sigma[i-1].

        Raises:
            InvalidParameterError: If sigma is not a permutation of 1..n.
        """
        check_permutation(sigma, self.n)
        edges = tuple((sigma[i - 1], sigma[j - 1]) for i, j in self.edges)
        weights = None
        if self.weights is not None:
            moved = [Fraction(1)] * self.n
            for v in self.vertices:
                moved[sigma[v - 1] - 1] = self.weights[v - 1]
            weights = tuple(moved)
        return Graph(self.n, edges, weights)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from((v, {"weight": self.weight(v)}) for v in self.vertices)
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        """Convert a networkx graph, numbering its nodes 1..n in sorted order."""
        nodes = sorted(g.nodes())
        index = {node: i for i, node in enumerate(nodes, start=1)}
        return cls(len(nodes), tuple((index[a], index[b]) for a, b in g.edges()))


def check_permutation(sigma: Sequence[int], n: int) -> None:
    if sorted(sigma) != list(range(1, n + 1)):
        raise InvalidParameterError(f"Not a permutation of 1..{n}: {list(sigma)}")


def _parse_int(token: str, what: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise GraphParseError(f"Invalid {what} {token!r}", line) from None


def _parse_value(token: str, line: int) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise GraphParseError(f"Invalid rational literal {token!r}", line) from None


def parse_edge_list(text: str) -> Graph:
    """
    Parse the edge-list format.

    The first non-comment line may be a lone vertex count "n"; following lines
    are edges "i j" or weights "w i value" ("p/q" or integer). Lines starting
    with '#' are comments.

    Args:
        text: File contents.

    Returns:
        Parsed graph.

    Raises:
        GraphParseError: On malformed lines, out-of-range endpoints, duplicate
            edges or weights, and self-loops, with the offending line number.
    """
    declared: Optional[int] = None
    edges: Dict[Edge, int] = {}
    weights: Dict[int, Tuple[Fraction, int]] = {}
    seen_content = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "w":
            if len(parts) != 3:
                raise GraphParseError("Weight line must be 'w i value'", lineno)
            v = _parse_int(parts[1], "vertex", lineno)
            if v < 1:
                raise GraphParseError(f"Vertex {v} out of range", lineno)
            if v in weights:
                raise GraphParseError(f"Duplicate weight for vertex {v}", lineno)
            weights[v] = (_parse_value(parts[2], lineno), lineno)
        elif len(parts) == 1 and not seen_content:
            declared = _parse_int(parts[0], "vertex count", lineno)
            if declared < 1:
                raise GraphParseError(f"Vertex count must be positive, got {declared}", lineno)
        elif len(parts) == 2:
            i = _parse_int(parts[0], "vertex", lineno)
            j = _parse_int(parts[1], "vertex", lineno)
            if i == j:
                raise GraphParseError(f"Self-loop at vertex {i}", lineno)
            if min(i, j) < 1:
                raise GraphParseError(f"Vertex {min(i, j)} out of range", lineno)
            key = (min(i, j), max(i, j))
            if key in edges:
                raise GraphParseError(
                    f"Duplicate edge {key} (first seen on line {edges[key]})", lineno
                )
            edges[key] = lineno
        else:
            raise GraphParseError(f"Malformed line {line!r}", lineno)
        seen_content = True

    if declared is None:
        labels = [v for e in edges for v in e] + list(weights)
        if not labels:
            raise GraphParseError("No vertex count and no edges")
        declared = max(labels)
    for (i, j), lineno in edges.items():
        if j > declared:
            raise GraphParseError(f"Vertex {j} out of range 1..{declared}", lineno)
    for v, (_, lineno) in weights.items():
        if v > declared:
            raise GraphParseError(f"Vertex {v} out of range 1..{declared}", lineno)

    weight_tuple = None
    if weights:
        weight_tuple = tuple(
            weights[v][0] if v in weights else Fraction(1)
            for v in range(1, declared + 1)
        )
    graph = Graph(declared, tuple(edges), weight_tuple)
    logger.debug("Parsed graph with n=%d, %d edges", graph.n, len(graph.edges))
    return graph


def parse_weights(text: str, n: int) -> Tuple[Fraction, ...]:
    """
    Parse a weight file: lines "w i value" or "i value"; unlisted vertices get 1.

    Raises:
        GraphParseError: On malformed lines or out-of-range vertices.
    """
    weights = [Fraction(1)] * n
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "w":
            parts = parts[1:]
        if len(parts) != 2:
            raise GraphParseError("Weight line must be 'i value'", lineno)
        v = _parse_int(parts[0], "vertex", lineno)
        if not 1 <= v <= n:
            raise GraphParseError(f"Vertex {v} out of range 1..{n}", lineno)
        if v in seen:
            raise GraphParseError(f"Duplicate weight for vertex {v}", lineno)
        seen.add(v)
        weights[v - 1] = _parse_value(parts[1], lineno)
    return tuple(weights)


def format_edge_list(g: Graph) -> str:
    """Canonical text form; parse_edge_list(format_edge_list(g)) == g."""
    lines = [str(g.n)]
    lines.extend(f"{i} {j}" for i, j in g.edges)
    if not g.has_unit_weights:
        lines.extend(f"w {v} {g.weight(v)}" for v in g.vertices if g.weight(v) != 1)
    return "\n".join(lines) + "\n"


def read_graph(path: str) -> Graph:
    """
    Load an edge-list file.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        GraphParseError: If the contents are malformed.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Graph file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return parse_edge_list(f.read())


def _family_size(params: List[str], family: str, minimum: int) -> int:
    if len(params) != 1:
        raise InvalidParameterError(f"Family {family!r} takes one size parameter")
    try:
        n = int(params[0])
    except ValueError:
        raise InvalidParameterError(f"Invalid size {params[0]!r} for {family!r}") from None
    if n < minimum:
        raise InvalidParameterError(f"Family {family!r} needs n >= {minimum}, got {n}")
    return n


def generate(family: str, seed: int = 0) -> Graph:
    """
    Build a graph from a family spec such as "kn:5", "path:3", "cycle:4",
    "gnp:6:0.5", "star:5", "wheel:6", "empty:3", "pendant", "dodecahedron"
    or "petersen".

    Args:
        family: Family tag with colon-separated parameters.
        seed: Seed for random families (ignored by deterministic ones).

    Returns:
        The generated graph; fixed (family, seed) always gives the same graph.

    Raises:
        InvalidParameterError: Unknown family or invalid parameters.
    """
    tag, *params = family.strip().lower().split(":")
    if tag not in FAMILIES:
        raise InvalidParameterError(
            f"Unknown graph family {tag!r}; expected one of {', '.join(FAMILIES)}"
        )

    if tag in ("kn", "complete"):
        return Graph.from_networkx(nx.complete_graph(_family_size(params, tag, 1)))
    if tag == "path":
        return Graph.from_networkx(nx.path_graph(_family_size(params, tag, 1)))
    if tag == "cycle":
        return Graph.from_networkx(nx.cycle_graph(_family_size(params, tag, 3)))
    if tag == "star":
        return Graph.from_networkx(nx.star_graph(_family_size(params, tag, 2) - 1))
    if tag == "wheel":
        return Graph.from_networkx(nx.wheel_graph(_family_size(params, tag, 4)))
    if tag == "empty":
        return Graph(_family_size(params, tag, 1))
    if tag == "pendant":
        return Graph(4, ((1, 2), (1, 3), (2, 3), (3, 4)))
    if tag == "dodecahedron":
        return Graph.from_networkx(nx.dodecahedral_graph())
    if tag == "petersen":
        return Graph.from_networkx(nx.petersen_graph())

    # gnp:n:p
    if len(params) != 2:
        raise InvalidParameterError("Family 'gnp' takes parameters n and p")
    n = _family_size(params[:1], tag, 1)
    try:
        p = float(params[1])
    except ValueError:
        raise InvalidParameterError(f"Invalid probability {params[1]!r}") from None
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"Probability must lie in [0, 1], got {p}")
    rng = XorShift64Star(seed)
    edges = tuple(
        (i, j)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        if rng.random() < p
    )
    return Graph(n, edges)


@dataclass(frozen=True)
class CliqueSet:
    """All k-cliques of a graph as increasing tuples in lexicographic order."""

    k: int
    cliques: Tuple[Tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.cliques)

    def __iter__(self):
        return iter(self.cliques)

    def covered_vertices(self) -> FrozenSet[int]:
        return frozenset(v for t in self.cliques for v in t)


def enumerate_k_cliques(g: Graph, k: int) -> CliqueSet:
    """
    List every k-clique by ordered extension: increasing tuples are extended
    by the common higher neighbours of their members.

    Raises:
        InvalidParameterError: If k < 3.
    """
    if k < 3:
        raise InvalidParameterError(f"Clique size must be at least 3, got {k}")
    adj = g.adjacency
    found: List[Tuple[int, ...]] = []

    def extend(clique: List[int], candidates: List[int]) -> None:
        if len(clique) == k:
            found.append(tuple(clique))
            return
        for idx, v in enumerate(candidates):
            if len(clique) + len(candidates) - idx < k:
                return
            extend(clique + [v], [u for u in candidates[idx + 1:] if u in adj[v]])

    for v in g.vertices:
        extend([v], sorted(u for u in adj[v] if u > v))
    logger.debug("Found %d %d-cliques", len(found), k)
    return CliqueSet(k, tuple(found))


@dataclass(frozen=True)
class GraphDecomposition:
    """Split into vertices covered by cliques (delta) and the rest (gamma)."""

    V_delta: FrozenSet[int]
    E_delta: FrozenSet[Edge]
    V_gamma: FrozenSet[int]
    E_gamma: FrozenSet[Edge]
    E_delta_gamma: FrozenSet[Edge]

    def to_json(self) -> dict:
        return {
            "V_delta": sorted(self.V_delta),
            "V_gamma": sorted(self.V_gamma),
            "E_delta": [list(e) for e in sorted(self.E_delta)],
            "E_gamma": [list(e) for e in sorted(self.E_gamma)],
            "E_delta_gamma": [list(e) for e in sorted(self.E_delta_gamma)],
        }


def decompose(g: Graph, cliques: CliqueSet) -> GraphDecomposition:
    v_delta = cliques.covered_vertices()
    v_gamma = frozenset(g.vertices) - v_delta
    e_delta, e_gamma, e_mixed = set(), set(), set()
    for i, j in g.edges:
        inside = (i in v_delta) + (j in v_delta)
        (e_gamma, e_mixed, e_delta)[inside].add((i, j))
    return GraphDecomposition(
        v_delta, frozenset(e_delta), v_gamma, frozenset(e_gamma), frozenset(e_mixed)
    )


def every_vertex_in_clique(g: Graph, cliques: CliqueSet) -> bool:
    return len(cliques.covered_vertices()) == g.n


SIMILARITY_RULES = ("twin", "closed", "open")


@dataclass(frozen=True)
class CoherenceGraph:
    """Quotient of a graph by vertex similarity."""

    rule: str
    components: Tuple[Tuple[int, ...], ...]
    comp_edges: Tuple[Tuple[int, int], ...]
    comp_complete: Tuple[bool, ...]

    @property
    def all_complete(self) -> bool:
        return all(self.comp_complete)

    def class_of(self, v: int) -> int:
        for idx, comp in enumerate(self.components):
            if v in comp:
                return idx
        raise InvalidParameterError(f"Vertex {v} is not in the graph")

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "components": [list(c) for c in self.components],
            "comp_edges": [[a + 1, b + 1] for a, b in self.comp_edges],
            "comp_complete": list(self.comp_complete),
        }


def _similar(g: Graph, a: int, b: int, rule: str) -> bool:
    na, nb = g.neighbors(a), g.neighbors(b)
    if rule == "open":
        return na == nb
    if rule == "closed":
        return na | {a} == nb | {b}
    return na - {b} == nb - {a}


def coherence_graph(g: Graph, rule: str = "twin") -> CoherenceGraph:
    """
    Group vertices with the same neighbours and connect groups joined by an edge.

    Args:
        g: Input graph.
        rule: "open" compares N(a) with N(b), "closed" compares N[a] with N[b],
            "twin" compares N(a)-{b} with N(b)-{a} (the union of the other two).

    Returns:
        The coherence graph; components are ordered by their smallest vertex.
    """
    if rule not in SIMILARITY_RULES:
        raise InvalidParameterError(
            f"Unknown similarity rule {rule!r}; expected one of {SIMILARITY_RULES}"
        )
    classes: List[List[int]] = []
    for v in g.vertices:
        for cls in classes:
            if _similar(g, cls[0], v, rule):
                cls.append(v)
                break
        else:
            classes.append([v])

    components = tuple(tuple(c) for c in classes)
    owner = {v: idx for idx, comp in enumerate(components) for v in comp}
    comp_edges = sorted(
        {
            (min(owner[i], owner[j]), max(owner[i], owner[j]))
            for i, j in g.edges
            if owner[i] != owner[j]
        }
    )
    comp_complete = tuple(
        all(g.has_edge(a, b) for idx, a in enumerate(comp) for b in comp[idx + 1:])
        for comp in components
    )
    return CoherenceGraph(rule, components, tuple(comp_edges), comp_complete)


def hypothesis_report(g: Graph, k: int = 3, rule: str = "twin") -> Dict[str, bool]:
    """Clique-cover hypothesis next to the coherence-component predicate."""
    cliques = enumerate_k_cliques(g, k)
    return {
        "every_vertex_in_clique": every_vertex_in_clique(g, cliques),
        "coherence_components_complete": coherence_graph(g, rule).all_complete,
    }
