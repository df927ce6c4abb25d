"""Shared graphs and algebras for the test suite."""

from fractions import Fraction
from typing import List, Tuple

import pytest

from liegraph.core.graph_algebra import GraphLieAlgebra
from liegraph.core.graphs import Graph, generate
from liegraph.core.rng import XorShift64Star


def complete(n: int) -> Graph:
    return generate(f"kn:{n}")


def random_weights(n: int, seed: int) -> Tuple[Fraction, ...]:
    rng = XorShift64Star(seed)
    return tuple(
        rng.rational(1, 5) * (1 if rng.random() < 0.5 else -1) for _ in range(n)
    )


def corpus_graphs() -> List[Tuple[str, Graph]]:
    """Complete graphs, paths, cycles, triangle+pendant and seeded G(n, 0.4)."""
    graphs = [(f"kn:{n}", complete(n)) for n in range(3, 7)]
    graphs += [(f"path:{n}", generate(f"path:{n}")) for n in range(2, 6)]
    graphs += [(f"cycle:{n}", generate(f"cycle:{n}")) for n in range(4, 7)]
    graphs.append(("pendant", generate("pendant")))
    for seed in range(20):
        n = 3 + seed % 6
        graphs.append((f"gnp:{n}:0.4@{seed}", generate(f"gnp:{n}:0.4", seed=seed)))
    return graphs


CORPUS = corpus_graphs()


@pytest.fixture
def k3() -> Graph:
    return complete(3)


@pytest.fixture
def k4() -> Graph:
    return complete(4)


@pytest.fixture
def k5() -> Graph:
    return complete(5)


@pytest.fixture
def p3() -> Graph:
    return generate("path:3")


@pytest.fixture
def pendant() -> Graph:
    """Triangle 1-2-3 with the pendant edge (3, 4)."""
    return generate("pendant")


@pytest.fixture
def triangle_isolated() -> Graph:
    """Triangle 1-2-3 plus the isolated vertex 4."""
    return Graph(4, ((1, 2), (1, 3), (2, 3)))


@pytest.fixture
def alg_k3(k3) -> GraphLieAlgebra:
    return GraphLieAlgebra(k3)


@pytest.fixture
def alg_k4(k4) -> GraphLieAlgebra:
    return GraphLieAlgebra(k4)


@pytest.fixture
def alg_k5(k5) -> GraphLieAlgebra:
    return GraphLieAlgebra(k5)


@pytest.fixture
def corpus() -> List[Tuple[str, Graph]]:
    return CORPUS
