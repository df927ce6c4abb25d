"""Tests for edge-list parsing, generators, cliques and the coherence graph."""

from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest

from liegraph.core.graphs import (
    Graph,
    coherence_graph,
    decompose,
    enumerate_k_cliques,
    format_edge_list,
    generate,
    hypothesis_report,
    parse_edge_list,
    parse_weights,
)
from liegraph.exceptions import GraphParseError, InvalidParameterError

from conftest import CORPUS


class TestParse:
    def test_vertex_count_and_edges(self):
        g = parse_edge_list("# a path\n3\n2 3\n1 2\n")
        assert g.n == 3
        assert g.edges == ((1, 2), (2, 3))
        assert g.weights is None

    def test_count_inferred_from_labels(self):
        g = parse_edge_list("1 4\n")
        assert g.n == 4
        assert g.isolated_vertices() == [2, 3]

    def test_weights(self):
        g = parse_edge_list("3\n1 2\nw 2 3/2\nw 3 -4\n")
        assert g.weights == (Fraction(1), Fraction(3, 2), Fraction(-4))
        assert not g.has_unit_weights

    @pytest.mark.parametrize(
        "text, line",
        [
            ("3\n1 1\n", 2),
            ("3\n1 2\n2 1\n", 3),
            ("2\n1 3\n", 2),
            ("1 x\n", 1),
            ("3\n1 2 3\n", 2),
            ("3\nw 1 1/0\n", 2),
            ("3\nw 1 2\nw 1 3\n", 3),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(GraphParseError) as info:
            parse_edge_list(text)
        assert info.value.line == line
        assert f"line {line}" in str(info.value)

    def test_empty_input(self):
        with pytest.raises(GraphParseError):
            parse_edge_list("# nothing here\n")

    def test_round_trip(self):
        g = generate("gnp:7:0.5", seed=3).with_weights(
            [Fraction(1), Fraction(2), Fraction(-1, 3), 1, 1, 5, 1]
        )
        text = format_edge_list(g)
        assert parse_edge_list(text) == g
        assert "w 3 -1/3" in text

    def test_parse_weights(self):
        weights = parse_weights("# w\nw 1 2\n3 -1/2\n", 3)
        assert weights == (Fraction(2), Fraction(1), Fraction(-1, 2))
        with pytest.raises(GraphParseError):
            parse_weights("4 1\n", 3)


class TestGraph:
    def test_rejects_loops_and_duplicates(self):
        with pytest.raises(InvalidParameterError):
            Graph(3, ((1, 1),))
        with pytest.raises(InvalidParameterError):
            Graph(3, ((1, 2), (2, 1)))
        with pytest.raises(InvalidParameterError):
            Graph(0)

    def test_permute(self, p3):
        moved = p3.permute((2, 1, 3))
        assert moved.edges == ((1, 2), (1, 3))
        with pytest.raises(InvalidParameterError):
            p3.permute((1, 1, 2))

    def test_permute_moves_weights(self):
        g = Graph(2, ((1, 2),), (Fraction(3), Fraction(1)))
        assert g.permute((2, 1)).weights == (Fraction(1), Fraction(3))


class TestGenerate:
    @pytest.mark.parametrize(
        "family, n, m",
        [
            ("kn:5", 5, 10),
            ("path:3", 3, 2),
            ("cycle:4", 4, 4),
            ("star:5", 5, 4),
            ("wheel:6", 6, 10),
            ("empty:3", 3, 0),
            ("pendant", 4, 4),
            ("petersen", 10, 15),
            ("dodecahedron", 20, 30),
        ],
    )
    def test_family_sizes(self, family, n, m):
        g = generate(family)
        assert (g.n, len(g.edges)) == (n, m)

    def test_gnp_is_seeded(self):
        assert generate("gnp:8:0.4", seed=5) == generate("gnp:8:0.4", seed=5)
        assert generate("gnp:6:1", seed=1).edges == generate("kn:6").edges
        assert generate("gnp:6:0", seed=1).edges == ()

    @pytest.mark.parametrize("family", ["torus:3", "cycle:2", "kn:x", "gnp:4:1.5", "gnp:4"])
    def test_invalid_families(self, family):
        with pytest.raises(InvalidParameterError):
            generate(family)


class TestCliques:
    def test_k4_triangles(self, k4):
        assert enumerate_k_cliques(k4, 3).cliques == (
            (1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4),
        )

    def test_four_cliques(self, k5):
        assert len(enumerate_k_cliques(k5, 4)) == 5

    def test_k_below_three(self, k4):
        with pytest.raises(InvalidParameterError):
            enumerate_k_cliques(k4, 2)

    @pytest.mark.parametrize("name, g", CORPUS, ids=[name for name, _ in CORPUS])
    @pytest.mark.parametrize("k", [3, 4])
    def test_matches_networkx(self, name, g, k):
        expected = sorted(
            tuple(sorted(c))
            for c in nx.enumerate_all_cliques(g.to_networkx())
            if len(c) == k
        )
        assert list(enumerate_k_cliques(g, k).cliques) == expected


class TestDecomposition:
    def test_pendant(self, pendant):
        d = decompose(pendant, enumerate_k_cliques(pendant, 3))
        assert d.V_delta == {1, 2, 3}
        assert d.V_gamma == {4}
        assert d.E_delta == {(1, 2), (1, 3), (2, 3)}
        assert d.E_delta_gamma == {(3, 4)}
        assert d.E_gamma == frozenset()

    def test_edges_partitioned(self, corpus):
        for _, g in corpus:
            d = decompose(g, enumerate_k_cliques(g, 3))
            parts = [d.E_delta, d.E_gamma, d.E_delta_gamma]
            assert sum(len(p) for p in parts) == len(g.edges)
            assert all(not (a & b) for a, b in combinations(parts, 2))


class TestCoherence:
    def test_complete_graph_is_one_class(self, k4):
        c = coherence_graph(k4)
        assert c.components == ((1, 2, 3, 4),)
        assert c.all_complete

    def test_path(self, p3):
        c = coherence_graph(p3)
        assert c.components == ((1, 3), (2,))
        assert c.comp_edges == ((0, 1),)
        assert c.comp_complete == (False, True)

    def test_edgeless_class_is_not_complete(self):
        c = coherence_graph(Graph(3))
        assert c.components == ((1, 2, 3),)
        assert c.comp_complete == (False,)

    def test_rules(self, p3, k3):
        assert len(coherence_graph(p3, "closed").components) == 3
        assert len(coherence_graph(k3, "open").components) == 3
        assert len(coherence_graph(k3, "closed").components) == 1
        with pytest.raises(InvalidParameterError):
            coherence_graph(k3, "near")

    def test_hypothesis_report(self, k4, pendant):
        assert hypothesis_report(k4) == {
            "every_vertex_in_clique": True,
            "coherence_components_complete": True,
        }
        assert not hypothesis_report(pendant)["every_vertex_in_clique"]
