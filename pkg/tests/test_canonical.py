"""Tests for canonical labeling, isomorphism witnesses and automorphisms."""

import networkx as nx
import pytest

from liegraph.core.canonical import (
    CanonicalLabeler,
    are_isomorphic,
    canonical_form,
    is_automorphism,
)
from liegraph.core.graphs import Graph, generate
from liegraph.core.rng import XorShift64Star
from liegraph.exceptions import InvalidParameterError, SizeGuardError


def test_relabelings_share_a_canonical_form():
    rng = XorShift64Star(11)
    for seed in range(15):
        g = generate(f"gnp:{4 + seed % 5}:0.5", seed=seed)
        sigma = rng.permutation(g.n)
        h = g.permute(sigma)
        assert canonical_form(g).edges == canonical_form(h).edges
        witness = CanonicalLabeler().isomorphism(g, h)
        assert witness is not None
        assert g.permute(witness).edges == h.edges


def test_triangle_certificate(k3):
    assert canonical_form(k3).certificate == "111"


@pytest.mark.parametrize(
    "a, b",
    [
        (generate("path:4"), generate("star:4")),
        (generate("cycle:6"), Graph(6, ((1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6)))),
        (generate("path:5"), Graph(5, ((1, 2), (1, 3), (2, 3), (4, 5)))),
    ],
)
def test_non_isomorphic_pairs(a, b):
    assert not are_isomorphic(a, b)


def test_agrees_with_networkx():
    for seed in range(20):
        a = generate("gnp:6:0.5", seed=seed)
        b = generate("gnp:6:0.5", seed=seed + 100)
        assert are_isomorphic(a, b) == nx.is_isomorphic(a.to_networkx(), b.to_networkx())


def test_size_guard(k5):
    with pytest.raises(SizeGuardError):
        CanonicalLabeler(max_n=4).canonical_form(k5)


def test_size_guard_from_environment(monkeypatch, k4):
    monkeypatch.setenv("LIEGRAPH_MAX_N", "3")
    with pytest.raises(SizeGuardError):
        canonical_form(k4)
    monkeypatch.setenv("LIEGRAPH_MAX_N", "many")
    with pytest.raises(InvalidParameterError):
        canonical_form(k4)


@pytest.mark.parametrize(
    "family, order",
    [("kn:3", 6), ("path:3", 2), ("cycle:5", 10), ("petersen", 120)],
)
def test_automorphism_group_order(family, order):
    g = generate(family)
    autos = list(CanonicalLabeler().automorphisms(g))
    assert len(autos) == order
    assert all(is_automorphism(g, sigma) for sigma in autos)


def test_prescribed_automorphism(p3):
    labeler = CanonicalLabeler()
    assert labeler.find_automorphism(p3, {1: 3}) == (3, 2, 1)
    assert labeler.find_automorphism(p3, {1: 2}) is None


def test_set_orbits(k4, p3):
    labeler = CanonicalLabeler()
    sets = [(1,), (2,), (1, 2), (3, 4), (1, 2, 3), (2, 3, 4)]
    assert labeler.set_orbits(k4, sets) == [0, 0, 1, 1, 2, 2]
    assert labeler.set_orbits(p3, [(1,), (2,), (3,)]) == [0, 1, 0]


def test_set_orbits_on_the_petersen_graph():
    g = generate("petersen")
    edge_orbits = CanonicalLabeler().set_orbits(g, list(g.edges))
    assert set(edge_orbits) == {0}


def test_weighted_isomorphism(k3):
    labeler = CanonicalLabeler()
    a = k3.with_weights([2, 1, 1])
    sigma = labeler.weighted_isomorphism(a, k3.with_weights([1, 1, 2]))
    assert sigma is not None and sigma[0] == 3
    assert a.permute(sigma).weight(3) == 2
    assert labeler.weighted_isomorphism(a, k3) is None
    assert labeler.weighted_isomorphism(k3, k3.with_weights([1, 1, 1])) is not None
