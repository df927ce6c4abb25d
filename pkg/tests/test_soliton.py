"""Tests for soliton certificates and the invariant-metric search."""

from fractions import Fraction

import numpy as np
import pytest

from liegraph.core.graph_algebra import GraphLieAlgebra
from liegraph.core.graphs import Graph
from liegraph.core.lie_algebra import LieAlgebra
from liegraph.core.linalg import Matrix
from liegraph.core.metric import MetricTensor
from liegraph.core.soliton import (
    SolitonSearch,
    certify_soliton,
    inner_derivation_generator,
    nilsoliton_check,
    soliton_check,
    soliton_search_diagonal,
)
from liegraph.exceptions import InvalidParameterError, PreconditionError


def k3_einstein_metric() -> MetricTensor:
    return MetricTensor.diagonal([1, 1, 1, 1, 1, 1, 6])


class TestCertificate:
    def test_k3_einstein(self, alg_k3):
        cert = soliton_check(alg_k3, k3_einstein_metric())
        assert cert.certified
        assert cert.c == Fraction(-5, 2)
        assert cert.D.is_zero()
        assert cert.inner_generator == {}
        assert cert.ricci_soliton_field

    def test_identity_metric_on_k3_is_not_a_soliton(self, alg_k3):
        cert = soliton_check(alg_k3)
        assert not cert.certified
        assert cert.D is None
        assert cert.residual > 0
        assert cert.to_json()["found"] is False

    def test_nilsoliton(self, alg_k3):
        cert = nilsoliton_check(alg_k3)
        assert cert.certified
        assert cert.c == Fraction(-5, 2)
        grading = [Fraction(3, 2)] * 3 + [Fraction(3)] * 3
        assert [cert.D[i, i] for i in range(6)] == grading

    def test_heisenberg_nilsoliton(self):
        heisenberg = LieAlgebra(["x", "y", "z"], {(0, 1): {2: 1}})
        cert = soliton_check(heisenberg)
        assert cert.certified
        assert cert.c == Fraction(-3, 2)
        assert cert.inner_generator is None

    def test_abelian(self):
        alg = GraphLieAlgebra(Graph(2))
        cert = soliton_check(alg)
        assert cert.certified
        assert cert.c == 0

    def test_inner_generator(self, alg_k3):
        d = alg_k3.adjoint_matrix({6: 1})
        assert inner_derivation_generator(alg_k3, d) == {6: 1}
        cert = certify_soliton(alg_k3, d)
        assert cert.certified and cert.c == 0

    def test_float_metric_refused(self, alg_k3):
        with pytest.raises(PreconditionError):
            soliton_check(alg_k3, MetricTensor(np.eye(7)))

    def test_json_layout(self, alg_k3):
        out = soliton_check(alg_k3, k3_einstein_metric()).to_json()
        assert out["found"] is True
        assert out["c"] == "-5/2"
        assert out["residual"] == 0.0
        assert out["D"]["entries"] == []
        assert out["metric"] == {"diag": ["1", "1", "1", "1", "1", "1", "6"]}


class TestSearch:
    def test_k3_certifies(self, alg_k3):
        calls = []
        search = SolitonSearch(alg_k3, seed=0)
        result = search.run(progress_callback=lambda i, r: calls.append((i, r)))
        assert result.converged
        assert result.residual < 1e-8
        assert result.iterations <= 500
        assert len(result.history["residual"]) == result.iterations == len(calls)
        assert result.certificate is not None and result.certificate.certified
        assert result.certificate.c == Fraction(-5, 2)
        assert result.exact_metric.gram == k3_einstein_metric().gram
        assert result.to_json()["found"] is True

    def test_k4_reaches_tolerance(self, alg_k4):
        result = soliton_search_diagonal(alg_k4, seed=1, clique_block="trace_form")
        assert result.converged
        assert result.residual < 1e-8

    def test_diagonal_search_on_k3(self, alg_k3):
        result = soliton_search_diagonal(alg_k3, seed=0)
        assert result.clique_block == "diagonal"
        assert result.converged
        assert result.certificate is not None and result.certificate.certified

    def test_residual_ignores_overall_scale(self, alg_k4):
        search = SolitonSearch(alg_k4)
        params = np.array([0.1, -0.3, 0.2])
        assert len(search.groups) == 3
        assert search.residual(params + 0.7) == pytest.approx(search.residual(params), rel=1e-9)

    def test_parameter_groups(self, alg_k4):
        tied = SolitonSearch(alg_k4, clique_block="diagonal")
        assert [len(group) for group in tied.groups] == [4, 6, 4]
        untied = SolitonSearch(alg_k4, clique_block="diagonal", use_symmetry=False)
        assert len(untied.groups) == alg_k4.dim
        weighted = SolitonSearch(GraphLieAlgebra(alg_k4.graph, weights=[1, 2, 1, 1]))
        assert len(weighted.groups) == 4 + 6 + 1

    def test_gauge_fix(self, alg_k3):
        search = SolitonSearch(alg_k3)
        assert search.gauge_fix([2.0, 8.0, 1.0]) == pytest.approx([1.0, 1.0, 2.0])

    def test_trace_form_block(self, alg_k4):
        block = SolitonSearch(alg_k4).trace_block
        assert block[0, 0] == 18
        assert block[0, 1] == 15

    def test_preconditions(self, pendant, alg_k3):
        with pytest.raises(PreconditionError):
            SolitonSearch(GraphLieAlgebra(pendant))
        with pytest.raises(InvalidParameterError):
            SolitonSearch(alg_k3, clique_block="full")
        with pytest.raises(InvalidParameterError):
            SolitonSearch(alg_k3, iters=0)

    def test_rationalize_rejects_far_values(self, alg_k3):
        metric, attempt = SolitonSearch(alg_k3).rationalize([1.0, 1.0, 0.123456])
        assert metric is None
        assert attempt is not None and not attempt.certified

    def test_exact_metric_is_a_matrix(self, alg_k3):
        metric, cert = SolitonSearch(alg_k3).rationalize([1.0, 1.0, 0.4000000001])
        assert isinstance(metric.gram, Matrix)
        assert cert.certified
