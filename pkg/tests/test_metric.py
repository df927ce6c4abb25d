"""Tests for left-invariant metric geometry."""

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from liegraph.core.graph_algebra import GraphLieAlgebra
from liegraph.core.graphs import generate
from liegraph.core.lie_algebra import LieAlgebra
from liegraph.core.linalg import Field, Matrix
from liegraph.core.metric import (
    MetricTensor,
    connection_defects,
    curvature,
    curvature_operator_spectrum,
    iwasawa_check,
    levi_civita,
    mean_curvature,
    ricci_blocks,
    ricci_dense,
    ricci_operator,
    ricci_scalar_form,
    sectional_formula,
    split_g1_g2,
    stably_ricci_diagonal_test,
)
from liegraph.core.rng import XorShift64Star
from liegraph.exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    PreconditionError,
)


def random_diagonal(dim, seed):
    rng = XorShift64Star(seed)
    return MetricTensor.diagonal([rng.rational() for _ in range(dim)])


def diagonal_matrix(values):
    n = len(values)
    return Matrix.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])


@pytest.fixture
def heisenberg() -> LieAlgebra:
    return LieAlgebra(["x", "y", "z"], {(0, 1): {2: 1}})


class TestMetricTensor:
    def test_exact_and_float(self):
        exact = MetricTensor.diagonal([1, Fraction(1, 2), 3])
        assert exact.exact and exact.is_diagonal
        assert exact.to_json() == {"diag": ["1", "1/2", "3"]}
        numeric = MetricTensor.diagonal([1.0, 2.0])
        assert not numeric.exact
        assert numeric.to_json() == {"diag": [1.0, 2.0]}

    def test_rejects_indefinite(self):
        with pytest.raises(PreconditionError):
            MetricTensor(Matrix.from_rows([[1, 2], [2, 1]]))
        with pytest.raises(PreconditionError):
            MetricTensor(np.array([[1.0, 0.0], [0.0, -1.0]]))
        with pytest.raises(PreconditionError):
            MetricTensor(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_from_json(self):
        metric = MetricTensor.from_json({"matrix": [["2", 1], [1, "2"]]}, 2)
        assert metric.exact and not metric.is_diagonal
        assert not MetricTensor.from_json({"diag": [1, 2.5]}, 2).exact
        with pytest.raises(DimensionMismatchError):
            MetricTensor.from_json({"diag": [1, 2]}, 3)
        with pytest.raises(InvalidParameterError):
            MetricTensor.from_json({"gram": [1]}, 1)
        with pytest.raises(InvalidParameterError):
            MetricTensor.from_json({"diag": ["x"]}, 1)

    def test_inner_and_induced(self, alg_k3):
        metric = MetricTensor.from_json({"matrix": [["2", 1], [1, "2"]]}, 2)
        assert metric.inner({0: 1}, {1: 1}) == 1
        assert metric.raise_index(metric.lower({0: 3, 1: -1})) == {0: 3, 1: -1}
        full = random_diagonal(alg_k3.dim, 4)
        derived = alg_k3.bracket_spaces(alg_k3.full_space(), alg_k3.full_space())
        assert full.induced(derived).dim == 6

    def test_algebra_must_be_rational(self, k3):
        alg = GraphLieAlgebra(k3, field=Field.prime(5))
        with pytest.raises(PreconditionError):
            curvature(alg)

    def test_size_mismatch(self, alg_k3):
        with pytest.raises(DimensionMismatchError):
            curvature(alg_k3, MetricTensor.identity(3))


class TestRicci:
    def test_heisenberg(self, heisenberg):
        expected = diagonal_matrix([Fraction(-1, 2), Fraction(-1, 2), Fraction(1, 2)])
        assert ricci_scalar_form(heisenberg) == expected
        assert ricci_scalar_form(heisenberg, nilpotent=True) == expected
        assert curvature(heisenberg).ricci == expected

    def test_k3_clique_entry_and_mean_curvature(self, alg_k3):
        ric = curvature(alg_k3).ricci
        assert ric[6, 6] == -15
        assert mean_curvature(alg_k3) == {6: -9}

    @pytest.mark.parametrize("family", ["kn:3", "kn:4", "pendant", "path:3"])
    def test_bracket_formula_matches_curvature(self, family):
        alg = GraphLieAlgebra(generate(family))
        for metric in (MetricTensor.identity(alg.dim), random_diagonal(alg.dim, 9)):
            assert ricci_scalar_form(alg, metric) == curvature(alg, metric).ricci

    def test_non_diagonal_metric(self, alg_k3):
        rows = [[2 if i == j else 0 for j in range(7)] for i in range(7)]
        rows[0][3] = rows[3][0] = 1
        rows[6][6] = 5
        metric = MetricTensor(Matrix.from_rows(rows))
        ric = curvature(alg_k3, metric).ricci
        assert ricci_scalar_form(alg_k3, metric) == ric
        assert ric.is_symmetric()

    @pytest.mark.parametrize("fixture", ["alg_k3", "alg_k4"])
    def test_block_formula(self, fixture, request):
        alg = request.getfixturevalue(fixture)
        assert ricci_blocks(alg) == curvature(alg).ricci

    def test_block_formula_refuses_without_iwasawa(self, p3):
        with pytest.raises(PreconditionError):
            ricci_blocks(GraphLieAlgebra(p3))

    def test_float_metric_agrees_with_exact(self, alg_k4):
        exact = random_diagonal(alg_k4.dim, 2)
        numeric = MetricTensor(exact.float_gram())
        np.testing.assert_allclose(
            curvature(alg_k4, numeric).ricci,
            curvature(alg_k4, exact).ricci.to_float(),
            atol=1e-9,
        )
        np.testing.assert_allclose(
            ricci_dense(alg_k4.structure_tensor(), exact.float_gram()),
            ricci_scalar_form(alg_k4, exact).to_float(),
            atol=1e-9,
        )

    def test_ricci_operator_is_metric_dual(self, alg_k3):
        metric = random_diagonal(alg_k3.dim, 6)
        ric = ricci_scalar_form(alg_k3, metric)
        assert metric.gram @ ricci_operator(ric, metric) == ric


class TestCurvature:
    def test_connection_is_levi_civita(self, alg_k4):
        metric = random_diagonal(alg_k4.dim, 1)
        defects = connection_defects(alg_k4, metric, levi_civita(alg_k4, metric))
        assert defects == {"torsion": 0.0, "metric_compatibility": 0.0}

    @pytest.mark.parametrize("fixture", ["alg_k3", "alg_k4"])
    def test_symmetries(self, fixture, request):
        data = curvature(request.getfixturevalue(fixture))
        assert all(value < 1e-12 for value in data.symmetry_defects().values())

    @pytest.mark.parametrize("fixture", ["alg_k3", "alg_k4", "alg_k5"])
    def test_sectional_formula(self, fixture, request):
        alg = request.getfixturevalue(fixture)
        metric = random_diagonal(alg.dim, 5)
        data = curvature(alg, metric)
        rng = np.random.default_rng(alg.dim)
        for _ in range(100):
            x, y = rng.normal(size=alg.dim), rng.normal(size=alg.dim)
            expected = data.sectional(x, y)
            assert sectional_formula(alg, metric, x, y) == pytest.approx(
                expected, rel=1e-9, abs=1e-9
            )

    def test_sectional_formula_pendant(self, pendant):
        alg = GraphLieAlgebra(pendant)
        data = curvature(alg)
        rng = np.random.default_rng(0)
        for _ in range(100):
            x, y = rng.normal(size=alg.dim), rng.normal(size=alg.dim)
            assert sectional_formula(alg, None, x, y) == pytest.approx(
                data.sectional(x, y), rel=1e-9, abs=1e-9
            )

    def test_operator_diagonal_is_sectional(self, alg_k3):
        data = curvature(alg_k3)
        op = data.operator_matrix()
        pairs = list(combinations(range(alg_k3.dim), 2))
        assert op.shape == (21, 21)
        np.testing.assert_allclose(op, op.T, atol=1e-12)
        for idx, (i, j) in enumerate(pairs):
            e_i, e_j = np.eye(alg_k3.dim)[i], np.eye(alg_k3.dim)[j]
            assert op[idx, idx] == pytest.approx(data.sectional(e_i, e_j), abs=1e-12)

    @pytest.mark.parametrize("fixture", ["alg_k3", "alg_k4"])
    def test_spectrum_is_reported(self, fixture, request):
        alg = request.getfixturevalue(fixture)
        report = curvature_operator_spectrum(alg)
        n_pairs = alg.dim * (alg.dim - 1) // 2
        assert len(report.eigenvalues) == n_pairs
        assert report.eigenvalues == sorted(report.eigenvalues)
        assert report.max_eig == report.eigenvalues[-1]
        assert isinstance(report.nonpositive, bool)


class TestIwasawa:
    def test_k3(self, alg_k3):
        report = iwasawa_check(alg_k3)
        assert report.passed
        assert report.b0_diagonal == ["1", "1", "1", "2", "2", "2"]
        assert (report.dim_derived, report.dim_complement) == (6, 1)
        assert not report.restricted_to_g1

    def test_k4(self, alg_k4):
        report = iwasawa_check(alg_k4)
        assert report.passed
        assert report.b0_diagonal == ["3"] * 4 + ["6"] * 6

    def test_k5_restricts_to_g1(self, alg_k5):
        report = iwasawa_check(alg_k5)
        assert report.restricted_to_g1
        assert report.dim_space == 20
        assert report.passed

    def test_path_fails(self, p3):
        report = iwasawa_check(GraphLieAlgebra(p3))
        assert not report.a
        assert not report.c
        assert not report.passed

    def test_non_diagonal_metric_breaks_symmetry(self, alg_k3):
        rows = [[1 if i == j else 0 for j in range(7)] for i in range(7)]
        rows[0][1] = rows[1][0] = Fraction(1, 2)
        rows[0][6] = rows[6][0] = Fraction(1, 3)
        report = iwasawa_check(alg_k3, MetricTensor(Matrix.from_rows(rows)))
        assert not report.passed

    def test_float_metric_refused(self, alg_k3):
        with pytest.raises(PreconditionError):
            iwasawa_check(alg_k3, MetricTensor(np.eye(7)))


class TestSplit:
    def test_k5(self, alg_k5):
        split = split_g1_g2(alg_k5)
        assert (split.g1.dim, split.g2.dim) == (20, 5)
        assert split.passed
        assert split.to_json()["passed"] is True
        assert split.orthogonal(MetricTensor.identity(alg_k5.dim))

    def test_k4_has_trivial_g2(self, alg_k4):
        split = split_g1_g2(alg_k4)
        assert split.g2.dim == 0
        assert split.g1 == alg_k4.full_space()

    def test_requires_clique_cover(self, pendant):
        with pytest.raises(PreconditionError):
            split_g1_g2(GraphLieAlgebra(pendant))


class TestStablyDiagonal:
    def test_k3_fully_diagonal(self, alg_k3):
        report = stably_ricci_diagonal_test(alg_k3, trials=20, seed=0)
        assert report.passed
        assert report.diagonal
        assert report.max_offdiag == 0.0

    def test_k4_clique_block(self, alg_k4):
        report = stably_ricci_diagonal_test(alg_k4, trials=20, seed=1)
        assert report.passed
        assert not report.diagonal

    def test_k5(self, alg_k5):
        assert stably_ricci_diagonal_test(alg_k5, trials=4, seed=2).passed

    def test_preconditions(self, alg_k3, pendant):
        with pytest.raises(InvalidParameterError):
            stably_ricci_diagonal_test(alg_k3, trials=0)
        with pytest.raises(PreconditionError):
            stably_ricci_diagonal_test(GraphLieAlgebra(pendant))
