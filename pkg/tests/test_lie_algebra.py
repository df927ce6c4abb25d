"""Tests for the generic structure-table Lie algebra."""

import pytest

from liegraph.core.lie_algebra import LieAlgebra
from liegraph.core.linalg import Matrix, Subspace
from liegraph.exceptions import DimensionMismatchError, PreconditionError


@pytest.fixture
def heisenberg() -> LieAlgebra:
    return LieAlgebra(["x", "y", "z"], {(0, 1): {2: 1}})


def test_bracket_is_antisymmetric(heisenberg):
    assert heisenberg.bracket({0: 1}, {1: 1}) == {2: 1}
    assert heisenberg.bracket({1: 1}, {0: 1}) == {2: -1}
    assert heisenberg.bracket([0, 0, 1], [1, 1, 0]) == {}


def test_series_and_center(heisenberg):
    assert [s.dim for s in heisenberg.derived_series()] == [3, 1, 0]
    assert [s.dim for s in heisenberg.lower_central_series()] == [3, 1, 0]
    assert heisenberg.center_oracle() == Subspace.coordinate([2], 3)


def test_derivations(heisenberg):
    assert heisenberg.derivation_space().dim == 6
    assert not heisenberg.is_derivation(Matrix.identity(3))
    grading = Matrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 2]])
    assert heisenberg.is_derivation(grading)
    assert heisenberg.adjoint_matrix({0: 1}) == Matrix.from_rows(
        [[0, 0, 0], [0, 0, 0], [0, 1, 0]]
    )


def test_abelian_derivations_are_everything():
    abelian = LieAlgebra(["a", "b"], {})
    assert abelian.derivation_space().dim == 4
    assert abelian.verify_jacobi()


def test_injected_fault_breaks_jacobi(heisenberg):
    broken = heisenberg.with_structure_constant(0, 2, {0: 1})
    check = broken.verify_jacobi()
    assert not check.passed
    assert check.witness == (0, 1, 2)
    assert heisenberg.verify_jacobi().passed


def test_antisymmetry_check():
    bad = LieAlgebra(["a", "b", "c"], {(0, 1): {2: 1}, (1, 0): {2: 1}})
    assert not bad.verify_antisymmetry()
    assert LieAlgebra(["a", "b"], {(0, 0): {1: 1}}).verify_antisymmetry().witness == (0, 0)


def test_ideals_and_nilpotency(heisenberg):
    center = Subspace.coordinate([2], 3)
    assert heisenberg.is_ideal(center)
    assert heisenberg.is_nilpotent_subalgebra(heisenberg.full_space())
    assert not heisenberg.is_subalgebra(Subspace.coordinate([0, 1], 3))


def test_subalgebra_and_restrict(heisenberg):
    sub = heisenberg.subalgebra([1, 2])
    assert sub.dim == 2 and not sub.table
    with pytest.raises(PreconditionError):
        heisenberg.subalgebra([0, 1])
    restricted = heisenberg.restrict(Subspace.span([[1, 0, 1], [0, 0, 1]], 3))
    assert restricted.dim == 2 and not restricted.table


def test_dimension_checks(heisenberg):
    with pytest.raises(DimensionMismatchError):
        heisenberg.bracket([1, 0], [0, 1])
    with pytest.raises(DimensionMismatchError):
        LieAlgebra(["a"], {(0, 1): {0: 1}})


def test_trace_form():
    # [h, x] = x, [h, y] = -y
    sl = LieAlgebra(["h", "x", "y"], {(0, 1): {1: 1}, (0, 2): {2: -1}, (1, 2): {0: 1}})
    assert sl.verify_jacobi()
    assert sl.trace_form({0: 1}, {0: 1}) == 2
    assert sl.trace_ad({0: 1}) == 0
