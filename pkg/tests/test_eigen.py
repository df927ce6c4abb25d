"""Tests for the cyclic Jacobi eigensolver."""

import numpy as np
import pytest

from liegraph.core.eigen import sym_eigen
from liegraph.exceptions import DimensionMismatchError, InvalidParameterError


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_matches_numpy(n):
    rng = np.random.default_rng(n)
    a = rng.normal(size=(n, n))
    a = a + a.T
    values, vectors = sym_eigen(a)
    np.testing.assert_allclose(values, np.linalg.eigvalsh(a), atol=1e-10)
    np.testing.assert_allclose(vectors.T @ vectors, np.eye(n), atol=1e-10)
    np.testing.assert_allclose(vectors @ np.diag(values) @ vectors.T, a, atol=1e-9)


def test_ascending_with_repeated_values():
    values, _ = sym_eigen(np.diag([3.0, -1.0, 3.0, 0.0]))
    assert list(values) == [-1.0, 0.0, 3.0, 3.0]


def test_empty():
    values, vectors = sym_eigen(np.zeros((0, 0)))
    assert values.shape == (0,)
    assert vectors.shape == (0, 0)


def test_rejects_asymmetric():
    with pytest.raises(InvalidParameterError):
        sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_rejects_non_square():
    with pytest.raises(DimensionMismatchError):
        sym_eigen(np.zeros((2, 3)))
