"""Cyclic Jacobi eigensolver for dense symmetric float matrices."""

import logging
from typing import Tuple

import numpy as np

from ..config import EIGEN_TOL, FLOAT_TOL, JACOBI_MAX_SWEEPS
from ..exceptions import DimensionMismatchError, InvalidParameterError


logger = logging.getLogger(__name__)


def _off_norm(a: np.ndarray) -> float:
    return float(np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0)))


def sym_eigen(
    matrix: np.ndarray,
    tol: float = EIGEN_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
    symmetry_tol: float = FLOAT_TOL,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Args:
        matrix: Square float array.
        tol: Stop once the off-diagonal Frobenius norm is below tol * ||matrix||.
        max_sweeps: Maximum number of full cyclic sweeps.
        symmetry_tol: Allowed asymmetry, relative to ||matrix||.

    Returns:
        Tuple of (ascending eigenvalues, matrix whose columns are the
        orthonormal eigenvectors in the same order).

    Raises:
        DimensionMismatchError: If the matrix is not square.
        InvalidParameterError: If the matrix is not symmetric within symmetry_tol.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))

    scale = float(np.linalg.norm(a))
    asymmetry = float(np.max(np.abs(a - a.T)))
    if asymmetry > symmetry_tol * max(scale, 1.0):
        raise InvalidParameterError(
            f"Matrix is not symmetric (max asymmetry {asymmetry:.3e})"
        )
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    threshold = tol * scale

    sweep = 0
    while _off_norm(a) > threshold:
        if sweep >= max_sweeps:
            logger.warning(
                "Jacobi stopped after %d sweeps with off-diagonal norm %.3e",
                sweep, _off_norm(a),
            )
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
        sweep += 1

    logger.debug("Jacobi converged in %d sweeps for n=%d", sweep, n)
    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]
