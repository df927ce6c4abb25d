"""Default settings and environment overrides."""

import os

from .exceptions import InvalidParameterError


# Exhaustive canonical labeling / automorphism search
DEFAULT_MAX_N = 10
MAX_N_ENV_VAR = "LIEGRAPH_MAX_N"

DEFAULT_SEED = 0

# Floating point
FLOAT_TOL = 1e-9
EIGEN_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

# Soliton search
SEARCH_ITERS = 500
SEARCH_TOL = 1e-8
SEARCH_INITIAL_STEP = 0.5
RATIONAL_MAX_DENOMINATOR = 1000

STABLY_DIAGONAL_TRIALS = 20

# Largest Lambda^2 dimension for the curvature-operator spectrum in reports
SPECTRUM_MAX_PAIRS = 120


def max_exhaustive_n() -> int:
    """
    Vertex limit for exhaustive permutation searches.

    Returns:
        Value of LIEGRAPH_MAX_N when set, DEFAULT_MAX_N otherwise.

    Raises:
        InvalidParameterError: If the environment value is not a positive integer.
    """
    raw = os.environ.get(MAX_N_ENV_VAR)
    if raw is None or not raw.strip():
        return DEFAULT_MAX_N
    try:
        value = int(raw)
    except ValueError:
        raise InvalidParameterError(
            f"{MAX_N_ENV_VAR} must be an integer, got {raw!r}"
        ) from None
    if value < 1:
        raise InvalidParameterError(f"{MAX_N_ENV_VAR} must be positive, got {value}")
    return value
