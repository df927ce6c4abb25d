"""Error types raised by liegraph."""

from typing import Optional


class LieGraphError(Exception):
    """Base class for all liegraph errors."""


class GraphParseError(LieGraphError, ValueError):
    """Malformed edge-list or weight input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidParameterError(LieGraphError, ValueError):
    """A caller-supplied parameter is out of range or unknown."""


class DimensionMismatchError(LieGraphError, ValueError):
    """Operands do not have compatible shapes."""


class PreconditionError(LieGraphError, ValueError):
    """An operation's hypothesis does not hold for this input."""


class SizeGuardError(PreconditionError):
    """Exhaustive search refused because the input is too large."""


class ConsistencyError(LieGraphError, RuntimeError):
    """Two independent computations disagree."""
