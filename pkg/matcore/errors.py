# matcore/errors.py

from typing import Optional


class CommutatorError(Exception):
    """Base class for every error raised by the engines."""


class InvalidInputError(CommutatorError, ValueError):
    """Malformed or out-of-domain input. Maps to CLI exit code 2."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.path = path or "$"


class PreconditionError(InvalidInputError):
    """An operation precondition (rank, orthogonality, support, trace) failed."""


class ConvergenceError(CommutatorError, RuntimeError):
    """An iterative solve did not reach its target."""
