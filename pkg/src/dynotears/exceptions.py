"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Input data or matrices are malformed (shape, NaN, cyclic where acyclic is required)."""


class InvalidSpecError(ValueError):
    """A graph or benchmark specification cannot be realised."""


class SolverFailureError(RuntimeError):
    """The inner optimiser hit a non-finite objective."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConstraintViolationError(RuntimeError):
    """Thresholded intra-slice matrix still contains a directed cycle."""
