"""Exception types shared across the package."""


class Impurity1DError(Exception):
    """Base class for all package errors."""


class DomainError(Impurity1DError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigurationError(Impurity1DError, ValueError):
    """Inconsistent or unusable solver configuration."""


class EmptySpaceError(ConfigurationError):
    """Truncation leaves no many-body states."""


class ResourceError(Impurity1DError, MemoryError):
    """A size guard was exceeded."""


class IterationError(Impurity1DError, RuntimeError):
    """An iterative solver did not converge.

    ``residuals`` holds the best residual norms reached.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class ConvergenceError(Impurity1DError, RuntimeError):
    """A discretization failed its refinement check."""


class ContinuityError(Impurity1DError, RuntimeError):
    """Eigenfunctions at neighbouring parameters could not be aligned."""


class NotFoundError(Impurity1DError, LookupError):
    """A searched-for feature (e.g. an interior minimum) is absent."""
