"""Exception types raised by sympman."""

import numpy as np


class SympmanError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(SympmanError, ValueError):
    """Matrix shapes are incompatible with the requested operation."""


class SingularityError(SympmanError, np.linalg.LinAlgError):
    """A linear solve hit a (numerically) singular matrix."""


class DomainError(SympmanError, ValueError):
    """Input lies outside the domain of a matrix function or chart."""


class ConvergenceError(SympmanError, RuntimeError):
    """An iterative kernel failed to converge."""


class StructureError(SympmanError, ValueError):
    """A structural hypothesis (tangency, horizontality, symplecticity) fails."""


class NotHorizontalError(StructureError):
    """A tangent vector is not horizontal for the requested quotient."""


class StepFailureError(SympmanError, RuntimeError):
    """Every trial step of a line search failed to produce a finite value."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
