"""Geometry and optimization on the symplectic group, Stiefel and Grassmann manifolds."""

from . import errors, matfun, optim, sp_grassmann, sp_group, sp_stiefel
from .errors import (
    ConvergenceError, DimensionError, DomainError, NotHorizontalError,
    SingularityError, StepFailureError, StructureError, SympmanError,
)

__version__ = "0.1.0"

__all__ = [
    "errors", "matfun", "optim", "sp_grassmann", "sp_group", "sp_stiefel",
    "ConvergenceError", "DimensionError", "DomainError", "NotHorizontalError",
    "SingularityError", "StepFailureError", "StructureError", "SympmanError",
]
