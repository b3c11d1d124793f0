"""Geometry of the real symplectic group Sp(2n).

Two metrics are provided: the bi-invariant pseudo-Riemannian trace form
``h_M(X1, X2) = tr(X1^+ X2) / 2`` and the right-invariant Riemannian metric
``g_M(X1, X2) = tr((X1 M^+)^T X2 M^+) / 2``, together with their
exponentials and the Riemannian gradient for ``g``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, StructureError
from .matfun import expm, feasibility, jmul, symplectic_inverse

SYMPLECTIC_TOL = 1e-8
TANGENT_TOL = 1e-8


def check_symplectic(m, tol=SYMPLECTIC_TOL):
    """Raise ``StructureError`` unless ``||M^+ M - I||_F <= tol``."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError("symplectic matrix must be square")
    res = feasibility(m)
    if not res <= tol:
        raise StructureError(f"matrix is not symplectic (residual {res:.3e})")
    return m


@dataclass(frozen=True, eq=False)
class GroupTangent:
    """Tangent vector ``X`` at ``base`` in Sp(2n), stored as the ambient matrix."""

    base: np.ndarray
    mat: np.ndarray

    def __post_init__(self):
        if self.base.shape != self.mat.shape:
            raise DimensionError("tangent and base point shapes differ")

    @classmethod
    def at(cls, m, x, check=True):
        m = np.asarray(m, dtype=float)
        x = np.asarray(x, dtype=float)
        tan = cls(m, x)
        if check:
            omega = tan.omega()
            res = np.linalg.norm(symplectic_inverse(omega) + omega)
            if not res <= TANGENT_TOL * max(1.0, np.linalg.norm(x)):
                raise StructureError(f"not a tangent vector (residual {res:.3e})")
        return tan

    @classmethod
    def from_algebra(cls, m, omega):
        """``X = M Omega`` for Hamiltonian ``Omega``."""
        m = np.asarray(m, dtype=float)
        return cls(m, m @ omega)

    def omega(self):
        """Left-translated algebra element ``M^+ X``."""
        return symplectic_inverse(self.base) @ self.mat


def _same_base(x1, x2):
    if x1.base is not x2.base and not np.array_equal(x1.base, x2.base):
        raise ValueError("tangent vectors live at different base points")


def metric_h(x1, x2):
    """Pseudo-Riemannian trace form ``tr(X1^+ X2) / 2`` (indefinite)."""
    _same_base(x1, x2)
    return 0.5 * float(np.sum(symplectic_inverse(x1.mat).T * x2.mat))


def metric_g(x1, x2):
    """Right-invariant Riemannian metric ``tr((X1 M^+)^T X2 M^+) / 2``."""
    _same_base(x1, x2)
    minv = symplectic_inverse(x1.base)
    return 0.5 * float(np.sum((x1.mat @ minv) * (x2.mat @ minv)))


def exp_h(m, x, t=1.0):
    """One-parameter subgroup ``M expm(t M^+ X)``."""
    m = np.asarray(m, dtype=float)
    return m @ expm(t * (symplectic_inverse(m) @ x.mat))


def exp_g(m, x, t=1.0):
    """Riemannian geodesic ``expm(t(W - W^T)) expm(t W^T) M`` with ``W = X M^+``."""
    m = np.asarray(m, dtype=float)
    w = x.mat @ symplectic_inverse(m)
    return expm(t * (w - w.T)) @ (expm(t * w.T) @ m)


def grad_g(m, egrad):
    """Riemannian gradient ``G M^T M + J M G^T J M`` for the metric ``g``."""
    m = np.asarray(m, dtype=float)
    egrad = np.asarray(egrad, dtype=float)
    jm = jmul(m)
    return GroupTangent(m, egrad @ (m.T @ m) + jmul(m @ (egrad.T @ jm)))
