"""The symplectic Stiefel manifold SpSt(2n, 2k).

Points are plain ``(2n, 2k)`` arrays ``U`` with ``U^+ U = I``. Tangent
vectors are :class:`StTangent` objects that carry the split
``Delta = U A + H`` with ``A = U^+ Delta`` Hamiltonian and ``U^+ H = 0``;
every reduced formula below is written in terms of that split.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError, SingularityError, StructureError
from .matfun import (
    cay, expm, feasibility, jmul, jtmul, lu_solve, mulj, solve_right,
    symplectic_inverse,
)

FEASIBILITY_TOL = 1e-8
TANGENT_TOL = 1e-8


def check_stiefel(u, tol=FEASIBILITY_TOL):
    """Validate a symplectic Stiefel point and return it as a float array."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[0] % 2 or u.shape[1] % 2 or u.shape[1] > u.shape[0]:
        raise DimensionError(f"expected a 2n x 2k array with k <= n, got {u.shape}")
    res = feasibility(u)
    if not res <= tol:
        raise StructureError(f"point is not on SpSt (feasibility {res:.3e})")
    return u


def canonical_e(n, k):
    """The canonical point ``E = [[I_{n,k}, 0], [0, I_{n,k}]]``."""
    if not 1 <= k <= n:
        raise DimensionError(f"need 1 <= k <= n, got n={n}, k={k}")
    e = np.zeros((2 * n, 2 * k))
    idx = np.arange(k)
    e[idx, idx] = 1.0
    e[n + idx, k + idx] = 1.0
    return e


class _Gram:
    """Cholesky factor of ``U^T U`` with a couple of helpers."""

    def __init__(self, u):
        self.mat = u.T @ u
        self.factor = scipy.linalg.cho_factor(self.mat)

    def solve(self, b):
        """``(U^T U)^{-1} b``"""
        return scipy.linalg.cho_solve(self.factor, b)

    def rsolve(self, b):
        """``b (U^T U)^{-1}``"""
        return scipy.linalg.cho_solve(self.factor, b.T).T


@dataclass(frozen=True, eq=False)
class StTangent:
    """Tangent vector ``Delta = U A + H`` at ``base = U``.

    ``a`` and ``h`` are cached at construction; products that the reduced
    formulas reuse across line-search trials are memoized lazily.
    """

    base: np.ndarray
    mat: np.ndarray
    a: np.ndarray
    h: np.ndarray

    @classmethod
    def from_matrix(cls, u, delta, check=True):
        u = np.asarray(u, dtype=float)
        delta = np.asarray(delta, dtype=float)
        if delta.shape != u.shape:
            raise DimensionError(f"tangent shape {delta.shape} != point shape {u.shape}")
        a = symplectic_inverse(u) @ delta
        tan = cls(u, delta, a, delta - u @ a)
        if check:
            tan.validate()
        return tan

    @classmethod
    def from_parts(cls, u, a, h):
        u = np.asarray(u, dtype=float)
        return cls(u, u @ a + h, np.asarray(a, dtype=float), np.asarray(h, dtype=float))

    @classmethod
    def zero(cls, u):
        u = np.asarray(u, dtype=float)
        k2 = u.shape[1]
        return cls(u, np.zeros_like(u), np.zeros((k2, k2)), np.zeros_like(u))

    def validate(self, tol=TANGENT_TOL):
        scale = tol * max(1.0, np.linalg.norm(self.mat))
        res_a = np.linalg.norm(symplectic_inverse(self.a) + self.a)
        res_h = np.linalg.norm(symplectic_inverse(self.base) @ self.h)
        if not (res_a <= scale and res_h <= scale):
            raise StructureError(
                f"not a tangent vector (A residual {res_a:.3e}, U^+H {res_h:.3e})")
        return self

    def scaled(self, s):
        return StTangent(self.base, s * self.mat, s * self.a, s * self.h)

    def __neg__(self):
        return self.scaled(-1.0)

    @cached_property
    def hph(self):
        """``H^+ H``"""
        return symplectic_inverse(self.h) @ self.h

    @cached_property
    def a2(self):
        return self.a @ self.a

    @cached_property
    def gram(self):
        return _Gram(self.base)

    @cached_property
    def pinv(self):
        """``Delta^+``"""
        return symplectic_inverse(self.mat)


def _same_base(d1, d2):
    if d1.base is not d2.base and not np.array_equal(d1.base, d2.base):
        raise ValueError("tangent vectors live at different base points")


def tangent_from_ambient(u, w):
    """Project an ambient ``2n x 2k`` matrix onto ``T_U SpSt``.

    The ``U A`` part keeps the Hamiltonian part of ``U^+ W``; the rest is
    ``(I - U U^+) W``. Tangent inputs are returned unchanged.
    """
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    upw = symplectic_inverse(u) @ w
    a = 0.5 * (upw - symplectic_inverse(upw))
    return StTangent.from_parts(u, a, w - u @ upw)


def omega_tilde_factors(u, d):
    """Factors ``X (2n x 4k)`` and ``Yt (4k x 2n)`` with ``Omega~ = X @ Yt``."""
    u = np.asarray(u, dtype=float)
    up = symplectic_inverse(u)
    x = np.hstack([0.5 * (u @ d.a) + d.h, -u])
    yt = np.vstack([up, d.pinv + 0.5 * (d.a @ up)])
    return x, yt


def omega_tilde(u, d):
    """Hamiltonian ``Omega~ = (I - UU^+/2) Delta U^+ - U Delta^+ (I - UU^+/2)``.

    Satisfies ``Omega~ U = Delta``. The dense ``2n x 2n`` matrix is formed;
    use :func:`omega_tilde_factors` for actions.
    """
    x, yt = omega_tilde_factors(u, d)
    return x @ yt


def metric_h_st(d1, d2):
    """Pseudo-Riemannian metric ``tr(Delta1^+ (I - UU^+/2) Delta2)``."""
    _same_base(d1, d2)
    right = 0.5 * (d2.base @ d2.a) + d2.h
    return float(np.sum(d1.pinv.T * right))


def exp_h_st_full(u, d, t=1.0):
    """Pseudo-Riemannian geodesic ``expm(t Omega~) U`` using dense ``2n x 2n`` data."""
    u = np.asarray(u, dtype=float)
    return expm(t * omega_tilde(u, d)) @ u


def exp_h_st_reduced(u, d, t=1.0):
    """Pseudo-Riemannian geodesic through one ``4k x 4k`` exponential.

    ``[U, UA/2 + H] expm(t [[A/2, A^2/4 - H^+H], [I, A/2]]) [I; 0]``; no
    invertibility of ``H^+H`` is needed.
    """
    u = np.asarray(u, dtype=float)
    k2 = u.shape[1]
    half_a = 0.5 * d.a
    blk = np.block([[half_a, 0.25 * d.a2 - d.hph], [np.eye(k2), half_a]])
    e = expm(t * blk)[:, :k2]
    return u @ e[:k2] + (u @ half_a + d.h) @ e[k2:]


def metric_g_st(d1, d2):
    """Right-invariant Riemannian metric.

    ``tr(Delta1^T (I - J^T U (U^TU)^{-1} U^T J / 2) Delta2 (U^TU)^{-1})``
    """
    _same_base(d1, d2)
    u = d1.base
    gram = d1.gram
    m = d2.mat - 0.5 * jtmul(u @ gram.solve(u.T @ jmul(d2.mat)))
    return float(np.sum(d1.mat * gram.rsolve(m)))


def omega_bar(u, d):
    """Horizontal lift generator for the Riemannian metric (dense ``2n x 2n``).

    ``Delta G^{-1} U^T + J U G^{-1} Delta^T (I - J^T U G^{-1} U^T J) J`` with
    ``G = U^T U``; satisfies ``Omega_bar U = Delta``.
    """
    u = np.asarray(u, dtype=float)
    gram = d.gram if d.base is u else _Gram(u)
    w = gram.rsolve(u)  # U G^{-1}
    delta = d.mat
    # (I - J^T W U^T J) J = J + (J^T W) U^T since J J = -I
    right = mulj(delta.T) + (delta.T @ jtmul(w)) @ u.T
    return delta @ w.T + jmul(w) @ right


def grad_g_st(u, egrad):
    """Riemannian gradient ``G U^T U + J U G^T J U`` of the metric ``g``."""
    u = np.asarray(u, dtype=float)
    egrad = np.asarray(egrad, dtype=float)
    grad = egrad @ (u.T @ u) + jmul(u @ (egrad.T @ jmul(u)))
    try:
        return StTangent.from_matrix(u, grad)
    except StructureError as exc:
        raise StructureError(f"gradient left the tangent space: {exc}") from exc


def exp_g_st_full(u, d, t=1.0):
    """Riemannian geodesic ``expm(t(Ob - Ob^T)) expm(t Ob^T) U`` (dense oracle)."""
    u = np.asarray(u, dtype=float)
    ob = omega_bar(u, d)
    return expm(t * (ob - ob.T)) @ (expm(t * ob.T) @ u)


def _omega_bar_factors(u, d):
    """``X, Y (2n x 4k)`` with ``Omega_bar = Y X^T``."""
    gram = d.gram if d.base is u else _Gram(u)
    delta = d.mat
    up = symplectic_inverse(u)
    # A_bar = J U^T D G^{-1} J + G^{-1} D^T U - G^{-1} D^T J^T U G^{-1} J
    abar = (jmul(mulj(gram.rsolve(u.T @ delta)))
            + gram.solve(delta.T @ u)
            - mulj(gram.rsolve(gram.solve(delta.T @ jtmul(u)))))
    z = mulj(gram.rsolve(jmul(delta)))
    hbar = z - u @ (up @ z)
    dbar = u @ abar + hbar
    x1 = dbar - 0.5 * (u @ (up @ dbar))
    dbp = symplectic_inverse(dbar)
    y2 = (dbp - 0.5 * ((dbp @ u) @ up)).T
    x = np.hstack([x1, -u])
    y = np.hstack([jtmul(mulj(u)), y2])
    return x, y


def exp_g_st_reduced(u, d, t=1.0):
    """Riemannian geodesic through one ``8k x 8k`` and one ``4k x 4k`` exponential."""
    u = np.asarray(u, dtype=float)
    k2 = u.shape[1]
    x, y = _omega_bar_factors(u, d)
    xh = np.hstack([y, -x])
    yh = np.hstack([x, y])
    e8 = expm(t * (yh.T @ xh))[:, 2 * k2:]
    e4 = expm(t * (y.T @ x))[:, k2:]
    return xh @ (e8 @ e4)


def cayley_retract(u, d, t=1.0):
    """Cayley retraction ``-U + (tH + 2U) (t^2/4 H^+H - t/2 A + I)^{-1}``.

    Raises ``SingularityError`` when the ``2k x 2k`` system is singular.
    """
    u = np.asarray(u, dtype=float)
    k2 = u.shape[1]
    quad, lin = (0.25 * t * t) * d.hph, (0.5 * t) * d.a
    scale = 1.0 + np.linalg.norm(quad, np.inf) + np.linalg.norm(lin, np.inf)
    return solve_right(t * d.h + 2.0 * u, quad - lin + np.eye(k2), scale=scale) - u


def cayley_retract_full(u, d, t=1.0):
    """Dense form ``cay(t/2 Omega~) U``; oracle for :func:`cayley_retract`."""
    u = np.asarray(u, dtype=float)
    return cay(0.5 * t * omega_tilde(u, d)) @ u


def cayley_inverse(u, v):
    """Closed-form inverse of the Cayley retraction.

    Returns the tangent ``L`` at ``u`` with ``cayley_retract(u, L) == v``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    k2 = u.shape[1]
    eye = np.eye(k2)
    upv = symplectic_inverse(u) @ v
    vpu = symplectic_inverse(v) @ u
    try:
        inv_uv = lu_solve(eye + upv, eye, scale=1.0 + np.linalg.norm(upv, np.inf))
        inv_vu = lu_solve(eye + vpu, eye, scale=1.0 + np.linalg.norm(vpu, np.inf))
    except SingularityError as exc:
        raise DomainError("points too far apart for the Cayley chart") from exc
    a = 2.0 * (inv_vu - inv_uv)
    h = 2.0 * ((v + u) @ inv_uv - u)
    return StTangent.from_parts(u, a, h)


def quasi_geodesic_retract(u, d, t=1.0):
    """Quasi-geodesic retraction evaluated at ``t Delta``.

    ``[U, tD] expm([[tA, -t^2 D^+D], [I, tA]]) [I; 0] expm(-tA)``, used as
    a comparator in experiments.
    """
    u = np.asarray(u, dtype=float)
    k2 = u.shape[1]
    ta = t * d.a
    dpd = d.pinv @ d.mat
    blk = np.block([[ta, -(t * t) * dpd], [np.eye(k2), ta]])
    e = expm(blk)[:, :k2]
    return (u @ e[:k2] + (t * d.mat) @ e[k2:]) @ expm(-ta)
