"""The symplectic Grassmann manifold SpGr(2n, 2k).

A point is a symplectic subspace, held as a Stiefel representative ``U``
(any ``U N`` with ``N`` in Sp(2k) denotes the same point). The projector
``P = U U^+`` is only materialized on request. Tangent vectors come in two
flavours, both stored on the representative:

* ``"pseudo"``: ``Delta = H`` with ``U^+ H = 0`` (horizontal for ``h``);
* ``"riem"``: ``Delta = (U H^+ - H U^+)^T U`` with ``U^+ H = 0`` (horizontal
  for the right-invariant Riemannian metric).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceError, DomainError, NotHorizontalError, SingularityError, StructureError,
)
from .matfun import (
    cay, cay_inv, expm, jtmul, logm, lu_solve, mulj, solve_right, sqrtm,
    symplectic_inverse,
)

PROJECTOR_TOL = 1e-8
HORIZONTAL_TOL = 1e-8
SP_P_TOL = 1e-6
SP_P_FLOOR = 1e-12

__all__ = [
    "GrPoint", "GrTangent", "projector", "projector_distance", "tangent_bracket",
    "hor_lift_pseudo", "pseudo_tangent", "riem_tangent", "bracket_from_tangent",
    "metric_h_gr", "exp_h_gr", "exp_h_gr_proj", "log_h_gr",
    "hor_riem_h_from_delta", "metric_g_gr", "grad_g_gr",
    "exp_g_gr_reduced", "exp_g_gr_full",
    "cayley_retract_gr", "cayley_retract_gr_proj",
    "cayley_inverse_gr_proj", "cayley_inverse_gr_lifted",
]


@dataclass(frozen=True, eq=False)
class GrPoint:
    """Symplectic subspace spanned by the columns of ``rep``."""

    rep: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rep", np.asarray(self.rep, dtype=float))

    @cached_property
    def proj(self):
        """Symplectic projector ``U U^+`` (dense ``2n x 2n``)."""
        return self.rep @ symplectic_inverse(self.rep)

    def check(self, tol=PROJECTOR_TOL):
        p = self.proj
        idem = np.linalg.norm(p @ p - p)
        selfadj = np.linalg.norm(symplectic_inverse(p) - p)
        if not (idem <= tol and selfadj <= tol):
            raise StructureError(
                f"not a symplectic projector (P^2-P {idem:.3e}, P^+-P {selfadj:.3e})")
        return self


def _rep(p):
    return p.rep if isinstance(p, GrPoint) else np.asarray(p, dtype=float)


def _proj(p):
    return p.proj if isinstance(p, GrPoint) else GrPoint(p).proj


def projector(p):
    """``P = U U^+`` for a point or representative."""
    return _proj(p)


def projector_distance(p, q):
    """``||P - Q||_F`` without forming ``2n x 2n`` matrices.

    ``P - Q = [U, V] [W, -Z]^T`` with ``W = (U^+)^T``, ``Z = (V^+)^T``;
    after thin QR of both factors the norm is that of a ``4k x 4k``
    product, which avoids the cancellation of expanding the square.
    """
    u, v = _rep(p), _rep(q)
    w = jtmul(mulj(u))
    z = jtmul(mulj(v))
    r1 = np.linalg.qr(np.hstack([u, v]), mode="r")
    r2 = np.linalg.qr(np.hstack([w, -z]), mode="r")
    return float(np.linalg.norm(r1 @ r2.T))


@dataclass(frozen=True, eq=False)
class GrTangent:
    """Horizontal tangent vector on a Stiefel representative.

    ``h`` satisfies ``U^+ H = 0``; ``mat`` is the actual ``2n x 2k`` tangent
    matrix for the chosen ``mode``.
    """

    base: np.ndarray
    h: np.ndarray
    mode: str
    mat: np.ndarray

    def scaled(self, s):
        return GrTangent(self.base, s * self.h, self.mode, s * self.mat)

    def __neg__(self):
        return self.scaled(-1.0)

    @cached_property
    def hph(self):
        return symplectic_inverse(self.h) @ self.h


def _riem_delta(u, h):
    # (U H^+ - H U^+)^T U = J^T H J U^T U - J^T U J H^T U
    return jtmul(mulj(h)) @ (u.T @ u) - jtmul(mulj(u)) @ (h.T @ u)


def pseudo_tangent(u, h, check=True):
    """Wrap ``H`` (``U^+ H = 0``) as a tangent for the pseudo-Riemannian metric."""
    u = _rep(u)
    h = np.asarray(h, dtype=float)
    if check:
        res = np.linalg.norm(symplectic_inverse(u) @ h)
        if not res <= HORIZONTAL_TOL * max(1.0, np.linalg.norm(h)):
            raise NotHorizontalError(f"U^+ H = {res:.3e} is not zero")
    return GrTangent(u, h, "pseudo", h)


def riem_tangent(u, h, check=True):
    """Riemannian-horizontal tangent ``(U H^+ - H U^+)^T U`` built from ``H``."""
    u = _rep(u)
    h = np.asarray(h, dtype=float)
    if check:
        res = np.linalg.norm(symplectic_inverse(u) @ h)
        if not res <= HORIZONTAL_TOL * max(1.0, np.linalg.norm(h)):
            raise NotHorizontalError(f"U^+ H = {res:.3e} is not zero")
    return GrTangent(u, h, "riem", _riem_delta(u, h))


def _same_base(g1, g2):
    if g1.base is not g2.base and not np.array_equal(g1.base, g2.base):
        raise ValueError("tangent vectors live at different base points")


def _require(g, mode):
    if g.mode != mode:
        raise ValueError(f"expected a {mode!r} tangent, got {g.mode!r}")


def tangent_bracket(p, omega):
    """Tangent vector ``[Omega, P] = Omega P - P Omega`` at ``P``."""
    pm = _proj(p)
    return omega @ pm - pm @ omega


def tangent_residual(p, gamma):
    """``||Gamma - (Gamma P + P Gamma - 2 P Gamma P)||_F``."""
    pm = _proj(p)
    gp = gamma @ pm
    return float(np.linalg.norm(gamma - gp - pm @ gamma + 2.0 * pm @ gp))


def bracket_from_tangent(g):
    """Push a lifted tangent down: ``Gamma = Delta U^+ + U Delta^+``."""
    u = g.base
    return g.mat @ symplectic_inverse(u) + u @ symplectic_inverse(g.mat)


def hor_lift_pseudo(p, gamma, tol=1e-8):
    """Pseudo-horizontal lift ``Gamma U`` of a tangent ``Gamma`` at ``P``."""
    u = _rep(p)
    gamma = np.asarray(gamma, dtype=float)
    res = tangent_residual(p, gamma)
    if not res <= tol * max(1.0, np.linalg.norm(gamma)):
        raise StructureError(f"Gamma is not tangent at P (residual {res:.3e})")
    return pseudo_tangent(u, gamma @ u)


def metric_h_gr(g1, g2):
    """Pseudo-Riemannian metric ``tr(H1^+ H2)`` on pseudo-horizontal lifts."""
    _require(g1, "pseudo")
    _require(g2, "pseudo")
    _same_base(g1, g2)
    return float(np.sum(symplectic_inverse(g1.h).T * g2.h))


def _lifted_pseudo_curve(u, h, hph, t):
    k2 = u.shape[1]
    eye = np.eye(k2)
    zero = np.zeros((k2, k2))
    blk = np.block([[zero, -eye], [hph, zero]])
    e = expm(t * blk)[:, k2:]
    return u @ e[k2:] - h @ e[:k2]


def exp_h_gr(p, g, t=1.0):
    """Pseudo-Riemannian geodesic, lifted: ``[-H, U] expm(t[[0,-I],[H^+H,0]]) [0; I]``."""
    _require(g, "pseudo")
    u = _rep(p)
    return GrPoint(_lifted_pseudo_curve(u, g.h, g.hph, t))


def exp_h_gr_proj(p, gamma, t=1.0):
    """Projector form ``expm(t[Gamma,P]) P expm(-t[Gamma,P])`` (dense oracle)."""
    pm = _proj(p)
    c = t * (gamma @ pm - pm @ gamma)
    return expm(c) @ pm @ expm(-c)


def _check_sp_p(omega, pm):
    res = np.linalg.norm(omega - omega @ pm - pm @ omega)
    # absolute floor: for F = P the generator itself is pure roundoff
    floor = SP_P_FLOOR * np.linalg.norm(pm)
    if not res <= SP_P_TOL * np.linalg.norm(omega) + floor:
        raise StructureError(
            f"generator is not in sp_P (residual {res:.3e}); points too far apart")


def _reflection_product(p, f):
    pm, fm = _proj(p), _proj(f)
    eye = np.eye(pm.shape[0])
    return pm, (eye - 2.0 * fm) @ (eye - 2.0 * pm)


def log_h_gr(p, f):
    """Geodesic endpoint map: ``Gamma`` at ``P`` with ``exp_h_gr(P, Gamma) = F``.

    Uses ``Omega~ = logm((I - 2F)(I - 2P)) / 2`` and returns ``[Omega~, P]``.
    """
    pm, refl = _reflection_product(p, f)
    try:
        omega = 0.5 * logm(refl)
    except (DomainError, ConvergenceError, SingularityError) as exc:
        raise DomainError("subspaces outside the injectivity domain of the log") from exc
    _check_sp_p(omega, pm)
    return omega @ pm - pm @ omega


def hor_riem_h_from_delta(u, d, tol=1e-6):
    """Recover ``H`` from a Riemannian-horizontal ``Delta``.

    ``H = (I - U U^+) J^T Delta (U^T U)^{-1} J``; raises
    ``NotHorizontalError`` if ``Delta`` is not of the form
    ``(U H^+ - H U^+)^T U``.
    """
    u = _rep(u)
    delta = np.asarray(getattr(d, "mat", d), dtype=float)
    z = mulj(scipy.linalg.cho_solve(scipy.linalg.cho_factor(u.T @ u), jtmul(delta).T).T)
    h = z - u @ (symplectic_inverse(u) @ z)
    tan = GrTangent(u, h, "riem", _riem_delta(u, h))
    res = np.linalg.norm(tan.mat - delta)
    if not res <= tol * max(np.linalg.norm(delta), np.finfo(float).tiny):
        if np.linalg.norm(delta) > 0:
            raise NotHorizontalError(f"Delta is not Riemannian-horizontal (residual {res:.3e})")
    return GrTangent(u, h, "riem", delta)


def metric_g_gr(g1, g2):
    """Riemannian metric ``tr((U^TU)^{-1} Delta1^T (I - U U^+) Delta2)`` on horizontal lifts."""
    _require(g1, "riem")
    _require(g2, "riem")
    _same_base(g1, g2)
    u = g1.base
    d2 = g2.mat
    proj_d2 = d2 - u @ (symplectic_inverse(u) @ d2)
    gram = scipy.linalg.cho_factor(u.T @ u)
    return float(np.sum(scipy.linalg.cho_solve(gram, g1.mat.T) * proj_d2.T))


def metric_g_gr_h(g1, g2):
    """The same metric written through ``H``: ``tr(U^TU (H2^T H1)^+ - (U^T H1)^+ H2^T U)``."""
    _same_base(g1, g2)
    u = g1.base
    h1, h2 = g1.h, g2.h
    return float(np.trace((u.T @ u) @ symplectic_inverse(h2.T @ h1))
                 - np.trace(symplectic_inverse(u.T @ h1) @ (h2.T @ u)))


def grad_g_gr(u, egrad):
    """Riemannian gradient of a representative-invariant objective.

    ``H = (I - U U^+) J^T G J`` and ``grad = J^T H J U^T U - J^T U J H^T U``.
    """
    u = _rep(u)
    egrad = np.asarray(egrad, dtype=float)
    z = mulj(jtmul(egrad))
    h = z - u @ (symplectic_inverse(u) @ z)
    return GrTangent(u, h, "riem", _riem_delta(u, h))


def exp_g_gr_reduced(u, g, t=1.0):
    """Lifted Riemannian geodesic through one ``8k x 8k`` and one ``4k x 4k`` exponential."""
    _require(g, "riem")
    u = _rep(u)
    h = g.h
    k2 = u.shape[1]
    jhj = jtmul(mulj(h))
    juj = jtmul(mulj(u))
    x = np.hstack([jhj, -juj, -u, h])
    y = np.hstack([u, h, jhj, juj])
    e8 = expm(t * (y.T @ x))[:, 2 * k2:]
    eye = np.eye(k2)
    zero = np.zeros((k2, k2))
    e4 = expm(t * np.block([[zero, -g.hph], [eye, zero]]))[:, :k2]
    return GrPoint(-(x @ (e8 @ e4)))


def exp_g_gr_full(u, g, t=1.0):
    """Dense ``expm(t(Ob - Ob^T)) expm(t Ob^T) U`` for the horizontal ``Delta``."""
    from .sp_stiefel import StTangent, exp_g_st_full

    u = _rep(u)
    return GrPoint(exp_g_st_full(u, StTangent.from_matrix(u, g.mat, check=False), t))


def cayley_retract_gr(u, g, t=1.0):
    """Cayley retraction on SpGr, lifted: ``-U + (tH + 2U)(t^2/4 H^+H + I)^{-1}``."""
    _require(g, "pseudo")
    u = _rep(u)
    quad = (0.25 * t * t) * g.hph
    scale = 1.0 + np.linalg.norm(quad, np.inf)
    try:
        return GrPoint(solve_right(t * g.h + 2.0 * u, quad + np.eye(u.shape[1]), scale=scale) - u)
    except SingularityError as exc:
        raise SingularityError(
            "I + t^2/4 H^+H is singular in the Grassmann Cayley retraction") from exc


def cayley_retract_gr_proj(p, gamma, t=1.0):
    """Projector form ``cay(t/2 [Gamma,P]) P cay(-t/2 [Gamma,P])`` (dense oracle)."""
    pm = _proj(p)
    c = 0.5 * t * (gamma @ pm - pm @ gamma)
    return cay(c) @ pm @ cay(-c)


def cayley_inverse_gr_proj(p, f):
    """Inverse Cayley retraction on projectors.

    ``Omega~ = 2 cay^{-1}(sqrtm((I - 2F)(I - 2P)))``; returns ``[Omega~, P]``.
    """
    pm, refl = _reflection_product(p, f)
    try:
        root = sqrtm(refl)
        omega = 2.0 * cay_inv(root)
    except (DomainError, ConvergenceError, SingularityError) as exc:
        raise DomainError("subspaces outside the domain of the inverse retraction") from exc
    _check_sp_p(omega, pm)
    return omega @ pm - pm @ omega


def cayley_inverse_gr_lifted(u, v, return_n=False):
    """Inverse Cayley retraction on representatives.

    With ``N = (U^+V)^{-1} sqrtm(U^+ V V^+ U)`` and
    ``H = 2 (V N + U)(U^+ V N + I)^{-1} - 2 U``, the Grassmann Cayley
    retraction of ``H`` at ``u`` lands on ``V N``.
    """
    u = _rep(u)
    v = _rep(v)
    k2 = u.shape[1]
    upv = symplectic_inverse(u) @ v
    try:
        n = lu_solve(upv, sqrtm(upv @ symplectic_inverse(upv)))
        vn = v @ n
        upvn = upv @ n
        h = 2.0 * solve_right(vn + u, upvn + np.eye(k2),
                              scale=1.0 + np.linalg.norm(upvn, np.inf)) - 2.0 * u
    except (DomainError, ConvergenceError, SingularityError) as exc:
        raise DomainError("subspaces outside the domain of the lifted inverse") from exc
    tan = GrTangent(u, h, "pseudo", h)
    return (tan, n) if return_n else tan
