"""Riemannian gradient descent with an alternating Barzilai-Borwein step.

The driver works on symplectic Stiefel representatives in two modes:

``"stiefel_g"``
    gradient and metric of the right-invariant metric on SpSt; curves are
    the Riemannian geodesic, the Cayley retraction or the quasi-geodesic.
``"grassmann_g"``
    gradient and metric of the induced metric on SpGr for an objective
    that only depends on the spanned subspace; curves are the lifted
    Riemannian geodesic or the Grassmann Cayley retraction.
"""

import math
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from . import sp_grassmann as gr
from . import sp_stiefel as st
from .errors import (
    ConvergenceError, DomainError, SingularityError, StepFailureError,
)
from .matfun import spectral_norm, symplectic_inverse

MODES = ("stiefel_g", "grassmann_g")
RETRACTIONS = ("geodesic", "cayley", "quasi_geodesic")

_DEGENERATE = 1e-300


@dataclass(frozen=True)
class DescentConfig:
    """Parameters of the descent loop; defaults follow the reference experiments."""

    beta: float = 1e-4
    delta: float = 0.1
    gamma_min: float = 1e-15
    gamma_max: float = 1e15
    h_min: int = 0
    h_max: int = 5
    eps_grad: float = 1e-6
    eps_x: float = 1e-6
    eps_f: float = 1e-12
    max_iters: int = 100

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not 0 < self.gamma_min < self.gamma_max:
            raise ValueError("need 0 < gamma_min < gamma_max")
        if self.h_min > self.h_max:
            raise ValueError("need h_min <= h_max")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")


class TraceRow(NamedTuple):
    iter: int
    fval: float
    grad_norm: float
    step_t: float
    wall_time: float
    exhausted: bool


@dataclass
class DescentState:
    """Mutable state of one descent run."""

    iterate: np.ndarray
    grad: object
    fval: float
    prev_iterate: np.ndarray = None
    prev_grad: object = None
    gamma_abb: float = math.nan
    iter: int = 0
    converged: bool = False
    trace: list = field(default_factory=list)

    @property
    def fvals(self):
        return np.array([row.fval for row in self.trace])


@dataclass(frozen=True)
class Problem:
    """Objective, Euclidean gradient and the geometry used to descend.

    ``euclid_grad`` returns the gradient of a smooth extension of
    ``objective`` to all ``2n x 2k`` matrices.
    """

    objective: Callable
    euclid_grad: Callable
    manifold_mode: str = "stiefel_g"
    retraction: str = "cayley"
    name: str = ""

    def __post_init__(self):
        if self.manifold_mode not in MODES:
            raise ValueError(f"unknown manifold mode {self.manifold_mode!r}")
        if self.retraction not in RETRACTIONS:
            raise ValueError(f"unknown retraction {self.retraction!r}")
        if self.manifold_mode == "grassmann_g" and self.retraction == "quasi_geodesic":
            raise ValueError("the quasi-geodesic is only defined on SpSt")

    def with_method(self, manifold_mode, retraction):
        return replace(self, manifold_mode=manifold_mode, retraction=retraction)

    # geometry dispatch

    def gradient(self, u):
        egrad = self.euclid_grad(u)
        if self.manifold_mode == "stiefel_g":
            return st.grad_g_st(u, egrad)
        return gr.grad_g_gr(u, egrad)

    def sqnorm(self, d):
        if self.manifold_mode == "stiefel_g":
            return st.metric_g_st(d, d)
        return gr.metric_g_gr(d, d)

    def retract(self, u, d, t):
        """Point reached from ``u`` along direction ``d`` at parameter ``t``."""
        if self.manifold_mode == "stiefel_g":
            if self.retraction == "geodesic":
                return st.exp_g_st_reduced(u, d, t)
            if self.retraction == "cayley":
                return st.cayley_retract(u, d, t)
            return st.quasi_geodesic_retract(u, d, t)
        if self.retraction == "geodesic":
            return gr.exp_g_gr_reduced(u, d, t).rep
        return gr.cayley_retract_gr(u, _pseudo_lift(u, d), t).rep


def _pseudo_lift(u, d):
    # Gamma U for Gamma = Delta U^+ + U Delta^+, i.e. Delta + U Delta^+ U
    h = d.mat + u @ (symplectic_inverse(d.mat) @ u)
    return gr.GrTangent(u, h, "pseudo", h)


def abb_step(state, cfg=DescentConfig()):
    """Alternating Barzilai-Borwein trial step, clamped to ``[gamma_min, gamma_max]``.

    At iteration 0 the raw value is ``f(U_0)``. Afterwards, with
    ``S = U_k - U_{k-1}`` and ``Y = grad_k - grad_{k-1}`` (Frobenius
    inner products), odd iterations use ``<S,S>/|<S,Y>|`` and even ones
    ``|<S,Y>|/<Y,Y>``.
    """
    if state.iter == 0 or state.prev_iterate is None:
        raw = state.fval
    else:
        s = state.iterate - state.prev_iterate
        y = state.grad.mat - state.prev_grad.mat
        sy = abs(float(np.sum(s * y)))
        if state.iter % 2:
            num, den = float(np.sum(s * s)), sy
        else:
            num, den = sy, float(np.sum(y * y))
        if den < _DEGENERATE:
            # no curvature information: fall back to the largest step
            raw = cfg.gamma_max
        else:
            raw = num / den
    if not np.isfinite(raw):
        raw = cfg.gamma_max
    return max(cfg.gamma_min, min(raw, cfg.gamma_max))


_STEP_ERRORS = (SingularityError, DomainError, ConvergenceError, np.linalg.LinAlgError)


def line_search(problem, state, gamma, cfg=DescentConfig()):
    """Monotone backtracking along ``Delta = -grad``.

    Tries ``t = gamma * delta**h`` for ``h = h_min, ..., h_max`` and returns
    ``(t, next_point, f_next, exhausted)`` for the first ``t`` that
    satisfies ``f(R(t Delta)) <= f(U) - beta t <Delta, Delta>_U``. If no
    trial passes, the last finite trial is returned with
    ``exhausted=True``. Trials whose retraction is singular count as
    ``f = inf``.
    """
    u = state.iterate
    d = -state.grad
    decrease = cfg.beta * problem.sqnorm(d)
    last = None
    for h in range(cfg.h_min, cfg.h_max + 1):
        t = gamma * cfg.delta ** h
        try:
            cand = problem.retract(u, d, t)
            fc = float(problem.objective(cand))
        except _STEP_ERRORS:
            continue
        if not np.isfinite(fc):
            continue
        last = (t, cand, fc)
        if fc <= state.fval - t * decrease:
            return t, cand, fc, False
    if last is None:
        raise StepFailureError(
            f"every trial step failed at iteration {state.iter}", trace=list(state.trace))
    return (*last, True)


def descend(problem, u0, cfg=DescentConfig()):
    """Run the descent loop from ``u0`` until the stopping test or ``cfg.max_iters``.

    The loop stops at iteration ``k`` when ``||grad_k||_F < eps_grad`` and
    both ``|f_k - f_{k+1}| / (|f_k| + 1) < eps_f`` and
    ``||U_k - U_{k+1}||_F / sqrt(2n) < eps_x``.
    """
    u = np.array(u0, dtype=float)
    scale_x = math.sqrt(u.shape[0])
    state = DescentState(iterate=u, grad=problem.gradient(u), fval=float(problem.objective(u)))
    clock = time.perf_counter
    for k in range(cfg.max_iters + 1):
        start = clock()
        state.iter = k
        gamma = abb_step(state, cfg)
        state.gamma_abb = gamma
        try:
            t, nxt, fnext, exhausted = line_search(problem, state, gamma, cfg)
        except StepFailureError as exc:
            exc.trace = list(state.trace)
            raise
        if exhausted:
            warnings.warn(f"line search exhausted at iteration {k}", RuntimeWarning, stacklevel=2)
        gnorm = float(np.linalg.norm(state.grad.mat))
        done = (gnorm < cfg.eps_grad
                and abs(state.fval - fnext) / (abs(state.fval) + 1.0) < cfg.eps_f
                and np.linalg.norm(state.iterate - nxt) / scale_x < cfg.eps_x)
        new_grad = problem.gradient(nxt)
        state.trace.append(TraceRow(k, state.fval, gnorm, t, clock() - start, exhausted))
        state.prev_iterate, state.prev_grad = state.iterate, state.grad
        state.iterate, state.grad, state.fval = nxt, new_grad, fnext
        if done:
            state.converged = True
            break
    return state


# experiment objectives


def nearest_symplectic_problem(a, retraction="cayley"):
    """``f(U) = ||U - A||_F^2`` with Euclidean gradient ``2 (U - A)``."""
    a = np.asarray(a, dtype=float)

    def objective(u):
        r = u - a
        return float(np.sum(r * r))

    def euclid_grad(u):
        return 2.0 * (u - a)

    return Problem(objective, euclid_grad, "stiefel_g", retraction, "nearest")


def subspace_fit_problem(s, manifold_mode="grassmann_g", retraction="cayley"):
    """``f(U) = ||S - U U^+ S||_F^2``; depends on ``U`` only through ``U U^+``.

    With ``R = S - U U^+ S`` the Euclidean gradient is
    ``-2 (R (U^+ S)^T + J S R^T U J^T)``.
    """
    s = np.asarray(s, dtype=float)

    def residual(u):
        ups = symplectic_inverse(u) @ s
        return s - u @ ups, ups

    def objective(u):
        r, _ = residual(u)
        return float(np.sum(r * r))

    def euclid_grad(u):
        r, ups = residual(u)
        w = s @ (r.T @ u)
        # J w J^T, written blockwise
        p, q = w.shape[0] // 2, w.shape[1] // 2
        jwjt = np.block([[w[p:, q:], -w[p:, :q]], [-w[:p, q:], w[:p, :q]]])
        return -2.0 * (r @ ups.T + jwjt)

    return Problem(objective, euclid_grad, manifold_mode, retraction, "subspace")


def nearest_target(rng, n, k, scale_a=1.0):
    """Gaussian ``2n x 2k`` target rescaled to spectral norm ``scale_a``."""
    a = rng.standard_normal((2 * n, 2 * k))
    return scale_a * a / np.linalg.norm(a, 2)


def subspace_data(rng, n, k, noise=1.0):
    """``S = A A^+ + noise * E / ||E||_2`` with ``A = cay(X/2) E_canonical``.

    Returns ``(S, A)``. The 2-norm of the perturbation uses power iteration.
    """
    from .matfun import rand_stiefel_point

    a = rand_stiefel_point(rng, n, k, scale="cay_half")
    s = a @ symplectic_inverse(a)
    err = rng.standard_normal((2 * n, 2 * n))
    if noise:
        s = s + noise * err / spectral_norm(err)
    return s, a
