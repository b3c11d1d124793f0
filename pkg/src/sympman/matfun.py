"""Matrix-function kernels and symplectic primitives.

Everything here works on plain ``numpy.ndarray`` objects of dtype float64.
The Poisson matrix ``J_{2p} = [[0, I_p], [-I_p, 0]]`` is never formed; it is
applied by swapping and negating block rows or columns.
"""

import warnings

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DimensionError, DomainError, SingularityError

__all__ = [
    "poisson_apply", "jmul", "jtmul", "mulj", "muljt", "poisson",
    "symplectic_inverse", "feasibility", "hamiltonian_residual",
    "lu_solve", "solve_right",
    "expm", "logm", "sqrtm", "cay", "cay_inv",
    "make_rng", "rand_hamiltonian", "rand_stiefel_point", "rand_stiefel_tangent",
    "spectral_norm",
]

#: relative pivot threshold below which a factorized matrix counts as singular
PIVOT_TOL = 1e-13


def _half(m, axis):
    size = m.shape[axis]
    if size % 2:
        raise DimensionError(f"dimension {size} along axis {axis} is odd")
    return size // 2


def jmul(m):
    """Return ``J @ m``."""
    m = np.asarray(m)
    p = _half(m, 0)
    return np.concatenate([m[p:], -m[:p]], axis=0)


def jtmul(m):
    """Return ``J.T @ m``."""
    m = np.asarray(m)
    p = _half(m, 0)
    return np.concatenate([-m[p:], m[:p]], axis=0)


def mulj(m):
    """Return ``m @ J``."""
    m = np.asarray(m)
    p = _half(m, 1)
    return np.concatenate([-m[:, p:], m[:, :p]], axis=1)


def muljt(m):
    """Return ``m @ J.T``."""
    m = np.asarray(m)
    p = _half(m, 1)
    return np.concatenate([m[:, p:], -m[:, :p]], axis=1)


_POISSON = {
    ("left", False): jmul,
    ("left", True): jtmul,
    ("right", False): mulj,
    ("right", True): muljt,
}


def poisson_apply(m, side="left", transpose=False):
    """Apply the Poisson matrix ``J`` (or its transpose) to ``m``.

    Parameters
    ----------
    m : ndarray, shape (r, c)
        Matrix whose relevant dimension (rows for ``side="left"``, columns
        for ``side="right"``) is even.
    side : {"left", "right"}
        Multiply from the left (``J m``) or from the right (``m J``).
    transpose : bool
        Use ``J.T`` instead of ``J``.
    """
    try:
        op = _POISSON[(side, bool(transpose))]
    except KeyError:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}") from None
    return op(m)


def poisson(p):
    """Dense ``J_{2p}``; only meant for tests and small oracles."""
    eye = np.eye(p)
    zero = np.zeros((p, p))
    return np.block([[zero, eye], [-eye, zero]])


def symplectic_inverse(a):
    """Symplectic inverse ``A^+ = J_{2k}^T A^T J_{2n}`` of a 2n x 2k matrix.

    Written blockwise, ``[[A11, A12], [A21, A22]]^+ = [[A22^T, -A12^T],
    [-A21^T, A11^T]]``. For symplectic square ``M`` this is ``M^{-1}``.
    """
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionError("symplectic_inverse expects a 2-d array")
    n = _half(a, 0)
    k = _half(a, 1)
    a11, a12 = a[:n, :k], a[:n, k:]
    a21, a22 = a[n:, :k], a[n:, k:]
    return np.block([[a22.T, -a12.T], [-a21.T, a11.T]])


def feasibility(u):
    """Frobenius residual ``||U^+ U - I||_F`` measuring distance from SpSt."""
    u = np.asarray(u)
    g = symplectic_inverse(u) @ u
    g[np.diag_indices_from(g)] -= 1.0
    return float(np.linalg.norm(g))


def hamiltonian_residual(x):
    """``||X^+ + X||_F``; zero exactly when ``X`` is Hamiltonian."""
    return float(np.linalg.norm(symplectic_inverse(x) + x))


def _square(x, name="input"):
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError(f"{name} must be a square matrix, got shape {x.shape}")
    return x


def _lu(a, scale=None):
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularityError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    ref = np.linalg.norm(a, np.inf)
    if scale is not None:
        ref = max(ref, scale)
    pivots = np.abs(np.diag(lu))
    if not np.all(np.isfinite(lu)) or pivots.min() < PIVOT_TOL * max(ref, np.finfo(float).tiny):
        raise SingularityError("matrix is numerically singular")
    return lu, piv


def lu_solve(a, b, scale=None):
    """Solve ``a x = b`` by partially pivoted LU with a singularity guard.

    A pivot below ``PIVOT_TOL * max(||a||_inf, scale)`` counts as singular.
    Pass ``scale`` when ``a`` is a sum of terms that may cancel, e.g. the
    norm of ``I`` plus that of ``X`` for ``a = I + X``.
    """
    a = _square(a)
    return scipy.linalg.lu_solve(_lu(a, scale), b, check_finite=False)


def solve_right(b, a, scale=None):
    """Return ``b a^{-1}``, i.e. solve ``x a = b``."""
    a = _square(a)
    return scipy.linalg.lu_solve(_lu(a, scale), np.asarray(b).T, trans=1, check_finite=False).T


def _inv(a):
    return lu_solve(a, np.eye(a.shape[0]))


def expm(x):
    """Matrix exponential (scaling and squaring, degree-13 Pade)."""
    x = _square(x)
    return scipy.linalg.expm(x)


def sqrtm(x, tol=1e-13, maxiter=100):
    """Principal square root by the scaled Denman-Beavers iteration.

    Raises
    ------
    DomainError
        If ``x`` is singular or ``det(x) < 0`` (a negative real eigenvalue
        of odd multiplicity).
    ConvergenceError
        If the iteration does not settle, which in real arithmetic is what
        happens when the spectrum touches the negative real axis.
    """
    x = _square(x)
    size = x.shape[0]
    if size == 0:
        return x.copy()
    sign, _ = np.linalg.slogdet(x)
    if sign <= 0:
        raise DomainError("matrix has no real principal square root (det <= 0)")
    y = x.copy()
    z = np.eye(size)
    scaling = True
    converged = False
    for _ in range(maxiter):
        try:
            yinv = _inv(y)
            zinv = _inv(z)
        except SingularityError as exc:
            raise DomainError("square-root iteration hit a singular iterate") from exc
        if scaling:
            _, ldy = np.linalg.slogdet(y)
            _, ldz = np.linalg.slogdet(z)
            mu = np.exp(-(ldy + ldz) / (2 * size))
        else:
            mu = 1.0
        y_next = 0.5 * (mu * y + zinv / mu)
        z_next = 0.5 * (mu * z + yinv / mu)
        change = np.linalg.norm(y_next - y) / max(np.linalg.norm(y_next), np.finfo(float).tiny)
        y, z = y_next, z_next
        if not np.all(np.isfinite(y)):
            break
        if converged:
            return y
        if change < 1e-2:
            scaling = False
        if change <= tol:
            # one extra sweep: quadratic convergence pushes to full accuracy
            converged = True
    raise ConvergenceError("Denman-Beavers iteration did not converge")


# Gauss-Legendre nodes on [0, 1] give the diagonal Pade approximant of
# log(1 + y) in partial-fraction form.
_LOG_PADE_DEGREE = 10
_gl_nodes, _gl_weights = np.polynomial.legendre.leggauss(_LOG_PADE_DEGREE)
_LOG_NODES = 0.5 * (_gl_nodes + 1.0)
_LOG_WEIGHTS = 0.5 * _gl_weights
_LOG_RADIUS = 0.25


def logm(x, maxroots=64):
    """Principal matrix logarithm by inverse scaling and squaring.

    Square roots are taken until ``||X - I||_1 <= 0.25``; then ``log(I + Y)``
    is evaluated with a degree-10 diagonal Pade approximant and scaled back
    by ``2**s``.
    """
    x = _square(x)
    size = x.shape[0]
    eye = np.eye(size)
    roots = 0
    while np.linalg.norm(x - eye, 1) > _LOG_RADIUS:
        if roots >= maxroots:
            raise ConvergenceError("too many square roots in logm")
        x = sqrtm(x)
        roots += 1
    y = x - eye
    out = np.zeros_like(y)
    for node, weight in zip(_LOG_NODES, _LOG_WEIGHTS):
        out += weight * lu_solve(eye + node * y, y)
    return (2.0 ** roots) * out


def cay(x):
    """Cayley transform ``(I + X)(I - X)^{-1}``."""
    x = _square(x)
    eye = np.eye(x.shape[0])
    # (I + X) and (I - X)^{-1} commute
    return lu_solve(eye - x, eye + x, scale=1.0 + np.linalg.norm(x, np.inf))


def cay_inv(m):
    """Inverse Cayley transform ``(M - I)(I + M)^{-1}``."""
    m = _square(m)
    eye = np.eye(m.shape[0])
    return lu_solve(eye + m, m - eye, scale=1.0 + np.linalg.norm(m, np.inf))


def make_rng(seed):
    """Mersenne-Twister generator; identical seeds give identical streams."""
    return np.random.Generator(np.random.MT19937(seed))


def rand_hamiltonian(rng, n):
    """Random Hamiltonian ``[[A, B], [C, -A^T]]`` with symmetrized ``B, C``."""
    if n < 1:
        raise DimensionError("n must be positive")
    a = rng.standard_normal((n, n))
    b = rng.standard_normal((n, n))
    c = rng.standard_normal((n, n))
    b = (b + b.T) / 2
    c = (c + c.T) / 2
    return np.block([[a, b], [c, -a.T]])


def _e_columns(n, k):
    return np.r_[0:k, n:n + k]


def rand_stiefel_point(rng, n, k, scale="cay_one", retries=3):
    """Random point ``cay(Omega) E`` (or ``cay(Omega / 2) E``) with ``||Omega||_F = 1``."""
    if not 1 <= k <= n:
        raise DimensionError(f"need 1 <= k <= n, got n={n}, k={k}")
    factor = {"cay_one": 1.0, "cay_half": 0.5}[scale]
    cols = _e_columns(n, k)
    for attempt in range(retries + 1):
        omega = rand_hamiltonian(rng, n)
        omega *= factor / np.linalg.norm(omega)
        eye = np.eye(2 * n)
        rhs = omega[:, cols].copy()
        rhs[cols, np.arange(2 * k)] += 1.0
        try:
            return lu_solve(eye - omega, rhs, scale=1.0 + np.linalg.norm(omega, np.inf))
        except SingularityError:
            if attempt == retries:
                raise


def rand_stiefel_tangent(rng, u, horizontal=False):
    """Random unit-norm tangent ``U A + (I - U U^+) W`` at ``u``.

    With ``horizontal=True`` the ``U A`` part is dropped, so the result is
    horizontal for the projection onto symplectic subspaces.
    """
    from .sp_stiefel import StTangent

    u = np.asarray(u)
    k = u.shape[1] // 2
    if horizontal:
        a = np.zeros((2 * k, 2 * k))
    else:
        a = rand_hamiltonian(rng, k)
    w = rng.standard_normal(u.shape)
    h = w - u @ (symplectic_inverse(u) @ w)
    nrm = np.linalg.norm(u @ a + h)
    return StTangent.from_parts(u, a / nrm, h / nrm)


def spectral_norm(x, maxiter=50, tol=1e-8):
    """Largest singular value by power iteration on ``x^T x``."""
    x = np.asarray(x, dtype=float)
    v = np.ones(x.shape[1]) / np.sqrt(x.shape[1])
    sigma = 0.0
    for _ in range(maxiter):
        w = x.T @ (x @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        new = np.sqrt(nrm)
        if abs(new - sigma) <= tol * new:
            sigma = new
            break
        sigma = new
    return float(np.linalg.norm(x @ v))
