import numpy as np
import pytest

from sympman import matfun as mf

#: lines reported by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return mf.make_rng(20240611)


def dense_j(p):
    """Explicit Poisson matrix, built independently of the package."""
    j = np.zeros((2 * p, 2 * p))
    j[:p, p:] = np.eye(p)
    j[p:, :p] = -np.eye(p)
    return j


def dense_splus(a):
    """``J^T A^T J`` with explicit J matrices."""
    return dense_j(a.shape[1] // 2).T @ a.T @ dense_j(a.shape[0] // 2)


def rand_sp(rng, k, scale=0.5):
    """Random element of Sp(2k) as ``expm`` of a scaled Hamiltonian matrix."""
    om = mf.rand_hamiltonian(rng, k)
    return mf.expm(scale * om / np.linalg.norm(om))


def central_diff(curve, eps=1e-5):
    return (curve(eps) - curve(-eps)) / (2 * eps)


def rel_err(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), np.finfo(float).tiny))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
