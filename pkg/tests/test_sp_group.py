import numpy as np
import pytest

from conftest import central_diff, dense_j, rand_sp, rel_err
from sympman import matfun as mf
from sympman import sp_group as sg
from sympman.errors import DimensionError, StructureError


@pytest.fixture
def point(rng):
    return rand_sp(rng, 5, scale=1.0)


def rand_tangent(rng, m, scale=1.0):
    om = mf.rand_hamiltonian(rng, m.shape[0] // 2)
    return sg.GroupTangent.from_algebra(m, scale * om / np.linalg.norm(om))


def test_check_symplectic(point):
    assert sg.check_symplectic(point) is not None
    with pytest.raises(StructureError):
        sg.check_symplectic(2 * point)
    with pytest.raises(DimensionError):
        sg.check_symplectic(np.ones((4, 2)))


def test_tangent_validation(point, rng):
    x = rand_tangent(rng, point).mat
    sg.GroupTangent.at(point, x)
    with pytest.raises(StructureError):
        sg.GroupTangent.at(point, point @ np.eye(10))


def test_metric_h_isotropic_direction(point):
    b = np.diag(np.arange(1.0, 6.0))
    om = np.block([[np.zeros((5, 5)), b], [np.zeros((5, 5)), np.zeros((5, 5))]])
    x = sg.GroupTangent.from_algebra(point, om)
    assert abs(sg.metric_h(x, x)) <= 1e-12


def test_metric_h_poisson_direction(point):
    x = sg.GroupTangent.from_algebra(point, dense_j(5))
    assert sg.metric_h(x, x) == pytest.approx(5.0, rel=1e-12)


def test_metric_h_bilinear_and_indefinite(point, rng):
    x1, x2 = rand_tangent(rng, point), rand_tangent(rng, point)
    scaled = sg.GroupTangent(point, 3.0 * x1.mat)
    assert sg.metric_h(scaled, x2) == pytest.approx(3.0 * sg.metric_h(x1, x2), rel=1e-12)
    assert sg.metric_h(x1, x2) == pytest.approx(sg.metric_h(x2, x1), rel=1e-12)
    # diag(1,-1) blocks give a negative value, J gives a positive one
    neg = sg.GroupTangent.from_algebra(point, np.diag(np.r_[np.ones(5), -np.ones(5)]))
    assert sg.metric_h(neg, neg) < 0


def test_metric_base_mismatch(point, rng):
    x1 = rand_tangent(rng, point)
    x2 = rand_tangent(rng, rand_sp(rng, 5))
    with pytest.raises(ValueError):
        sg.metric_h(x1, x2)
    with pytest.raises(ValueError):
        sg.metric_g(x1, x2)


def test_metric_g_definition_and_identity_base(point, rng):
    x = rand_tangent(rng, point)
    w = x.mat @ np.linalg.inv(point)
    assert sg.metric_g(x, x) == pytest.approx(0.5 * np.linalg.norm(w) ** 2, rel=1e-10)
    om = mf.rand_hamiltonian(rng, 5)
    xi = sg.GroupTangent(np.eye(10), om)
    assert sg.metric_g(xi, xi) == pytest.approx(0.5 * np.linalg.norm(om) ** 2, rel=1e-14)


def test_metric_g_right_invariant(point, rng):
    x1, x2 = rand_tangent(rng, point), rand_tangent(rng, point)
    n = rand_sp(rng, 5)
    y1 = sg.GroupTangent(point @ n, x1.mat @ n)
    y2 = sg.GroupTangent(point @ n, x2.mat @ n)
    assert abs(sg.metric_g(y1, y2) - sg.metric_g(x1, x2)) <= 1e-10 * (1 + abs(sg.metric_g(x1, x2)))


@pytest.mark.parametrize("curve", [sg.exp_h, sg.exp_g])
def test_curves_start_and_velocity(point, rng, curve):
    x = rand_tangent(rng, point)
    x = sg.GroupTangent(point, x.mat / np.linalg.norm(x.mat))
    assert np.linalg.norm(curve(point, x, 0.0) - point) <= 1e-12
    v = central_diff(lambda t: curve(point, x, t))
    assert rel_err(v, x.mat) <= 1e-6


@pytest.mark.parametrize("curve", [sg.exp_h, sg.exp_g])
def test_curves_stay_symplectic(rng, curve):
    m = rand_sp(rng, 20, scale=0.5)
    x = rand_tangent(rng, m)
    for t in (0.5, 2.0, 5.0):
        assert mf.feasibility(curve(m, x, t)) <= 1e-9


def test_exp_h_one_parameter_subgroup(point, rng):
    x = rand_tangent(rng, point)
    s, t = 0.3, 0.7
    mid = sg.exp_h(point, x, s)
    x_mid = sg.GroupTangent.from_algebra(mid, x.omega())
    assert np.linalg.norm(sg.exp_h(mid, x_mid, t) - sg.exp_h(point, x, s + t)) <= 1e-10


def test_exp_g_symmetric_generator(point, rng):
    s = rng.standard_normal((5, 5))
    s = s + s.T
    # symmetric Hamiltonian W: [[A, B], [B, -A]] with symmetric A, B
    a = rng.standard_normal((5, 5))
    a = a + a.T
    w = 0.2 * np.block([[a, s], [s, -a]])
    x = sg.GroupTangent(point, w @ point)
    expect = mf.expm(0.7 * w) @ point
    assert np.linalg.norm(sg.exp_g(point, x, 0.7) - expect) <= 1e-10 * np.linalg.norm(expect)


def test_grad_g_zero_and_tangent(point, rng):
    assert np.array_equal(sg.grad_g(point, np.zeros((10, 10))).mat, np.zeros((10, 10)))
    g = sg.grad_g(point, rng.standard_normal((10, 10)))
    sg.GroupTangent.at(point, g.mat)


def test_grad_g_metric_compatibility(point, rng):
    egrad = rng.standard_normal((10, 10))
    g = sg.grad_g(point, egrad)
    for _ in range(20):
        x = rand_tangent(rng, point)
        lhs = sg.metric_g(g, x)
        rhs = float(np.sum(egrad * x.mat))
        assert abs(lhs - rhs) <= 1e-8 * abs(rhs)


def test_grad_g_matches_directional_derivative(point, rng):
    a = rng.standard_normal((10, 10))

    def f(m):
        return float(np.sum((m - a) ** 2))

    g = sg.grad_g(point, 2 * (point - a))
    for _ in range(3):
        x = rand_tangent(rng, point)
        eps = 1e-6
        slope = (f(sg.exp_g(point, x, eps)) - f(sg.exp_g(point, x, -eps))) / (2 * eps)
        assert abs(slope - sg.metric_g(g, x)) <= 1e-5 * abs(slope)


def test_metric_g_positive(point, rng):
    for _ in range(10):
        x = rand_tangent(rng, point)
        w = x.mat @ mf.symplectic_inverse(point)
        assert sg.metric_g(x, x) >= 1e-12 * np.linalg.norm(w) ** 2
