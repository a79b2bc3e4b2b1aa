import numpy as np
import pytest

from smmslab import clifford as cl
from smmslab.catalog import (conformally_flat, stereographic_sphere, trig_random_metric, trig_random_spinor,
                             trig_random_weight)
from smmslab.errors import InvalidParameterError
from smmslab.fields import AnalyticSpinorField, ChartMetricField, SMMSSpec, WeightField, euclidean_metric, zero_weight
from smmslab.jetcalc import warped_product_metric
from smmslab.jets import Jet2
from smmslab.spinconn import (FiberSpinor, conformal_conjugation_residual, dirac_at_point,
                              gradient_norm_decomposition, lichnerowicz_pointwise_residual, oneill_tensors,
                              orthonormal_frame, spin_covariant_derivative, warped_dirac_residual,
                              weighted_dirac_at_point)
from smmslab import jets


def _plane_wave(n, k, psi0):
    k = np.asarray(k, dtype=float)
    psi0 = np.asarray(psi0, dtype=complex)

    def fn(X):
        ph = jets.dot_last(X, k)
        return (jets.cos(ph) + 1j * jets.sin(ph))[..., None] * psi0

    return AnalyticSpinorField(n, len(psi0), fn, name="plane-wave")


def test_flat_frame_is_identity():
    fp = orthonormal_frame(euclidean_metric(3), np.array([0.1, 0.2, 0.3]))
    assert np.array_equal(fp.frame, np.eye(3)) and np.all(fp.frame_jets == 0)


def test_conformal_frame():
    phi = lambda X: 0.3 * jets.sin(X[..., 0])
    conf = ChartMetricField(3, lambda X: jets.exp(2 * phi(X))[..., None, None] * np.eye(3))
    x = np.array([0.7, 0.0, 0.0])
    fp = orthonormal_frame(conf, x)
    assert np.allclose(fp.frame, np.exp(-0.3 * np.sin(0.7)) * np.eye(3))


def test_warped_frame_is_block_diagonal():
    f = trig_random_weight(2, seed=1)
    gbar = warped_product_metric(SMMSSpec(euclidean_metric(2), f, 2), euclidean_metric(2))
    X = np.array([0.4, -0.2, 1.0, 2.0])
    fp = orthonormal_frame(gbar, X)
    scale = np.exp(f.value(X[:2]) / 2)
    assert np.allclose(fp.frame, np.diag([1, 1, scale, scale]))


def test_flat_constant_spinor_is_parallel():
    psi = _plane_wave(3, [0, 0, 0], [1, 2j])
    x = np.random.default_rng(0).normal(size=(4, 3))
    assert np.allclose(dirac_at_point(euclidean_metric(3), psi, x), 0)
    assert np.allclose(weighted_dirac_at_point(euclidean_metric(3), zero_weight(), psi, x), 0)


def test_flat_plane_wave():
    k = np.array([1.0, -2.0, 0.5])
    psi0 = np.array([1.0, 1j])
    psi = _plane_wave(3, k, psi0)
    x = np.array([0.3, 0.1, -0.4])
    val = psi.value(x)
    for j in range(3):
        Y = np.eye(3)[j]
        assert np.allclose(spin_covariant_derivative(euclidean_metric(3), psi, x, Y), 1j * k[j] * val)
    rep = cl.gamma_rep(3)
    assert np.allclose(dirac_at_point(euclidean_metric(3), psi, x), 1j * rep.clifford(k) @ val)


@pytest.mark.parametrize("seed", [0, 1])
def test_metric_compatibility(seed):
    g = trig_random_metric(3, seed=seed, amplitude=0.5)
    a, b = trig_random_spinor(3, 2, seed=seed), trig_random_spinor(3, 2, seed=seed + 50)
    rng = np.random.default_rng(seed)
    x, Y = rng.normal(size=3), rng.normal(size=3)
    h = 1e-5
    ip = lambda p: np.vdot(a.value(p), b.value(p))
    lhs = (ip(x + h * Y) - ip(x - h * Y)) / (2 * h)
    rhs = (np.vdot(spin_covariant_derivative(g, a, x, Y), b.value(x))
           + np.vdot(a.value(x), spin_covariant_derivative(g, b, x, Y)))
    assert abs(lhs - rhs) < 1e-8


@pytest.mark.parametrize("metric", [stereographic_sphere(3), conformally_flat(3, [0.5]),
                                    trig_random_metric(3, seed=4, amplitude=0.5),
                                    trig_random_metric(4, seed=2, amplitude=0.4)])
def test_lichnerowicz_on_curved_metrics(metric):
    n = metric.dim
    psi = trig_random_spinor(n, cl.gamma_rep(n).dim, seed=3)
    x = np.random.default_rng(5).uniform(-1, 1, size=(5, n))
    assert lichnerowicz_pointwise_residual(metric, psi, x).max() < 1e-6


def test_oneill_tensors_product_and_warped():
    g = trig_random_metric(2, seed=0, amplitude=0.3)
    rng = np.random.default_rng(1)
    X = rng.normal(size=4)
    flat = oneill_tensors(warped_product_metric(SMMSSpec(g, zero_weight(), 2), euclidean_metric(2)), X)
    for a in range(4):
        for b in range(4):
            assert np.allclose(flat.T(np.eye(4)[a], np.eye(4)[b]), 0, atol=1e-14)
            assert np.allclose(flat.A(np.eye(4)[a], np.eye(4)[b]), 0, atol=1e-14)
    f = trig_random_weight(2, seed=2)
    m = 2
    gbar = warped_product_metric(SMMSSpec(g, f, m), euclidean_metric(m))
    ten = oneill_tensors(gbar, X)
    fp = orthonormal_frame(gbar, X)
    zeta = [fp.frame[:, 2 + i] for i in range(m)]
    xi = [fp.frame[:, a] for a in range(2)]
    grad = np.zeros(4)
    grad[:2] = np.linalg.solve(g.value(X[:2]), f.jet(X[:2]).jacobian())
    for i in range(m):
        for j in range(m):
            assert np.allclose(ten.T(zeta[i], zeta[j]), (i == j) * grad / m, atol=1e-8)
    for a in range(2):
        for i in range(m):
            assert np.allclose(ten.A(xi[a], zeta[i]), 0, atol=1e-8)
        for b in range(2):
            assert np.allclose(ten.A(xi[a], xi[b]), 0, atol=1e-8)


def test_oneill_requires_split():
    with pytest.raises(InvalidParameterError):
        oneill_tensors(euclidean_metric(4), np.zeros(4))


def test_warped_residual_constant_weight_parallel_fiber():
    smms = SMMSSpec(trig_random_metric(2, seed=1, amplitude=0.4),
                    WeightField(lambda X: Jet2.constant(np.full(X.shape[:-1], 0.3), X.nvars)), 2)
    phi = trig_random_spinor(2, 2, seed=1)
    x = np.random.default_rng(2).normal(size=(5, 4))
    res = warped_dirac_residual(smms, euclidean_metric(2), phi, FiberSpinor(np.array([1.0, 0.5j])), x)
    assert max(res.r_conn_H, res.r_conn_V, res.r_dirac) < 1e-8


@pytest.mark.parametrize("n,m", [(2, 2), (3, 2), (3, 1), (3, 3), (2, 1)])
def test_warped_factorization(n, m):
    smms = SMMSSpec(trig_random_metric(n, seed=n, amplitude=0.5), trig_random_weight(n, seed=m, amplitude=0.5), m)
    space = cl.ProductSpinorSpace.build(n, m)
    rng = np.random.default_rng(n + 10 * m)
    phi = trig_random_spinor(n, space.base_dim, seed=7)
    nu = FiberSpinor(rng.normal(size=space.fiber_dim) + 0j, rng.integers(-2, 3, size=m).astype(float))
    res = warped_dirac_residual(smms, euclidean_metric(m), phi, nu, rng.uniform(-2, 2, size=(20, n + m)))
    assert max(res.r_conn_H, res.r_conn_V, res.r_dirac) < 1e-6


def test_warped_doubled_case_with_embedded_spinor():
    smms = SMMSSpec(trig_random_metric(3, seed=3, amplitude=0.5), trig_random_weight(3, seed=3), 3)
    phi = trig_random_spinor(3, 2, seed=2)  # plain Sigma M spinor, embedded as phi + 0
    res = warped_dirac_residual(smms, euclidean_metric(3), phi, FiberSpinor(np.array([1.0, 1j])),
                                np.random.default_rng(0).normal(size=(20, 6)))
    assert res.r_dirac < 1e-6


def test_warped_parity_mismatch():
    smms = SMMSSpec(euclidean_metric(2), zero_weight(), 2)
    with pytest.raises(InvalidParameterError):
        warped_dirac_residual(smms, euclidean_metric(2), trig_random_spinor(2, 3), FiberSpinor(np.ones(2)),
                              np.zeros((1, 4)))
    with pytest.raises(InvalidParameterError):
        warped_dirac_residual(SMMSSpec(euclidean_metric(2), zero_weight()), euclidean_metric(2),
                              trig_random_spinor(2, 2), FiberSpinor(np.ones(2)), np.zeros((1, 4)))


@pytest.mark.parametrize("n,m", [(2, 2), (3, 1), (3, 2)])
def test_gradient_norm_decomposition(n, m):
    smms = SMMSSpec(trig_random_metric(n, seed=1, amplitude=0.4), trig_random_weight(n, seed=2), m)
    space = cl.ProductSpinorSpace.build(n, m)
    nu0 = np.zeros(space.fiber_dim, dtype=complex)
    nu0[-1] = 1.0
    phi = trig_random_spinor(n, space.plain_base_dim, seed=5)
    x = np.random.default_rng(1).normal(size=(20, n + m))
    assert gradient_norm_decomposition(smms, euclidean_metric(m), phi, nu0, x) < 1e-6
    with pytest.raises(InvalidParameterError):
        gradient_norm_decomposition(smms, euclidean_metric(m), phi, 2 * nu0, x)


def test_conformal_conjugation():
    g = euclidean_metric(3)
    phi = trig_random_spinor(3, 2, seed=4)
    x = np.random.default_rng(3).normal(size=(20, 3))
    assert np.all(conformal_conjugation_residual(g, zero_weight(), phi, x) == 0)
    assert conformal_conjugation_residual(g, trig_random_weight(3, seed=4), phi, x).max() < 1e-6
    c = WeightField(lambda X: Jet2.constant(np.full(X.shape[:-1], 0.7), X.nvars))
    assert conformal_conjugation_residual(trig_random_metric(3, seed=1, amplitude=0.3), c, phi, x).max() < 1e-10
