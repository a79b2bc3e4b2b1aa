import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smmslab import jets
from smmslab.jets import Jet2

from oracles import fd_derivative


def _f(X):
    x, y, z = X[..., 0], X[..., 1], X[..., 2]
    return jets.exp(x * y) * jets.sin(z) + (1.0 + x * x) ** -1.5 / (2.0 + jets.cos(y)) + jets.sqrt(3.0 + z * z)


def _f_plain(p):
    x, y, z = p
    return np.exp(x * y) * np.sin(z) + (1 + x * x) ** -1.5 / (2 + np.cos(y)) + np.sqrt(3 + z * z)


def test_variables_seed_identity():
    X = Jet2.variables(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert X.jacobian().shape == (2, 2, 2)
    assert np.array_equal(X.jacobian()[0], np.eye(2))
    assert np.all(X.hessian() == 0)


def test_constant_has_no_derivatives():
    c = Jet2.constant(3.0, 4)
    assert c.nvars == 4 and np.all(c.grad == 0)


@pytest.mark.parametrize("x", [[0.1, 0.2, 0.3], [-0.7, 1.1, 2.0]])
def test_composite_matches_finite_differences(x):
    x = np.array(x)
    fj = _f(Jet2.variables(x))
    assert fj.value == pytest.approx(_f_plain(x), rel=1e-14)
    assert np.allclose(fj.jacobian(), fd_derivative(_f_plain, x, 1e-3), atol=1e-9)
    hess_fd = fd_derivative(lambda p: fd_derivative(_f_plain, p, 1e-3), x, 1e-3)
    assert np.allclose(fj.hessian(), hess_fd, atol=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.5, 3))
def test_product_and_quotient_rules(a, b, c):
    X = Jet2.variables(np.array([a, b, c]))
    u = jets.sin(X[..., 0]) + X[..., 2]
    v = jets.exp(X[..., 1]) + 1.0
    lhs = (u * v) / v
    assert np.allclose(lhs.grad, u.grad, atol=1e-12)
    assert np.allclose(lhs.hess, u.hess, atol=1e-11)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 5), st.floats(-3, 3))
def test_power_matches_exp_log(r, p):
    X = Jet2.variables(np.array([r]))
    a = X[..., 0] ** p
    b = jets.exp(p * jets.log(X[..., 0]))
    assert np.allclose(a.grad, b.grad, rtol=1e-12, atol=1e-12)
    assert np.allclose(a.hess, b.hess, rtol=1e-11, atol=1e-11)


def test_block_diag_and_stack():
    X = Jet2.variables(np.array([0.3, 0.4]))
    a = jets.stack([jets.stack([X[..., 0], X[..., 1]]), jets.stack([X[..., 1], X[..., 0]])], axis=-2)
    b = Jet2.constant(np.eye(1), 2)
    d = jets.block_diag(a, b)
    assert d.shape == (3, 3)
    assert np.allclose(d.value, [[0.3, 0.4, 0], [0.4, 0.3, 0], [0, 0, 1]])
    assert np.all(d.grad[:, 2, :] == 0)


def test_norm_squared_hessian_is_twice_identity():
    X = Jet2.variables(np.random.default_rng(0).normal(size=(5, 3)))
    r2 = jets.norm_squared(X)
    assert np.allclose(r2.hessian(), 2.0 * np.eye(3))
