import math
import warnings

import numpy as np
import pytest

from smmslab import clifford as cl
from smmslab.errors import ConvergenceError, InvalidParameterError, PreconditionError
from smmslab.torusspec import eigen, operators as ops, principal as tp
from smmslab.torusspec.grid import TorusGrid, random_band_limited, trig_field
from smmslab.torusspec.io import read_grid_field, write_grid_field


# -- grid --------------------------------------------------------------------------

def test_grid_validation():
    with pytest.raises(InvalidParameterError):
        TorusGrid(2, 7)
    with pytest.raises(InvalidParameterError):
        TorusGrid(2, 16, phases=(0.25, 0.0))


def test_spectral_derivative_is_exact_for_trig_polynomials():
    grid = TorusGrid.build(2, 16)
    x = grid.coordinates()
    u = np.sin(2 * x[..., 0]) * np.cos(3 * x[..., 1])
    du = grid.derivative(u, 1, spinor=False).real
    assert np.allclose(du, -3 * np.sin(2 * x[..., 0]) * np.sin(3 * x[..., 1]), atol=1e-12)
    lap = grid.laplacian(u, spinor=False).real
    assert np.allclose(lap, -13 * u, atol=1e-11)


def test_antiperiodic_wavenumbers_are_shifted():
    grid = TorusGrid.build(1, 8, antiperiodic=True)
    assert np.allclose(np.sort(np.abs(grid.wavenumbers(0))), [0.5, 0.5, 1.5, 1.5, 2.5, 2.5, 3.5, 3.5])
    assert grid.resolved_mask().all()
    assert grid.resolved_mask(spinor=False).sum() == 7


def test_integrate_and_inner():
    grid = TorusGrid.build(3, 8)
    assert grid.integrate(np.ones(grid.shape)) == pytest.approx((2 * np.pi) ** 3)
    u = random_band_limited(grid, 2, kmax=2, seed=0)
    assert grid.inner(u, u).real > 0 and abs(grid.inner(u, u).imag) < 1e-12


def test_band_limit_check():
    grid = TorusGrid.build(1, 16)
    x = grid.coordinates()[..., 0]
    assert grid.tail_fraction(np.sin(x)) < 1e-20
    with pytest.raises(PreconditionError):
        grid.check_band_limited(x, "ramp")


def test_io_roundtrip(tmp_path):
    grid = TorusGrid.build(2, 8, antiperiodic=True)
    u = random_band_limited(grid, 2, kmax=2, seed=3)
    path = tmp_path / "u.grid"
    write_grid_field(path, grid, u)
    g2, back = read_grid_field(path)
    assert g2 == grid and np.array_equal(back, u)
    f = trig_field(grid, [(0.3, [1, 0], 0.0)])
    write_grid_field(path, grid, f)
    assert np.array_equal(read_grid_field(path)[1], f)
    with pytest.raises(InvalidParameterError):
        write_grid_field(path, grid, np.zeros((4, 4)))


# -- operators ----------------------------------------------------------------------

def test_flat_dirac_kills_constants_and_acts_on_plane_waves():
    grid = TorusGrid.build(2, 16)
    D = ops.flat_dirac(grid)
    assert np.allclose(D(np.ones(grid.shape + (2,), dtype=complex)), 0)
    x = grid.coordinates()
    k = np.array([2.0, -1.0])
    psi0 = np.array([1.0, 0.5j])
    psi = np.exp(1j * (x @ k))[..., None] * psi0
    gam = cl.gamma_rep(2).clifford(k)
    assert np.allclose(D(psi), (1j * gam @ psi0) * np.exp(1j * (x @ k))[..., None], atol=1e-12)
    assert np.allclose(np.sort(np.linalg.eigvals(1j * gam).real), [-math.sqrt(5), math.sqrt(5)])


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("anti", [False, True])
def test_weighted_identities(n, anti):
    grid = TorusGrid.build(n, 16, antiperiodic=anti)
    e1, e2 = [1] + [0] * (n - 1), [0, 1] + [0] * (n - 2)
    f = trig_field(grid, [(0.3, e1, 0.0), (0.2, e2, math.pi / 2)])
    psi = random_band_limited(grid, cl.gamma_rep(n).dim, kmax=3, seed=1)
    assert ops.lichnerowicz_residual(grid, np.zeros(grid.shape), psi) < 1e-10
    assert ops.lichnerowicz_residual(grid, f, psi) < 1e-8
    assert ops.ricci_identity_residual(grid, np.zeros(grid.shape), psi, np.eye(n)[0]) < 1e-10
    assert ops.ricci_identity_residual(grid, f, psi, np.arange(1.0, n + 1)) < 1e-8


def test_weighted_dirac_self_adjoint():
    # the density e^{-f} is not band-limited, so N must resolve its tail
    grid = TorusGrid.build(2, 32)
    f = 0.4 * random_band_limited(grid, None, kmax=2, seed=2, complex_valued=False)
    D = ops.weighted_dirac(grid, f)
    u = random_band_limited(grid, 2, kmax=3, seed=3)
    v = random_band_limited(grid, 2, kmax=3, seed=4)
    assert abs(D.inner(D(u), v) - D.inner(u, D(v))) < 1e-12
    assert D.self_adjoint_wrt == "weighted"


def test_ramp_weight_rejected():
    grid = TorusGrid.build(2, 16)
    with pytest.raises(PreconditionError):
        ops.weighted_dirac(grid, grid.coordinates()[..., 0])
    with pytest.raises(InvalidParameterError):
        ops.ricci_identity_residual(grid, np.zeros(grid.shape), np.zeros(grid.shape + (2,)), [1.0])


# -- spectra --------------------------------------------------------------------------

def test_flat_periodic_kernel():
    grid = TorusGrid.build(2, 16)
    res = eigen.dirac_spectrum(ops.flat_dirac(grid), 6, tol=1e-8)
    assert res.kernel_dimension() == 2
    assert np.allclose(np.sort(np.abs(res.eigenvalues)), [0, 0, 1, 1, 1, 1], atol=1e-8)


def test_antiperiodic_lowest_eigenvalue():
    grid = TorusGrid.build(2, 16, antiperiodic=True)
    res = eigen.dirac_spectrum(ops.flat_dirac(grid), 4, tol=1e-8)
    assert np.abs(res.eigenvalues).min() == pytest.approx(math.sqrt(2) / 2, abs=1e-8)
    assert res.kernel_dimension() == 0


def test_zero_weight_spectra_identical():
    grid = TorusGrid.build(2, 16, antiperiodic=True)
    rep = eigen.spectra_equal(ops.flat_dirac(grid), ops.weighted_dirac(grid, np.zeros(grid.shape)), 4, tol=1e-8)
    assert rep["max_abs_difference"] < 1e-12


@pytest.mark.slow
def test_weighted_spectrum_equals_flat():
    grid = TorusGrid.build(2, 32, antiperiodic=True)
    f = trig_field(grid, [(0.5, [1, 0], 0.3), (0.3, [1, 1], 1.0)])
    rep = eigen.spectra_equal(ops.flat_dirac(grid), ops.weighted_dirac(grid, f), 10, tol=1e-8)
    assert rep["max_abs_difference"] < 1e-6


def test_homothety():
    grid = TorusGrid.build(2, 16, antiperiodic=True)
    a = eigen.dirac_spectrum(ops.flat_dirac(grid), 4, tol=1e-8)
    b = eigen.dirac_spectrum(ops.curved_dirac(grid, np.full(grid.shape, 0.4)), 4, tol=1e-8)
    assert np.allclose(np.sort(np.abs(b.eigenvalues)), math.exp(-0.4) * np.sort(np.abs(a.eigenvalues)), atol=1e-8)


def test_curved_kernel_preserved():
    grid = TorusGrid.build(2, 32)
    phi = 0.3 * random_band_limited(grid, None, kmax=2, seed=100, complex_valued=False)
    res = eigen.dirac_spectrum(ops.curved_dirac(grid, phi), 4, tol=1e-8)
    assert res.kernel_dimension() == 2


def test_eigensolver_reports_nonconvergence():
    grid = TorusGrid.build(2, 16)
    with pytest.raises(ConvergenceError) as info:
        eigen.dirac_spectrum(ops.flat_dirac(grid), 4, tol=1e-30, maxiter=2)
    assert info.value.residuals is not None


def test_block_pcg_solves_spd_system():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(20, 20))
    A = A @ A.T + 20 * np.eye(20)
    B = rng.normal(size=(20, 3))
    x, res, _ = eigen.block_pcg(lambda X: A @ X, B, lambda R: R, rtol=1e-13)
    assert np.allclose(A @ x, B, atol=1e-10) and res.max() <= 1e-13


# -- principal eigenvalues -------------------------------------------------------------

def test_m_coefficient():
    assert tp.m_coefficient(1) == 2.0 and tp.m_coefficient(math.inf) == 4.0
    assert tp.m_coefficient(-3) == 6.0 and tp.m_coefficient(-0.5) == -4.0
    for bad in (0, -1):
        with pytest.raises(InvalidParameterError):
            tp.m_coefficient(bad)


def test_spectral_curvature_matches_jet_curvature():
    grid = TorusGrid.build(3, 16)
    ct_jet = tp.ConformalTorus.build(grid, tp.sin_phi(0.3))
    ct_spec = tp.ConformalTorus.build(grid, ct_jet.phi)
    assert np.allclose(ct_jet.R, ct_spec.R, atol=1e-10)
    # integral of R is (n-1)(n-2) times the integral of e^{(n-2) phi} |grad phi|^2
    x = grid.coordinates()[..., 0]
    expect = 2 * grid.integrate(np.exp(0.3 * np.sin(x)) * (0.3 * np.cos(x)) ** 2)
    assert ct_jet.integral(ct_jet.R) == pytest.approx(expect, rel=1e-10)


def test_flat_torus_mu_is_zero():
    grid = TorusGrid.build(3, 8)
    for m in (2.0, -5.0, math.inf):
        r = tp.principal_eigenvalue(grid, np.zeros(grid.shape), m)
        assert abs(r.mu) < 1e-10 and np.ptp(r.f) < 1e-8


def test_principal_weight_has_constant_curvature():
    # e^{-f} is not band-limited; N = 16 leaves a pointwise defect near 1e-5
    grid = TorusGrid.build(3, 32)
    ct = tp.ConformalTorus.build(grid, tp.sin_phi(0.3))
    r = tp.principal_eigenvalue(grid, None, 2.0, ct=ct)
    assert r.curvature_defect < 1e-6 and abs(ct.mean(r.f)) < 1e-12
    assert r.mu < tp.lambda1(ct, 4.0) < 0


def test_mu_monotone_on_small_grid():
    grid = TorusGrid.build(3, 16)
    sweep = tp.mu_sweep(grid, tp.sin_phi(0.3), [-5.0, -2.5, 2.0, 10.0])
    assert tp.is_monotone([r.mu for r in sweep[:2]]) and tp.is_monotone([r.mu for r in sweep[2:]])


def test_negative_m_requires_positive_total_curvature():
    with pytest.raises(PreconditionError):
        tp.negative_m_weight(TorusGrid.build(3, 8), np.zeros((8, 8, 8)))
    with pytest.raises(InvalidParameterError):
        tp.negative_m_weight(TorusGrid.build(3, 8), tp.sin_phi(), m_values=(-2.0,))


def test_negative_m_construction_small_grid():
    res = tp.negative_m_weight(TorusGrid.build(3, 16), tp.sin_phi(0.3))
    assert res.passed and res.mean_R > 0
    assert all(r["min_R_m_f"] >= r["mean_R"] - 1e-3 for r in res.rows)


def test_interpolation_report_flat_t2():
    grid = TorusGrid.build(2, 16)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = tp.interpolation_report(grid, np.zeros(grid.shape), [2.0, 5.0], weight_seeds=(), dirac_N=16)
    assert rep.lambda1_dirac < 1e-8
    assert all(abs(r["slack"]) < 1e-10 for r in rep.rows)
