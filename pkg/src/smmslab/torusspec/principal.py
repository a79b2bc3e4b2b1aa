"""Principal eigenvalues of conformal-Laplacian-type operators on conformally flat tori.

The metric is ``g = e^{2 phi} delta`` on a grid torus.  For ``c > 0`` the
operator ``L_c = -c Delta_g + R_g`` is discretized in weak form,

    K_c u = c sum_j d_j^* (e^{(n-2) phi} d_j u) + W R u,   W = e^{n phi},

so that its eigenvalues are those of the symmetric pencil ``(K_c, W)``.
With ``c = 4m/(m+1)`` the lowest eigenvalue is ``mu_m`` and its positive
eigenfunction ``u`` yields ``f = -(2m/(m+1)) log u`` with ``R^m_f = mu_m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .. import jets
from ..errors import ConvergenceError, InvalidParameterError, PreconditionError
from ..fields import WeightField, euclidean_metric
from ..jetcalc import conformal_metric, curvature
from .eigen import block_pcg, dirac_spectrum, smallest_generalized
from .grid import TorusGrid, random_band_limited
from .operators import curved_dirac

PhiLike = Union[np.ndarray, WeightField]


def conformal_factor_field(n: int, phi: WeightField):
    """``e^{2 phi} delta`` as a chart metric (the weight ``-(n-1) phi`` in :func:`conformal_metric`)."""
    w = WeightField(lambda X: phi.on(X) * (-(n - 1.0)), name=f"-(n-1)*{phi.name}")
    return conformal_metric(euclidean_metric(n), w)


def sin_phi(amplitude: float = 0.3, axis: int = 0, freq: int = 1) -> WeightField:
    """``a sin(k x_axis)``, a closed-form conformal exponent."""
    return WeightField(lambda X: jets.sin(X[..., axis] * float(freq)) * amplitude,
                       name=f"{amplitude}*sin({freq}x{axis + 1})")


@dataclass(frozen=True, eq=False)
class ConformalTorus:
    """Grid data for ``e^{2 phi} delta``: exponent, scalar curvature, volume density."""

    grid: TorusGrid
    phi: np.ndarray = field(repr=False)
    R: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, grid: TorusGrid, phi: PhiLike, curvature_source: str = "auto") -> "ConformalTorus":
        """Sample ``phi`` and compute ``R``.

        With a closed-form ``phi`` the curvature comes from the jet calculus at
        the grid points; with grid values it is computed spectrally.
        """
        if isinstance(phi, WeightField):
            values = np.asarray(grid.sample(phi), dtype=float)
            if curvature_source in ("auto", "jet"):
                pts = grid.coordinates().reshape(-1, grid.n)
                R = curvature(conformal_factor_field(grid.n, phi), pts).scalar.reshape(grid.shape)
                return cls(grid, values, R)
        else:
            values = np.asarray(phi, dtype=float)
            if curvature_source == "jet":
                raise InvalidParameterError("jet curvature needs a closed-form exponent")
        if values.shape != grid.shape:
            raise InvalidParameterError("conformal exponent must be a scalar on the grid")
        grid.check_band_limited(values, "conformal exponent")
        return cls(grid, values, spectral_scalar_curvature(grid, values))

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def density(self) -> np.ndarray:
        return np.exp(self.n * self.phi)

    @property
    def stiffness(self) -> np.ndarray:
        return np.exp((self.n - 2) * self.phi)

    @property
    def volume(self) -> float:
        return self.grid.integrate(self.density)

    def integral(self, u) -> float:
        return self.grid.integrate(self.density * u)

    def mean(self, u) -> float:
        return self.integral(u) / self.volume

    def project(self, u):
        g = self.grid
        return g.irfft(g.rfft(u) * g.expand(g.real_resolved_mask(), u))

    def stiffness_form(self, u, potential: Optional[np.ndarray] = None):
        """``sum_j d_j^* (e^{(n-2) phi} d_j u)`` (equal to ``-W Delta_g u``), plus ``P(potential u)``.

        Works on real fields with trailing batch axes, using real transforms.
        """
        g = self.grid
        mask = g.expand(g.real_resolved_mask(), u)
        s = g.expand(self.stiffness, u)
        U = g.rfft(u) * mask
        out = 0.0
        for k in g.real_symbol_axes():
            ik = g.expand(np.broadcast_to(1j * k, mask.shape[: g.n]), u)
            out = out + np.conj(ik) * g.rfft(s * g.irfft(ik * U))
        if potential is not None:
            out = out + g.rfft(g.expand(potential, u) * u)
        return g.irfft(out * mask)

    def laplacian(self, f):
        return -self.stiffness_form(f) / self.density

    def grad_norm2(self, f):
        grad = self.grid.real_gradient(f)
        return np.exp(-2.0 * self.phi) * np.sum(grad**2, axis=-1)

    def weighted_scalar_curvature(self, f, m: float):
        """``R^m_f = R + 2 Delta_g f - ((m+1)/m) |grad f|^2_g`` on the grid."""
        coef = 1.0 if math.isinf(m) else (m + 1.0) / m
        return self.R + 2.0 * self.laplacian(f) - coef * self.grad_norm2(f)


def spectral_scalar_curvature(grid: TorusGrid, phi: np.ndarray) -> np.ndarray:
    """``R = e^{-2 phi} (-2(n-1) Delta phi - (n-2)(n-1) |d phi|^2)`` for ``e^{2 phi} delta``."""
    n = grid.n
    lap = grid.laplacian(phi, spinor=False).real
    grad2 = np.sum(grid.real_gradient(phi) ** 2, axis=-1)
    return np.exp(-2.0 * phi) * (-2.0 * (n - 1) * lap - (n - 2) * (n - 1) * grad2)


def m_coefficient(m: float) -> float:
    """``4m/(m+1)``, the Laplacian coefficient attached to ``m`` (``4`` for ``m = inf``)."""
    if m == 0 or m == -1:
        raise InvalidParameterError(f"m = {m} is excluded")
    if math.isinf(m):
        return 4.0
    return 4.0 * m / (m + 1.0)


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray = field(repr=False)
    residual: float
    iterations: int


def lowest_eigenpair(ct: ConformalTorus, c: float, potential_sign: float = 1.0, tol: float = 1e-9,
                     seed: int = 0, maxiter: int = 500) -> EigenPair:
    """Lowest eigenpair of ``-c Delta_g + s R`` (``c > 0``, ``s = potential_sign``) in ``L^2(dVol_g)``."""
    if c <= 0:
        raise InvalidParameterError("the Laplacian coefficient must be positive")
    grid = ct.grid
    w = ct.density.reshape(-1)
    V = potential_sign * ct.R
    shift = 1.0 - float(V.min())

    def to_grid(X):
        return X.reshape(grid.shape + X.shape[1:])

    def to_flat(U):
        return U.reshape((grid.size,) + U.shape[grid.n:])

    def apply_K(X):
        U = to_grid(X)
        return to_flat(ct.stiffness_form(U, ct.density * V / c) * c)

    def project(X):
        return to_flat(ct.project(to_grid(X)))

    ksq = grid.squared_wavenumbers(spinor=False)
    mask = grid.resolved_mask(spinor=False)
    stiff, wmean, wv = c * float(ct.stiffness.mean()), float(ct.density.mean()), float(np.mean(ct.density * V))

    def precond(Rr, sigma):
        symbol = mask / (stiff * ksq + max(wv + sigma * wmean, 1e-3 * wmean))
        return to_flat(grid.apply_symbol(to_grid(Rr), symbol).real)

    mu, X, res, it = smallest_generalized(apply_K, w, precond, count=1, shift=shift, project=project,
                                          seed=seed, tol=tol, maxiter=maxiter)
    return EigenPair(float(mu[0]), to_grid(X[:, 0]), float(res[0]), it)


def lambda1(ct: ConformalTorus, c: float, **kw) -> float:
    """``lambda_1(-c Delta_g + R)``."""
    return lowest_eigenpair(ct, c, **kw).value


def yamabe_coefficient(n: int) -> float:
    """``4(n-1)/(n-2)``, the conformal Laplacian coefficient."""
    if n < 3:
        raise InvalidParameterError("the conformal Laplacian needs n >= 3")
    return 4.0 * (n - 1) / (n - 2)


@dataclass(frozen=True)
class PrincipalResult:
    """``mu_m`` with its eigenfunction ``u > 0`` and weight ``f_m``.

    ``curvature_defect`` is ``max |R^m_{f_m} - mu_m|`` over the grid.
    """

    m: float
    mu: float
    u: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    residual: float
    curvature_defect: float
    iterations: int


def principal_eigenvalue(grid: TorusGrid, phi: PhiLike, m: float, tol: float = 1e-9, seed: int = 0,
                         positivity_tol: float = 1e-8, ct: Optional[ConformalTorus] = None) -> PrincipalResult:
    """``mu_m``, the principal eigenvalue of ``-(4m/(m+1)) Delta_g + R``.

    For ``m`` in ``(-1, 0)`` the coefficient is negative and the principal
    eigenvalue is the top of the spectrum; it is found as minus the lowest
    eigenvalue of ``-L``.
    """
    c = m_coefficient(m)
    ct = ct or ConformalTorus.build(grid, phi)
    if c > 0:
        pair = lowest_eigenpair(ct, c, 1.0, tol=tol, seed=seed)
        mu = pair.value
    else:
        pair = lowest_eigenpair(ct, -c, -1.0, tol=tol, seed=seed)
        mu = -pair.value
    u = pair.vector
    u = u if u.sum() >= 0 else -u
    u = u / np.max(u)
    if u.min() <= positivity_tol:
        raise ConvergenceError(f"principal eigenfunction changes sign (min {u.min():.3e})",
                               residuals=np.array([pair.residual]))
    f = -(2.0 * m / (m + 1.0)) * np.log(u) if not math.isinf(m) else -2.0 * np.log(u)
    f = f - ct.mean(f)
    defect = float(np.max(np.abs(ct.weighted_scalar_curvature(f, m) - mu)))
    return PrincipalResult(float(m), mu, u, f, pair.residual, defect, pair.iterations)


def mu_sweep(grid: TorusGrid, phi: PhiLike, m_values: Sequence[float], **kw) -> list:
    ct = ConformalTorus.build(grid, phi)
    return [principal_eigenvalue(grid, phi, m, ct=ct, **kw) for m in m_values]


def is_monotone(values: Sequence[float], slack: float = 1e-10) -> bool:
    """Nondecreasing up to ``slack``."""
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) >= -slack))


@dataclass(frozen=True)
class NegativeMResult:
    f: np.ndarray = field(repr=False)
    mean_R: float = 0.0
    rows: tuple = ()
    solver_residual: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r["passed"] for r in self.rows)


def negative_m_weight(grid: TorusGrid, phi: PhiLike, m_values: Sequence[float] = (-1.0, -0.5, -0.1),
                      slack: float = 1e-3, tol: float = 1e-12, maxiter: int = 2000) -> NegativeMResult:
    """Weight with ``R^m_f >= mean(R)`` for ``m`` in ``[-1, 0)``.

    Solves ``Delta_g f = -(R - mean R)/2`` by conjugate gradients in
    ``L^2(dVol_g)``, fixes the gauge ``mean_g f = 0`` and reports
    ``min R^m_f`` against ``mean R`` for each ``m``.
    """
    for m in m_values:
        if not (-1.0 <= m < 0.0):
            raise InvalidParameterError(f"m = {m} is outside [-1, 0)")
    ct = ConformalTorus.build(grid, phi)
    total = ct.integral(ct.R)
    if not total > 1e-12 * ct.volume:
        raise PreconditionError(f"total scalar curvature must be positive (got {total:.3e})")
    mean_R = total / ct.volume
    u = 0.5 * (ct.R - mean_R)
    rhs = ct.project(ct.density * u).reshape(-1, 1)
    mask = grid.resolved_mask(spinor=False)
    ksq = grid.squared_wavenumbers(spinor=False)
    symbol = np.where(mask & (ksq > 0), 1.0 / (float(ct.stiffness.mean()) * np.where(ksq > 0, ksq, 1.0)), 0.0)

    def apply(X):
        return ct.stiffness_form(X.reshape(grid.shape + (X.shape[1],))).reshape(X.shape)

    def precond(Rr):
        return grid.apply_symbol(Rr.reshape(grid.shape + (Rr.shape[1],)), symbol).real.reshape(Rr.shape)

    sol, res, it = block_pcg(apply, rhs, precond, rtol=tol, maxiter=maxiter)
    if res.max() > 1e3 * tol:
        raise ConvergenceError("Poisson solve did not converge", residuals=res)
    f = sol[:, 0].reshape(grid.shape)
    f = f - ct.mean(f)
    rows = []
    for m in m_values:
        Rm = ct.weighted_scalar_curvature(f, m)
        lo = float(Rm.min())
        rows.append({"m": float(m), "min_R_m_f": lo, "mean_R": mean_R, "slack": lo - mean_R,
                     "tolerance": slack, "passed": bool(lo >= mean_R - slack)})
    return NegativeMResult(f, mean_R, tuple(rows), float(res.max()))


@dataclass(frozen=True)
class InterpolationReport:
    """Rows ``(m, mu_m, n mu_m/(4(n-1)), lambda_1(D~)^2, slack)`` plus sampled-weight rows."""

    n: int
    lambda1_dirac: float
    rows: tuple
    weight_rows: tuple
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        return all(r["passed"] for r in self.rows + self.weight_rows)


def _coarsen(grid: TorusGrid, values: np.ndarray, N: int):
    """Fourier-truncate a band-limited scalar onto a coarser grid with the same spin structure."""
    if N >= grid.N:
        return grid, values
    coarse = TorusGrid(grid.n, N, grid.periods, grid.phases)
    F = grid.fft(values)
    keep = [np.r_[0:N // 2, grid.N - N // 2:grid.N] for _ in range(grid.n)]
    G = F[np.ix_(*keep)] * (N / grid.N) ** grid.n
    return coarse, coarse.ifft(G).real


def interpolation_report(grid: TorusGrid, phi: PhiLike, m_list: Sequence[float],
                         natural_m: Sequence[int] = (1, 2, 3), weight_seeds: Sequence[int] = (0, 1, 2),
                         tolerance: float = 1e-6, dirac_N: Optional[int] = 16, seed: int = 0,
                         known_mu: Optional[dict] = None) -> InterpolationReport:
    """Check ``lambda_1(D~)^2 >= n mu_m / (4(n-1))`` along ``m_list``.

    Also evaluates ``(n+m)/(4(n+m-1)) min R^m_f`` for natural ``m`` and a few
    sampled periodic weights, which must not exceed ``lambda_1(D~)^2``.
    ``lambda_1(D~)`` is computed on a grid of ``dirac_N`` points per axis
    (``phi`` is Fourier-truncated, which is exact for band-limited data).
    ``known_mu`` maps ``m`` to already computed ``mu_m`` values.
    """
    n = grid.n
    ct = ConformalTorus.build(grid, phi)
    dgrid, dphi = _coarsen(grid, ct.phi, dirac_N or grid.N)
    spec = dirac_spectrum(curved_dirac(dgrid, dphi), count=1, seed=seed, tol=1e-8)
    lam2 = float(spec.eigenvalues[0] ** 2)
    notes = []
    rows = []
    for m in m_list:
        if 1 - n <= m <= 0:
            notes.append(f"m = {m} skipped: inside [1-n, 0]")
            continue
        mu = (known_mu or {}).get(m)
        if mu is None:
            mu = principal_eigenvalue(grid, phi, m, ct=ct, seed=seed).mu
        bound = n / (4.0 * (n - 1)) * mu
        rows.append({"m": float(m), "mu_m": mu, "bound": bound, "lambda1_sq": lam2,
                     "slack": lam2 - bound, "tolerance": tolerance, "passed": bool(lam2 - bound >= -tolerance)})
    weight_rows = []
    for s in weight_seeds:
        fw = 0.5 * random_band_limited(grid, None, kmax=2, seed=s, complex_valued=False)
        for m in natural_m:
            lo = float(ct.weighted_scalar_curvature(fw, m).min())
            value = (n + m) / (4.0 * (n + m - 1)) * lo
            weight_rows.append({"m": int(m), "weight_seed": int(s), "min_R_m_f": lo, "bound": value,
                                "lambda1_sq": lam2, "slack": lam2 - value, "tolerance": tolerance,
                                "passed": bool(lam2 - value >= -tolerance)})
    return InterpolationReport(n, float(abs(spec.eigenvalues[0])), tuple(rows), tuple(weight_rows), tuple(notes))
