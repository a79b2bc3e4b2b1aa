"""Spectral Dirac-type operators on flat and conformally flat tori."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..clifford import gamma_rep
from ..errors import InvalidParameterError
from .grid import TorusGrid


def clifford_apply(grid: TorusGrid, gammas: np.ndarray, vec: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``gamma(vec) u`` pointwise; ``u`` has shape ``grid.shape + (d,) + batch``."""
    n = grid.n
    tmp = np.tensordot(gammas, u, axes=([2], [n]))            # (a, s) + grid + batch
    tmp = np.moveaxis(tmp, 1, n + 1)                           # (a,) + grid + (s,) + batch
    v = np.moveaxis(vec, -1, 0)                                # (a,) + grid
    v = v.reshape(v.shape + (1,) * (u.ndim - n))
    return np.sum(v * tmp, axis=0)


def gamma_apply(grid: TorusGrid, gamma: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.moveaxis(np.tensordot(gamma, u, axes=([1], [grid.n])), 0, grid.n)


def _expand(grid: TorusGrid, w: np.ndarray, u: np.ndarray) -> np.ndarray:
    return w.reshape(w.shape + (1,) * (u.ndim - grid.n))


@dataclass(frozen=True, eq=False)
class GridOperator:
    """Linear operator on grid spinor fields of shape ``grid.shape + (components,)``.

    ``apply_adjoint`` is the adjoint for the unweighted grid inner product;
    ``weight`` is the volume density in which the operator is self-adjoint
    (``None`` means the unweighted one).  ``stiffness`` is the mean coefficient
    ``c`` with ``A^* W A ~ -div(c grad)``, used only for preconditioning.
    """

    grid: TorusGrid
    components: int
    apply: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    apply_adjoint: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    weight: Optional[np.ndarray] = field(default=None, repr=False)
    stiffness: float = 1.0
    name: str = "operator"
    aliasing_flag: bool = False

    @property
    def self_adjoint_wrt(self) -> str:
        return "unweighted" if self.weight is None else "weighted"

    @property
    def weight_or_one(self) -> np.ndarray:
        return np.ones(self.grid.shape) if self.weight is None else self.weight

    def __call__(self, u):
        return self.apply(u)

    def inner(self, u, v) -> complex:
        return self.grid.inner(u, v, self.weight)

    def weighted_adjoint(self, u):
        """Adjoint in the weighted inner product, ``W^{-1} A^* W``."""
        if self.weight is None:
            return self.apply_adjoint(u)
        w = _expand(self.grid, self.weight, u)
        return self.apply_adjoint(w * u) / w


def _dirac_core(grid: TorusGrid, gammas: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``P D P u`` computed with a single transform pair."""
    U = grid.fft(u)
    mask = grid.resolved_mask(spinor=True)
    if not mask.all():
        U = U * grid.expand(mask, U)
    out = 0.0
    for j in range(grid.n):
        sym = np.broadcast_to(grid.axis_symbol(1j * grid.wavenumbers(j, spinor=True), j), grid.shape)
        out = out + gamma_apply(grid, gammas[j], U * grid.expand(sym, U))
    return grid.ifft(out)


def flat_dirac(grid: TorusGrid) -> GridOperator:
    """``D = sum gamma_j d_j`` with the grid's spin structure."""
    gammas = gamma_rep(grid.n).gammas

    def apply(u):
        return _dirac_core(grid, gammas, u)

    return GridOperator(grid, gammas.shape[-1], apply, apply, None, 1.0, "D")


def weighted_dirac(grid: TorusGrid, f: np.ndarray, guard: bool = True) -> GridOperator:
    """``D_f = D - grad f / 2``, self-adjoint for ``e^{-f} dx``."""
    f = np.asarray(f, dtype=float)
    if f.shape != grid.shape:
        raise InvalidParameterError("weight must be a scalar on the grid")
    flag = grid.check_band_limited(f, "weight") if guard else False
    gammas = gamma_rep(grid.n).gammas
    half_grad = 0.5 * grid.real_gradient(f)

    def apply(u):
        u = grid.project(u)
        return grid.project(_dirac_core(grid, gammas, u) - clifford_apply(grid, gammas, half_grad, u))

    def adjoint(u):
        return grid.project(_dirac_core(grid, gammas, u) + clifford_apply(grid, gammas, half_grad, grid.project(u)))

    w = np.exp(-f)
    return GridOperator(grid, gammas.shape[-1], apply, adjoint, w, float(w.mean()), "D_f", flag)


def curved_dirac(grid: TorusGrid, phi: np.ndarray, guard: bool = True) -> GridOperator:
    """Dirac operator of ``e^{2 phi} delta`` on frame components.

    Realized as ``e^{-phi} D_f`` with ``f = -(n-1) phi``; self-adjoint for
    the Riemannian volume ``e^{n phi} dx``.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != grid.shape:
        raise InvalidParameterError("conformal factor must be a scalar on the grid")
    n = grid.n
    base = weighted_dirac(grid, -(n - 1) * phi, guard)
    scale = np.exp(-phi)

    def apply(u):
        return grid.project(_expand(grid, scale, u) * base.apply(u))

    def adjoint(u):
        return base.apply_adjoint(_expand(grid, scale, u) * grid.project(u))

    w = np.exp(n * phi)
    return GridOperator(grid, base.components, apply, adjoint, w, float(np.exp((n - 2) * phi).mean()),
                        "D~", base.aliasing_flag)


def weighted_spinor_laplacian(grid: TorusGrid, f: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``Delta_f u = Delta u - nabla_{grad f} u`` on the flat torus."""
    grad = grid.real_gradient(f)
    du = np.stack([grid.derivative(u, j, spinor=True) for j in range(grid.n)], axis=0)
    drift = sum(_expand(grid, grad[..., j], u) * du[j] for j in range(grid.n))
    return grid.laplacian(u, spinor=True) - drift


def weighted_scalar_curvature_flat(grid: TorusGrid, f: np.ndarray) -> np.ndarray:
    """``R_f = 2 Delta f - |grad f|^2`` for the flat metric."""
    grad = grid.real_gradient(f)
    return 2.0 * grid.laplacian(f, spinor=False).real - np.sum(grad**2, axis=-1)


def lichnerowicz_residual(grid: TorusGrid, f: np.ndarray, psi: np.ndarray) -> float:
    """Max-norm of ``D_f^2 psi + Delta_f psi - R_f psi / 4`` on the flat torus."""
    op = weighted_dirac(grid, f)
    lhs = op.apply(op.apply(psi))
    rhs = -weighted_spinor_laplacian(grid, f, psi) + 0.25 * _expand(grid, weighted_scalar_curvature_flat(grid, f),
                                                                     psi) * psi
    return float(np.max(np.abs(lhs - rhs)))


def ricci_identity_residual(grid: TorusGrid, f: np.ndarray, psi: np.ndarray, X) -> float:
    """Max-norm of ``[D_f, d_X] psi - (Hess f X) . psi / 2`` for a constant vector ``X``."""
    X = np.asarray(X, dtype=float)
    if X.shape != (grid.n,):
        raise InvalidParameterError("X must be a constant vector with one entry per axis")
    op = weighted_dirac(grid, f)
    gammas = gamma_rep(grid.n).gammas

    def dX(u):
        return sum(X[j] * grid.derivative(u, j, spinor=True) for j in range(grid.n))

    comm = op.apply(dX(psi)) - dX(op.apply(psi))
    hx = np.einsum("...ij,j->...i", grid.hessian(f), X)
    return float(np.max(np.abs(comm - 0.5 * clifford_apply(grid, gammas, hx, psi))))
