"""Smallest-magnitude eigenpairs of weighted self-adjoint grid operators.

For an operator ``A`` self-adjoint in the inner product with density ``W``,
the Hermitian pencil ``(A^* W A, W)`` has eigenvalues ``lambda^2``.  We run
block inverse iteration on that pencil with a small shift, solving each
step with a preconditioned conjugate-gradient method vectorized over the
block, and finish with a Rayleigh-Ritz projection of ``A`` itself so that
the eigenvalues come back with their signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import ConvergenceError, InvalidParameterError
from .operators import GridOperator


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues sorted by magnitude with per-pair residuals ``|A v - l v|_W / |v|_W``."""

    eigenvalues: np.ndarray
    residual_norms: np.ndarray
    vectors: Optional[np.ndarray] = field(default=None, repr=False)
    iterations: int = 0

    def kernel_dimension(self, tol: float = 1e-6) -> int:
        return int(np.sum(np.abs(self.eigenvalues) < tol))


def block_pcg(apply_H: Callable, rhs: np.ndarray, precond: Callable, x0: Optional[np.ndarray] = None,
              rtol: float = 1e-12, maxiter: int = 500):
    """Conjugate gradients for Hermitian positive ``H`` on every column of ``rhs`` at once.

    Vectors have the block index as their last axis; all reductions are per column.
    Returns ``(x, relative_residuals, iterations)``.
    """
    axes = tuple(range(rhs.ndim - 1))

    def dot(a, b):
        return np.sum(np.conj(a) * b, axis=axes)

    x = np.zeros_like(rhs) if x0 is None else x0.copy()
    r = rhs - apply_H(x) if x0 is not None else rhs.copy()
    bnorm = np.sqrt(np.maximum(dot(rhs, rhs).real, 1e-300))
    z = precond(r)
    p = z.copy()
    rz = dot(r, z)
    res = np.sqrt(dot(r, r).real) / bnorm
    it = 0
    while it < maxiter and np.any(res > rtol):
        Hp = apply_H(p)
        pHp = dot(p, Hp)
        active = res > rtol
        alpha = np.where(active, rz / np.where(pHp == 0, 1.0, pHp), 0.0)
        x = x + alpha * p
        r = r - alpha * Hp
        z = precond(r)
        rz_new = dot(r, z)
        beta = np.where(active, rz_new / np.where(rz == 0, 1.0, rz), 0.0)
        p = z + beta * p
        rz = rz_new
        res = np.sqrt(dot(r, r).real) / bnorm
        it += 1
    return x, res, it


def w_orthonormalize(X: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Columns made orthonormal for the density ``w`` (flattened layout ``(size, b)``)."""
    G = X.conj().T @ (w[:, None] * X)
    G = 0.5 * (G + G.conj().T)
    evals, evecs = np.linalg.eigh(G)
    keep = evals > evals.max() * 1e-14
    return X @ (evecs[:, keep] / np.sqrt(evals[keep]))


def _cluster_end(theta: np.ndarray, count: int, rel: float = 1e-2) -> int:
    """Smallest index ``>= count`` that does not split a cluster of ``theta``."""
    k = count
    while k < len(theta) and theta[k] - theta[k - 1] < rel * max(theta[k], 1e-8):
        k += 1
    return k


def _flat(op: GridOperator):
    shape = op.grid.shape + (op.components,)
    size = int(np.prod(shape))

    def to_grid(X):
        return X.reshape(shape + X.shape[1:])

    def to_flat(U):
        return U.reshape((size,) + U.shape[len(shape):])

    return shape, size, to_grid, to_flat


def dirac_spectrum(op: GridOperator, count: int, block: Optional[int] = None, seed: int = 0,
                   tol: float = 1e-9, maxiter: int = 300, shift: Optional[float] = None) -> EigenResult:
    """The ``count`` eigenvalues of smallest magnitude, with signs.

    ``block`` should exceed ``count`` by enough to contain every eigenvalue
    cluster that straddles position ``count``; the default is ``2 count + 20``.
    """
    if count < 1:
        raise InvalidParameterError("count must be positive")
    grid = op.grid
    shape, size, to_grid, to_flat = _flat(op)
    block = block or 2 * count + 20
    if block < count or block > size:
        raise InvalidParameterError("block size must lie between count and the number of unknowns")

    w = np.repeat(op.weight_or_one.reshape(-1), op.components)
    kmin2 = min((2 * np.pi / p) ** 2 for p in grid.periods)
    sigma = 1e-2 * kmin2 if shift is None else float(shift)
    ksq = grid.squared_wavenumbers(spinor=True)
    wmean = float(w.mean())
    symbol = grid.resolved_mask(spinor=True) / (op.stiffness * ksq + sigma * wmean)

    def A(X):
        return to_flat(op.apply(to_grid(X)))

    def P(X):
        return to_flat(grid.project(to_grid(X), spinor=True))

    def H(X):  # P (A^* W A + sigma W) P, Hermitian positive on the resolved modes
        AX = to_grid(A(X))
        return P(to_flat(op.apply_adjoint(w.reshape(shape)[..., None] * AX)) + sigma * w[:, None] * X)

    def precond(R):
        return to_flat(grid.apply_symbol(to_grid(R), symbol))

    rng = np.random.default_rng(seed)
    X = rng.normal(size=(size, block)) + 1j * rng.normal(size=(size, block))
    X = w_orthonormalize(P(X), w)

    history = None
    for it in range(1, maxiter + 1):
        Y, _, _ = block_pcg(H, P(w[:, None] * X), precond, x0=X, rtol=1e-12)
        # unresolved modes share the bottom of H's spectrum with the kernel; keep them out
        Y = w_orthonormalize(P(Y), w)
        AY = A(Y)
        T = AY.conj().T @ (w[:, None] * AY)
        theta, V = np.linalg.eigh(0.5 * (T + T.conj().T))
        X = Y @ V
        # signed Rayleigh-Ritz on A, restricted to whole clusters of theta so the
        # subspace is (nearly) A-invariant
        keep = _cluster_end(theta, count)
        Xk = X[:, :keep]
        AX = AY @ V[:, :keep]
        S = Xk.conj().T @ (w[:, None] * AX)
        lam, U = np.linalg.eigh(0.5 * (S + S.conj().T))
        order = np.argsort(np.abs(lam), kind="stable")
        lam, U = lam[order], U[:, order]
        Z = Xk @ U
        AZ = AX @ U
        R = AZ - Z * lam[None, :]
        res = np.sqrt(np.sum(w[:, None] * np.abs(R) ** 2, axis=0))
        history = (lam[:count], res[:count])
        if np.all(res[:count] < tol):
            vecs = to_grid(Z[:, :count])
            return EigenResult(lam[:count].copy(), res[:count].copy(), vecs, it)
    raise ConvergenceError(f"eigensolver did not converge in {maxiter} iterations", residuals=history[1])


def spectra_equal(D: GridOperator, D_f: GridOperator, count: int = 10, **kw):
    """Max difference of the first ``count`` eigenvalue magnitudes of two operators."""
    a = dirac_spectrum(D, count, **kw)
    b = dirac_spectrum(D_f, count, **kw)
    ma, mb = np.sort(np.abs(a.eigenvalues)), np.sort(np.abs(b.eigenvalues))
    return {
        "max_abs_difference": float(np.max(np.abs(ma - mb))),
        "magnitudes_D": ma.tolist(),
        "magnitudes_D_f": mb.tolist(),
        "max_residual": float(max(a.residual_norms.max(), b.residual_norms.max())),
    }


def smallest_generalized(apply_K: Callable, w: np.ndarray, precond: Callable, count: int = 1,
                         block: int = 8, shift: float = 0.0, project: Optional[Callable] = None,
                         seed: int = 0, tol: float = 1e-9, maxiter: int = 500, adaptive: bool = True):
    """Lowest eigenpairs of the real symmetric pencil ``K u = mu W u`` (``W = diag(w) > 0``).

    ``K + shift W`` must be positive definite; ``precond(r, shift)``
    approximates the inverse of ``K + shift W``.  Vectors are flat arrays of
    length ``w.size``.  With ``adaptive`` the shift is moved toward the
    lowest Ritz value once it is resolved, keeping a quarter of the first gap
    as safety margin.  Returns ``(mu, vectors, residuals, iterations)`` with
    residuals ``|K u - mu W u|_{W^-1} / |u|_W``.
    """
    size = w.size
    proj = project or (lambda X: X)
    block = max(block, count + 1)
    sigma = float(shift)

    def H(X):
        return proj(apply_K(X) + sigma * w[:, None] * X)

    rng = np.random.default_rng(seed)
    X = proj(rng.normal(size=(size, block)))
    X[:, 0] = 1.0  # constants are a good start for ground states
    X = w_orthonormalize(X, w)
    res = None
    for it in range(1, maxiter + 1):
        Y, _, _ = block_pcg(H, proj(w[:, None] * X), lambda r: precond(r, sigma), x0=X, rtol=1e-10)
        Y = w_orthonormalize(proj(Y).real, w)
        KY = apply_K(Y).real
        T = Y.T @ KY
        mu, V = np.linalg.eigh(0.5 * (T + T.T))
        X = Y @ V
        # the pencil lives on the projected space, so measure the residual there
        R = proj(KY @ V - w[:, None] * X * mu[None, :])
        res = np.sqrt(np.sum(R**2 / w[:, None], axis=0))
        if np.all(res[:count] < tol):
            return mu[:count], X[:, :count], res[:count], it
        if adaptive and res[count - 1] < 1e-2:
            sigma = max(-mu[count - 1] + 0.25 * (mu[count] - mu[count - 1]), -mu[0] + 1e-8)
    raise ConvergenceError(f"generalized eigensolver did not converge in {maxiter} iterations",
                           residuals=res[:count])
