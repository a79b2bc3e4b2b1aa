"""Pointwise spin geometry on chart metrics.

Spinor fields are given by their components in the Cholesky orthonormal
frame of the metric (``g = L L^T``, frame ``E = L^{-T}`` with columns
``e_a``).  First derivatives come from jets; the second layer needed by
``D^2`` and the spinor Laplacian uses central differences with one
Richardson step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from . import jets
from .clifford import GammaRep, ParityCase, ProductSpinorSpace, gamma_rep, volume_element
from .errors import InvalidParameterError
from .fields import AnalyticSpinorField, ChartMetricField, SMMSSpec, WeightField
from .jetcalc import christoffel_from_jet, conformal_metric, curvature, warped_product_metric
from .jets import Jet2

FD_STEP = 1e-4


@dataclass(frozen=True)
class FramedPoint:
    """Orthonormal frame at ``x``: ``frame[..., i, a]`` is the i-th component of ``e_a``.

    ``frame_jets[..., i, a, k]`` is ``d_k`` of that component.
    """

    x: np.ndarray
    frame: np.ndarray
    frame_jets: np.ndarray
    metric: np.ndarray


def _frame_from_jet(g: np.ndarray, dg: np.ndarray):
    L = np.linalg.cholesky(g)
    Linv = np.linalg.inv(L)
    E = np.swapaxes(Linv, -1, -2)
    # L^{-1} dg L^{-T} = X + X^T with X = L^{-1} dL lower triangular
    S = np.einsum("...ia,...abk,...jb->...ijk", Linv, dg, Linv)
    n = g.shape[-1]
    mask = np.tril(np.ones((n, n))) - 0.5 * np.eye(n)
    X = S * mask[:, :, None]
    dL = np.einsum("...ia,...ajk->...ijk", L, X)
    # dE = -E dL^T E
    dE = -np.einsum("...ia,...bak,...bc->...ick", E, dL, E)
    return E, dE


def orthonormal_frame(metric: ChartMetricField, x) -> FramedPoint:
    """Cholesky frame and its first derivatives (deterministic lower-triangular convention)."""
    gj = metric.jet(x)
    E, dE = _frame_from_jet(gj.value, gj.jacobian())
    return FramedPoint(np.asarray(x, dtype=float), E, dE, gj.value)


@dataclass(frozen=True)
class _Geometry:
    g: np.ndarray
    gamma: np.ndarray      # Christoffel [k, i, j]
    E: np.ndarray
    dE: np.ndarray
    Omega: np.ndarray      # spin connection matrices [i, d, d] for coordinate directions


class SpinGeometry:
    """Spin connection and Dirac operator of ``metric`` acting through ``generators``.

    ``generators[a]`` is the Clifford action of the frame vector ``e_a``; by
    default the irreducible representation of the chart dimension.
    """

    def __init__(self, metric: ChartMetricField, generators: Optional[np.ndarray] = None):
        self.metric = metric
        if generators is None:
            generators = gamma_rep(metric.dim).gammas
        generators = np.asarray(generators)
        if generators.shape[0] != metric.dim:
            raise InvalidParameterError("one Clifford generator per frame vector is required")
        self.gens = generators
        self.pairs = np.einsum("jab,kbc->jkac", generators, generators)

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def spin_dim(self) -> int:
        return self.gens.shape[-1]

    def geometry(self, x) -> _Geometry:
        gj = self.metric.jet(x)
        g, dg = gj.value, gj.jacobian()
        gamma, _, _ = christoffel_from_jet(g, dg)
        E, dE = _frame_from_jet(g, dg)
        # omega[i, j, k] = g(nabla_i e_j, e_k)
        nabla_e = np.einsum("...pji->...ipj", dE) + np.einsum("...pil,...lj->...ipj", gamma, E)  # [i, p, j]
        omega = np.einsum("...lk,...lp,...ipj->...ijk", E, g, nabla_e)
        Omega = 0.25 * np.einsum("...ijk,jkab->...iab", omega, self.pairs)
        return _Geometry(g, gamma, E, dE, Omega)

    def clifford(self, v_frame) -> np.ndarray:
        return np.einsum("...a,abc->...bc", v_frame, self.gens)

    # -- first-order operators --------------------------------------------

    def covariant(self, geo: _Geometry, psi: np.ndarray, dpsi: np.ndarray) -> np.ndarray:
        """``nabla_{d_i} psi`` as ``[..., i, spin]`` from values and ``dpsi[..., spin, i]``."""
        return np.swapaxes(dpsi, -1, -2) + np.einsum("...iab,...b->...ia", geo.Omega, psi)

    def frame_covariant(self, geo: _Geometry, psi, dpsi) -> np.ndarray:
        """``nabla_{e_c} psi`` as ``[..., c, spin]``."""
        return np.einsum("...ic,...is->...cs", geo.E, self.covariant(geo, psi, dpsi))

    def dirac_from(self, geo: _Geometry, psi, dpsi) -> np.ndarray:
        return np.einsum("cst,...ct->...s", self.gens, self.frame_covariant(geo, psi, dpsi))

    def gradient_action(self, geo: _Geometry, df: np.ndarray, psi: np.ndarray) -> np.ndarray:
        """Clifford action of the gradient with coordinate differential ``df``."""
        comps = np.einsum("...ic,...i->...c", geo.E, df)
        return np.einsum("...st,...t->...s", self.clifford(comps), psi)

    def nabla(self, field: AnalyticSpinorField, x) -> np.ndarray:
        pj = field.jet(x)
        return self.covariant(self.geometry(x), pj.value, pj.jacobian())

    def dirac(self, field: AnalyticSpinorField, x) -> np.ndarray:
        pj = field.jet(x)
        return self.dirac_from(self.geometry(x), pj.value, pj.jacobian())

    def weighted_dirac(self, weight: WeightField, field: AnalyticSpinorField, x) -> np.ndarray:
        pj = field.jet(x)
        fj = weight.jet(x)
        geo = self.geometry(x)
        return self.dirac_from(geo, pj.value, pj.jacobian()) - 0.5 * self.gradient_action(geo, fj.jacobian(), pj.value)

    # -- second-order operators through nested differences ----------------

    def _derivative(self, fun: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float) -> np.ndarray:
        """Central differences with one Richardson step; derivative axis appended last."""
        n = x.shape[-1]
        eye = np.eye(n)

        def central(step):
            pts = x[..., None, None, :] + step * np.stack([eye, -eye], axis=0)  # [..., 2, n, n]
            vals = fun(pts)
            diff = (vals[..., 0, :, :] - vals[..., 1, :, :]) / (2.0 * step)  # [..., n, spin]
            return np.swapaxes(diff, -1, -2)

        return (4.0 * central(0.5 * h) - central(h)) / 3.0

    def dirac_squared(self, field: AnalyticSpinorField, x, h: float = FD_STEP) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        eta = self.dirac(field, x)
        deta = self._derivative(lambda p: self.dirac(field, p), x, h)
        return self.dirac_from(self.geometry(x), eta, deta)

    def laplacian(self, field: AnalyticSpinorField, x, h: float = FD_STEP) -> np.ndarray:
        """Spinor Laplacian ``tr nabla^2 = -nabla^* nabla``."""
        x = np.asarray(x, dtype=float)
        geo = self.geometry(x)
        pj = field.jet(x)

        def chi(p):
            q = field.jet(p)
            return self.frame_covariant(self.geometry(p), q.value, q.jacobian())  # [..., c, spin]

        n, d = self.dim, self.spin_dim
        chi0 = chi(x)
        dchi = self._derivative(lambda p: chi(p).reshape(p.shape[:-1] + (n * d,)), x, h)
        dchi = dchi.reshape(x.shape[:-1] + (n, d, n))  # [c, spin, k]
        nab_chi = np.swapaxes(dchi, -1, -2) + np.einsum("...kab,...cb->...cka", geo.Omega, chi0)  # [c, k, spin]
        first = np.einsum("...kc,...cks->...s", geo.E, nab_chi)
        # nabla_{e_c} e_c summed over c, as a coordinate vector
        div_e = np.einsum("...kc,...pck->...p", geo.E, geo.dE) + np.einsum("...pkq,...kc,...qc->...p",
                                                                           geo.gamma, geo.E, geo.E)
        second = np.einsum("...p,...ps->...s", div_e, self.covariant(geo, pj.value, pj.jacobian()))
        return first - second


def _geometry_for(metric: ChartMetricField, rep: Union[GammaRep, np.ndarray, None]) -> SpinGeometry:
    gens = rep.gammas if isinstance(rep, GammaRep) else rep
    return SpinGeometry(metric, gens)


def spin_covariant_derivative(metric: ChartMetricField, field: AnalyticSpinorField, x, Y,
                              rep: Optional[GammaRep] = None) -> np.ndarray:
    """``nabla_Y psi = d psi(Y) + (1/4) sum_jk g(nabla_Y e_j, e_k) e_j e_k psi``; ``Y`` in coordinates."""
    nab = _geometry_for(metric, rep).nabla(field, x)
    return np.einsum("...i,...is->...s", np.asarray(Y, dtype=float), nab)


def dirac_at_point(metric: ChartMetricField, field: AnalyticSpinorField, x,
                   rep: Optional[GammaRep] = None) -> np.ndarray:
    return _geometry_for(metric, rep).dirac(field, x)


def weighted_dirac_at_point(metric: ChartMetricField, weight: WeightField, field: AnalyticSpinorField, x,
                            rep: Optional[GammaRep] = None) -> np.ndarray:
    """``D psi - (1/2) grad f . psi``."""
    return _geometry_for(metric, rep).weighted_dirac(weight, field, x)


def lichnerowicz_pointwise_residual(metric: ChartMetricField, field: AnalyticSpinorField, x,
                                    h: float = FD_STEP) -> np.ndarray:
    """``|D^2 psi - (-Delta psi + R psi / 4)|`` at each point."""
    geo = SpinGeometry(metric)
    x = np.asarray(x, dtype=float)
    R = curvature(metric, x).scalar
    lhs = geo.dirac_squared(field, x, h)
    rhs = -geo.laplacian(field, x, h) + 0.25 * R[..., None] * field.value(x)
    return np.linalg.norm(lhs - rhs, axis=-1)


# -- O'Neill tensors -------------------------------------------------------

@dataclass(frozen=True)
class ONeillTensors:
    """``T`` and ``A`` of the projection onto the first ``n`` coordinates at one point.

    Vectors are coordinate vectors of the product chart; ``T(X, Y)`` returns a
    vector and ``T3(X, Y, Z)`` the pairing ``gbar(T(X, Y), Z)``.
    """

    n: int
    m: int
    christoffel: np.ndarray
    metric: np.ndarray

    def _split(self, v):
        v = np.asarray(v, dtype=float)
        h, w = v.copy(), v.copy()
        h[..., self.n:] = 0.0
        w[..., : self.n] = 0.0
        return h, w

    def _nabla(self, X, Y):
        return np.einsum("...kij,...i,...j->...k", self.christoffel, X, Y)

    def T(self, X, Y) -> np.ndarray:
        Xh, Xv = self._split(X)
        Yh, Yv = self._split(Y)
        return self._split(self._nabla(Xv, Yv))[0] + self._split(self._nabla(Xv, Yh))[1]

    def A(self, X, Y) -> np.ndarray:
        Xh, Xv = self._split(X)
        Yh, Yv = self._split(Y)
        return self._split(self._nabla(Xh, Yv))[0] + self._split(self._nabla(Xh, Yh))[1]

    def T3(self, X, Y, Z) -> float:
        return np.einsum("...i,...ij,...j->...", self.T(X, Y), self.metric, np.asarray(Z, dtype=float))

    def A3(self, X, Y, Z) -> float:
        return np.einsum("...i,...ij,...j->...", self.A(X, Y), self.metric, np.asarray(Z, dtype=float))


def oneill_tensors(product_metric: ChartMetricField, x) -> ONeillTensors:
    if product_metric.split is None:
        raise InvalidParameterError("O'Neill tensors need a metric with a declared (n, m) split")
    n, m = product_metric.split
    gj = product_metric.jet(np.asarray(x, dtype=float))
    g, dg = gj.value, gj.jacobian()
    if np.abs(g[..., :n, n:]).max(initial=0.0) > 1e-14 * np.abs(g).max():
        raise InvalidParameterError("the split must be g-orthogonal")
    gamma, _, _ = christoffel_from_jet(g, dg)
    return ONeillTensors(n, m, gamma, g)


# -- warped Dirac factorization ------------------------------------------------

@dataclass(frozen=True)
class FiberSpinor:
    """Fiber spinor ``nu(y) = exp(i k.y) nu0`` on a flat fiber (``k = 0`` gives a parallel spinor)."""

    nu0: np.ndarray
    k: Optional[np.ndarray] = None

    def wave(self, m: int) -> np.ndarray:
        return np.zeros(m) if self.k is None else np.asarray(self.k, dtype=float)

    def on(self, Y: Jet2) -> Jet2:
        k = self.wave(Y.shape[-1])
        phase = jets.dot_last(Y, k)
        c, s = jets.cos(phase), jets.sin(phase)
        e = c + 1j * s
        return e[..., None] * np.asarray(self.nu0, dtype=complex)

    def value(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.exp(1j * (y @ self.wave(y.shape[-1])))[..., None] * np.asarray(self.nu0, dtype=complex)

    def dirac(self, y, rep: GammaRep) -> np.ndarray:
        """Flat fiber Dirac operator in the coordinate frame: ``i gamma(k) nu``."""
        return np.einsum("st,...t->...s", 1j * rep.clifford(self.wave(rep.k)), self.value(y))


@dataclass(frozen=True)
class WarpedResiduals:
    r_conn_H: float
    r_conn_V: float
    r_dirac: float


def _product_field(space: ProductSpinorSpace, phi: AnalyticSpinorField, nu: FiberSpinor, n: int) -> AnalyticSpinorField:
    def fn(X):
        p = phi.on(X[..., :n])
        if p.shape[-1] != space.base_dim:
            p = jets.concatenate([p, p * 0.0], axis=-1)
        v = nu.on(X[..., n:])
        prod = p[..., :, None] * v[..., None, :]
        return prod.reshape(prod.shape[:-2] + (space.dim,))

    return AnalyticSpinorField(n + space.m, space.dim, fn, name="phi x nu")


def _check_warped(smms: SMMSSpec, fiber: ChartMetricField):
    m = smms.m
    if smms.is_weighted_manifold or m != int(m) or m < 1:
        raise InvalidParameterError("warped products need a positive integer m")
    if fiber.dim != int(m):
        raise InvalidParameterError("fiber dimension must equal m")
    if fiber.split is not None or not np.allclose(fiber.value(np.zeros(fiber.dim)), np.eye(fiber.dim)):
        raise InvalidParameterError("the warped Dirac check needs the flat coordinate fiber metric")


def warped_dirac_residual(smms: SMMSSpec, fiber: ChartMetricField, phi: AnalyticSpinorField,
                          nu: FiberSpinor, x) -> WarpedResiduals:
    """Compare the warped-product connection and Dirac operator with the factorized formulas.

    ``x`` holds product points ``(base, fiber)``.  ``phi`` has ``dim Sigma M``
    components, or twice that in the doubled case (both halves are used).
    """
    _check_warped(smms, fiber)
    n, m = smms.dim, int(smms.m)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[-1] != n + m:
        raise InvalidParameterError(f"product points must have {n + m} coordinates")
    base_x, fib_y = x[..., :n], x[..., n:]
    space = ProductSpinorSpace.build(n, m)
    if phi.components not in (space.plain_base_dim, space.base_dim) or np.shape(nu.nu0)[-1] != space.fiber_dim:
        raise InvalidParameterError("spinor factor sizes do not match the parity case")

    gbar = warped_product_metric(smms, fiber)
    total = SpinGeometry(gbar, space.unit_generators())
    psi = _product_field(space, phi, nu, n)
    nabla_bar = total.nabla(psi, x)          # coordinate directions [..., i, s]
    dirac_bar = total.dirac(psi, x)

    base = SpinGeometry(smms.metric)
    bgeo = base.geometry(base_x)
    fj = smms.weight.jet(base_x)
    f = fj.value
    df = fj.jacobian()
    d = space.plain_base_dim

    def halves(field):
        pj = field.jet(base_x)
        vals, jac = pj.value, pj.jacobian()
        if vals.shape[-1] == d:
            return [(vals, jac, 1.0)]
        out = [(vals[..., :d], jac[..., :d, :], 1.0), (vals[..., d:], jac[..., d:, :], -1.0)]
        return out

    parts = halves(phi)
    nab_phi = np.concatenate([base.covariant(bgeo, v, j) for v, j, _ in parts], axis=-1)   # [..., i, base]
    dfphi = np.concatenate([sgn * (base.dirac_from(bgeo, v, j) - 0.5 * base.gradient_action(bgeo, df, v))
                            for v, j, sgn in parts], axis=-1)
    phi_val = np.concatenate([v for v, _, _ in parts], axis=-1)
    if phi_val.shape[-1] != space.base_dim:
        zeros = np.zeros_like(phi_val)
        nab_phi = np.concatenate([nab_phi, np.zeros_like(nab_phi)], axis=-1)
        dfphi = np.concatenate([dfphi, zeros], axis=-1)
        phi_val = np.concatenate([phi_val, zeros], axis=-1)

    nu_val = nu.value(fib_y)
    dnu = 1j * nu.wave(m)[None, :, None] * nu_val[..., None, :]         # [..., j, fiber]
    outer = lambda a, b: np.einsum("...i,...j->...ij", a, b).reshape(a.shape[:-1] + (space.dim,))

    # horizontal: nabla_X psi = nabla_X phi x nu
    expect_H = np.stack([outer(nab_phi[..., i, :], nu_val) for i in range(n)], axis=-2)
    r_H = np.abs(nabla_bar[..., :n, :] - expect_H).max()

    # vertical along zeta_i = e^{f/m} d_{y_i}: phi x d nu(zeta_i) + (1/2m) zeta_i . grad f . psi
    scale = np.exp(f / m)
    vert = space.vertical_generators(scaled=False)
    psi_val = psi.value(x)
    grad_psi = np.einsum("...ic,...i->...c", bgeo.E, df)
    grad_mat = np.einsum("...c,cst->...st", grad_psi, space.horizontal_generators())
    r_V = 0.0
    for j in range(m):
        lhs = scale[..., None] * nabla_bar[..., n + j, :]
        rhs = outer(phi_val, scale[..., None] * dnu[..., j, :]) + (0.5 / m) * np.einsum(
            "st,...tu,...u->...s", vert[j], grad_mat, psi_val)
        r_V = max(r_V, np.abs(lhs - rhs).max())

    # Dirac operator
    frep = space.fiber_rep
    dfnu = nu.dirac(fib_y, frep)
    scale = scale[..., None]
    if space.case is ParityCase.N_EVEN:
        bar_phi = np.einsum("st,...t->...s", volume_element(gamma_rep(n)), phi_val)
        expect = outer(dfphi, nu_val) + outer(bar_phi, scale * dfnu)
    elif space.case is ParityCase.N_ODD_M_EVEN:
        bar_nu = np.einsum("st,...t->...s", volume_element(frep), nu_val)
        expect = outer(dfphi, bar_nu) + outer(phi_val, scale * dfnu)
    else:
        swapped = np.concatenate([phi_val[..., d:], phi_val[..., :d]], axis=-1)
        expect = outer(dfphi, nu_val) + outer(swapped, scale * dfnu)
    r_D = np.abs(dirac_bar - expect).max()
    return WarpedResiduals(float(r_H), float(r_V), float(r_D))


def gradient_norm_decomposition(smms: SMMSSpec, fiber: ChartMetricField, phi: AnalyticSpinorField,
                                nu0, x) -> float:
    """Max of ``| |nabla psi|^2 - |nabla phi|^2 - |grad f|^2 |phi|^2 / (4m) |`` for ``psi = phi x nu0``.

    ``nu0`` must be a unit constant spinor (parallel on the flat fiber).
    """
    _check_warped(smms, fiber)
    n, m = smms.dim, int(smms.m)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    space = ProductSpinorSpace.build(n, m)
    nu = FiberSpinor(np.asarray(nu0, dtype=complex))
    if not np.isclose(np.linalg.norm(nu.nu0), 1.0):
        raise InvalidParameterError("nu0 must have unit norm")
    gbar = warped_product_metric(smms, fiber)
    total = SpinGeometry(gbar, space.unit_generators())
    psi = _product_field(space, phi, nu, n)
    tg = total.geometry(x)
    pj = psi.jet(x)
    lhs = np.sum(np.abs(total.frame_covariant(tg, pj.value, pj.jacobian())) ** 2, axis=(-2, -1))

    base_x = x[..., :n]
    base = SpinGeometry(smms.metric)
    bgeo = base.geometry(base_x)
    qj = phi.jet(base_x)
    d = space.plain_base_dim
    vals, jac = qj.value, qj.jacobian()
    nab2 = 0.0
    for lo in range(0, vals.shape[-1], d):
        nab2 = nab2 + np.sum(np.abs(base.frame_covariant(bgeo, vals[..., lo:lo + d], jac[..., lo:lo + d, :])) ** 2,
                             axis=(-2, -1))
    fj = smms.weight.jet(base_x)
    ginv = np.linalg.inv(bgeo.g)
    grad2 = np.einsum("...ij,...i,...j->...", ginv, fj.jacobian(), fj.jacobian())
    rhs = nab2 + grad2 * np.sum(np.abs(vals) ** 2, axis=-1) / (4.0 * m)
    return float(np.abs(lhs - rhs).max())


def conformal_conjugation_residual(metric: ChartMetricField, weight: WeightField, phi: AnalyticSpinorField,
                                   x) -> np.ndarray:
    """``|D_f phi - e^{-f/(n-1)} D~ phi|`` per point.

    The Cholesky frame of ``e^{-2f/(n-1)} g`` is ``e^{f/(n-1)}`` times that of
    ``g``, so identifying components in the two frames is the spinor bundle
    isometry and ``phi`` is reused unchanged.
    """
    n = metric.dim
    x = np.asarray(x, dtype=float)
    lhs = SpinGeometry(metric).weighted_dirac(weight, phi, x)
    tilde = SpinGeometry(conformal_metric(metric, weight)).dirac(phi, x)
    rhs = np.exp(-weight.value(x) / (n - 1))[..., None] * tilde
    return np.linalg.norm(lhs - rhs, axis=-1)
