"""Pointwise curvature of chart metrics, weighted and conformal variants, warped products."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import jets
from .errors import InvalidParameterError
from .fields import ChartMetricField, SMMSSpec, WeightField
from .sphere import SphereGrid


@dataclass(frozen=True)
class CurvaturePack:
    """Levi-Civita data at one point or a batch of points.

    ``christoffel[..., k, i, j]`` is Gamma^k_ij; ``metric`` and ``inverse`` are
    carried along because every weighted quantity needs them.
    """

    christoffel: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray
    metric: np.ndarray
    inverse: np.ndarray


@dataclass(frozen=True)
class WeightedCurvatures:
    R_f: np.ndarray
    R_m_f: np.ndarray
    Ric_f: np.ndarray
    Ric_m_f: np.ndarray


def christoffel_from_jet(g: np.ndarray, dg: np.ndarray):
    """Christoffel symbols from ``g[..., i, j]`` and ``dg[..., i, j, k] = d_k g_ij``.

    Returns ``(gamma, first_kind, ginv)`` with ``first_kind[..., l, i, j] = Gamma_{l,ij}``.
    """
    ginv = np.linalg.inv(g)
    # Gamma_{l,ij} = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    first = 0.5 * (np.einsum("...jli->...lij", dg) + np.einsum("...ilj->...lij", dg) - np.einsum("...ijl->...lij", dg))
    gamma = np.einsum("...kl,...lij->...kij", ginv, first)
    return gamma, first, ginv


def curvature_from_jet(gj: jets.Jet2) -> CurvaturePack:
    g = gj.value
    dg = gj.jacobian()          # [..., i, j, k] = d_k g_ij
    d2g = gj.hessian()          # [..., i, j, k, l] = d_k d_l g_ij
    gamma, first, ginv = christoffel_from_jet(g, dg)
    # d_m Gamma_{l,ij}
    dfirst = 0.5 * (np.einsum("...jlim->...lijm", d2g) + np.einsum("...iljm->...lijm", d2g)
                    - np.einsum("...ijlm->...lijm", d2g))
    dginv = -np.einsum("...ka,...abm,...bl->...klm", ginv, dg, ginv)
    dgamma = np.einsum("...klm,...lij->...kijm", dginv, first) + np.einsum("...kl,...lijm->...kijm", ginv, dfirst)
    ricci = (np.einsum("...kijk->...ij", dgamma) - np.einsum("...kikj->...ij", dgamma)
             + np.einsum("...kkl,...lij->...ij", gamma, gamma) - np.einsum("...kjl,...lik->...ij", gamma, gamma))
    ricci = 0.5 * (ricci + np.swapaxes(ricci, -1, -2))
    scalar = np.einsum("...ij,...ij->...", ginv, ricci)
    return CurvaturePack(gamma, ricci, scalar, g, ginv)


def curvature(metric: ChartMetricField, x) -> CurvaturePack:
    """Christoffel symbols, Ricci tensor and scalar curvature at ``x`` (batched over leading axes)."""
    return curvature_from_jet(metric.jet(x))


def weight_derivatives(pack: CurvaturePack, fj: jets.Jet2):
    """Covariant Hessian, Laplacian and squared gradient norm of a weight jet."""
    df = fj.jacobian()
    hess = fj.hessian() - np.einsum("...kij,...k->...ij", pack.christoffel, df)
    lap = np.einsum("...ij,...ij->...", pack.inverse, hess)
    grad2 = np.einsum("...ij,...i,...j->...", pack.inverse, df, df)
    return df, hess, lap, grad2


def weighted_curvatures(smms: SMMSSpec, x) -> WeightedCurvatures:
    """Bakry-Emery curvatures ``R_f, R^m_f, Ric_f, Ric^m_f`` at ``x``."""
    pack = curvature(smms.metric, x)
    fj = smms.weight.jet(x)
    df, hess, lap, grad2 = weight_derivatives(pack, fj)
    R_f = pack.scalar + 2.0 * lap - grad2
    Ric_f = pack.ricci + hess
    if smms.is_weighted_manifold:
        return WeightedCurvatures(R_f, R_f.copy(), Ric_f, Ric_f.copy())
    m = float(smms.m)
    R_m_f = pack.scalar + 2.0 * lap - (m + 1.0) / m * grad2
    Ric_m_f = Ric_f - np.einsum("...i,...j->...ij", df, df) / m
    return WeightedCurvatures(R_f, R_m_f, Ric_f, Ric_m_f)


def conformal_metric(metric: ChartMetricField, weight: WeightField) -> ChartMetricField:
    """The metric ``exp(-2f/(n-1)) g``."""
    n = metric.dim
    if n < 2:
        raise InvalidParameterError("conformal_metric needs n >= 2")
    c = -2.0 / (n - 1)

    def fn(X):
        factor = jets.exp(weight.on(X) * c)
        return factor[..., None, None] * metric.on(X)

    return ChartMetricField(n, fn, name=f"conformal({metric.name},{weight.name})", split=metric.split)


def warped_product_metric(base: SMMSSpec, fiber: ChartMetricField) -> ChartMetricField:
    """The metric ``g + exp(-2f/m) h`` on the product chart (base coordinates first)."""
    m = base.m
    if math.isinf(m) or m != int(m) or m < 1:
        raise InvalidParameterError(f"warped products need a positive integer m, got {m}")
    m = int(m)
    if fiber.dim != m:
        raise InvalidParameterError(f"fiber dimension {fiber.dim} does not match m = {m}")
    n = base.metric.dim

    def fn(X):
        x, y = X[..., :n], X[..., n:]
        scale = jets.exp(base.weight.on(x) * (-2.0 / m))
        return jets.block_diag(base.metric.on(x), scale[..., None, None] * fiber.on(y))

    return ChartMetricField(n + m, fn, name=f"warped({base.metric.name},{base.weight.name},{m})", split=(n, m))


@dataclass(frozen=True)
class DecayReport:
    """Fitted decay orders; ``None`` means no decaying part was detected."""

    tau_g: Optional[float]
    tau_f: Optional[float]
    radii: tuple
    sup_g: tuple
    sup_f: tuple


def _fit_order(radii: np.ndarray, sups: np.ndarray, floor: float = 1e-14) -> Optional[float]:
    if np.all(sups <= floor):
        return None
    mask = sups > floor
    if mask.sum() < 2:
        return None
    slope = np.polyfit(np.log(radii[mask]), np.log(sups[mask]), 1)[0]
    return float(-slope)


def decay_diagnostics(metric: ChartMetricField, weight: WeightField, radii: Sequence[float],
                      resolution: int = 8) -> DecayReport:
    """Log-log slopes of ``sup |g - delta|`` and ``sup |f|`` over coordinate spheres."""
    radii = np.asarray(radii, dtype=float)
    if radii.size < 3:
        raise InvalidParameterError("decay_diagnostics needs at least 3 radii")
    if np.any(np.diff(radii) <= 0):
        raise InvalidParameterError("radii must be strictly increasing")
    n = metric.dim
    sup_g, sup_f = [], []
    for rho in radii:
        nodes = SphereGrid.build(n, rho, resolution).nodes
        sup_g.append(float(np.max(np.abs(metric.value(nodes) - np.eye(n)))))
        sup_f.append(float(np.max(np.abs(weight.value(nodes)))))
    sup_g, sup_f = np.array(sup_g), np.array(sup_f)
    return DecayReport(_fit_order(radii, sup_g), _fit_order(radii, sup_f), tuple(radii), tuple(sup_g), tuple(sup_f))
