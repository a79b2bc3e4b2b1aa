"""Flux integrals at infinity: ADM, weighted and warped-product masses.

Each per-radius integral is a product Gauss rule on a coordinate sphere fed
with exact first jets of the fields; the limit ``rho -> inf`` is taken by
fitting ``c0 + c1 rho^{-p}`` to the tail of a geometric radius schedule.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import InvalidParameterError
from .fields import ChartMetricField, SMMSSpec, WeightField, euclidean_metric
from .jetcalc import warped_product_metric, weighted_curvatures
from .sphere import SphereGrid


@dataclass(frozen=True)
class RadiusSchedule:
    """Geometric radii with the angular resolution used on every sphere."""

    radii: tuple
    nodes_per_sphere: int = 16

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if len(radii) < 3:
            raise InvalidParameterError("a radius schedule needs at least 3 radii")
        if any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] <= 0:
            raise InvalidParameterError("radii must be positive and strictly increasing")
        ratios = np.array(radii[1:]) / np.array(radii[:-1])
        if np.ptp(ratios) > 1e-9 * ratios.mean():
            raise InvalidParameterError("radii must form a geometric progression")
        if self.nodes_per_sphere < 2:
            raise InvalidParameterError("nodes_per_sphere must be at least 2")

    @classmethod
    def geometric(cls, start: float, ratio: float, count: int, nodes_per_sphere: int = 16) -> "RadiusSchedule":
        return cls(tuple(start * ratio**k for k in range(count)), nodes_per_sphere)

    @property
    def ratio(self) -> float:
        return self.radii[1] / self.radii[0]

    def as_dict(self) -> dict:
        return {"radii": list(self.radii), "nodes_per_sphere": self.nodes_per_sphere}


@dataclass(frozen=True)
class MassEstimate:
    """Per-radius flux integrals and their extrapolated limit.

    ``extrapolants[k]`` is the limit predicted from radii ``0..k`` (``nan`` for
    the first two), which is what the CSV export plots against radius.
    """

    per_radius: tuple
    limit: float
    error_estimate: float
    extrapolants: tuple = ()
    order: Optional[float] = None
    schedule: Optional[RadiusSchedule] = field(default=None, compare=False)

    @property
    def radii(self) -> np.ndarray:
        return np.array([r for r, _ in self.per_radius])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.per_radius])

    def agrees_with(self, other: "MassEstimate", rel: float = 0.0) -> bool:
        tol = self.error_estimate + other.error_estimate + rel * max(abs(self.limit), abs(other.limit))
        return abs(self.limit - other.limit) <= tol

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["radius", "integral", "extrapolant"])
        ext = self.extrapolants or (math.nan,) * len(self.per_radius)
        for (r, v), e in zip(self.per_radius, ext):
            w.writerow([repr(r), repr(v), repr(e)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "limit": self.limit,
            "error_estimate": self.error_estimate,
            "order": self.order,
            "schedule": self.schedule.as_dict() if self.schedule else None,
            "per_radius": [[r, v] for r, v in self.per_radius],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _tail_limit(values: np.ndarray, ratio: float, scale: float):
    """Limit from the last three values; returns ``(limit, order)`` or ``None`` if no fit."""
    d1, d2 = values[-2] - values[-3], values[-1] - values[-2]
    if abs(d1) <= 1e-14 * scale or abs(d2) <= 1e-14 * scale:
        return None
    q = d2 / d1
    if not 0.0 < q < 1.0:
        return None
    return values[-1] + d2 * q / (1.0 - q), -math.log(q) / math.log(ratio)


def extrapolate(radii: Sequence[float], values: Sequence[float], quadrature_delta: float = 0.0):
    """Fit ``c0 + c1 rho^{-p}`` on the last three geometric radii.

    Returns ``(limit, error_estimate, extrapolants, order)``.  The error is the
    change against the fit one radius earlier plus the quadrature delta; when
    the tail is not monotone and contracting, the last value is returned with
    the spread of the last three values as its error.
    """
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    ratio = radii[1] / radii[0]
    scale = max(float(np.max(np.abs(values))), 1e-300)
    floor = 1e-12 * scale + abs(quadrature_delta)

    extrapolants = [math.nan, math.nan]
    for k in range(3, len(values) + 1):
        fit = _tail_limit(values[:k], ratio, scale)
        extrapolants.append(fit[0] if fit else float(values[k - 1]))

    spread = float(np.ptp(values[-3:]))
    fit = _tail_limit(values, ratio, scale)
    if fit is None:
        return float(values[-1]), spread + floor, tuple(extrapolants[: len(values)]), None
    limit, order = fit
    prev = _tail_limit(values[:-1], ratio, scale) if len(values) >= 4 else None
    change = abs(limit - prev[0]) if prev else abs(limit - values[-1])
    return float(limit), float(change + floor), tuple(extrapolants[: len(values)]), float(order)


def _per_radius(integrand, dim: int, schedule: RadiusSchedule, resolution: Optional[int] = None):
    k = resolution or schedule.nodes_per_sphere
    out = []
    for rho in schedule.radii:
        grid = SphereGrid.build(dim, rho, k)
        out.append(grid.integrate(integrand(grid.nodes, grid.normals)))
    return np.array(out)


def _estimate(integrand, dim: int, schedule: RadiusSchedule) -> MassEstimate:
    values = _per_radius(integrand, dim, schedule)
    coarse_k = max(schedule.nodes_per_sphere // 2, 1)
    last = SphereGrid.build(dim, schedule.radii[-1], coarse_k)
    delta = abs(last.integrate(integrand(last.nodes, last.normals)) - values[-1])
    limit, err, ext, order = extrapolate(schedule.radii, values, delta)
    return MassEstimate(tuple(zip(schedule.radii, values.tolist())), limit, err, ext, order, schedule)


def _check_dim(dim: int) -> None:
    if dim < 3:
        raise InvalidParameterError("mass integrals need n >= 3")


def adm_flux(metric: ChartMetricField, nodes: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Pointwise ``sum_ij (d_i g_ij - d_j g_ii) n_j``."""
    dg = metric.jet(nodes).jacobian()
    div = np.einsum("...iji->...j", dg) - np.einsum("...iij->...j", dg)
    return np.einsum("...j,...j->...", div, normals)


def weight_flux(weight: WeightField, nodes: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Pointwise ``df(n) e^{-f}``."""
    fj = weight.jet(nodes)
    return np.einsum("...j,...j->...", fj.jacobian(), normals) * np.exp(-fj.value)


def adm_mass(metric: ChartMetricField, schedule: RadiusSchedule) -> MassEstimate:
    """ADM flux ``lim int_{S_rho} (d_i g_ij - d_j g_ii) n_j dA`` (no normalizing constant)."""
    _check_dim(metric.dim)
    return _estimate(lambda x, nu: adm_flux(metric, x, nu), metric.dim, schedule)


def weighted_mass(metric: ChartMetricField, weight: WeightField, schedule: RadiusSchedule) -> MassEstimate:
    """ADM flux plus twice the flux of ``e^{-f} grad f`` through coordinate spheres."""
    _check_dim(metric.dim)
    return _estimate(lambda x, nu: adm_flux(metric, x, nu) + 2.0 * weight_flux(weight, x, nu), metric.dim, schedule)


@dataclass(frozen=True)
class FlatTorusFiber:
    """Flat torus ``R^m / prod(periods) Z^m`` with the coordinate metric."""

    dim: int
    periods: tuple = ()

    def __post_init__(self):
        periods = tuple(float(p) for p in self.periods) or (1.0,) * self.dim
        if len(periods) != self.dim or any(p <= 0 for p in periods):
            raise InvalidParameterError("torus periods must be positive, one per dimension")
        object.__setattr__(self, "periods", periods)

    @property
    def volume(self) -> float:
        return float(np.prod(self.periods))

    @property
    def metric(self) -> ChartMetricField:
        return euclidean_metric(self.dim)


def smms_mass(smms: SMMSSpec, fiber: FlatTorusFiber, schedule: RadiusSchedule) -> MassEstimate:
    """Flux of the warped product ``g + e^{-2f/m} h`` over ``S_rho x F``.

    The integrand ``sum_{i,j<n} d_i gbar_ij n_j - sum_a d_j gbar_aa n_j`` does not
    depend on the fiber point, so the fiber integral is exact: evaluate at the
    fiber origin and multiply by the fiber volume.
    """
    n = smms.dim
    _check_dim(n)
    if fiber.dim != smms.m:
        raise InvalidParameterError(f"fiber dimension {fiber.dim} does not match m = {smms.m}")
    if abs(fiber.volume - 1.0) > 1e-12:
        raise InvalidParameterError(f"fiber must have unit volume, got {fiber.volume}")
    gbar = warped_product_metric(smms, fiber.metric)
    m = fiber.dim

    def integrand(x, nu):
        X = np.concatenate([x, np.zeros(x.shape[:-1] + (m,))], axis=-1)
        dg = gbar.jet(X).jacobian()[..., : n]          # d_j for base j only
        div = np.einsum("...iji->...j", dg[..., :n, :n, :]) - np.einsum("...aaj->...j", dg)
        return np.einsum("...j,...j->...", div, nu) * fiber.volume

    return _estimate(integrand, n, schedule)


# -- positivity experiment -----------------------------------------------------

@dataclass(frozen=True)
class PositivityRow:
    name: str
    min_R_f: float
    min_R_f_conformal: float
    min_R_m_f: float
    mass: float
    error: float
    flagged: bool

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def sample_points(dim: int, schedule: RadiusSchedule, interior: int = 64, seed: int = 0) -> np.ndarray:
    """Nodes of every scheduled sphere plus seeded interior points of the innermost ball."""
    pts = [SphereGrid.build(dim, r, max(schedule.nodes_per_sphere // 2, 2)).nodes for r in schedule.radii]
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(interior, dim))
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    radii = schedule.radii[0] * rng.uniform(0.05, 1.0, size=(interior, 1))
    pts.append(dirs * radii)
    return np.concatenate(pts, axis=0)


def positivity_experiment(family: Sequence[SMMSSpec], schedule: RadiusSchedule,
                          names: Optional[Sequence[str]] = None, seed: int = 0) -> List[PositivityRow]:
    """Sampled curvature minima next to the weighted mass for each member.

    A row is flagged when one of the sampled sufficient conditions for
    nonnegative mass holds (``R_f >= 0``, ``R_f + |grad f|^2/(n-1) >= 0`` or,
    for admissible ``m``, ``R^m_f >= 0``) while the mass is below ``-error``.
    """
    rows = []
    for idx, smms in enumerate(family):
        n = smms.dim
        x = sample_points(n, schedule, seed=seed)
        w = weighted_curvatures(smms, x)
        fj = smms.weight.jet(x)
        ginv = np.linalg.inv(smms.metric.value(x))
        grad2 = np.einsum("...ij,...i,...j->...", ginv, fj.jacobian(), fj.jacobian())
        conf = w.R_f + grad2 / (n - 1)
        mass = weighted_mass(smms.metric, smms.weight, schedule)
        m = smms.m
        m_ok = math.isinf(m) or not (1 - n < m <= 0)
        hyp = (w.R_f.min() >= 0) or (conf.min() >= 0) or (m_ok and w.R_m_f.min() >= 0)
        flagged = bool(hyp and mass.limit < -mass.error_estimate)
        name = names[idx] if names else f"{smms.metric.name}|{smms.weight.name}|m={m}"
        rows.append(PositivityRow(name, float(w.R_f.min()), float(conf.min()), float(w.R_m_f.min()),
                                  mass.limit, mass.error_estimate, flagged))
    return rows
