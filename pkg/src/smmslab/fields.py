"""Closed-form fields on coordinate charts.

Every field wraps a plain Python function of a coordinate :class:`~smmslab.jets.Jet2`
(value shape ``(..., dim)``).  Because the function only uses jet arithmetic,
the same program yields values, exact first derivatives and exact second
derivatives, and fields compose freely (conformal changes, warped products).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DegenerateMetricError, InvalidParameterError
from .jets import Jet2

INFINITE_M = math.inf


def _check_positive_definite(g: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(g)):
        raise DegenerateMetricError(f"{name}: non-finite metric entries")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise DegenerateMetricError(f"{name}: metric is not positive definite") from exc


@dataclass(frozen=True)
class ChartMetricField:
    """A metric ``x -> g_ij(x)`` on a coordinate chart of dimension ``dim``.

    ``split`` optionally declares a horizontal/vertical coordinate split
    ``(n, m)`` for product charts.
    """

    dim: int
    fn: Callable[[Jet2], Jet2] = field(repr=False)
    name: str = "metric"
    split: Optional[Tuple[int, int]] = None

    def on(self, X: Jet2) -> Jet2:
        """Evaluate on coordinate jets ``X`` (value shape ``(..., dim)``)."""
        g = self.fn(X)
        if not isinstance(g, Jet2):
            g = Jet2.constant(g, X.nvars)
        return g.broadcast_to(X.shape[:-1] + (self.dim, self.dim))

    def jet(self, x, check: bool = True) -> Jet2:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise InvalidParameterError(f"{self.name}: expected points of dimension {self.dim}, got {x.shape[-1]}")
        g = self.on(Jet2.variables(x))
        if check:
            _check_positive_definite(g.value, self.name)
        return g

    def value(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g = self.on(Jet2.constant(x, 0)).value
        _check_positive_definite(g, self.name)
        return g


@dataclass(frozen=True)
class WeightField:
    """A smooth weight ``f`` on a chart; evaluates to a scalar jet."""

    fn: Callable[[Jet2], Jet2] = field(repr=False)
    name: str = "weight"

    def on(self, X: Jet2) -> Jet2:
        f = self.fn(X)
        if not isinstance(f, Jet2):
            f = Jet2.constant(f, X.nvars)
        return f.broadcast_to(X.shape[:-1])

    def jet(self, x) -> Jet2:
        return self.on(Jet2.variables(np.asarray(x, dtype=float)))

    def value(self, x) -> np.ndarray:
        return self.on(Jet2.constant(np.asarray(x, dtype=float), 0)).value


@dataclass(frozen=True)
class SMMSSpec:
    """The data ``(M, g, e^{-f} dVol, m)``; ``m = inf`` means a weighted manifold."""

    metric: ChartMetricField
    weight: WeightField
    m: float = INFINITE_M

    def __post_init__(self):
        if self.m == 0:
            raise InvalidParameterError("SMMS parameter m must be nonzero")
        if isinstance(self.m, float) and math.isnan(self.m):
            raise InvalidParameterError("SMMS parameter m is NaN")

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def is_weighted_manifold(self) -> bool:
        return math.isinf(self.m)


@dataclass(frozen=True)
class AnalyticSpinorField:
    """Spinor components (with respect to the orthonormal frame in use) as a closed form."""

    dim: int
    components: int
    fn: Callable[[Jet2], Jet2] = field(repr=False)
    name: str = "spinor"

    def on(self, X: Jet2) -> Jet2:
        psi = self.fn(X)
        if not isinstance(psi, Jet2):
            psi = Jet2.constant(np.asarray(psi, dtype=complex), X.nvars)
        return psi.broadcast_to(X.shape[:-1] + (self.components,))

    def jet(self, x) -> Jet2:
        return self.on(Jet2.variables(np.asarray(x, dtype=float)))

    def value(self, x) -> np.ndarray:
        return self.on(Jet2.constant(np.asarray(x, dtype=float), 0)).value


def zero_weight() -> WeightField:
    return WeightField(lambda X: Jet2.constant(np.zeros(X.shape[:-1]), X.nvars), name="zero")


def euclidean_metric(n: int) -> ChartMetricField:
    eye = np.eye(n)
    return ChartMetricField(n, lambda X: Jet2.constant(eye, X.nvars), name=f"euclidean{n}")
