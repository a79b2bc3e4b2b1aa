"""Product Gauss quadrature on coordinate spheres in R^n."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_jacobi

from .errors import InvalidParameterError


def sphere_area(n: int, radius: float = 1.0) -> float:
    """Euclidean area of the radius-``radius`` sphere in R^n."""
    return float(np.exp(math.log(2.0) + 0.5 * n * math.log(math.pi) - gammaln(0.5 * n))) * radius ** (n - 1)


@lru_cache(maxsize=64)
def _unit_sphere_rule(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    if n == 1:
        return np.array([[-1.0], [1.0]]), np.array([1.0, 1.0])
    if n == 2:
        count = 2 * k
        phi = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(phi), np.sin(phi)], axis=-1), np.full(count, 2.0 * np.pi / count)
    # x_1 = t with density (1 - t^2)^{(n-3)/2} on [-1, 1], remaining coordinates
    # sqrt(1 - t^2) times a point of the unit S^{n-2}.
    a = 0.5 * (n - 3)
    t, wt = roots_jacobi(k, a, a)
    sub_nodes, sub_w = _unit_sphere_rule(n - 1, k)
    s = np.sqrt(1.0 - t**2)
    nodes = np.concatenate(
        [np.repeat(t, len(sub_w))[:, None], (s[:, None, None] * sub_nodes[None]).reshape(-1, n - 1)], axis=1
    )
    weights = (wt[:, None] * sub_w[None, :]).reshape(-1)
    return nodes, weights


@dataclass(frozen=True)
class SphereGrid:
    """Nodes and Euclidean area weights on the coordinate sphere of radius ``radius``.

    ``resolution`` Gauss nodes are used per polar angle (``2 * resolution``
    uniform nodes on the innermost circle), so the rule integrates spherical
    polynomials of degree ``2 * resolution - 1`` exactly.
    """

    dim: int
    radius: float
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, dim: int, radius: float, resolution: int) -> "SphereGrid":
        if dim < 2:
            raise InvalidParameterError("sphere grids need dim >= 2")
        if resolution < 1:
            raise InvalidParameterError("resolution must be positive")
        if not radius > 0:
            raise InvalidParameterError("radius must be positive")
        unit, w = _unit_sphere_rule(dim, resolution)
        return cls(dim, float(radius), radius * unit, w * radius ** (dim - 1))

    @property
    def normals(self) -> np.ndarray:
        return self.nodes / self.radius

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))
