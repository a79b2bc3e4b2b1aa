"""Named families of metrics and weights.

Each entry is a factory taking keyword parameters and returning a field.
Custom aliases (an existing family with preset parameters) can be
registered at runtime, which is how CLI configs add their own names.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import inspect
from typing import Any, Callable, Dict, Mapping, Optional

import numpy as np

from . import jets
from .errors import InvalidParameterError
from .fields import AnalyticSpinorField, ChartMetricField, WeightField, euclidean_metric, zero_weight
from .jets import Jet2


def _radius(X: Jet2) -> Jet2:
    return jets.sqrt(jets.norm_squared(X))


def _conformal(u: Jet2, power: float, n: int) -> Jet2:
    return (u**power)[..., None, None] * np.eye(n)


# -- metrics -----------------------------------------------------------------

def schwarzschild(n: int = 3, M: float = 1.0) -> ChartMetricField:
    """Spatial Schwarzschild ``(1 + M/(2 rho^{n-2}))^{4/(n-2)} delta`` (singular at the origin)."""
    if n < 3:
        raise InvalidParameterError("schwarzschild needs n >= 3")

    def fn(X):
        u = 1.0 + (0.5 * M) * _radius(X) ** (2.0 - n)
        return _conformal(u, 4.0 / (n - 2), n)

    return ChartMetricField(n, fn, name=f"schwarzschild(n={n},M={M})")


def stereographic_sphere(n: int = 3) -> ChartMetricField:
    """Round unit sphere in a stereographic chart, ``4 (1 + |x|^2)^{-2} delta``."""
    def fn(X):
        return (4.0 * (1.0 + jets.norm_squared(X)) ** -2)[..., None, None] * np.eye(n)

    return ChartMetricField(n, fn, name=f"stereographic-sphere(n={n})")


def conformally_flat(n: int = 3, amplitudes=(0.5,), centers=None, width: float = 1.0) -> ChartMetricField:
    """``u^{4/(n-2)} delta`` with ``u = 1 + sum a_k (w^2 + |x - c_k|^2)^{-(n-2)/2}``.

    Smooth everywhere for ``w > 0``; the ADM mass is ``4 (n-1) |S^{n-1}| sum a_k``.
    """
    if n < 3:
        raise InvalidParameterError("conformally-flat needs n >= 3")
    amplitudes = np.atleast_1d(np.asarray(amplitudes, dtype=float))
    if centers is None:
        centers = np.zeros((len(amplitudes), n))
    centers = np.asarray(centers, dtype=float).reshape(len(amplitudes), n)
    if np.any(amplitudes < 0) or width <= 0:
        raise InvalidParameterError("conformally-flat needs nonnegative amplitudes and positive width")

    def fn(X):
        u = 1.0
        for a, c in zip(amplitudes, centers):
            u = u + a * (width**2 + jets.norm_squared(X - c)) ** (-(n - 2) / 2.0)
        return _conformal(jets.as_jet(u, X.nvars), 4.0 / (n - 2), n)

    return ChartMetricField(n, fn, name=f"conformally-flat(n={n})")


def power_law(n: int = 3, c: float = 1.0, tau: float = 2.0) -> ChartMetricField:
    """``(1 + c (1 + rho^2)^{-tau/2}) delta``, decaying at order ``tau``."""
    def fn(X):
        h = 1.0 + c * (1.0 + jets.norm_squared(X)) ** (-tau / 2.0)
        return h[..., None, None] * np.eye(n)

    return ChartMetricField(n, fn, name=f"power-law(n={n},c={c},tau={tau})")


def _trig_modes(n: int, rng: np.random.Generator, count: int, max_freq: int):
    k = rng.integers(-max_freq, max_freq + 1, size=(count, n)).astype(float)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=count)
    return k, phase


def trig_random_metric(n: int = 3, seed: int = 0, amplitude: float = 0.1, modes: int = 3,
                       max_freq: int = 2) -> ChartMetricField:
    """``delta + S(x)`` with ``S`` a symmetric trigonometric polynomial.

    Coefficients are scaled so every entry of ``S`` is bounded by
    ``amplitude / n``; for ``amplitude < 1`` the metric is uniformly positive.
    Frequencies are integers, so the metric is periodic on the ``2 pi`` torus.
    """
    if not 0 <= amplitude < 1:
        raise InvalidParameterError("trig-random amplitude must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    k, phase = _trig_modes(n, rng, modes, max_freq)
    coef = rng.uniform(-1.0, 1.0, size=(modes, n, n))
    coef = 0.5 * (coef + np.swapaxes(coef, 1, 2)) * (amplitude / (n * modes))

    def fn(X):
        g = Jet2.constant(np.eye(n), X.nvars)
        for j in range(modes):
            wave = jets.cos(jets.dot_last(X, k[j]) + phase[j])
            g = g + wave[..., None, None] * coef[j]
        return g

    return ChartMetricField(n, fn, name=f"trig-random(n={n},seed={seed})")


# -- weights -----------------------------------------------------------------

def constant_weight(c: float = 0.0) -> WeightField:
    return WeightField(lambda X: Jet2.constant(np.full(X.shape[:-1], float(c)), X.nvars), name=f"constant({c})")


def decay_weight(A: float = 0.5, tau: float = 1.5) -> WeightField:
    """``A (1 + rho^2)^{-tau/2}``."""
    return WeightField(lambda X: A * (1.0 + jets.norm_squared(X)) ** (-tau / 2.0),
                       name=f"decay(A={A},tau={tau})")


def dipole_weight(A: float = 0.5, tau: float = 1.0, axis: int = 0) -> WeightField:
    """``A x_axis (1 + rho^2)^{-(tau+1)/2}``: decays at order ``tau`` but is not radial."""
    return WeightField(lambda X: A * X[..., axis] * (1.0 + jets.norm_squared(X)) ** (-(tau + 1) / 2.0),
                       name=f"dipole(A={A},tau={tau})")


def quadratic_weight(scale: float = 0.5) -> WeightField:
    return WeightField(lambda X: scale * jets.norm_squared(X), name=f"quadratic({scale})")


def trig_random_weight(n: int = 3, seed: int = 0, amplitude: float = 0.3, modes: int = 3,
                       max_freq: int = 2) -> WeightField:
    """Trigonometric polynomial with integer frequencies and total amplitude ``amplitude``."""
    rng = np.random.default_rng(seed + 7919)
    k, phase = _trig_modes(n, rng, modes, max_freq)
    coef = rng.uniform(-1.0, 1.0, size=modes)
    coef *= amplitude / max(np.abs(coef).sum(), 1e-300)

    def fn(X):
        f = 0.0
        for j in range(modes):
            f = f + coef[j] * jets.sin(jets.dot_last(X, k[j]) + phase[j])
        return f

    return WeightField(fn, name=f"trig-random(n={n},seed={seed})")


def trig_random_spinor(n: int, components: int, seed: int = 0, modes: int = 3) -> AnalyticSpinorField:
    """Smooth periodic spinor components: a constant plus a few seeded trigonometric modes."""
    rng = np.random.default_rng(seed + 104729)
    k = rng.integers(-1, 2, size=(modes, n)).astype(float)
    coef = rng.normal(size=(modes, components)) + 1j * rng.normal(size=(modes, components))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=modes)
    base = np.ones(components, dtype=complex)

    def fn(X):
        out = 0.0
        for j in range(modes):
            a = jets.dot_last(X, k[j]) + phase[j]
            out = out + (jets.cos(a) + 0.5j * jets.sin(a * 2.0))[..., None] * coef[j]
        return out + base

    return AnalyticSpinorField(n, components, fn, name=f"trig-spinor(n={n},seed={seed})")


# -- registry ----------------------------------------------------------------

@dataclass
class Catalog:
    metrics: Dict[str, Callable[..., ChartMetricField]] = field(default_factory=dict)
    weights: Dict[str, Callable[..., WeightField]] = field(default_factory=dict)
    aliases: Dict[str, tuple] = field(default_factory=dict)

    def register_alias(self, name: str, base: str, params: Optional[Mapping[str, Any]] = None) -> None:
        """Register ``name`` as family ``base`` with preset parameters."""
        if base not in self.metrics and base not in self.weights and base not in self.aliases:
            raise InvalidParameterError(f"unknown catalog entry {base!r}")
        self.aliases[name] = (base, dict(params or {}))

    def _resolve(self, name: str, params: Mapping[str, Any]):
        merged = dict(params)
        seen = set()
        while name in self.aliases:
            if name in seen:
                raise InvalidParameterError(f"alias cycle at {name!r}")
            seen.add(name)
            base, preset = self.aliases[name]
            merged = {**preset, **merged}
            name = base
        return name, merged

    def metric(self, name: str, **params) -> ChartMetricField:
        base, merged = self._resolve(name, params)
        if base not in self.metrics:
            raise InvalidParameterError(f"unknown metric {name!r}")
        return self.metrics[base](**merged)

    def weight(self, name: str, **params) -> WeightField:
        base, merged = self._resolve(name, params)
        if base not in self.weights:
            raise InvalidParameterError(f"unknown weight {name!r}")
        return self.weights[base](**merged)

    def resolved(self, name: str, params: Optional[Mapping[str, Any]] = None):
        """Base family name and merged parameters after following aliases."""
        return self._resolve(name, dict(params or {}))

    def build(self, kind: str, name: str, params: Optional[Mapping[str, Any]] = None, **context):
        """Instantiate ``name``; ``context`` entries (e.g. ``n``, ``seed``) are passed only if the family takes them."""
        base, merged = self._resolve(name, dict(params or {}))
        table = self.metrics if kind == "metric" else self.weights
        if base not in table:
            raise InvalidParameterError(f"unknown {kind} {name!r}")
        accepted = inspect.signature(table[base]).parameters
        extra = {k: v for k, v in context.items() if k in accepted and k not in merged}
        return table[base](**merged, **extra)

    def kind(self, name: str) -> Optional[str]:
        base, _ = self._resolve(name, {})
        if base in self.metrics:
            return "metric"
        if base in self.weights:
            return "weight"
        return None

    def listing(self) -> str:
        lines = ["metrics:"]
        lines += [f"  {k}" for k in sorted(self.metrics)]
        lines.append("weights:")
        lines += [f"  {k}" for k in sorted(self.weights)]
        if self.aliases:
            lines.append("custom:")
            for k in sorted(self.aliases):
                base, preset = self.aliases[k]
                args = ",".join(f"{p}={preset[p]}" for p in sorted(preset))
                lines.append(f"  {k} -> {base}({args})")
        return "\n".join(lines)


def default_catalog() -> Catalog:
    return Catalog(
        metrics={
            "euclidean": lambda n=3: euclidean_metric(n),
            "schwarzschild": schwarzschild,
            "stereographic-sphere": stereographic_sphere,
            "conformally-flat": conformally_flat,
            "power-law": power_law,
            "trig-random": trig_random_metric,
        },
        weights={
            "zero": lambda: zero_weight(),
            "constant": constant_weight,
            "decay": decay_weight,
            "dipole": dipole_weight,
            "quadratic": quadratic_weight,
            "trig-random-weight": trig_random_weight,
        },
    )
