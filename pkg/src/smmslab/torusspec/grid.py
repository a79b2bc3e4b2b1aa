"""Uniform grids on flat tori with a spin-structure phase per axis."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.fft as sfft

from ..errors import InvalidParameterError, PreconditionError


class AliasingWarning(UserWarning):
    """A field has noticeable energy in the top third of the resolved spectrum."""


# tail energy fractions: above WARN a warning is issued, above FAIL the field is rejected
TAIL_WARN = 1e-16
TAIL_FAIL = 1e-6


@dataclass(frozen=True)
class TorusGrid:
    """``N^n`` points on ``prod [0, L_j)``.

    Spinor data are stored as the periodic part of a quasi-periodic field:
    along an axis with phase ``1/2`` the field picks up a sign across the
    boundary, which shows up only as shifted wavenumbers ``2 pi (k + 1/2)/L``.
    """

    n: int
    N: int
    periods: tuple = ()
    phases: tuple = ()

    def __post_init__(self):
        periods = tuple(float(p) for p in self.periods) or (2.0 * np.pi,) * self.n
        phases = tuple(float(p) for p in self.phases) or (0.0,) * self.n
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "phases", phases)
        if self.n < 1:
            raise InvalidParameterError("torus dimension must be positive")
        if self.N < 8 or self.N % 2:
            raise InvalidParameterError("N must be even and at least 8")
        if len(periods) != self.n or any(p <= 0 for p in periods):
            raise InvalidParameterError("one positive period per axis is required")
        if len(phases) != self.n or any(p not in (0.0, 0.5) for p in phases):
            raise InvalidParameterError("spin-structure phases must be 0 or 1/2")

    @classmethod
    def build(cls, n: int, N: int, period: float = 2.0 * np.pi, antiperiodic: bool = False) -> "TorusGrid":
        return cls(n, N, (period,) * n, (0.5 if antiperiodic else 0.0,) * n)

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def spacing(self) -> np.ndarray:
        return np.array(self.periods) / self.N

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod(self.periods))

    def coordinates(self) -> np.ndarray:
        """Grid points as an array of shape ``shape + (n,)``."""
        axes = [np.arange(self.N) * h for h in self.spacing]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def integer_modes(self, axis: int) -> np.ndarray:
        return np.fft.fftfreq(self.N, d=1.0 / self.N)

    def wavenumbers(self, axis: int, spinor: bool = True) -> np.ndarray:
        """First-derivative symbols along ``axis``; the unmatched Nyquist mode is dropped."""
        k = self.integer_modes(axis)
        theta = self.phases[axis] if spinor else 0.0
        w = 2.0 * np.pi * (k + theta) / self.periods[axis]
        if theta == 0.0:
            w = np.where(np.abs(k) == self.N // 2, 0.0, w)
        return w

    def _broadcast(self, vec: np.ndarray, axis: int) -> np.ndarray:
        shape = [1] * self.n
        shape[axis] = self.N
        return vec.reshape(shape)

    def resolved_mask(self, spinor: bool = True) -> np.ndarray:
        """Modes kept by the discretization: the periodic-axis Nyquist modes are excluded."""
        mask = np.ones(self.shape, dtype=bool)
        for j in range(self.n):
            theta = self.phases[j] if spinor else 0.0
            if theta == 0.0:
                nyq = np.abs(self.integer_modes(j)) == self.N // 2
                mask &= ~self._broadcast(nyq, j)
        return mask

    def squared_wavenumbers(self, spinor: bool = True) -> np.ndarray:
        total = np.zeros(self.shape)
        for j in range(self.n):
            total = total + self._broadcast(self.wavenumbers(j, spinor), j) ** 2
        return total

    # -- spectral calculus on scalar or spinor fields (trailing component axes allowed) --

    def fft(self, u):
        return sfft.fftn(u, axes=tuple(range(self.n)))

    def ifft(self, u):
        return sfft.ifftn(u, axes=tuple(range(self.n)))

    def rfft(self, u):
        return sfft.rfftn(u, axes=tuple(range(self.n)))

    def irfft(self, U):
        return sfft.irfftn(U, s=self.shape, axes=tuple(range(self.n)))

    def real_symbol_axes(self):
        """Per-axis first-derivative wavenumbers for the real transform layout (Nyquist zeroed)."""
        out = []
        for j in range(self.n):
            k = self.wavenumbers(j, spinor=False)
            if j == self.n - 1:
                k = k[: self.N // 2 + 1].copy()
                k[-1] = 0.0
            shape = [1] * self.n
            shape[j] = k.size
            out.append(k.reshape(shape))
        return out

    def real_resolved_mask(self) -> np.ndarray:
        return self.resolved_mask(spinor=False)[..., : self.N // 2 + 1]

    def expand(self, sym: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Append singleton axes to a grid array so it broadcasts against ``u``."""
        return sym.reshape(sym.shape + (1,) * (u.ndim - self.n))

    def axis_symbol(self, vec: np.ndarray, axis: int) -> np.ndarray:
        return self._broadcast(vec, axis)

    def project(self, u, spinor: bool = True) -> np.ndarray:
        mask = self.resolved_mask(spinor)
        if mask.all():
            return u
        return self.ifft(self.fft(u) * self.expand(mask, u))

    def derivative(self, u, axis: int, spinor: bool = True) -> np.ndarray:
        sym = self._broadcast(1j * self.wavenumbers(axis, spinor), axis)
        return self.ifft(self.fft(u) * self.expand(np.broadcast_to(sym, self.shape), u))

    def gradient(self, u, spinor: bool = False) -> np.ndarray:
        """Derivatives stacked on a new last axis."""
        return np.stack([self.derivative(u, j, spinor) for j in range(self.n)], axis=-1)

    def real_gradient(self, f) -> np.ndarray:
        return self.gradient(f, spinor=False).real

    def hessian(self, f) -> np.ndarray:
        g = self.gradient(f, spinor=False)
        return np.stack([self.derivative(g[..., i], j, spinor=False) for i in range(self.n)
                         for j in range(self.n)], axis=-1).reshape(self.shape + (self.n, self.n)).real

    def laplacian(self, u, spinor: bool = True) -> np.ndarray:
        """Flat Laplacian, built from the same symbols as the first derivatives."""
        return self.ifft(-self.fft(u) * self.expand(self.squared_wavenumbers(spinor), u))

    def apply_symbol(self, u, symbol: np.ndarray) -> np.ndarray:
        return self.ifft(self.fft(u) * self.expand(symbol, u))

    # -- inner products --------------------------------------------------------

    def inner(self, u, v, weight: Optional[np.ndarray] = None) -> complex:
        w = 1.0 if weight is None else self.expand(np.asarray(weight), np.asarray(u))
        return complex(np.sum(np.conj(u) * w * v) * self.cell_volume)

    def integrate(self, f) -> float:
        return float(np.real(np.sum(f)) * self.cell_volume)

    # -- guards -------------------------------------------------------------

    def tail_fraction(self, f) -> float:
        """Share of spectral energy above a third of the Nyquist band on any axis."""
        F = np.abs(self.fft(np.asarray(f))) ** 2
        total = F.sum()
        if total == 0:
            return 0.0
        high = np.zeros(self.shape, dtype=bool)
        for j in range(self.n):
            k = np.abs(self.integer_modes(j))
            high |= self._broadcast(k > self.N / 3.0, j)
        return float(F[high].sum() / total)

    def check_band_limited(self, f, name: str = "field") -> bool:
        """Warn or raise when ``f`` is not resolved; returns ``True`` when a warning was issued."""
        frac = self.tail_fraction(f)
        if frac > TAIL_FAIL:
            raise PreconditionError(f"{name} is not a smooth periodic field on this grid "
                                    f"(tail energy fraction {frac:.2e})")
        if frac > TAIL_WARN:
            warnings.warn(f"{name}: tail energy fraction {frac:.2e}", AliasingWarning, stacklevel=3)
            return True
        return False

    def sample(self, fn) -> np.ndarray:
        """Evaluate a closed-form field (anything with ``value(points)``) at the grid points."""
        pts = self.coordinates()
        if hasattr(fn, "value"):
            return np.asarray(fn.value(pts))
        return np.asarray(fn(pts))


def random_band_limited(grid: TorusGrid, components: Optional[int] = None, kmax: int = 3, seed: int = 0,
                        complex_valued: bool = True) -> np.ndarray:
    """Seeded random trigonometric polynomial with integer modes ``|k_j| <= kmax``."""
    rng = np.random.default_rng(seed)
    extra = () if components is None else (components,)
    coef = np.zeros(grid.shape + extra, dtype=complex)
    idx = [np.r_[0:kmax + 1, grid.N - kmax:grid.N] for _ in range(grid.n)]
    block = np.ix_(*idx)
    shape = tuple(len(i) for i in idx) + extra
    vals = rng.normal(size=shape) + (1j * rng.normal(size=shape) if complex_valued else 0.0)
    coef[block] = vals
    u = np.fft.ifftn(coef, axes=tuple(range(grid.n))) * grid.size
    if not complex_valued:
        u = u.real
    return u / np.max(np.abs(u))


def trig_field(grid: TorusGrid, terms: Sequence[tuple]) -> np.ndarray:
    """``sum a sin(k.x + p)`` for ``terms = [(a, k, p), ...]`` with integer ``k`` (2 pi periods)."""
    x = grid.coordinates()
    scale = 2.0 * np.pi / np.array(grid.periods)
    out = np.zeros(grid.shape)
    for a, k, p in terms:
        out = out + a * np.sin(x @ (np.asarray(k, dtype=float) * scale) + p)
    return out
