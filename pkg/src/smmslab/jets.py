"""Forward-mode second-order jets.

A :class:`Jet2` carries the value, gradient and Hessian of an array-valued
quantity with respect to ``d`` seed variables.  Derivative axes are stored
*leading*, so ``grad`` has shape ``(d,) + shape`` and ``hess`` has shape
``(d, d) + shape``.  This keeps indexing and reshaping of the value axes
trivial and lets a whole batch of chart points ride along in the value shape.
"""

from __future__ import annotations

from typing import Callable, Sequence, Union

import numpy as np

ArrayLike = Union[np.ndarray, float, complex, int]


class Jet2:
    """Value plus first and second derivatives with respect to ``d`` variables."""

    __slots__ = ("value", "grad", "hess")
    __array_priority__ = 1000  # numpy defers to Jet2 in mixed arithmetic

    def __init__(self, value, grad, hess):
        self.value = np.asarray(value)
        self.grad = np.asarray(grad)
        self.hess = np.asarray(hess)

    # -- construction -----------------------------------------------------

    @classmethod
    def variables(cls, x) -> "Jet2":
        """Seed jets for coordinates ``x`` of shape ``(..., d)``.

        The returned jet has value ``x`` and gradient ``d x_i / d x_j = delta_ij``
        broadcast over the leading batch axes.
        """
        x = np.asarray(x, dtype=float)
        d = x.shape[-1]
        grad = np.zeros((d,) + x.shape)
        for j in range(d):
            grad[j, ..., j] = 1.0
        return cls(x, grad, np.zeros((d, d) + x.shape))

    @classmethod
    def constant(cls, value, d: int) -> "Jet2":
        value = np.asarray(value)
        if not (np.issubdtype(value.dtype, np.floating) or np.issubdtype(value.dtype, np.complexfloating)):
            value = value.astype(float)
        return cls(value, np.zeros((d,) + value.shape, dtype=value.dtype),
                   np.zeros((d, d) + value.shape, dtype=value.dtype))

    @property
    def nvars(self) -> int:
        return self.grad.shape[0]

    @property
    def shape(self) -> tuple:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    def __repr__(self) -> str:
        return f"Jet2(shape={self.shape}, nvars={self.nvars}, dtype={self.value.dtype})"

    # -- helpers ----------------------------------------------------------

    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            if other.nvars != self.nvars:
                raise ValueError(f"jets seeded with {self.nvars} and {other.nvars} variables")
            return other
        return Jet2.constant(other, self.nvars)

    def broadcast_to(self, shape) -> "Jet2":
        shape = tuple(shape)
        if shape == self.shape:
            return self
        d = self.nvars
        pad = (1,) * (len(shape) - self.ndim)
        if pad:
            # align value axes on the right, behind the leading derivative axes
            grad = self.grad.reshape((d,) + pad + self.shape)
            hess = self.hess.reshape((d, d) + pad + self.shape)
        else:
            grad, hess = self.grad, self.hess
        return Jet2(np.broadcast_to(self.value, shape),
                    np.broadcast_to(grad, (d,) + shape),
                    np.broadcast_to(hess, (d, d) + shape))

    def _aligned(self, other) -> tuple["Jet2", "Jet2"]:
        other = self._coerce(other)
        shape = np.broadcast_shapes(self.shape, other.shape)
        return self.broadcast_to(shape), other.broadcast_to(shape)

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.grad, -self.hess)

    def __pos__(self) -> "Jet2":
        return self

    def __add__(self, other) -> "Jet2":
        a, b = self._aligned(other)
        return Jet2(a.value + b.value, a.grad + b.grad, a.hess + b.hess)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet2":
        a, b = self._aligned(other)
        return Jet2(a.value - b.value, a.grad - b.grad, a.hess - b.hess)

    def __rsub__(self, other) -> "Jet2":
        return (-self) + other

    def __mul__(self, other) -> "Jet2":
        if not isinstance(other, Jet2):
            c = np.asarray(other)
            if c.ndim == 0 or np.broadcast_shapes(self.shape, c.shape) == self.shape:
                return Jet2(self.value * c, self.grad * c, self.hess * c)
        a, b = self._aligned(other)
        ga, gb = a.grad, b.grad
        cross = ga[:, None] * gb[None, :]
        hess = a.value * b.hess + b.value * a.hess + cross + np.swapaxes(cross, 0, 1)
        return Jet2(a.value * b.value, a.value * gb + b.value * ga, hess)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.value
        return self._chain(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other) -> "Jet2":
        if not isinstance(other, Jet2):
            return self * (1.0 / np.asarray(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Jet2":
        return self.reciprocal() * other

    def __pow__(self, p) -> "Jet2":
        if isinstance(p, Jet2):
            return exp(p * log(self))
        p = float(p)
        if p == 0.0:
            return Jet2.constant(np.ones_like(self.value), self.nvars)
        if p == 1.0:
            return self
        if p == 2.0:
            return self * self
        v = self.value
        return self._chain(v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))

    def _chain(self, f0, f1, f2) -> "Jet2":
        """Apply a scalar function given its value and first two derivatives."""
        g = self.grad
        hess = f1 * self.hess + f2 * (g[:, None] * g[None, :])
        return Jet2(f0, f1 * g, hess)

    # -- shape manipulation ----------------------------------------------

    def __getitem__(self, key) -> "Jet2":
        if not isinstance(key, tuple):
            key = (key,)
        return Jet2(self.value[key], self.grad[(slice(None),) + key],
                    self.hess[(slice(None), slice(None)) + key])

    def reshape(self, *shape) -> "Jet2":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        d = self.nvars
        value = self.value.reshape(shape)
        return Jet2(value, self.grad.reshape((d,) + value.shape),
                    self.hess.reshape((d, d) + value.shape))

    def sum(self, axis) -> "Jet2":
        if axis >= 0:
            raise ValueError("Jet2.sum expects a negative axis (value axes are trailing)")
        return Jet2(self.value.sum(axis), self.grad.sum(axis), self.hess.sum(axis))

    def swapaxes(self, a: int, b: int) -> "Jet2":
        if a >= 0 or b >= 0:
            raise ValueError("Jet2.swapaxes expects negative axes")
        return Jet2(np.swapaxes(self.value, a, b), np.swapaxes(self.grad, a, b),
                    np.swapaxes(self.hess, a, b))

    @property
    def real(self) -> "Jet2":
        return Jet2(self.value.real, self.grad.real, self.hess.real)

    def conj(self) -> "Jet2":
        return Jet2(np.conj(self.value), np.conj(self.grad), np.conj(self.hess))

    # -- numpy views -----------------------------------------------------

    def jacobian(self) -> np.ndarray:
        """First derivatives with the derivative axis moved last: ``shape + (d,)``."""
        return np.moveaxis(self.grad, 0, -1)

    def hessian(self) -> np.ndarray:
        """Second derivatives with derivative axes last: ``shape + (d, d)``."""
        return np.moveaxis(self.hess, (0, 1), (-2, -1))


def as_jet(x, d: int) -> Jet2:
    return x if isinstance(x, Jet2) else Jet2.constant(x, d)


def stack(jets: Sequence[Jet2], axis: int = -1) -> Jet2:
    """Stack jets along a new value axis (negative ``axis`` only)."""
    if axis >= 0:
        raise ValueError("stack expects a negative axis")
    jets = list(jets)
    d = next(j.nvars for j in jets if isinstance(j, Jet2))
    jets = [as_jet(j, d) for j in jets]
    shape = np.broadcast_shapes(*(j.shape for j in jets))
    jets = [j.broadcast_to(shape) for j in jets]
    return Jet2(np.stack([j.value for j in jets], axis=axis),
                np.stack([j.grad for j in jets], axis=axis),
                np.stack([j.hess for j in jets], axis=axis))


def _unary(f: Callable, df: Callable, ddf: Callable):
    def op(x):
        if not isinstance(x, Jet2):
            return f(np.asarray(x))
        v = x.value
        return x._chain(f(v), df(v), ddf(v))
    return op


exp = _unary(np.exp, np.exp, np.exp)
log = _unary(np.log, lambda v: 1.0 / v, lambda v: -1.0 / v**2)
sin = _unary(np.sin, np.cos, lambda v: -np.sin(v))
cos = _unary(np.cos, lambda v: -np.sin(v), lambda v: -np.cos(v))
sqrt = _unary(np.sqrt, lambda v: 0.5 / np.sqrt(v), lambda v: -0.25 / v**1.5)
tanh = _unary(np.tanh, lambda v: 1.0 - np.tanh(v) ** 2,
              lambda v: -2.0 * np.tanh(v) * (1.0 - np.tanh(v) ** 2))


def dot_last(a: Jet2, b) -> Jet2:
    """Contract the last value axis of ``a`` with the last axis of ``b``."""
    return (a * b).sum(-1)


def norm_squared(x: Jet2) -> Jet2:
    return (x * x).sum(-1)


def concatenate(jets: Sequence[Jet2], axis: int = -1) -> Jet2:
    """Concatenate jets along an existing value axis (negative ``axis`` only)."""
    if axis >= 0:
        raise ValueError("concatenate expects a negative axis")
    jets = list(jets)
    return Jet2(np.concatenate([j.value for j in jets], axis=axis),
                np.concatenate([j.grad for j in jets], axis=axis),
                np.concatenate([j.hess for j in jets], axis=axis))


def block_diag(a: Jet2, b: Jet2) -> Jet2:
    """Block-diagonal matrix jet from ``(..., p, p)`` and ``(..., q, q)`` jets."""
    batch = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    p, q = a.shape[-1], b.shape[-1]
    a = a.broadcast_to(batch + (p, p))
    b = b.broadcast_to(batch + (q, q))
    d = a.nvars
    top = concatenate([a, Jet2.constant(np.zeros(batch + (p, q)), d)], axis=-1)
    bottom = concatenate([Jet2.constant(np.zeros(batch + (q, p)), d), b], axis=-1)
    return concatenate([top, bottom], axis=-2)
