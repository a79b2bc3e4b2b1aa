"""Complex Clifford representations, chirality and warped-product spinor spaces.

Generators follow the Jordan-Wigner pattern: with ``p = k // 2`` qubits,

    e_{2j}   = Z x ... x Z x X x I x ... x I
    e_{2j+1} = Z x ... x Z x Y x I x ... x I

and, for odd ``k``, a last generator ``s Z x ... x Z``.  These are Hermitian
anticommuting involutions; ``gamma_a = i e_a`` is then skew-Hermitian with
``gamma_a^2 = -1`` so that ``v . v = -|v|^2``.  For odd ``k`` the sign ``s``
is fixed so that the volume element acts as ``-I`` (for ``k = 1`` this makes
``gamma_1 = [i]``).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidParameterError

MAX_K = 12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


def _volume(gammas: np.ndarray) -> np.ndarray:
    k = len(gammas)
    prod = reduce(np.matmul, gammas)
    return (1j ** ((k + 1) // 2)) * prod


@dataclass(frozen=True, eq=False)
class GammaRep:
    """Skew-Hermitian generators ``gammas[a]`` of the complex Clifford algebra on ``C^k``."""

    k: int
    gammas: np.ndarray

    @property
    def dim(self) -> int:
        return self.gammas.shape[-1]

    def clifford(self, v) -> np.ndarray:
        """Matrix of Clifford multiplication by ``v`` (components in the working frame)."""
        v = np.asarray(v)
        if v.shape[-1] != self.k:
            raise InvalidParameterError(f"vector of length {v.shape[-1]} for a rank-{self.k} representation")
        return np.tensordot(v, self.gammas, axes=([-1], [0]))

    def act(self, v, psi) -> np.ndarray:
        return self.clifford(v) @ np.asarray(psi)


@lru_cache(maxsize=None)
def _gamma_matrices(k: int) -> np.ndarray:
    p = k // 2
    gens = []
    for j in range(p):
        head = [_Z] * j
        tail = [_I2] * (p - j - 1)
        gens.append(_kron_all(head + [_X] + tail))
        gens.append(_kron_all(head + [_Y] + tail))
    if k % 2:
        gens.append(_kron_all([_Z] * p))
    gammas = 1j * np.array(gens)
    if k % 2:
        # choose the sign of the last generator so the volume element is -I
        if np.real(_volume(gammas)[0, 0]) > 0:
            gammas[-1] = -gammas[-1]
    gammas.setflags(write=False)
    return gammas


def gamma_rep(k: int) -> GammaRep:
    """Irreducible representation of dimension ``2^(k//2)``, deterministic in ``k``."""
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= MAX_K:
        raise InvalidParameterError(f"gamma_rep needs 1 <= k <= {MAX_K}, got {k}")
    return GammaRep(int(k), _gamma_matrices(int(k)))


def volume_element(rep: GammaRep) -> np.ndarray:
    """``i^((k+1)//2) gamma_1 ... gamma_k``."""
    return _volume(rep.gammas)


def chirality_split(rep: GammaRep):
    """Projectors ``(P_plus, P_minus) = ((I + w)/2, (I - w)/2)`` for even ``k``."""
    if rep.k % 2:
        raise InvalidParameterError("chirality splitting needs an even-rank representation")
    w = volume_element(rep)
    eye = np.eye(rep.dim)
    return 0.5 * (eye + w), 0.5 * (eye - w)


def conjugate(rep: GammaRep, psi) -> np.ndarray:
    """``psi_plus - psi_minus``, which equals ``w psi``."""
    if rep.k % 2:
        raise InvalidParameterError("the conjugate spinor is defined for even rank only")
    return volume_element(rep) @ np.asarray(psi)


# -- warped-product spinor spaces ------------------------------------------

class ParityCase(str, enum.Enum):
    N_EVEN = "n-even"
    N_ODD_M_EVEN = "n-odd-m-even"
    N_ODD_M_ODD = "n-odd-m-odd"

    @classmethod
    def of(cls, n: int, m: int) -> "ParityCase":
        if n % 2 == 0:
            return cls.N_EVEN
        return cls.N_ODD_M_EVEN if m % 2 == 0 else cls.N_ODD_M_ODD


@dataclass(frozen=True, eq=False)
class ProductSpinorSpace:
    """Spinors of ``M^n x F^m`` as ``(base part) x (fiber part)``, flattened with ``np.kron``.

    The base part is ``Sigma M``, or ``Sigma M + Sigma M`` when ``n`` and ``m``
    are both odd; in that case ``base_rep`` holds the generators
    ``diag(gamma, -gamma)`` acting on the doubled space.
    """

    n: int
    m: int
    case: ParityCase
    base_rep: GammaRep
    fiber_rep: GammaRep
    scale: float = 1.0

    @classmethod
    def build(cls, n: int, m: int, f_value: float = 0.0) -> "ProductSpinorSpace":
        if n < 1 or m < 1:
            raise InvalidParameterError("product spinor spaces need n, m >= 1")
        case = ParityCase.of(n, m)
        base = gamma_rep(n)
        if case is ParityCase.N_ODD_M_ODD:
            z = np.zeros_like(base.gammas)
            doubled = np.block([[base.gammas, z], [z, -base.gammas]])
            base = GammaRep(n, doubled)
        return cls(n, m, case, base, gamma_rep(m), float(np.exp(-f_value / m)))

    def at(self, f_value: float) -> "ProductSpinorSpace":
        return ProductSpinorSpace(self.n, self.m, self.case, self.base_rep, self.fiber_rep,
                                  float(np.exp(-f_value / self.m)))

    @property
    def base_dim(self) -> int:
        return self.base_rep.dim

    @property
    def fiber_dim(self) -> int:
        return self.fiber_rep.dim

    @property
    def dim(self) -> int:
        return self.base_dim * self.fiber_dim

    @property
    def plain_base_dim(self) -> int:
        """Dimension of ``Sigma M`` itself (half of ``base_dim`` in the doubled case)."""
        return gamma_rep(self.n).dim

    # generator matrices on the full space
    def horizontal_generators(self) -> np.ndarray:
        eye_f = np.eye(self.fiber_dim)
        right = volume_element(self.fiber_rep) if self.case is ParityCase.N_ODD_M_EVEN else eye_f
        return np.array([np.kron(g, right) for g in self.base_rep.gammas])

    def _vertical_left(self) -> np.ndarray:
        if self.case is ParityCase.N_EVEN:
            return volume_element(self.base_rep)
        if self.case is ParityCase.N_ODD_M_EVEN:
            return np.eye(self.base_dim)
        d = self.plain_base_dim
        z, e = np.zeros((d, d)), np.eye(d)
        return np.block([[z, e], [e, z]]).astype(complex)

    def vertical_generators(self, scaled: bool = True) -> np.ndarray:
        """Fiber coordinate-frame actions; ``scaled=False`` gives the unit-frame actions."""
        s = self.scale if scaled else 1.0
        left = self._vertical_left()
        return np.array([np.kron(left, s * g) for g in self.fiber_rep.gammas])

    def unit_generators(self) -> np.ndarray:
        """Actions of an orthonormal frame of the warped metric."""
        return np.concatenate([self.horizontal_generators(), self.vertical_generators(scaled=False)])

    def clifford(self, x, v) -> np.ndarray:
        x, v = np.asarray(x), np.asarray(v)
        if x.shape[-1] != self.n or v.shape[-1] != self.m:
            raise InvalidParameterError(f"expected (x, v) of sizes ({self.n}, {self.m})")
        return (np.tensordot(x, self.horizontal_generators(), axes=([-1], [0]))
                + np.tensordot(v, self.vertical_generators(), axes=([-1], [0])))

    def embed(self, phi, nu) -> np.ndarray:
        """``phi x nu``; in the doubled case a ``Sigma M`` spinor is placed as ``phi + 0``."""
        phi, nu = np.asarray(phi, dtype=complex), np.asarray(nu, dtype=complex)
        if phi.shape[-1] == self.plain_base_dim and self.base_dim != self.plain_base_dim:
            phi = np.concatenate([phi, np.zeros_like(phi)], axis=-1)
        if phi.shape[-1] != self.base_dim or nu.shape[-1] != self.fiber_dim:
            raise InvalidParameterError("spinor factor sizes do not match the product space")
        return np.einsum("...i,...j->...ij", phi, nu).reshape(phi.shape[:-1] + (self.dim,))


def product_clifford_action(space: ProductSpinorSpace, x, v, psi) -> np.ndarray:
    """Clifford multiplication of ``(x, v)`` on a product spinor (fiber part scaled by ``e^{-f/m}``)."""
    psi = np.asarray(psi)
    if psi.shape[-1] != space.dim:
        raise InvalidParameterError(f"spinor of size {psi.shape[-1]} for a space of dimension {space.dim}")
    return space.clifford(x, v) @ psi


# -- averaged Hermitian forms ------------------------------------------------

@dataclass(frozen=True, eq=False)
class HermitianForm:
    matrix: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.matrix, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise InvalidParameterError("a Hermitian form needs a square matrix")
        if not np.allclose(h, h.conj().T, atol=1e-12 * max(1.0, np.abs(h).max())):
            raise InvalidParameterError("form is not Hermitian")
        try:
            np.linalg.cholesky(h)
        except np.linalg.LinAlgError as exc:
            raise InvalidParameterError("form is not positive definite") from exc
        object.__setattr__(self, "matrix", h)

    def inner(self, a, b) -> complex:
        return complex(np.vdot(a, self.matrix @ b))

    def norm(self, a) -> float:
        return float(np.sqrt(self.inner(a, a).real))

    @classmethod
    def standard(cls, dim: int) -> "HermitianForm":
        return cls(np.eye(dim, dtype=complex))

    def tensor(self, other: "HermitianForm") -> "HermitianForm":
        return HermitianForm(np.kron(self.matrix, other.matrix))


def _generators_of(obj) -> np.ndarray:
    if isinstance(obj, GammaRep):
        return obj.gammas
    if isinstance(obj, ProductSpinorSpace):
        return obj.unit_generators()
    return np.asarray(obj)


def averaged_hermitian(rep, seed: Optional[HermitianForm] = None) -> HermitianForm:
    """Average ``tau^* H tau`` over the finite group generated by unit frame vectors.

    Up to sign and phase the group consists of the ordered subset products
    ``gamma_{a1} ... gamma_{aj}`` (``a1 < ... < aj``), and signs and phases cancel
    in ``tau^* H tau``, so the average runs over those ``2^k`` products.
    """
    gens = _generators_of(rep)
    dim = gens.shape[-1]
    if seed is None:
        seed = HermitianForm.standard(dim)
    if not isinstance(seed, HermitianForm):
        seed = HermitianForm(seed)
    h = seed.matrix
    if h.shape != (dim, dim):
        raise InvalidParameterError("seed form size does not match the spinor space")
    total = np.zeros_like(h)
    count = 0
    for mask in itertools.product((False, True), repeat=len(gens)):
        tau = np.eye(dim, dtype=complex)
        for g, use in zip(gens, mask):
            if use:
                tau = tau @ g
        total += tau.conj().T @ h @ tau
        count += 1
    total /= count
    return HermitianForm(0.5 * (total + total.conj().T))


def product_seed_form(space: ProductSpinorSpace, base: HermitianForm, fiber: HermitianForm) -> HermitianForm:
    """Tensor-product form, with ``blockdiag(H, H)`` on the doubled base."""
    hb = base.matrix
    if space.base_dim != hb.shape[0]:
        hb = np.kron(np.eye(2), hb)
    return HermitianForm(np.kron(hb, fiber.matrix))


# -- debug dump ----------------------------------------------------------------

def _fmt(z: complex) -> str:
    return f"{z.real:+.17g}{z.imag:+.17g}j"


def dump_gamma_rep(rep: GammaRep) -> str:
    """Plain-text dump: a ``k dim`` header, then each matrix row by row."""
    lines = [f"gammarep k={rep.k} dim={rep.dim}"]
    for a, g in enumerate(rep.gammas):
        lines.append(f"gamma {a}")
        lines.extend(" ".join(_fmt(z) for z in row) for row in g)
    return "\n".join(lines) + "\n"


def load_gamma_dump(text: str) -> GammaRep:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = dict(tok.split("=") for tok in lines[0].split()[1:])
    k, dim = int(head["k"]), int(head["dim"])
    mats = []
    pos = 1
    for _ in range(k):
        pos += 1  # "gamma a"
        rows = [[complex(tok) for tok in lines[pos + r].split()] for r in range(dim)]
        mats.append(rows)
        pos += dim
    return GammaRep(k, np.array(mats, dtype=complex))
