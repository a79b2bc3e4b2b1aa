"""Independent reference computations used to freeze expected values.

Nothing here touches the jet arithmetic: curvature comes from nested
fourth-order finite differences of plain metric values, and integrals from
scipy quadrature.
"""

import numpy as np
from scipy import integrate

STENCIL = ((-2, 1.0 / 12), (-1, -8.0 / 12), (1, 8.0 / 12), (2, -1.0 / 12))


def fd_derivative(fn, x, h=1e-2):
    """``d fn / dx_k`` for every k, stacked on a trailing axis."""
    x = np.asarray(x, dtype=float)
    out = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        out.append(sum(c * fn(x + s * e) for s, c in STENCIL) / h)
    return np.stack(out, axis=-1)


def christoffel(gfun, x, h=1e-2):
    g = gfun(x)
    dg = fd_derivative(gfun, x, h)  # [i, j, k] = d_k g_ij
    ginv = np.linalg.inv(g)
    lower = 0.5 * (np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - np.einsum("ijl->lij", dg))
    return np.einsum("kl,lij->kij", ginv, lower)


def ricci_scalar(gfun, x, h=1e-2):
    """Ricci tensor and scalar curvature of ``gfun`` at ``x`` by finite differences."""
    G = christoffel(gfun, x, h)
    dG = fd_derivative(lambda p: christoffel(gfun, p, h), x, h)  # [k, i, j, l] = d_l G^k_ij
    ric = (np.einsum("kijk->ij", dG) - np.einsum("kikj->ij", dG)
           + np.einsum("kkl,lij->ij", G, G) - np.einsum("kjl,lik->ij", G, G))
    ric = 0.5 * (ric + ric.T)
    return ric, float(np.einsum("ij,ij->", np.linalg.inv(gfun(x)), ric))


def radial_volume_integral(integrand, n=3, upper=np.inf):
    """``int_{R^n} F(|x|) dx`` for a radial integrand given as a function of rho."""
    from math import gamma, pi
    area = 2 * pi ** (n / 2) / gamma(n / 2)
    val, _ = integrate.quad(lambda r: integrand(r) * r ** (n - 1), 0.0, upper, limit=400, epsabs=1e-13, epsrel=1e-12)
    return area * val
