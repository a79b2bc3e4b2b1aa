"""Named experiments: each turns parameters and tolerances into assertion rows.

Every row is a plain dict with at least ``check``, ``value``, ``tolerance`` and
``passed``; the remaining keys describe the case.  Rows are deterministic for a
fixed seed.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping

import numpy as np

from . import clifford as cl
from .catalog import Catalog, schwarzschild, trig_random_spinor
from .errors import InvalidParameterError, PreconditionError
from .fields import SMMSSpec, euclidean_metric
from .jetcalc import conformal_metric, curvature, warped_product_metric, weighted_curvatures
from .massquad import (FlatTorusFiber, RadiusSchedule, adm_mass, positivity_experiment, smms_mass,
                       weighted_mass)
from .sphere import sphere_area
from .spinconn import FiberSpinor, gradient_norm_decomposition, warped_dirac_residual
from .torusspec import eigen, operators as tops, principal as tp
from .torusspec.grid import TorusGrid, random_band_limited, trig_field


def check(name: str, value: float, tolerance: float, passed=None, **data) -> dict:
    """An assertion row; by default it passes when ``value <= tolerance``."""
    value = float(value)
    ok = bool(value <= tolerance) if passed is None else bool(passed)
    return {"check": name, "value": value, "tolerance": float(tolerance), "passed": ok, **data}


@dataclass(frozen=True)
class Experiment:
    name: str
    run: Callable[..., List[dict]] = field(repr=False)
    params: Mapping[str, Any] = field(default_factory=dict)
    tolerances: Mapping[str, float] = field(default_factory=dict)
    summary: str = ""


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


# -- curvature identities -------------------------------------------------------

def run_curvature_identities(p, seed, tol, cat: Catalog) -> List[dict]:
    rows = []
    rng = np.random.default_rng(seed)
    for n in p["dims"]:
        metric = cat.build("metric", p["metric"], p["metric_params"], n=n, seed=seed)
        weight = cat.build("weight", p["weight"], p["weight_params"], n=n, seed=seed)
        x = rng.uniform(-p["box"], p["box"], size=(p["points"], n))
        R_tilde = curvature(conformal_metric(metric, weight), x).scalar
        w = weighted_curvatures(SMMSSpec(metric, weight), x)
        fj = weight.jet(x)
        ginv = np.linalg.inv(metric.value(x))
        grad2 = np.einsum("...ij,...i,...j->...", ginv, fj.jacobian(), fj.jacobian())
        predicted = np.exp(2.0 * fj.value / (n - 1)) * (w.R_f + grad2 / (n - 1))
        rows.append(check("conformal-identity", _rel(R_tilde, predicted), tol["conformal"], n=n,
                          points=p["points"]))
    for n, m in p["warped"]:
        metric = cat.build("metric", p["metric"], p["metric_params"], n=n, seed=seed)
        weight = cat.build("weight", p["weight"], p["weight_params"], n=n, seed=seed)
        smms = SMMSSpec(metric, weight, m)
        gbar = warped_product_metric(smms, euclidean_metric(m))
        xb = rng.uniform(-p["box"], p["box"], size=(p["points"], n))
        y = rng.uniform(-p["box"], p["box"], size=(p["points"], m))
        pack = curvature(gbar, np.concatenate([xb, y], axis=-1))
        w = weighted_curvatures(smms, xb)
        rows.append(check("warped-scalar", _rel(pack.scalar, w.R_m_f), tol["warped"], n=n, m=m,
                          points=p["points"]))
        rows.append(check("warped-horizontal-ricci", _rel(pack.ricci[..., :n, :n], w.Ric_m_f), tol["warped"],
                          n=n, m=m, points=p["points"]))
    return rows


# -- masses ---------------------------------------------------------------------

def _schedule(p) -> RadiusSchedule:
    s = p["schedule"]
    return RadiusSchedule.geometric(s["start"], s["ratio"], s["count"], s["nodes"])


def run_mass_suite(p, seed, tol, cat: Catalog) -> List[dict]:
    sched = _schedule(p)
    reg = p["regression"]
    n = reg["n"]
    fields = [(cat.build("metric", q["metric"], q.get("metric_params"), n=n, seed=seed),
               cat.build("weight", q["weight"], q.get("weight_params"), n=n, seed=seed), q) for q in p["pairs"]]
    reg_metric = cat.build("metric", reg["metric"], reg.get("params"), n=n)
    rows = []
    est = adm_mass(reg_metric, sched)
    base, merged = cat.resolved(reg["metric"], reg.get("params"))
    if base != "schwarzschild":
        raise InvalidParameterError(f"regression metric must be a schwarzschild family, got {base!r}")
    M = float(merged.get("M", inspect.signature(schwarzschild).parameters["M"].default))
    expected = 2.0 * (n - 1) * sphere_area(n) * M
    rows.append(check("schwarzschild-mass", abs(est.limit - expected) / expected, tol["regression_rel"],
                      metric=reg["metric"], n=n, limit=est.limit, expected=expected,
                      error_estimate=est.error_estimate))
    flat = adm_mass(euclidean_metric(n), sched)
    rows.append(check("euclidean-mass", abs(flat.limit), tol["euclidean_abs"], n=n, limit=flat.limit))

    family, names = [], []
    for i, (metric, weight, q) in enumerate(fields):
        label = f"{i}:{q['metric']}|{q['weight']}"
        mf = weighted_mass(metric, weight, sched)
        mt = adm_mass(conformal_metric(metric, weight), sched)
        comparisons = [("conformal-mass-equality", mt, None)]
        for m in p["m_values"]:
            comparisons.append(("smms-mass-m-independence",
                                smms_mass(SMMSSpec(metric, weight, m), FlatTorusFiber(m), sched), m))
        for name, other, m in comparisons:
            scale = max(abs(mf.limit), abs(other.limit), 1e-300)
            combined = mf.error_estimate + other.error_estimate
            allowed = min(combined, tol["agreement_rel"] * scale)
            diff = abs(mf.limit - other.limit)
            rows.append(check(name, diff / scale, allowed / scale, pair=label, m=m, weighted_mass=mf.limit,
                              other_mass=other.limit, combined_error=combined))
        family.append(SMMSSpec(metric, weight))
        names.append(label)
    for r in positivity_experiment(family, sched, names, seed=seed):
        d = r.as_dict()
        d["pair"] = d.pop("name")
        rows.append(check("positivity-flag", 1.0 if r.flagged else 0.0, 0.0, **d))
    return rows


# -- Clifford algebra -----------------------------------------------------------

def _square_samples(n, m, samples, rng):
    worst = 0.0
    for _ in range(samples):
        f = rng.uniform(-2.0, 2.0)
        space = cl.ProductSpinorSpace.build(n, m, f)
        x, v = rng.normal(size=n), rng.normal(size=m)
        psi = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
        twice = cl.product_clifford_action(space, x, v, cl.product_clifford_action(space, x, v, psi))
        q = x @ x + math.exp(-2.0 * f / m) * (v @ v)
        worst = max(worst, float(np.linalg.norm(twice + q * psi) / (np.linalg.norm(psi) * max(1.0, q))))
    return worst


def _random_form(dim, rng) -> cl.HermitianForm:
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return cl.HermitianForm(A @ A.conj().T + dim * np.eye(dim))


def run_clifford_suite(p, seed, tol, cat: Catalog) -> List[dict]:
    rows = []
    rng = np.random.default_rng(seed)
    for k in range(1, p["max_k"] + 1):
        rep = cl.gamma_rep(k)
        G, eye = rep.gammas, np.eye(rep.dim)
        rel = max(float(np.abs(G[a] @ G[b] + G[b] @ G[a] + 2.0 * (a == b) * eye).max())
                  for a in range(k) for b in range(k))
        skew = max(float(np.abs(g.conj().T + g).max()) for g in G)
        unit = max(float(np.abs(g.conj().T @ g - eye).max()) for g in G)
        rows.append(check("gamma-relations", max(rel, skew, unit), tol["exact"], k=k))
        w = cl.volume_element(rep)
        if k % 2 == 0:
            sq = float(np.abs(w @ w - eye).max())
            anti = max(float(np.abs(w @ g + g @ w).max()) for g in G)
            rows.append(check("volume-element", max(sq, anti), tol["exact"], k=k, parity="even"))
            Pp, Pm = cl.chirality_split(rep)
            psi = rng.normal(size=rep.dim) + 1j * rng.normal(size=rep.dim)
            err = max(float(np.abs(Pp + Pm - eye).max()), float(np.abs(Pp @ Pm).max()),
                      float(np.abs(cl.conjugate(rep, cl.conjugate(rep, psi)) - psi).max()))
            rows.append(check("chirality", err, tol["exact"], k=k))
        else:
            comm = max(float(np.abs(w @ g - g @ w).max()) for g in G)
            scalar = float(np.abs(w - w[0, 0] * eye).max())
            rows.append(check("volume-element", max(comm, scalar), tol["exact"], k=k, parity="odd"))
    by_case: Dict[str, float] = {}
    for n, m in p["product_cases"]:
        case = cl.ParityCase.of(n, m).value
        by_case[case] = max(by_case.get(case, 0.0), _square_samples(n, m, p["samples"], rng))
    for case in sorted(by_case):
        rows.append(check("product-square-identity", by_case[case], tol["square"], case=case,
                          samples=p["samples"]))
    for n, m in p["product_cases"]:
        space = cl.ProductSpinorSpace.build(n, m, float(rng.uniform(-1, 1)))
        base = cl.averaged_hermitian(cl.gamma_rep(n), _random_form(space.plain_base_dim, rng))
        fib = cl.averaged_hermitian(cl.gamma_rep(m), _random_form(space.fiber_dim, rng))
        seed_form = cl.product_seed_form(space, base, fib)
        avg = cl.averaged_hermitian(space, seed_form)
        err = float(np.abs(avg.matrix - seed_form.matrix).max() / np.abs(seed_form.matrix).max())
        rows.append(check("tensor-product-form", err, tol["form"], n=n, m=m, case=space.case.value))
        # unit vectors of the warped metric act unitarily for any averaged form
        H = cl.averaged_hermitian(space, _random_form(space.dim, rng))
        worst = 0.0
        for _ in range(20):
            x, v = rng.normal(size=n), rng.normal(size=m)
            q = math.sqrt(x @ x + space.scale**2 * (v @ v))
            psi = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
            out = cl.product_clifford_action(space, x / q, v / q, psi)
            worst = max(worst, abs(H.norm(out) - H.norm(psi)) / H.norm(psi))
        rows.append(check("unit-vector-unitarity", worst, tol["form"], n=n, m=m, case=space.case.value))
    return rows


# -- warped Dirac factorization ------------------------------------------------------

def run_warped_dirac(p, seed, tol, cat: Catalog) -> List[dict]:
    rows = []
    rng = np.random.default_rng(seed)
    for n, m in p["cases"]:
        metric = cat.build("metric", p["metric"], p["metric_params"], n=n, seed=seed)
        weight = cat.build("weight", p["weight"], p["weight_params"], n=n, seed=seed)
        smms = SMMSSpec(metric, weight, m)
        space = cl.ProductSpinorSpace.build(n, m)
        X = rng.uniform(-p["box"], p["box"], size=(p["points"], n + m))
        phi = trig_random_spinor(n, space.base_dim, seed=seed + n)
        nu0 = rng.normal(size=space.fiber_dim) + 1j * rng.normal(size=space.fiber_dim)
        nu = FiberSpinor(nu0, rng.integers(-2, 3, size=m).astype(float))
        res = warped_dirac_residual(smms, euclidean_metric(m), phi, nu, X)
        for key in ("r_conn_H", "r_conn_V", "r_dirac"):
            rows.append(check(f"warped-{key.replace('_', '-')}", getattr(res, key), tol["residual"], n=n, m=m,
                              case=space.case.value, points=p["points"]))
        unit = np.zeros(space.fiber_dim, dtype=complex)
        unit[0] = 1.0
        plain = trig_random_spinor(n, space.plain_base_dim, seed=seed + 17 * n)
        dec = gradient_norm_decomposition(smms, euclidean_metric(m), plain, unit, X)
        rows.append(check("norm-decomposition", dec, tol["residual"], n=n, m=m, case=space.case.value))
    return rows


# -- torus identities -----------------------------------------------------------

def _torus_weight(grid: TorusGrid, kind: str, seed: int):
    n = grid.n
    if kind == "sin-cos":
        e1 = [1] + [0] * (n - 1)
        e2 = [0, 1] + [0] * (n - 2)
        return trig_field(grid, [(0.3, e1, 0.0), (0.2, e2, math.pi / 2)])
    if kind == "trig-random":
        return 0.5 * random_band_limited(grid, None, kmax=2, seed=seed, complex_valued=False)
    if kind == "zero":
        return np.zeros(grid.shape)
    raise InvalidParameterError(f"unknown torus weight {kind!r}")


def run_torus_identities(p, seed, tol, cat: Catalog) -> List[dict]:
    rows = []
    rng = np.random.default_rng(seed)
    for n in p["dims"]:
        for anti in (False, True):
            grid = TorusGrid.build(n, p["N"], antiperiodic=anti)
            spin = "antiperiodic" if anti else "periodic"
            d = cl.gamma_rep(n).dim
            psi = random_band_limited(grid, d, kmax=p["kmax"], seed=seed + 1)
            for kind in p["weights"]:
                f = _torus_weight(grid, kind, seed)
                tag = dict(n=n, N=p["N"], spin=spin, weight=kind)
                limit = tol["trivial"] if kind == "zero" else tol["identity"]
                rows.append(check("weighted-lichnerowicz", tops.lichnerowicz_residual(grid, f, psi), limit, **tag))
                for X in (np.eye(n)[0], rng.normal(size=n)):
                    rows.append(check("weighted-ricci", tops.ricci_identity_residual(grid, f, psi, X), limit,
                                      X=[float(v) for v in X], **tag))
                op = tops.weighted_dirac(grid, f)
                u = random_band_limited(grid, d, kmax=p["kmax"], seed=seed + 2)
                v = random_band_limited(grid, d, kmax=p["kmax"], seed=seed + 3)
                a, b = op.inner(op(u), v), op.inner(u, op(v))
                rows.append(check("self-adjoint-weighted", abs(a - b) / max(abs(a), 1.0), tol["identity"], **tag))
                lin = op(2.0 * u - 3j * v) - (2.0 * op(u) - 3j * op(v))
                rows.append(check("linearity", float(np.abs(lin).max()), tol["linearity"], **tag))
    grid = TorusGrid.build(2, 16)
    try:
        tops.weighted_dirac(grid, grid.coordinates()[..., 0])
        raised = False
    except PreconditionError:
        raised = True
    rows.append(check("ramp-weight-rejected", 0.0 if raised else 1.0, 0.0))
    return rows


# -- spectra --------------------------------------------------------------------

def run_spectra(p, seed, tol, cat: Catalog) -> List[dict]:
    rows = []
    n, N, count = 2, p["N"], p["count"]
    kw = dict(seed=seed, tol=p["eigen_tol"])
    for anti in (False, True):
        grid = TorusGrid.build(n, N, antiperiodic=anti)
        spin = "antiperiodic" if anti else "periodic"
        f = trig_field(grid, [(0.5, [1, 0], 0.3), (0.3, [1, 1], 1.0)])
        rep = eigen.spectra_equal(tops.flat_dirac(grid), tops.weighted_dirac(grid, f), count, **kw)
        rows.append(check("spectrum-equality", rep["max_abs_difference"], tol["spectrum"], spin=spin, N=N,
                          count=count, max_residual=rep["max_residual"], magnitudes=rep["magnitudes_D"]))
        if anti:
            smallest = rep["magnitudes_D"][0]
            rows.append(check("antiperiodic-lowest", abs(smallest - math.sqrt(0.5)), tol["closed_form"],
                              lowest=smallest))
    grid = TorusGrid.build(n, N)
    flat = eigen.dirac_spectrum(tops.flat_dirac(grid), p["kernel_count"], **kw)
    k0 = flat.kernel_dimension(p["kernel_threshold"])
    for s in range(p["conformal_seeds"]):
        phi = 0.3 * random_band_limited(grid, None, kmax=2, seed=seed + 100 + s, complex_valued=False)
        res = eigen.dirac_spectrum(tops.curved_dirac(grid, phi), p["kernel_count"], **kw)
        k = res.kernel_dimension(p["kernel_threshold"])
        rows.append(check("kernel-dimension", abs(k - k0), 0.0, flat_kernel=k0, curved_kernel=k, phi_seed=seed + 100 + s,
                          eigenvalues=[float(v) for v in res.eigenvalues]))
    c = p["homothety"]
    anti = TorusGrid.build(n, N, antiperiodic=True)
    base = eigen.dirac_spectrum(tops.flat_dirac(anti), count, **kw)
    scaled = eigen.dirac_spectrum(tops.curved_dirac(anti, np.full(anti.shape, c)), count, **kw)
    diff = float(np.max(np.abs(np.sort(np.abs(scaled.eigenvalues)) - math.exp(-c) * np.sort(np.abs(base.eigenvalues)))))
    rows.append(check("homothety-scaling", diff, tol["closed_form"], c=c))
    return rows


# -- principal eigenvalues ------------------------------------------------------------

def _phi(p):
    return tp.sin_phi(p["phi_amplitude"], 0, 1)


def run_mu_interpolation(p, seed, tol, cat: Catalog) -> List[dict]:
    rows = []
    n, N = 3, p["N"]
    grid = TorusGrid.build(n, N)
    ct = tp.ConformalTorus.build(grid, _phi(p))
    kw = dict(seed=seed, tol=p["eigen_tol"])
    mus = {}
    for branch in ("m_positive", "m_negative"):
        values = []
        for m in p[branch]:
            r = tp.principal_eigenvalue(grid, None, m, ct=ct, **kw)
            mus[m] = r.mu
            values.append(r.mu)
            rows.append(check("principal-curvature-defect", r.curvature_defect, tol["defect"], m=m, mu=r.mu,
                              residual=r.residual))
        diffs = np.diff(values)
        rows.append(check("monotone", float(max(0.0, -diffs.min())) if diffs.size else 0.0, tol["monotone"],
                          branch=branch, m=list(p[branch]), mu=values))
    lam_yam = tp.lowest_eigenpair(ct, 4.0, **kw).value
    lam_conf = tp.lowest_eigenpair(ct, tp.yamabe_coefficient(n), **kw).value
    ref = max(abs(lam_yam), abs(lam_conf))
    m_top, m_bottom = max(p["m_positive"]), max(p["m_negative"])
    rows.append(check("endpoint-yamabe", abs(mus[m_top] - lam_yam) / ref, tol["endpoint_rel"], m=m_top,
                      mu=mus[m_top], lambda1=lam_yam, reference=ref))
    rows.append(check("endpoint-conformal", abs(mus[m_bottom] - lam_conf) / ref, tol["endpoint_rel"], m=m_bottom,
                      mu=mus[m_bottom], lambda1=lam_conf, reference=ref))
    rows.append(check("conformal-laplacian-kernel", abs(lam_conf), tol["kernel"], lambda1=lam_conf))
    rows.append(check("below-yamabe", max(0.0, max(mus[m] for m in p["m_positive"]) - lam_yam), tol["monotone"],
                      lambda1=lam_yam))
    flat_grid = TorusGrid.build(n, p["flat_N"])
    for m in p["flat_m"]:
        r = tp.principal_eigenvalue(flat_grid, np.zeros(flat_grid.shape), m, **kw)
        rows.append(check("flat-mu", abs(r.mu), tol["flat"], m=m, f_range=float(np.ptp(r.f))))
    rep = tp.interpolation_report(grid, _phi(p), list(p["m_positive"]) + list(p["m_negative"]),
                                  natural_m=p["natural_m"], tolerance=tol["slack"], dirac_N=p["dirac_N"],
                                  seed=seed, known_mu=mus)
    for r in rep.rows:
        rows.append(check("interpolation-slack", -r["slack"], r["tolerance"],
                          **{k: v for k, v in r.items() if k not in ("tolerance", "passed")}))
    for r in rep.weight_rows:
        rows.append(check("sampled-weight-slack", -r["slack"], r["tolerance"],
                          **{k: v for k, v in r.items() if k not in ("tolerance", "passed")}))
    return rows


def run_negative_m(p, seed, tol, cat: Catalog) -> List[dict]:
    rows = []
    grid = TorusGrid.build(3, p["N"])
    res = tp.negative_m_weight(grid, _phi(p), p["m_values"], slack=tol["slack"])
    for r in res.rows:
        rows.append(check("negative-m-lower-bound", -r["slack"], r["tolerance"],
                          **{k: v for k, v in r.items() if k not in ("tolerance", "passed", "slack")}))
    ct = tp.ConformalTorus.build(grid, _phi(p))
    rows.append(check("gauge-mean-zero", abs(ct.mean(res.f)), tol["gauge"]))
    try:
        tp.negative_m_weight(TorusGrid.build(3, 16), np.zeros((16, 16, 16)))
        raised = False
    except PreconditionError:
        raised = True
    rows.append(check("flat-precondition", 0.0 if raised else 1.0, 0.0))
    return rows


EXPERIMENTS: Dict[str, Experiment] = {
    "curvature-identities": Experiment(
        "curvature-identities", run_curvature_identities,
        {"dims": [3, 4, 5], "points": 100, "box": 2.0, "metric": "trig-random", "metric_params": {"amplitude": 0.3},
         "weight": "trig-random-weight", "weight_params": {"amplitude": 0.5}, "warped": [[3, 1], [3, 2], [2, 3]]},
        {"conformal": 1e-8, "warped": 1e-6},
        "conformal scalar-curvature identity and warped-product curvatures"),
    "mass-suite": Experiment(
        "mass-suite", run_mass_suite,
        {"schedule": {"start": 10.0, "ratio": 2.0, "count": 6, "nodes": 16},
         "regression": {"metric": "schwarzschild", "params": {"M": 1.0}, "n": 3},
         "m_values": [1, 2, 3],
         "pairs": [
             {"metric": "schwarzschild", "metric_params": {"M": 1.0}, "weight": "decay", "weight_params": {"A": 0.5, "tau": 1.0}},
             {"metric": "euclidean", "weight": "decay", "weight_params": {"A": 0.5, "tau": 1.0}},
             {"metric": "power-law", "metric_params": {"c": 1.0, "tau": 1.0}, "weight": "decay",
              "weight_params": {"A": 0.3, "tau": 1.5}},
             {"metric": "conformally-flat", "metric_params": {"amplitudes": [0.5, 0.3]}, "weight": "dipole",
              "weight_params": {"A": 0.4, "tau": 1.0}},
             {"metric": "schwarzschild", "metric_params": {"M": 2.0}, "weight": "decay", "weight_params": {"A": 1.0, "tau": 1.2}},
             {"metric": "conformally-flat", "metric_params": {"amplitudes": [0.5, 0.3]}, "weight": "decay",
              "weight_params": {"A": -0.4, "tau": 1.0}},
         ]},
        {"regression_rel": 5e-3, "euclidean_abs": 1e-8, "agreement_rel": 1e-2},
        "ADM, weighted and warped-product masses"),
    "clifford-suite": Experiment(
        "clifford-suite", run_clifford_suite,
        {"max_k": 10, "samples": 1000, "product_cases": [[2, 2], [2, 3], [3, 2], [3, 3]]},
        {"exact": 1e-13, "square": 1e-12, "form": 1e-12},
        "gamma matrices, volume elements and product spinor modules"),
    "warped-dirac": Experiment(
        "warped-dirac", run_warped_dirac,
        {"cases": [[2, 2], [3, 2], [3, 1]], "points": 20, "box": 2.0, "metric": "trig-random",
         "metric_params": {"amplitude": 0.5}, "weight": "trig-random-weight", "weight_params": {"amplitude": 0.5}},
        {"residual": 1e-6},
        "warped-product connection and Dirac factorization"),
    "torus-identities": Experiment(
        "torus-identities", run_torus_identities,
        {"dims": [2, 3], "N": 32, "kmax": 3, "weights": ["zero", "sin-cos", "trig-random"]},
        {"identity": 1e-8, "trivial": 1e-10, "linearity": 1e-12},
        "weighted Lichnerowicz and Ricci identities on flat tori"),
    "spectra": Experiment(
        "spectra", run_spectra,
        {"N": 32, "count": 10, "kernel_count": 6, "kernel_threshold": 1e-6, "conformal_seeds": 3,
         "homothety": 0.4, "eigen_tol": 1e-9},
        {"spectrum": 1e-6, "closed_form": 1e-8},
        "Dirac spectra of weighted and conformally changed operators"),
    "mu-interpolation": Experiment(
        "mu-interpolation", run_mu_interpolation,
        {"N": 32, "phi_amplitude": 0.3, "m_positive": [2, 10, 100, 10000], "m_negative": [-10, -5, -2.5, -2.001],
         "flat_N": 16, "flat_m": [2, -5], "natural_m": [1, 2, 3], "dirac_N": 16, "eigen_tol": 1e-9},
        {"defect": 1e-6, "monotone": 1e-10, "endpoint_rel": 2e-2, "kernel": 1e-8, "flat": 1e-10, "slack": 1e-6},
        "principal eigenvalues between the two conformal endpoints"),
    "negative-m": Experiment(
        "negative-m", run_negative_m,
        {"N": 32, "phi_amplitude": 0.3, "m_values": [-1.0, -0.5, -0.1]},
        {"slack": 1e-3, "gauge": 1e-12},
        "weights with R^m_f above the mean curvature for m in [-1, 0)"),
}
