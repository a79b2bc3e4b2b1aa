"""End-to-end acceptance runs through the CLI code path.

Each experiment runs once per session with its default configuration. Every
criterion checks its assertion rows and wall-clock budget, and records a
pass/fail line that conftest prints at the end of the session.
"""

import io
import json
import math
import time

import pytest

from smmslab.cli import EXIT_OK, run_config

_CACHE = {}


def _run(name, out):
    stream = io.StringIO()
    t0 = time.perf_counter()
    code = run_config({"experiment": name}, out, stream=stream)
    elapsed = time.perf_counter() - t0
    doc = json.loads((out / f"{name}.json").read_text())
    return {"code": code, "elapsed": elapsed, "doc": doc, "rows": doc["rows"], "log": stream.getvalue(),
            "bytes": (out / f"{name}.json").read_bytes()}


@pytest.fixture(scope="session")
def run(tmp_path_factory):
    def get(name):
        if name not in _CACHE:
            _CACHE[name] = _run(name, tmp_path_factory.mktemp(name))
        return _CACHE[name]
    return get


def _rows(res, *names):
    return [r for r in res["rows"] if r["check"] in names]


def _verdict(record, number, failures, elapsed, budget):
    if elapsed > budget:
        failures.append(f"runtime {elapsed:.1f}s over {budget:.0f}s")
    ok = not failures
    record[number] = (ok, f"{elapsed:.1f}s / {budget:.0f}s" + ("" if ok else "  " + "; ".join(failures)))
    assert ok, failures


def _failed(rows):
    return [f"{r['check']} value={r['value']:.3e} tol={r['tolerance']:.1e}" for r in rows if not r["passed"]]


def test_criterion_01_conformal_identity(run, acceptance_record):
    res = run("curvature-identities")
    rows = _rows(res, "conformal-identity")
    failures = _failed(rows)
    if sorted(r["n"] for r in rows) != [3, 4, 5] or any(r["points"] < 100 for r in rows):
        failures.append("coverage")
    if any(r["tolerance"] > 1e-8 for r in rows):
        failures.append("tolerance looser than 1e-8")
    _verdict(acceptance_record, 1, failures, res["elapsed"], 10)


def test_criterion_02_warped_curvature(run, acceptance_record):
    res = run("curvature-identities")
    rows = _rows(res, "warped-scalar", "warped-horizontal-ricci")
    failures = _failed(rows)
    cases = {(r["n"], r["m"]) for r in rows}
    if cases != {(3, 1), (3, 2), (2, 3)} or len(rows) != 6:
        failures.append(f"cases {sorted(cases)}")
    _verdict(acceptance_record, 2, failures, res["elapsed"], 30)


def test_criterion_03_mass_regression(run, acceptance_record):
    res = run("mass-suite")
    rows = _rows(res, "schwarzschild-mass", "euclidean-mass")
    failures = _failed(rows)
    schw = _rows(res, "schwarzschild-mass")
    if len(schw) != 1 or abs(schw[0]["limit"] - 16 * math.pi) > 5e-3 * 16 * math.pi:
        failures.append("schwarzschild limit not within 0.5% of 16 pi")
    if not _rows(res, "euclidean-mass"):
        failures.append("no euclidean row")
    _verdict(acceptance_record, 3, failures, res["elapsed"], 60)


def test_criterion_04_mass_agreement(run, acceptance_record):
    res = run("mass-suite")
    conf = [r for r in res["rows"] if r["check"] == "conformal-mass-equality"]
    indep = [r for r in res["rows"] if r["check"] == "smms-mass-m-independence"]
    failures = _failed(conf + indep)
    pairs = {r["pair"] for r in conf}
    if len(pairs) < 5:
        failures.append(f"only {len(pairs)} pairs")
    if {r["m"] for r in indep} != {1, 2, 3}:
        failures.append("m coverage")
    _verdict(acceptance_record, 4, failures, res["elapsed"], 300)


def test_criterion_05_clifford_suite(run, acceptance_record):
    res = run("clifford-suite")
    failures = _failed(res["rows"])
    gam = _rows(res, "gamma-relations")
    if sorted(r["k"] for r in gam) != list(range(1, 11)) or any(r["tolerance"] > 1e-13 for r in gam):
        failures.append("gamma coverage")
    sq = _rows(res, "product-square-identity")
    if len({r["case"] for r in sq}) < 3 or any(r["samples"] < 1000 for r in sq):
        failures.append("square-identity coverage")
    if not _rows(res, "volume-element") or not _rows(res, "tensor-product-form"):
        failures.append("missing volume-element or tensor-product rows")
    _verdict(acceptance_record, 5, failures, res["elapsed"], 30)


def test_criterion_06_warped_dirac(run, acceptance_record):
    res = run("warped-dirac")
    failures = _failed(res["rows"])
    fact = [r for r in res["rows"] if r["check"].startswith("warped-")]
    if len({(r["n"], r["m"]) for r in fact}) < 3 or any(r["points"] < 20 for r in fact):
        failures.append("parity coverage")
    if any(r["tolerance"] > 1e-6 for r in fact):
        failures.append("tolerance looser than 1e-6")
    if not _rows(res, "norm-decomposition"):
        failures.append("no norm-decomposition row")
    _verdict(acceptance_record, 6, failures, res["elapsed"], 120)


def test_criterion_07_torus_identities(run, acceptance_record):
    res = run("torus-identities")
    rows = _rows(res, "weighted-lichnerowicz", "weighted-ricci")
    failures = _failed(res["rows"])
    if {r["n"] for r in rows} != {2, 3} or any(r["N"] != 32 for r in rows):
        failures.append("grid coverage")
    if any(r["tolerance"] > 1e-8 for r in rows):
        failures.append("tolerance looser than 1e-8")
    _verdict(acceptance_record, 7, failures, res["elapsed"], 120)


def test_criterion_08_spectra(run, acceptance_record):
    res = run("spectra")
    failures = _failed(res["rows"])
    eq = _rows(res, "spectrum-equality")
    if {r["spin"] for r in eq} != {"periodic", "antiperiodic"} or any(r["count"] < 10 for r in eq):
        failures.append("spin-structure coverage")
    if len(_rows(res, "kernel-dimension")) < 3:
        failures.append("fewer than 3 conformal factors")
    _verdict(acceptance_record, 8, failures, res["elapsed"], 300)


def test_criterion_09_mu_suite(run, acceptance_record):
    mu, neg = run("mu-interpolation"), run("negative-m")
    failures = _failed(mu["rows"] + neg["rows"])
    if len(_rows(mu, "monotone")) != 2:
        failures.append("monotonicity rows")
    if not _rows(mu, "endpoint-yamabe") or not _rows(mu, "endpoint-conformal"):
        failures.append("endpoint rows")
    if {r["m"] for r in _rows(neg, "negative-m-lower-bound")} != {-1.0, -0.5, -0.1}:
        failures.append("negative m coverage")
    _verdict(acceptance_record, 9, failures, mu["elapsed"] + neg["elapsed"], 600)


def test_criterion_10_determinism(run, tmp_path, acceptance_record):
    failures = []
    t0 = time.perf_counter()
    for name in ("curvature-identities", "mass-suite", "clifford-suite", "warped-dirac", "torus-identities",
                 "negative-m"):
        again = _run(name, tmp_path / name)
        if again["bytes"] != run(name)["bytes"]:
            failures.append(name)
    _verdict(acceptance_record, 10, failures, time.perf_counter() - t0, math.inf)
