import json
import math

import pytest
import yaml

from smmslab import __version__
from smmslab.cli import main


def _config(tmp_path, doc, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return str(path)


FAST_MASS = {"experiment": "mass-suite",
             "params": {"m_values": [1], "pairs": [{"metric": "euclidean", "weight": "decay",
                                                    "weight_params": {"A": 0.5, "tau": 1.0}}]}}


def test_list_shows_experiments_and_aliases(tmp_path, capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("curvature-identities", "mass-suite", "spectra", "schwarzschild"):
        assert name in out
    cfg = _config(tmp_path, {"experiment": "mass-suite",
                             "aliases": [{"name": "heavy-bh", "base": "schwarzschild", "params": {"M": 3.0}}]})
    assert main(["list", "--config", cfg]) == 0
    assert "heavy-bh" in capsys.readouterr().out


def test_version(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


@pytest.mark.parametrize("doc", [
    {"experiment": "no-such-experiment"},
    {"experiment": "curvature-identities", "params": {"metric": "no-such-metric"}},
    {"experiment": "curvature-identities", "params": {"bogus": 1}},
    {"experiment": "curvature-identities", "tolerances": {"bogus": 1.0}},
    {"experiment": "curvature-identities", "extra": 1},
    {"seed": 3},
])
def test_usage_errors_write_nothing(tmp_path, doc):
    out = tmp_path / "out"
    assert main(["run", _config(tmp_path, doc), "--out", str(out)]) == 2
    assert not out.exists()


def test_missing_config_and_bad_flags(tmp_path):
    assert main(["run", str(tmp_path / "missing.yaml")]) == 2
    assert main(["frobnicate"]) == 2
    cfg = _config(tmp_path, FAST_MASS)
    assert main(["run", cfg, "--out", str(tmp_path / "o"), "--tolerance-scale", "0"]) == 2


def test_mass_run_writes_reports(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", _config(tmp_path, FAST_MASS), "--out", str(out)]) == 0
    assert "checks passed" in capsys.readouterr().out
    doc = json.loads((out / "mass-suite.json").read_text())
    assert doc["passed"] and doc["provenance"].startswith(f"smmslab {__version__} config-sha1 ")
    schw = [r for r in doc["rows"] if r["check"] == "schwarzschild-mass"][0]
    assert abs(schw["limit"] - 16 * math.pi) <= 5e-3 * 16 * math.pi
    header = (out / "mass-suite.csv").read_text().splitlines()[0]
    assert header.startswith("check,passed,value,tolerance")


def test_tiny_tolerance_fails_with_exit_one(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", _config(tmp_path, FAST_MASS), "--out", str(out), "--tolerance-scale", "1e-12"])
    assert code == 1
    assert "FAIL schwarzschild-mass" in capsys.readouterr().out
    assert json.loads((out / "mass-suite.json").read_text())["passed"] is False


def test_zero_weight_conformal_residual_vanishes(tmp_path):
    doc = {"experiment": "curvature-identities", "seed": 5,
           "params": {"dims": [3], "points": 10, "weight": "zero", "weight_params": {}, "warped": []}}
    out = tmp_path / "out"
    assert main(["run", _config(tmp_path, doc), "--out", str(out)]) == 0
    rows = json.loads((out / "curvature-identities.json").read_text())["rows"]
    assert [r["value"] for r in rows] == [0.0]


def test_alias_used_in_run(tmp_path):
    doc = dict(FAST_MASS, aliases=[{"name": "heavy-bh", "base": "schwarzschild", "params": {"M": 2.0}}])
    doc["params"] = dict(doc["params"], regression={"metric": "heavy-bh", "params": {}, "n": 3})
    out = tmp_path / "out"
    assert main(["run", _config(tmp_path, doc), "--out", str(out)]) == 0
    schw = json.loads((out / "mass-suite.json").read_text())["rows"][0]
    assert schw["expected"] == pytest.approx(32 * math.pi)


def test_seed_override_and_determinism(tmp_path):
    doc = {"experiment": "curvature-identities", "params": {"dims": [3], "points": 20, "warped": [[2, 1]]}}
    cfg = _config(tmp_path, doc)
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    for out, seed in ((a, "1"), (b, "1"), (c, "2")):
        assert main(["run", cfg, "--out", str(out), "--seed", seed]) == 0
    name = "curvature-identities.json"
    assert (a / name).read_bytes() == (b / name).read_bytes()
    assert (a / name).read_bytes() != (c / name).read_bytes()
    assert (a / "curvature-identities.csv").read_bytes() == (b / "curvature-identities.csv").read_bytes()


def test_regression_metric_must_be_schwarzschild(tmp_path):
    doc = dict(FAST_MASS)
    doc["params"] = dict(doc["params"], regression={"metric": "euclidean", "params": {}, "n": 3})
    assert main(["run", _config(tmp_path, doc), "--out", str(tmp_path / "o")]) == 2
