"""Command-line entry point: ``smms-lab run <config>`` and ``smms-lab list``.

Exit codes: 0 when every assertion row passes, 1 when some row fails, 2 for
usage errors (bad config, unknown names, invalid parameters).  Nothing is
written when the exit code is 2.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from . import __version__
from .catalog import Catalog, default_catalog
from .errors import InvalidParameterError, PreconditionError
from .experiments import EXPERIMENTS

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_jsonable)


def _jsonable(obj):
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def load_config(path) -> Dict[str, Any]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise UsageError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a mapping")
    unknown = set(cfg) - {"experiment", "seed", "params", "tolerances", "aliases"}
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "experiment" not in cfg:
        raise UsageError("config needs an 'experiment' key")
    return cfg


def build_catalog(cfg) -> Catalog:
    cat = default_catalog()
    for entry in cfg.get("aliases") or []:
        if not isinstance(entry, dict) or "name" not in entry or "base" not in entry:
            raise UsageError("each alias needs 'name' and 'base'")
        cat.register_alias(entry["name"], entry["base"], entry.get("params") or {})
    return cat


def _merge(defaults, overrides, what):
    merged = copy.deepcopy(dict(defaults))
    for key, value in (overrides or {}).items():
        if key not in merged:
            raise UsageError(f"unknown {what} {key!r}")
        merged[key] = value
    return merged


def resolve(cfg, seed: Optional[int] = None, tolerance_scale: float = 1.0):
    """Experiment, merged params, merged tolerances and seed for a config."""
    name = cfg["experiment"]
    if name not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {name!r}; try 'smms-lab list'")
    exp = EXPERIMENTS[name]
    params = _merge(exp.params, cfg.get("params"), "parameter")
    tols = _merge(exp.tolerances, cfg.get("tolerances"), "tolerance")
    if tolerance_scale <= 0:
        raise UsageError("--tolerance-scale must be positive")
    tols = {k: float(v) * tolerance_scale for k, v in tols.items()}
    seed = int(cfg.get("seed", 0) if seed is None else seed)
    return exp, params, tols, seed


def rows_to_csv(rows: List[dict]) -> str:
    keys = ["check", "passed", "value", "tolerance"]
    extra = sorted({k for r in rows for k in r} - set(keys))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys + extra)
    for r in rows:
        cells = []
        for k in keys + extra:
            v = r.get(k, "")
            cells.append(canonical_json(v) if isinstance(v, (list, dict)) else ("" if v is None else v))
        writer.writerow([repr(c) if isinstance(c, float) else c for c in cells])
    return buf.getvalue()


def run_config(cfg, out: Path, seed: Optional[int] = None, tolerance_scale: float = 1.0, stream=None) -> int:
    stream = stream or sys.stdout
    exp, params, tols, seed = resolve(cfg, seed, tolerance_scale)
    cat = build_catalog(cfg)
    try:
        rows = exp.run(params, seed, tols, cat)
    except (InvalidParameterError, KeyError, TypeError) as exc:
        raise UsageError(f"{exp.name}: {exc}") from exc
    passed = all(r["passed"] for r in rows)
    canonical_cfg = {"experiment": exp.name, "seed": seed, "params": params, "tolerances": tols,
                     "aliases": cfg.get("aliases") or []}
    digest = hashlib.sha1(canonical_json(canonical_cfg).encode()).hexdigest()
    doc = {
        "experiment": exp.name,
        "provenance": f"smmslab {__version__} config-sha1 {digest}",
        "config": canonical_cfg,
        "passed": passed,
        "rows": rows,
    }
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{exp.name}.json").write_text(json.dumps(doc, sort_keys=True, indent=2, default=_jsonable) + "\n")
    (out / f"{exp.name}.csv").write_text(rows_to_csv(rows))
    failed = [r for r in rows if not r["passed"]]
    print(f"{exp.name}: {len(rows) - len(failed)}/{len(rows)} checks passed", file=stream)
    for r in failed:
        print(f"FAIL {r['check']}: value={r['value']:.3e} tolerance={r['tolerance']:.3e} "
              + canonical_json({k: v for k, v in r.items() if k not in ("check", "value", "tolerance", "passed")}),
              file=stream)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_list(args) -> int:
    cat = build_catalog(load_config(args.config)) if args.config else default_catalog()
    print("experiments:")
    for name in sorted(EXPERIMENTS):
        print(f"  {name}  {EXPERIMENTS[name].summary}")
    print(cat.listing())
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smms-lab", description="Numerical experiments on weighted manifolds.")
    p.add_argument("--version", action="version", version=f"smms-lab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the experiment named in a YAML config")
    run.add_argument("config")
    run.add_argument("--out", default="results", help="output directory (default: results)")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--tolerance-scale", type=float, default=1.0, help="multiply every tolerance")
    lst = sub.add_parser("list", help="list experiments, metric and weight families")
    lst.add_argument("--config", default=None, help="include aliases from this config")
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "list":
            return cmd_list(args)
        return run_config(load_config(args.config), Path(args.out), args.seed, args.tolerance_scale)
    except (UsageError, InvalidParameterError) as exc:
        print(f"smms-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"smms-lab: precondition failed: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
