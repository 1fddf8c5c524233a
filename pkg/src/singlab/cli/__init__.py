"""Command-line experiment runner ``singlab``.

Usage::

    singlab run MANIFEST.json
    singlab KIND [--key value ...] [--seed N] [--resolutions 64,128] [--tol-NAME value]
    singlab plot REPORT.json --kind {osc,lambda,ratio,delta}
    singlab list

Exit codes: 0 all flags passed, 1 a flag failed, 2 malformed input,
3 a numerical solver failed. ``SINGLAB_WORKERS`` caps the number of
experiments run concurrently (default 1); results are always reported in
manifest order.
"""

from __future__ import annotations

import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .experiments import REGISTRY, Outcome, run_experiment
from .manifest import ManifestError, digest, load_manifest, parse_manifest
from .report import plot_data, write_report

__all__ = ["main", "run_manifest", "EXIT_OK", "EXIT_ASSERT", "EXIT_PARSE", "EXIT_SOLVER"]

EXIT_OK, EXIT_ASSERT, EXIT_PARSE, EXIT_SOLVER = 0, 1, 2, 3


def _solver_errors():
    from ..linalg import SolverError
    from ..metric_core.geodesics import UnreachableError
    from ..potential_lab import MaximumPrincipleError, NotMonotoneError, NotSubcriticalError
    from ..spectral_sov import NoRealExponentsError

    return (SolverError, MaximumPrincipleError, NotMonotoneError, NotSubcriticalError, NoRealExponentsError,
            UnreachableError, RuntimeError, ArithmeticError, MemoryError)


def _workers() -> int:
    raw = os.environ.get("SINGLAB_WORKERS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ManifestError(f"SINGLAB_WORKERS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ManifestError(f"SINGLAB_WORKERS must be a positive integer, got {raw!r}")
    return n


def _run_one(cfg):
    t0 = time.perf_counter()
    out, error, code = Outcome(), None, EXIT_OK
    try:
        out = run_experiment(cfg)
    except _solver_errors() as exc:
        error, code = f"{type(exc).__name__}: {exc}", EXIT_SOLVER
    except (ValueError, TypeError, KeyError) as exc:
        error, code = f"invalid parameters: {type(exc).__name__}: {exc}", EXIT_PARSE
    passed = code == EXIT_OK and all(bool(v) for v in out.flags.values())
    if code == EXIT_OK and not passed:
        code = EXIT_ASSERT
    return {"config": cfg, "digest": digest(cfg.canonical()), "outcome": out, "passed": passed,
            "error": error, "code": code, "seconds": time.perf_counter() - t0}


def run_manifest(manifest, workers: int | None = None):
    """Run every experiment; return ``(results, exit_code, report_paths)``.

    The exit code is the most severe outcome: parse (2) over solver (3)
    over assertion (1).
    """
    workers = _workers() if workers is None else workers
    exps = list(manifest.experiments)
    if workers > 1 and len(exps) > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(exps))) as pool:
            results = list(pool.map(_run_one, exps))
    else:
        results = [_run_one(c) for c in exps]
    paths = write_report(results, manifest.output_dir, manifest.report_name)
    codes = {r["code"] for r in results}
    for c in (EXIT_PARSE, EXIT_SOLVER, EXIT_ASSERT):
        if c in codes:
            return results, c, paths
    return results, EXIT_OK, paths


def _print_summary(results, paths, stream):
    for r in results:
        status = "PASS" if r["passed"] else ("ERROR" if r["error"] else "FAIL")
        failed = [k for k, v in r["outcome"].flags.items() if not v]
        extra = f" ({r['error']})" if r["error"] else (f" failed: {', '.join(failed)}" if failed else "")
        print(f"{status} {r['config'].id} [{r['config'].kind}] {r['seconds']:.2f}s{extra}", file=stream)
    print(f"report: {paths['json']}", file=stream)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _kind_manifest(kind: str, argv: list) -> dict:
    entry = {"kind": kind, "params": {}}
    top = {}
    i = 0
    while i < len(argv):
        tok = argv[i]
        if not tok.startswith("--"):
            raise ManifestError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(argv):
                raise ManifestError(f"missing value for {tok}")
            val = argv[i + 1]
            i += 2
        key = key.replace("-", "_") if not key.startswith("tol-") else key
        if key == "resolutions":
            try:
                entry["resolutions"] = [int(x) for x in val.split(",") if x]
            except ValueError:
                raise ManifestError(f"--resolutions expects comma-separated integers, got {val!r}") from None
        elif key == "seed":
            entry["seed"] = _parse_value(val)
        elif key == "id":
            entry["id"] = val
        elif key in ("output_dir", "report_name"):
            top[key] = val
        elif key.startswith("tol-"):
            entry.setdefault("tolerances", {})[key[4:].replace("-", "_")] = _parse_value(val)
        else:
            entry["params"][key] = _parse_value(val)
    return {**top, "experiments": [entry]}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out, err = sys.stdout, sys.stderr
    if not argv or argv[0] in ("-h", "--help"):
        print(__doc__, file=out)
        return EXIT_OK if argv else EXIT_PARSE
    cmd, rest = argv[0], argv[1:]
    try:
        if cmd == "list":
            for k, spec in sorted(REGISTRY.items()):
                print(f"{k:18s} {spec.doc}", file=out)
                print(f"{'':18s} params: {json.dumps(spec.params)}", file=out)
            return EXIT_OK
        if cmd == "plot":
            if len(rest) != 3 or rest[1] != "--kind":
                raise ManifestError("usage: singlab plot REPORT.json --kind {osc,lambda,ratio,delta}")
            try:
                print(plot_data(rest[0], rest[2]), end="", file=out)
            except (OSError, json.JSONDecodeError) as exc:
                raise ManifestError(f"cannot read report: {exc}") from None
            return EXIT_OK
        if cmd == "run":
            if len(rest) != 1:
                raise ManifestError("usage: singlab run MANIFEST.json")
            manifest = load_manifest(rest[0])
        elif cmd in REGISTRY:
            raw = _kind_manifest(cmd, rest)
            manifest = parse_manifest(json.dumps(raw), cmd, Path.cwd())
        else:
            raise ManifestError(f"unknown command or experiment kind {cmd!r}; try 'singlab list'")
        results, code, paths = run_manifest(manifest)
    except ManifestError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE
    _print_summary(results, paths, out)
    return code
