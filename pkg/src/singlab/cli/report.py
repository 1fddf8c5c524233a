"""Report writers and plot-data extraction.

A run writes three files into the output directory:

``<name>.csv``
    Long format ``experiment_id,kind,digest,field,value``; one row per
    scalar, flag and series point. Runtimes are excluded so that two runs
    with identical inputs give byte-identical CSV files.
``<name>.json``
    Summary with the resolved configuration, scalars, flags and series.
``<name>.timing.json``
    Wall-clock seconds per experiment.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

__all__ = ["write_report", "plot_data", "PLOT_KINDS"]

PLOT_KINDS = {
    "osc": ("osc",),
    "lambda": ("lambda_m",),
    "ratio": ("ratio:",),
    "delta": ("delta",),
}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def csv_text(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["experiment_id", "kind", "digest", "field", "value"])
    for r in results:
        cfg, dg, out = r["config"], r["digest"], r["outcome"]
        for k, v in out.scalars.items():
            w.writerow([cfg.id, cfg.kind, dg, k, _fmt(v)])
        for k, v in out.flags.items():
            w.writerow([cfg.id, cfg.kind, dg, f"flag:{k}", _fmt(bool(v))])
        for k, pts in out.series.items():
            for i, (x, y) in enumerate(pts):
                w.writerow([cfg.id, cfg.kind, dg, f"series:{k}[{i}]", f"{_fmt(x)} {_fmt(y)}"])
        if r.get("error"):
            w.writerow([cfg.id, cfg.kind, dg, "error", r["error"]])
    return buf.getvalue()


def write_report(results, output_dir, name) -> dict:
    """Write CSV, JSON summary and timing files; return their paths."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"csv": out / f"{name}.csv", "json": out / f"{name}.json", "timing": out / f"{name}.timing.json"}
    paths["csv"].write_text(csv_text(results))
    summary = {"experiments": []}
    for r in results:
        o = r["outcome"]
        summary["experiments"].append({
            "id": r["config"].id, "kind": r["config"].kind, "digest": r["digest"],
            "config": r["config"].canonical(), "passed": r["passed"], "error": r.get("error"),
            "scalars": o.scalars, "flags": {k: bool(v) for k, v in o.flags.items()}, "series": o.series,
        })
    summary["passed"] = all(r["passed"] for r in results)
    paths["json"].write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    timing = {r["config"].id: round(r["seconds"], 6) for r in results}
    paths["timing"].write_text(json.dumps(timing, indent=2) + "\n")
    return paths


def plot_data(report_path, kind: str) -> str:
    """Two-column ``x y`` text for one plot kind from a JSON summary.

    Blocks from several series are separated by a comment line naming the
    experiment and series. An empty report yields only the header.
    """
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {sorted(PLOT_KINDS)}")
    prefixes = PLOT_KINDS[kind]
    text = Path(report_path).read_text()
    data = json.loads(text) if text.strip() else {}
    lines = ["# x y"]
    for e in data.get("experiments", []):
        for name, pts in e.get("series", {}).items():
            if not any(name == p or (p.endswith(":") and name.startswith(p)) for p in prefixes):
                continue
            lines.append(f"# {e['id']} {name}")
            lines.extend(f"{_fmt(x)} {_fmt(y)}" for x, y in pts)
    return "\n".join(lines) + "\n"
