"""Experiment manifests: parsing, validation and digests."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["ManifestError", "ExperimentConfig", "Manifest", "parse_manifest", "load_manifest", "digest"]

TOP_KEYS = {"experiments", "seed", "output_dir", "report_name", "tolerances"}
EXP_KEYS = {"kind", "id", "params", "seed", "resolutions", "tolerances"}


class ManifestError(ValueError):
    """Malformed manifest; carries an optional source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, source: str = ""):
        self.line, self.column, self.source = line, column, source
        where = ""
        if line is not None:
            where = f"{source or '<manifest>'}:{line}:{column}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class ExperimentConfig:
    """One resolved experiment: defaults merged with the manifest entry."""

    kind: str
    id: str
    params: dict
    seed: int
    resolutions: tuple
    tolerances: dict

    def canonical(self) -> dict:
        return {"kind": self.kind, "id": self.id, "params": self.params, "seed": self.seed,
                "resolutions": list(self.resolutions), "tolerances": self.tolerances}


@dataclass(frozen=True)
class Manifest:
    experiments: tuple
    output_dir: Path
    report_name: str
    raw: dict = field(default_factory=dict)


def digest(obj) -> str:
    """First 16 hex digits of the SHA-256 of the canonical JSON encoding."""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _locate(text: str, key: str):
    """Line/column of the first occurrence of ``"key"`` in the source text."""
    if not text:
        return None, None
    pos = text.find(json.dumps(key))
    if pos < 0:
        return None, None
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _err(msg, text, key, source):
    line, col = _locate(text, key) if key is not None else (None, None)
    return ManifestError(msg, line, col, source)


def parse_manifest(text: str, source: str = "<manifest>", base_dir: Path | None = None) -> Manifest:
    """Parse manifest JSON text.

    Accepted shapes: ``{"experiments": [...], ...}`` or a single experiment
    object ``{"kind": ..., "params": ...}``. Unknown keys at any level and
    unknown parameters are errors.

    Raises
    ------
    ManifestError
        With line/column information where available.
    """
    from .experiments import REGISTRY

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno, source) from None
    if not isinstance(raw, dict):
        raise ManifestError("manifest must be a JSON object", 1, 1, source)
    if "kind" in raw:
        top = {k: raw[k] for k in raw if k in TOP_KEYS - {"tolerances", "seed"}}
        entry = {k: v for k, v in raw.items() if k not in top}
        raw_top = {**top, "experiments": [entry]}
    else:
        raw_top = raw
    for k in raw_top:
        if k not in TOP_KEYS:
            raise _err(f"unknown top-level key {k!r}", text, k, source)
    exps = raw_top.get("experiments")
    if not isinstance(exps, list) or not exps:
        raise _err("'experiments' must be a non-empty list", text, "experiments", source)
    seed0 = raw_top.get("seed", 0)
    tol0 = raw_top.get("tolerances", {})
    if not isinstance(tol0, dict):
        raise _err("'tolerances' must be an object", text, "tolerances", source)
    out, ids = [], set()
    for i, e in enumerate(exps):
        if not isinstance(e, dict):
            raise ManifestError(f"experiment #{i} must be an object", None, None, source)
        for k in e:
            if k not in EXP_KEYS:
                raise _err(f"unknown experiment key {k!r}", text, k, source)
        kind = e.get("kind")
        if kind not in REGISTRY:
            raise _err(f"unknown experiment kind {kind!r}", text, kind if isinstance(kind, str) else "kind", source)
        spec = REGISTRY[kind]
        params = e.get("params", {})
        if not isinstance(params, dict):
            raise _err("'params' must be an object", text, "params", source)
        for k in params:
            if k not in spec.params:
                raise _err(f"unknown parameter {k!r} for {kind}", text, k, source)
        tol = {**{k: v for k, v in tol0.items() if k in spec.tolerances}, **e.get("tolerances", {})}
        for k in e.get("tolerances", {}):
            if k not in spec.tolerances:
                raise _err(f"unknown tolerance {k!r} for {kind}", text, k, source)
        for k in tol0:
            if not any(k in REGISTRY[x.get("kind")].tolerances for x in exps if x.get("kind") in REGISTRY):
                raise _err(f"tolerance {k!r} is not used by any experiment", text, k, source)
        res = e.get("resolutions", spec.resolutions)
        if res is not None:
            if not isinstance(res, (list, tuple)) or not all(isinstance(r, int) and not isinstance(r, bool) and r > 0
                                                    for r in res):
                raise _err("'resolutions' must be a list of positive integers", text, "resolutions", source)
            res = tuple(res)
        seed = e.get("seed", seed0)
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise _err("'seed' must be a non-negative integer", text, "seed", source)
        eid = str(e.get("id", f"{kind}-{i}"))
        if eid in ids:
            raise _err(f"duplicate experiment id {eid!r}", text, eid, source)
        ids.add(eid)
        out.append(ExperimentConfig(kind, eid, {**spec.params, **params}, seed, res or (),
                                    {**spec.tolerances, **tol}))
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    odir = Path(raw_top.get("output_dir", "singlab-out"))
    if not odir.is_absolute():
        odir = base / odir
    name = str(raw_top.get("report_name", Path(source).stem if source not in ("<manifest>", "") else "report"))
    return Manifest(tuple(out), odir, name, raw)


def load_manifest(path) -> Manifest:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest: {exc.strerror}", None, None, str(path)) from None
    return parse_manifest(text, str(path), path.parent)
