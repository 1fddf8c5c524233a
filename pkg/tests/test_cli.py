import json
import os

import pytest

from singlab.cli import main
from singlab.cli.experiments import REGISTRY
from singlab.cli.manifest import ManifestError, parse_manifest

KINDS = ["delta-estimate", "metric-suite", "phi-chain", "boundary-rays", "cone-exponents", "thm12-scan",
         "shifted-scan", "scaling-attractor", "hardy", "green", "martin", "bhp", "oscillation", "dirichlet",
         "criticality", "fatou", "minimal-growth"]


def test_registry_covers_all_kinds():
    assert sorted(REGISTRY) == sorted(KINDS)


def test_cone_exponents_report(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(["cone-exponents", "--p", "3", "--q", "3", "--potential", "jacobi"]) == 0
    data = json.loads((tmp_path / "singlab-out" / "cone-exponents.json").read_text())
    sc = data["experiments"][0]["scalars"]
    assert (sc["alpha_plus"], sc["alpha_minus"]) == (-2.0, -3.0)


def test_thm12_failure_exit_1(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["thm12-scan", "--lam", "0.1"]) == 1
    data = json.loads((tmp_path / "singlab-out" / "thm12-scan.json").read_text())
    assert data["experiments"][0]["flags"]["mu_lower"] is False


def test_malformed_manifest_exit_2(tmp_path, capsys):
    p = tmp_path / "m.json"
    p.write_text('{\n  "experiments": [\n    {"kind": "hardy",}\n  ]\n}\n')
    assert main(["run", str(p)]) == 2
    assert "m.json:3:" in capsys.readouterr().err


def test_unknown_key_has_position():
    with pytest.raises(ManifestError) as exc:
        parse_manifest('{"experiments": [\n {"kind": "hardy", "params": {"n_nodez": 10}}]}')
    assert exc.value.line == 2


def test_unknown_kind_and_bad_resolutions():
    with pytest.raises(ManifestError):
        parse_manifest('{"kind": "nope"}')
    with pytest.raises(ManifestError):
        parse_manifest('{"kind": "green", "resolutions": [0]}')


def test_solver_failure_exit_3(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    # JACOBI exponents on C^{1,1} (n = 3) are complex: the fit cannot be run
    assert main(["cone-exponents", "--p", "1", "--q", "1"]) in (1, 3)


def test_manifest_determinism_and_workers(tmp_path, monkeypatch):
    m = {"experiments": [{"kind": "hardy", "id": "h", "params": {"n_nodes": 300}},
                         {"kind": "oscillation", "id": "o", "resolutions": [64]},
                         {"kind": "scaling-attractor", "id": "s"}],
         "output_dir": "out", "report_name": "r"}
    p = tmp_path / "m.json"
    p.write_text(json.dumps(m))
    monkeypatch.setenv("SINGLAB_WORKERS", "3")
    assert main(["run", str(p)]) == 0
    first = (tmp_path / "out" / "r.csv").read_bytes()
    monkeypatch.setenv("SINGLAB_WORKERS", "1")
    assert main(["run", str(p)]) == 0
    assert (tmp_path / "out" / "r.csv").read_bytes() == first
    ids = [line.split(",")[0] for line in first.decode().splitlines()[1:]]
    assert ids == sorted(ids, key=["h", "o", "s"].index)


def test_plot_kinds(tmp_path, capsys):
    m = {"experiments": [{"kind": "hardy", "id": "h", "params": {"n_nodes": 300}, "tolerances": {"target": 0.1}},
                         {"kind": "oscillation", "id": "o", "resolutions": [64]}],
         "output_dir": str(tmp_path), "report_name": "r"}
    p = tmp_path / "m.json"
    p.write_text(json.dumps(m))
    main(["run", str(p)])
    capsys.readouterr()
    assert main(["plot", str(tmp_path / "r.json"), "--kind", "osc"]) == 0
    rows = [tuple(map(float, l.split())) for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
    ys = [y for _, y in rows]
    assert all(y > 0 for y in ys) and all(a >= b for a, b in zip(ys, ys[1:]))
    assert main(["plot", str(tmp_path / "r.json"), "--kind", "lambda"]) == 0
    ys = [float(l.split()[1]) for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
    assert all(a > b for a, b in zip(ys, ys[1:]))
    assert main(["plot", str(tmp_path / "r.json"), "--kind", "bogus"]) == 2


def test_plot_empty_report(tmp_path, capsys):
    p = tmp_path / "empty.json"
    p.write_text("")
    assert main(["plot", str(p), "--kind", "delta"]) == 0
    assert capsys.readouterr().out == "# x y\n"


def test_bad_workers_env(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("SINGLAB_WORKERS", "zero")
    assert main(["scaling-attractor"]) == 2
