"""Acceptance suite: one check per criterion, each printing a single status line.

Run either through pytest (``pytest tests/test_acceptance.py -s``) or
directly (``python tests/test_acceptance.py``) for a compact table.
"""

from __future__ import annotations

import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from singlab.cone_geometry import export_cone_graph, make_lawson_cone
from singlab.metric_core import (attach_density, build_space, classify_boundary_rays, build_phi_chain,
                                 constant_density, estimate_delta, geodesic_between, metric_inequality_suite,
                                 phi_halfspace, random_tree, euclidean_grid, validate_phi_chain)
from singlab.potential_lab import (criticality_classify, disk_fatou, disk_martin, half_disk_bhp, hardy_model,
                                   weighted_principal_eigenvalue)
from singlab.spectral_sov import (LinkOperatorSpec, attractor_limit_check, indicial_exponents,
                                  jacobi_stability_table, link_principal_eigenvalue, mixed_record,
                                  radial_exponent_fit, scaling_action, theorem12_bounds_check)

SIMONS = make_lawson_cone(3, 3)


def _c1():
    mu, _ = link_principal_eigenvalue(LinkOperatorSpec(SIMONS, "jacobi", 0.0))
    ind = indicial_exponents(mu, SIMONS.n)
    fits = [radial_exponent_fit(mu, SIMONS.n, a, n_nodes=1000).alpha for a in (ind.alpha_plus, ind.alpha_minus)]
    ok = ind.alpha_plus == -2.0 and ind.alpha_minus == -3.0 and \
        abs(fits[0] + 2) <= 1e-3 and abs(fits[1] + 3) <= 1e-3
    return ok, f"alpha=({ind.alpha_plus:g}, {ind.alpha_minus:g}) fit=({fits[0]:.7f}, {fits[1]:.7f})", 1.0


def _c2():
    rows = jacobi_stability_table(range(3, 10))
    ok = all(isinstance(d, Fraction) and real == (n >= 7) for n, d, real in rows)
    return ok, "real for n=" + ",".join(str(n) for n, _, r in rows if r), 1.0


def _c3():
    rep = theorem12_bounds_check(SIMONS, 0.01)
    ok = (abs(rep.mu + 1.31) <= 1e-12 and abs(rep.alpha_plus + 0.2774) <= 5e-5
          and abs(rep.alpha_minus + 4.7226) <= 5e-5 and rep.passed
          and abs(rep.largest_passing_lambda - 5 / 96) <= 1e-4)
    return ok, (f"mu={rep.mu:.4f} a+={rep.alpha_plus:.4f} a-={rep.alpha_minus:.4f} "
                f"lambda*={rep.largest_passing_lambda:.6f}"), 1.0


def _c4():
    sys_, exh, sizes = hardy_model(1000)
    eig = weighted_principal_eigenvalue(sys_, exh, sizes=sizes)
    cls = {lam: criticality_classify(sys_, lam, eig) for lam in (0.1, 0.25, 0.5)}
    ok = (abs(eig.estimate - 0.25) <= 0.05 * 0.25 and eig.strictly_decreasing
          and cls[0.1].label.value == "SUBCRITICAL" and cls[0.1].verified
          and cls[0.1].witness["green_min"] > 0
          and cls[0.25].label.value == "CRITICAL" and abs(cls[0.25].witness["log_slope"] - 0.5) <= 0.025
          and cls[0.5].label.value == "SUPERCRITICAL" and cls[0.5].witness["dirichlet_eigenvalue"] < 0)
    return ok, (f"lambda_inf={eig.estimate:.5f} slope={cls[0.25].witness['log_slope']:.5f} "
                f"witness={cls[0.5].witness['dirichlet_eigenvalue']:.4f}"), 30.0


def _c5():
    m = disk_martin(256)
    ok = m.sup_error <= 1e-2 and m.sup_error_alt <= 1e-2 and m.independence <= 2e-2
    return ok, f"sup={m.sup_error:.2e}/{m.sup_error_alt:.2e} independence={m.independence:.2e}", 120.0


def _c6():
    h = half_disk_bhp((64, 128, 256), n_levels=5)
    o = h.oscillation
    growth = [b / a for a, b in zip(h.negative_control, h.negative_control[1:])]
    ok = (h.stability <= 0.10 and o.fitted_rate <= o.predicted_rate + 0.1 and o.non_increasing
          and all(x > 0 for x in o.osc) and len(o.osc) == 5 and all(g > 1.5 for g in growth))
    return ok, (f"C={','.join(f'{c:.4f}' for c in h.c_measured)} rate={o.fitted_rate:.3f} "
                f"bound={o.predicted_rate + 0.1:.3f} control={','.join(f'{c:.0f}' for c in h.negative_control)}"), 180.0


def _c7():
    worst = {}
    ok = True
    for dom, mode in (("punctured_disk", "inv_dist_sigma"), ("cone", "skin_model")):
        spec = {"kind": dom} if dom != "cone" else {"kind": "cone", "link_steps": 16}
        s = build_space(spec, 256)
        d = attach_density(s, mode)
        rep = metric_inequality_suite(s, d, 1000, seed=0, slack=0.05)
        ok &= rep.passed
        worst[dom] = max(rep.worst.values())
        if dom == "punctured_disk":
            on_ray = np.flatnonzero(s.fields["theta"] == 0)
            r = s.fields["r"]
            x = int(on_ray[np.argmin(np.abs(r[on_ray] - 0.05))])
            y = int(on_ray[np.argmin(np.abs(r[on_ray] - 0.5))])
            qh = attach_density(s, "inv_dist_sigma")
            k, exact = qh(x, y), math.log(r[y] / r[x])
            ok &= abs(k - exact) <= 0.02 * exact
    return ok, (f"worst ratio disk={worst['punctured_disk']:.3f} cone={worst['cone']:.3f} "
                f"radial k={k:.4f} ln={exact:.4f}"), 120.0


def _c8():
    t = random_tree(200, seed=0)
    tree = estimate_delta(t, constant_density(t), 2000, 4, seed=0).delta_fourpoint
    disk = []
    for res in (64, 128, 256):
        s = build_space("punctured_disk", res)
        disk.append(estimate_delta(s, attach_density(s, "inv_dist_sigma"), 2000, 8, seed=0))
    rel = max(max(abs(b.delta_fourpoint - a.delta_fourpoint) / b.delta_fourpoint,
                  abs(b.delta_thin_triangles - a.delta_thin_triangles) / b.delta_thin_triangles)
              for a, b in zip(disk, disk[1:]))
    grid = []
    for n in (8, 16, 32):
        g = euclidean_grid(n)
        grid.append(estimate_delta(g, constant_density(g), 2000, 8, seed=0).delta)
    ok = tree == 0.0 and rel <= 0.15 and grid[0] < grid[1] < grid[2]
    return ok, f"tree={tree:g} disk rel change={rel:.3f} grid={grid}", 120.0


def _c9():
    s = export_cone_graph(SIMONS, 1e-80, 10.0, 512, 16)
    d = attach_density(s, "skin_model")
    rep = estimate_delta(s, d, 4000, 6, seed=0)
    ray = geodesic_between(s, d, int(np.flatnonzero(s.boundary)[0]), int(np.flatnonzero(s.cutoff)[0]))
    ok = phi_halfspace(0.0, 1.0) == 1.0 / 22.0
    levels = []
    for kind, delta, m in (("halfspace", rep.delta, 2), ("gromov_product", 2.1, 5)):
        ch = build_phi_chain(s, d, ray, kind, delta, m)
        v = validate_phi_chain(ch, d, seed=0)
        ok &= v.nesting and v.spacing and v.separation and v.passed
        levels.append(f"{kind}:{m}")
    return ok, f"delta={rep.delta:.2f} chains {' '.join(levels)} Phi(0)=1/22", 60.0


def _c10():
    s = export_cone_graph(SIMONS, 1e-2, 1e2, 64, 16)
    d = attach_density(s, "skin_model")
    rays = classify_boundary_rays(s, d, 50, seed=0)
    labels = [r.label for r in rays]
    ok = len(rays) == 50 and set(labels) == {"tip-directed", "infinity-directed"}
    return ok, f"tip={labels.count('tip-directed')} infinity={labels.count('infinity-directed')}", 60.0


def _c11():
    op = LinkOperatorSpec(SIMONS, "jacobi", 0.0)
    rec = mixed_record(SIMONS, op)
    e1, e2 = Fraction(1, 2), Fraction(3)
    group = rec.exact and scaling_action(scaling_action(rec, e2), e1).terms == scaling_action(rec, e1 * e2).terms
    fixed = all(scaling_action(mixed_record(SIMONS, op, a, b), e1).terms == mixed_record(SIMONS, op, a, b).terms
                for a, b in ((1, 0), (0, 1)))
    zero = attractor_limit_check(rec, "TO_ZERO")["label"]
    inf = attractor_limit_check(rec, "TO_INFINITY")["label"]
    ok = group and fixed and zero == "MINUS" and inf == "PLUS"
    return ok, f"group law exact, fixed points, eta->0: {zero}, eta->inf: {inf}", 1.0


def _c12():
    f = disk_fatou(256)
    main = f.main
    zd = f.zero_density.traces["radial"][1]
    pm = f.point_mass.traces["radial"][1]
    ok = (all(abs(v - 2.0) <= 0.03 * 2.0 for v in main.limits.values()) and main.expected == 2.0
          and zd[-1] < 0.03 and np.all(np.diff(zd) < 0) and np.all(np.diff(pm) > 0) and pm[-1] / pm[0] > 10
          and f.doubled <= 1e-10)
    lim = ", ".join(f"{k}={v:.4f}" for k, v in main.limits.items())
    return ok, f"{lim} zero-density={zd[-1]:.3f} point-mass growth={pm[-1] / pm[0]:.0f}x", 120.0


CRITERIA = [
    (1, "Simons-cone Jacobi exponents", _c1),
    (2, "stability threshold n >= 7", _c2),
    (3, "conformal bound suite at lambda=0.01", _c3),
    (4, "1D Hardy trichotomy", _c4),
    (5, "Martin kernel vs Poisson kernel", _c5),
    (6, "boundary Harnack + oscillation decay", _c6),
    (7, "metric inequality suite", _c7),
    (8, "hyperbolicity estimates", _c8),
    (9, "Phi-chains on the cone graph", _c9),
    (10, "cone boundary dichotomy", _c10),
    (11, "scaling-action algebra", _c11),
    (12, "Fatou ratio experiment", _c12),
]


def run_criterion(num, title, func):
    t0 = time.perf_counter()
    ok, detail, budget = func()
    dt = time.perf_counter() - t0
    passed = bool(ok) and dt < budget
    timing = f"{dt:.2f}s < {budget:g}s" if dt < budget else f"{dt:.2f}s OVER {budget:g}s"
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {num:2d} {title}: {detail} ({timing})"
    return passed, line


@pytest.mark.parametrize("num,title,func", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, title, func, capsys):
    passed, line = run_criterion(num, title, func)
    with capsys.disabled():
        print("\n" + line)
    assert passed, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(p for p, _ in results) else 1)
