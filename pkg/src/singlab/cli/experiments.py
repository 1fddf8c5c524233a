"""Experiment dispatchers.

Each dispatcher receives an :class:`ExperimentConfig` and returns an
:class:`Outcome` with named scalars, pass/fail flags and plot series.
Every manifest parameter of a kind is consumed by its dispatcher.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = ["ExperimentSpec", "Outcome", "REGISTRY", "run_experiment"]


@dataclass
class Outcome:
    scalars: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentSpec:
    func: object
    params: dict
    tolerances: dict
    resolutions: tuple | None = None
    doc: str = ""


REGISTRY: dict = {}


def experiment(kind, params=None, tolerances=None, resolutions=None):
    def deco(func):
        REGISTRY[kind] = ExperimentSpec(func, dict(params or {}), dict(tolerances or {}),
                                        tuple(resolutions) if resolutions else None,
                                        (func.__doc__ or "").strip().splitlines()[0])
        return func
    return deco


def run_experiment(cfg) -> Outcome:
    return REGISTRY[cfg.kind].func(cfg.params, cfg)


def _f(x):
    return float(x)


# ------------------------------------------------------------------ metric_core

def _space_and_density(domain, res, density, link_steps=16):
    from ..metric_core import attach_density, build_space, constant_density

    spec = {"kind": domain} if isinstance(domain, str) else dict(domain)
    if density == "auto":
        density = {"cone": "skin_model", "tree": "constant", "grid": "constant"}.get(spec["kind"], "inv_dist_sigma")
    if spec["kind"] == "cone":
        spec.setdefault("link_steps", link_steps)
    space = build_space(spec, res)
    if density == "constant":
        return space, constant_density(space)
    return space, attach_density(space, density)


@experiment("delta-estimate",
            {"domain": "punctured_disk", "density": "auto", "quadruple_samples": 2000,
             "triangle_samples": 8, "pool_size": 32},
            {"self_convergence": 0.15}, (64, 128, 256))
def _delta_estimate(p, cfg):
    """Four-point and thin-triangle delta across resolutions."""
    from ..metric_core import estimate_delta

    out = Outcome()
    four, thin = [], []
    for res in cfg.resolutions:
        s, d = _space_and_density(p["domain"], res, p["density"])
        r = estimate_delta(s, d, p["quadruple_samples"], p["triangle_samples"], seed=cfg.seed,
                           pool_size=p["pool_size"])
        four.append(r.delta_fourpoint)
        thin.append(r.delta_thin_triangles)
        out.scalars[f"delta_fourpoint_{res}"] = _f(r.delta_fourpoint)
        out.scalars[f"delta_thin_{res}"] = _f(r.delta_thin_triangles)
    out.series["delta"] = [[int(r), _f(max(a, b))] for r, a, b in zip(cfg.resolutions, four, thin)]
    kind = p["domain"] if isinstance(p["domain"], str) else p["domain"]["kind"]
    if kind == "tree":
        out.flags["fourpoint_zero"] = all(x == 0.0 for x in four)
    elif kind == "grid":
        delta = [max(a, b) for a, b in zip(four, thin)]
        out.flags["delta_grows_with_diameter"] = bool(np.all(np.diff(delta) > 0))
    else:
        tol = cfg.tolerances["self_convergence"]
        for name, seq in (("fourpoint", four), ("thin", thin)):
            rel = [abs(b - a) / max(abs(b), 1e-300) for a, b in zip(seq, seq[1:])]
            out.scalars[f"max_rel_change_{name}"] = _f(max(rel, default=0.0))
            out.flags[f"self_convergent_{name}"] = all(x <= tol for x in rel)
    return out


@experiment("metric-suite",
            {"domains": ["punctured_disk", "cone"], "pair_samples": 1000, "a": 1.0, "link_steps": 16,
             "radial_r1": 0.05, "radial_r2": 0.5},
            {"slack": 0.05, "radial": 0.02}, (256,))
def _metric_suite(p, cfg):
    """Metric inequality chain on sampled pairs and the radial quasi-hyperbolic distance."""
    from ..metric_core import metric_inequality_suite

    out = Outcome()
    res = cfg.resolutions[-1]
    for dom in p["domains"]:
        mode = "skin_model" if dom == "cone" else "inv_dist_sigma"
        s, d = _space_and_density(dom, res, mode, p["link_steps"])
        rep = metric_inequality_suite(s, d, p["pair_samples"], a=p["a"], seed=cfg.seed,
                                      slack=cfg.tolerances["slack"])
        for k, v in rep.worst.items():
            out.scalars[f"{dom}_worst_{k}"] = _f(v)
        for k, v in rep.flags().items():
            out.flags[f"{dom}_{k}"] = bool(v)
        if dom == "punctured_disk":
            r = s.fields["r"]
            on_ray = np.flatnonzero(s.fields["theta"] == 0)
            x = int(on_ray[np.argmin(np.abs(r[on_ray] - p["radial_r1"]))])
            y = int(on_ray[np.argmin(np.abs(r[on_ray] - p["radial_r2"]))])
            k = float(d(x, y))
            exact = math.log(r[y] / r[x])
            out.scalars["radial_k"] = k
            out.scalars["radial_log_ratio"] = exact
            out.flags["radial_matches_log"] = abs(k - exact) <= cfg.tolerances["radial"] * exact
    return out


def _cone_graph(p):
    from ..cone_geometry import export_cone_graph, make_lawson_cone
    from ..metric_core import attach_density

    cone = make_lawson_cone(p["p"], p["q"], warn=False)
    s = export_cone_graph(cone, p["r_min"], p["r_max"], p["radial_steps"], p["link_steps"])
    return s, attach_density(s, "skin_model")


@experiment("phi-chain",
            {"p": 3, "q": 3, "r_min": 1e-80, "r_max": 10.0, "radial_steps": 512, "link_steps": 16,
             "m_halfspace": 2, "m_gromov": 5, "delta_gromov": 2.1, "quadruple_samples": 4000,
             "triangle_samples": 6})
def _phi_chain(p, cfg):
    """Phi-chains of both kinds along a tip-directed geodesic on a cone graph."""
    from ..metric_core import (build_phi_chain, estimate_delta, geodesic_between, gromov_admissible_delta,
                               phi_halfspace, validate_phi_chain)

    out = Outcome()
    s, d = _cone_graph(p)
    rep = estimate_delta(s, d, p["quadruple_samples"], p["triangle_samples"], seed=cfg.seed)
    top = int(np.flatnonzero(s.boundary)[0])
    bot = int(np.flatnonzero(s.cutoff)[0])
    ray = geodesic_between(s, d, top, bot)
    out.scalars.update(delta_fourpoint=_f(rep.delta_fourpoint), delta_thin=_f(rep.delta_thin_triangles),
                       ray_conformal_length=_f(ray.l_rho), ray_base_length=_f(ray.l_g))
    lo, hi = gromov_admissible_delta()
    out.scalars["gromov_delta_interval_hi"] = _f(hi)
    for kind, delta, m in (("halfspace", rep.delta, p["m_halfspace"]),
                           ("gromov_product", p["delta_gromov"], p["m_gromov"])):
        ch = build_phi_chain(s, d, ray, kind, delta, m)
        v = validate_phi_chain(ch, d, seed=cfg.seed)
        out.scalars[f"{kind}_delta"] = _f(delta)
        out.scalars[f"{kind}_min_separation_slack"] = _f(v.min_separation_slack)
        out.flags[f"{kind}_nesting"] = v.nesting
        out.flags[f"{kind}_spacing"] = v.spacing
        out.flags[f"{kind}_separation"] = v.separation
        out.flags[f"{kind}_basepoints_on_boundary"] = v.basepoints_on_boundary
    out.flags["gromov_delta_admissible"] = lo < p["delta_gromov"] <= hi
    out.flags["phi_at_zero_is_1_over_22"] = float(phi_halfspace(0.0, 1.0)) == 1.0 / 22.0
    return out


@experiment("boundary-rays",
            {"p": 3, "q": 3, "r_min": 1e-2, "r_max": 1e2, "radial_steps": 64, "link_steps": 16,
             "ray_count": 50, "divergence_factor": 10.0})
def _boundary_rays(p, cfg):
    """Classification of maximal conformal geodesics on a truncated cone graph."""
    from ..metric_core import classify_boundary_rays

    out = Outcome()
    s, d = _cone_graph(p)
    rays = classify_boundary_rays(s, d, p["ray_count"], seed=cfg.seed, divergence_factor=p["divergence_factor"])
    labels = [r.label for r in rays]
    for lab in ("tip-directed", "infinity-directed", "domain-boundary", "undetermined"):
        out.scalars[f"count_{lab}"] = labels.count(lab)
    out.scalars["rays"] = len(rays)
    out.flags["all_rays_two_classes"] = all(lab in ("tip-directed", "infinity-directed") for lab in labels)
    out.flags["both_classes_present"] = "tip-directed" in labels and "infinity-directed" in labels
    return out


# ------------------------------------------------------------------ spectral_sov

def _link_op(p):
    from ..cone_geometry import make_lawson_cone
    from ..spectral_sov import LinkOperatorSpec

    cone = make_lawson_cone(p["p"], p["q"], warn=False)
    return cone, LinkOperatorSpec(cone, p["potential"], p["lam"], n_shift=p.get("n_shift"), Lambda=p["Lambda"])


@experiment("cone-exponents",
            {"p": 3, "q": 3, "potential": "jacobi", "lam": 0.0, "n_shift": None, "Lambda": 1.0,
             "n_nodes": 1000, "r_min": 0.5, "r_max": 2.0},
            {"fit": 1e-3})
def _cone_exponents(p, cfg):
    """Indicial exponents in closed form and from the radial finite-difference fit."""
    from ..spectral_sov import NoRealExponentsError, indicial_exponents, link_principal_eigenvalue, \
        radial_exponent_fit

    out = Outcome()
    cone, op = _link_op(p)
    mu, _ = link_principal_eigenvalue(op)
    out.scalars.update(n=cone.n, mu=_f(mu))
    try:
        ind = indicial_exponents(mu, cone.n)
    except NoRealExponentsError:
        out.scalars["discriminant"] = _f(((cone.n - 2) / 2) ** 2 + mu)
        out.flags["real_exponents"] = False
        return out
    out.flags["real_exponents"] = True
    out.scalars.update(alpha_plus=_f(ind.alpha_plus), alpha_minus=_f(ind.alpha_minus),
                       discriminant=_f(ind.discriminant))
    for lab, a in (("plus", ind.alpha_plus), ("minus", ind.alpha_minus)):
        fit = radial_exponent_fit(mu, cone.n, a, p["r_min"], p["r_max"], p["n_nodes"])
        out.scalars[f"fit_{lab}"] = _f(fit.alpha)
        out.flags[f"fit_{lab}_within_tol"] = abs(fit.alpha - a) <= cfg.tolerances["fit"]
    return out


@experiment("thm12-scan", {"p": 3, "q": 3, "lam": 0.01})
def _thm12(p, cfg):
    """Eigenvalue and exponent bounds for the conformal Laplacian at weight lambda."""
    from ..cone_geometry import make_lawson_cone
    from ..spectral_sov import theorem12_bounds_check

    rep = theorem12_bounds_check(make_lawson_cone(p["p"], p["q"], warn=False), p["lam"])
    return _bounds_outcome(rep)


@experiment("shifted-scan", {"p": 3, "q": 3, "m": 8, "lam": 0.0})
def _shifted(p, cfg):
    """Bounds for dimensionally shifted conformal Laplacians."""
    from ..cone_geometry import make_lawson_cone
    from ..spectral_sov import shifted_bounds_check

    rep = shifted_bounds_check(make_lawson_cone(p["p"], p["q"], warn=False), p["m"], p["lam"])
    return _bounds_outcome(rep)


def _bounds_outcome(rep):
    out = Outcome()
    out.scalars.update(lam=_f(rep.lam), mu=_f(rep.mu), alpha_plus=_f(rep.alpha_plus),
                       alpha_minus=_f(rep.alpha_minus), largest_passing_lambda=_f(rep.largest_passing_lambda))
    for k, v in rep.bounds.items():
        out.scalars[f"bound_{k}"] = _f(v)
    out.flags.update({k: bool(v) for k, v in rep.checks.items()})
    return out


def _fraction(x):
    return Fraction(x) if isinstance(x, (int, str)) else Fraction(x).limit_denominator(10 ** 12)


@experiment("scaling-attractor",
            {"p": 3, "q": 3, "potential": "jacobi", "lam": 0.0, "n_shift": None, "Lambda": 1.0,
             "eta1": "1/2", "eta2": "3"})
def _scaling(p, cfg):
    """Group law, fixed points and attractor limits of the scaling action."""
    from ..spectral_sov import attractor_limit_check, mixed_record, scaling_action

    out = Outcome()
    cone, op = _link_op(p)
    e1, e2 = _fraction(p["eta1"]), _fraction(p["eta2"])
    rec = mixed_record(cone, op)
    lhs = scaling_action(scaling_action(rec, e2), e1)
    rhs = scaling_action(rec, e1 * e2)
    out.scalars["exact_arithmetic"] = int(rec.exact)
    if rec.exact:
        out.flags["group_law"] = lhs.terms == rhs.terms
    else:
        out.flags["group_law"] = all(abs(float(a[0]) - float(b[0])) <= 1e-12 for a, b in zip(lhs.terms, rhs.terms))
    for lab in ("MINUS", "PLUS"):
        single = mixed_record(cone, op, 1 if lab == "MINUS" else 0, 1 if lab == "PLUS" else 0)
        img = scaling_action(single, e1)
        out.flags[f"fixed_point_{lab.lower()}"] = all(float(c) == 1.0 for c, _, _ in img.terms)
    zero = attractor_limit_check(rec, "TO_ZERO")
    inf = attractor_limit_check(rec, "TO_INFINITY")
    out.scalars["limit_to_zero"] = zero["label"]
    out.scalars["limit_to_infinity"] = inf["label"]
    out.flags["to_zero_is_minus"] = zero["label"] == "MINUS"
    out.flags["to_infinity_is_plus"] = inf["label"] == "PLUS"
    return out


# ------------------------------------------------------------------ potential_lab

@experiment("hardy", {"n_nodes": 1000, "log_length": 40.0, "m": 8}, {"target": 0.05})
def _hardy(p, cfg):
    """Weighted principal eigenvalue of the 1D Hardy model along an exhaustion."""
    from ..potential_lab import hardy_model, weighted_principal_eigenvalue

    out = Outcome()
    sys_, exh, sizes = hardy_model(p["n_nodes"], p["log_length"], p["m"])
    eig = weighted_principal_eigenvalue(sys_, exh, sizes=sizes, require_strict=False)
    out.scalars["estimate"] = _f(eig.estimate)
    out.scalars["lambda_last"] = _f(eig.lambdas[-1])
    out.series["lambda_m"] = [[k + 1, _f(v)] for k, v in enumerate(eig.lambdas)]
    tol = cfg.tolerances["target"]
    out.flags["strictly_decreasing"] = eig.strictly_decreasing
    out.flags["estimate_within_tol"] = abs(eig.estimate - 0.25) <= tol * 0.25
    out.flags["last_within_tol"] = abs(eig.lambdas[-1] - 0.25) <= tol * 0.25
    return out


@experiment("criticality",
            {"n_nodes": 1000, "log_length": 40.0, "m": 8, "lambdas": [0.1, 0.25, 0.5], "band": 1e-3,
             "expected": ["SUBCRITICAL", "CRITICAL", "SUPERCRITICAL"]},
            {"log_slope": 0.05})
def _criticality(p, cfg):
    """Criticality trichotomy of the 1D Hardy model with certificates."""
    from ..potential_lab import criticality_classify, hardy_model, weighted_principal_eigenvalue

    out = Outcome()
    sys_, exh, sizes = hardy_model(p["n_nodes"], p["log_length"], p["m"])
    eig = weighted_principal_eigenvalue(sys_, exh, sizes=sizes, require_strict=False)
    out.scalars["estimate"] = _f(eig.estimate)
    out.series["lambda_m"] = [[k + 1, _f(v)] for k, v in enumerate(eig.lambdas)]
    out.flags["strictly_decreasing"] = eig.strictly_decreasing
    expected = p["expected"] or [None] * len(p["lambdas"])
    if len(expected) != len(p["lambdas"]):
        raise ValueError("'expected' must have one label per lambda")
    for lam, exp in zip(p["lambdas"], expected):
        c = criticality_classify(sys_, lam, eig, band=p["band"])
        out.scalars[f"class_{lam}"] = c.label.value
        for k, v in c.witness.items():
            out.scalars[f"{k}_{lam}"] = _f(v)
        out.flags[f"certified_{lam}"] = c.verified
        if exp is not None:
            out.flags[f"expected_{lam}"] = c.label.value == exp
        if "log_slope" in c.witness:
            out.flags[f"log_slope_{lam}"] = abs(c.witness["log_slope"] - 0.5) <= cfg.tolerances["log_slope"] * 0.5
    return out


@experiment("green", {"domain": "disk", "r_lo": 0.05, "r_hi": 0.9}, {"rel": 0.02, "symmetry": 1e-10}, (128,))
def _green(p, cfg):
    """Discrete Green's functions against closed forms, positivity and symmetry."""
    from ..potential_lab import discretize, disk_grid, green_function, green_matrix_columns, radial_grid

    out = Outcome()
    for res in cfg.resolutions:
        if p["domain"] == "disk":
            dom = disk_grid(res)
            sys_ = discretize(dom)
            G = green_function(sys_, 0).values
            r = dom.radius
            m = dom.interior & (r >= p["r_lo"]) & (r <= p["r_hi"])
            ex = -np.log(r[m]) / (2 * math.pi)
            err = float(np.max(np.abs(G[m] / ex - 1)))
            out.flags[f"closed_form_{res}"] = err <= cfg.tolerances["rel"]
        elif p["domain"] == "interval":
            dom = radial_grid(0.0, 1.0, res + 1)
            sys_ = discretize(dom)
            x = dom.coords[:, 0]
            G = green_function(sys_, res // 2).values
            y = x[res // 2]
            ex = np.where(x <= y, x * (1 - y), y * (1 - x))
            err = float(np.max(np.abs(G - ex)))
            out.flags[f"closed_form_{res}"] = err <= 1e-12
        else:
            raise ValueError(f"unknown green domain {p['domain']!r}")
        out.scalars[f"closed_form_error_{res}"] = err
        out.flags[f"positive_{res}"] = bool(np.all(G[dom.interior] > 0))
        i = sys_.interior_index
        a, b = int(i[len(i) // 3]), int(i[2 * len(i) // 3])
        cols = green_matrix_columns(sys_, [a, b])
        pos = {int(v): k for k, v in enumerate(i)}
        sym = abs(cols[pos[b], 0] - cols[pos[a], 1]) / max(abs(cols[pos[b], 0]), 1e-300)
        out.scalars[f"symmetry_defect_{res}"] = _f(sym)
        out.flags[f"symmetric_{res}"] = sym <= cfg.tolerances["symmetry"]
    return out


@experiment("dirichlet", {"domain": "disk"}, {"order": 1.8}, (32, 64, 128))
def _dirichlet(p, cfg):
    """Dirichlet problems on the disk: constants, the harmonic x^2 - y^2, zero data."""
    from ..potential_lab import discretize, disk_grid, solve_dirichlet

    if p["domain"] != "disk":
        raise ValueError("dirichlet experiment supports the disk domain")
    out = Outcome()
    errs = []
    for res in cfg.resolutions:
        dom = disk_grid(res)
        sys_ = discretize(dom)
        one = solve_dirichlet(sys_, 1.0).values
        zero = solve_dirichlet(sys_, 0.0).values
        X = dom.coords
        exact = X[:, 0] ** 2 - X[:, 1] ** 2
        F = solve_dirichlet(sys_, lambda P: P[:, 0] ** 2 - P[:, 1] ** 2).values
        errs.append(float(np.abs(F - exact).max()))
        out.scalars[f"error_{res}"] = errs[-1]
        out.flags[f"constants_{res}"] = bool(np.abs(one - 1).max() <= 1e-10)
        out.flags[f"zero_{res}"] = bool(np.abs(zero).max() == 0.0)
        out.flags[f"maximum_principle_{res}"] = bool(F.min() >= -1 - 1e-12 and F.max() <= 1 + 1e-12)
    if len(errs) >= 2:
        orders = [math.log2(a / b) * math.log(2) / math.log(r2 / r1)
                  for a, b, r1, r2 in zip(errs, errs[1:], cfg.resolutions, cfg.resolutions[1:])]
        out.scalars["observed_order"] = _f(min(orders))
        out.flags["second_order"] = min(orders) >= cfg.tolerances["order"]
    return out


@experiment("martin", {"region_radius": 0.5}, {"poisson": 1e-2, "independence": 2e-2}, (256,))
def _martin(p, cfg):
    """Martin kernel on the unit disk against the Poisson kernel."""
    from ..potential_lab import disk_martin

    out = Outcome()
    for res in cfg.resolutions:
        m = disk_martin(res, p["region_radius"])
        out.scalars[f"sup_error_{res}"] = _f(m.sup_error)
        out.scalars[f"sup_error_slanted_{res}"] = _f(m.sup_error_alt)
        out.scalars[f"independence_{res}"] = _f(m.independence)
        out.flags[f"poisson_{res}"] = m.sup_error <= cfg.tolerances["poisson"]
        out.flags[f"independent_{res}"] = m.independence <= cfg.tolerances["independence"]
        out.flags[f"normalized_{res}"] = bool(np.all(m.sequence.kernels[:, 0] == 1.0))
    return out


@experiment("bhp", {"inner_radius": 0.25}, {"stability": 0.10, "control_growth": 1.5}, (64, 128, 256))
def _bhp(p, cfg):
    """Boundary Harnack ratios on the half disk across resolutions, with a negative control."""
    from ..potential_lab import half_disk_bhp

    out = Outcome()
    h = half_disk_bhp(cfg.resolutions, p["inner_radius"], n_levels=3)
    for res, c, n in zip(h.resolutions, h.c_measured, h.negative_control):
        out.scalars[f"c_measured_{res}"] = _f(c)
        out.scalars[f"control_ratio_{res}"] = _f(n)
    out.scalars["relative_spread"] = _f(h.stability)
    out.flags["refinement_stable"] = h.stability <= cfg.tolerances["stability"]
    growth = [b / a for a, b in zip(h.negative_control, h.negative_control[1:])]
    out.flags["control_grows"] = bool(growth) and all(g >= cfg.tolerances["control_growth"] for g in growth)
    return out


@experiment("oscillation", {"n_levels": 5, "chain_radius": 0.5}, {"rate_slack": 0.1}, (256,))
def _oscillation(p, cfg):
    """Oscillation decay of u/v over concentric half disks at the origin."""
    from ..potential_lab import half_disk_bhp

    out = Outcome()
    h = half_disk_bhp(cfg.resolutions[-1:], n_levels=p["n_levels"], chain_radius=p["chain_radius"])
    o = h.oscillation
    out.series["osc"] = [[i, _f(x)] for i, x in enumerate(o.osc)]
    out.scalars.update(fitted_rate=_f(o.fitted_rate), c_star=_f(o.c_star), predicted_rate=_f(o.predicted_rate))
    out.flags["decays"] = o.fitted_rate < 1
    out.flags["rate_within_prediction"] = o.fitted_rate <= o.predicted_rate + cfg.tolerances["rate_slack"]
    out.flags["recursion_holds"] = o.recursion_holds
    out.flags["non_increasing"] = o.non_increasing
    return out


@experiment("fatou", {}, {"ratio": 0.03}, (256,))
def _fatou(p, cfg):
    """Ratios of Martin integrals along approach paths on the disk."""
    from ..potential_lab import disk_fatou

    out = Outcome()
    f = disk_fatou(cfg.resolutions[-1])
    for name, tr in f.main.traces.items():
        out.series[f"ratio:{name}"] = [[_f(a), _f(b)] for a, b in zip(*tr)]
        out.scalars[f"limit_{name}"] = _f(f.main.limits[name])
        out.flags[f"converges_{name}"] = abs(f.main.limits[name] - f.main.expected) <= \
            cfg.tolerances["ratio"] * f.main.expected
    for name, tr in f.main.tangential.items():
        out.series[f"ratio:{name}"] = [[_f(a), _f(b)] for a, b in zip(*tr)]
    zd = f.zero_density.traces["radial"][1]
    pm = f.point_mass.traces["radial"][1]
    out.scalars["zero_density_last"] = _f(zd[-1])
    out.scalars["point_mass_last"] = _f(pm[-1])
    out.scalars["uniform_constant_error"] = _f(f.uniform_constant_error)
    out.flags["zero_density_to_zero"] = bool(np.all(np.diff(zd) < 0) and zd[-1] < cfg.tolerances["ratio"])
    out.flags["point_mass_diverges"] = bool(np.all(np.diff(pm) > 0) and pm[-1] / pm[0] > 10)
    out.flags["double_measure_ratio_2"] = f.doubled <= 1e-10
    out.flags["uniform_is_constant"] = f.uniform_constant_error <= 0.02
    return out


@experiment("minimal-growth", {"pole": [0.0, 0.5], "inner_radius": 0.25}, {"stability": 0.15}, (64, 128, 256))
def _minimal_growth(p, cfg):
    """Green's function versus a positive solution vanishing on the diameter."""
    from ..potential_lab import half_disk_minimal_growth

    out = Outcome()
    r = half_disk_minimal_growth(cfg.resolutions, tuple(p["pole"]), p["inner_radius"])
    cs = [r[k]["c"] for k in cfg.resolutions]
    for k in cfg.resolutions:
        out.scalars[f"c_measured_{k}"] = _f(r[k]["c"])
    out.flags["finite"] = all(np.isfinite(cs))
    out.flags["refinement_stable"] = max(cs) / min(cs) - 1 <= cfg.tolerances["stability"]
    grow = r[cfg.resolutions[-1]]["c_growing"]
    out.flags["nonvanishing_comparison_shrinks"] = bool(np.all(np.diff(grow) < 0))
    return out
