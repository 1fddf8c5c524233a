"""Ready-made model problems with closed-form or refinement oracles.

Each builder returns plain result records so that tests, the acceptance
suite and the command-line runner share one implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import (
    DiscreteMeasure,
    RotationalKernels,
    bhp_ratio,
    fatou_experiment,
    martin_integral,
    martin_sequence,
    minimal_growth_check,
    oscillation_decay,
)
from .grids import half_disk_grid, disk_grid, radial_grid
from .operators import OperatorSpec, discretize
from .solvers import green_function, solve_dirichlet
from .spectrum import criticality_classify, weighted_principal_eigenvalue

__all__ = [
    "poisson_kernel",
    "DiskMartinResult",
    "disk_martin",
    "disk_fatou",
    "HalfDiskResult",
    "half_disk_bhp",
    "half_disk_minimal_growth",
    "hardy_model",
    "hardy_trichotomy",
]


def poisson_kernel(x, y) -> np.ndarray:
    """``(1 - |x|^2) / |x - y|^2`` for points ``x`` (N, 2) and ``y`` on the unit circle."""
    x = np.atleast_2d(x)
    y = np.asarray(y, dtype=float)
    return (1 - np.sum(x ** 2, axis=1)) / np.sum((x - y) ** 2, axis=1)


@dataclass(frozen=True, eq=False)
class DiskMartinResult:
    resolution: int
    sup_error: float
    sup_error_alt: float
    independence: float
    cauchy: tuple
    sequence: object = field(repr=False, default=None)
    alternative: object = field(repr=False, default=None)
    system: object = field(repr=False, default=None)


def _disk_system(resolution: int):
    return discretize(disk_grid(resolution))


def disk_martin(resolution: int = 256, region_radius: float = 0.5, system=None) -> DiskMartinResult:
    """Martin kernel at ``y = (1, 0)`` on the unit disk from two pole sequences.

    The radial sequence uses poles at depths ``h`` and ``2h`` on the ray
    ``theta = 0``; the second sequence approaches along a slanted line
    (depth ``k h``, angle ``k dtheta``). Both limits are Richardson
    extrapolated in ``k`` and compared with the Poisson kernel on
    ``|x| <= region_radius``.
    """
    sys_ = _disk_system(resolution) if system is None else system
    dom = sys_.domain
    n_r = dom.params["n_r"]
    region = dom.interior & (dom.radius <= region_radius + 1e-12)
    y = np.array([1.0, 0.0])
    ks = [4, 2, 1]
    radial = [dom.polar_index(n_r - k, 0) for k in ks]
    slanted = [dom.polar_index(n_r - k, k) for k in ks]
    seq = martin_sequence(sys_, 0, radial, region, depths=ks)
    alt = martin_sequence(sys_, 0, slanted, region, depths=ks)
    P = poisson_kernel(dom.coords[region], y)
    err = float(np.abs(seq.limit.values[region] - P).max())
    err_alt = float(np.abs(alt.limit.values[region] - P).max())
    ind = float(np.abs(seq.limit.values[region] - alt.limit.values[region]).max())
    return DiskMartinResult(resolution, err, err_alt, ind, tuple(seq.cauchy), seq, alt, sys_)


@dataclass(frozen=True, eq=False)
class DiskFatouResult:
    resolution: int
    uniform_constant_error: float
    main: object
    zero_density: object
    point_mass: object
    doubled: float


def disk_fatou(resolution: int = 256, martin: DiskMartinResult | None = None) -> DiskFatouResult:
    """Fatou ratio traces on the unit disk toward ``z = (1, 0)``.

    ``mu`` has density ``1 + cos(theta)``, ``nu`` is uniform; controls use
    ``mu`` supported on the left half circle (zero density at ``z``), a
    point mass at ``z``, and ``2 nu``.
    """
    m = disk_martin(resolution) if martin is None else martin
    dom = m.system.domain
    kern = RotationalKernels(dom, m.sequence.limit.values)
    nodes = kern.boundary_nodes
    nth = nodes.size
    theta = 2 * math.pi * np.arange(nth) / nth
    nu = DiscreteMeasure(nodes, np.full(nth, 1.0 / nth))
    mu = DiscreteMeasure(nodes, (1 + np.cos(theta)) / nth)
    left = DiscreteMeasure(nodes, np.where(np.cos(theta) < 0, 2.0 / nth, 0.0))
    z = int(nodes[0])
    point = DiscreteMeasure(np.array([z]), np.array([1.0 / nth]))
    u_nu = martin_integral(kern, nu)
    const_err = float(np.abs(u_nu.values[dom.interior & (dom.radius <= 0.9)] - 1).max())
    n_r = dom.params["n_r"]
    ks = [n_r // 2 ** i for i in range(1, int(math.log2(n_r)) - 1)]
    radial = [dom.polar_index(n_r - k, 0) for k in ks]
    slanted = [dom.polar_index(n_r - k, k) for k in ks]
    tangential = [dom.polar_index(n_r - k, int(round(math.sqrt(k * n_r) / 2))) for k in ks]
    paths = {"radial": radial, "slanted": slanted}
    tang = {"tangential": tangential}
    out = {}
    for name, meas in (("main", mu), ("zero_density", left), ("point_mass", point)):
        u = martin_integral(kern, meas)
        out[name] = fatou_experiment(u, u_nu, nu, meas, z, dom, paths, tang)
    doubled = martin_integral(kern, 2 * nu)
    ratio = doubled.values[dom.interior] / u_nu.values[dom.interior]
    return DiskFatouResult(resolution, const_err, out["main"], out["zero_density"], out["point_mass"],
                           float(np.abs(ratio - 2).max()))


@dataclass(frozen=True, eq=False)
class HalfDiskResult:
    resolutions: tuple
    c_measured: tuple
    stability: float
    negative_control: tuple
    oscillation: object


def _half_disk_pair(resolution: int):
    dom = half_disk_grid(resolution)
    sys_ = discretize(dom)
    X = dom.coords
    u = solve_dirichlet(sys_, lambda P: np.maximum(P[:, 1], 0.0))
    v = solve_dirichlet(sys_, lambda P: np.maximum(P[:, 1], 0.0) * (1 + P[:, 0]))
    bad = solve_dirichlet(sys_, 1.0)
    return sys_, X, u.values, v.values, bad.values


def half_disk_bhp(resolutions=(64, 128, 256), inner_radius: float = 0.25, n_levels: int = 5,
                  chain_radius: float = 0.5) -> HalfDiskResult:
    """Boundary Harnack ratios of ``u ~ y`` and ``v ~ y(1 + x)`` on the half disk.

    Both vanish on the diameter. ``U`` is the half disk of radius
    ``inner_radius`` about the origin. The negative control compares ``u``
    with the solution ``v = 1`` that does not vanish on the diameter. The
    oscillation chain (finest resolution) uses concentric half disks of
    radii ``chain_radius * 2^-k``.
    """
    cs, neg = [], []
    for res in resolutions:
        sys_, X, u, v, bad = _half_disk_pair(res)
        r = np.linalg.norm(X, axis=1)
        U = sys_.domain.interior & (r < inner_radius)
        cs.append(bhp_ratio(u, v, U))
        neg.append(bhp_ratio(u, bad, U))
    chain = [sys_.domain.interior & (r < chain_radius * 2.0 ** -k) for k in range(n_levels)]
    osc = oscillation_decay(u, v, chain)
    stab = max(cs) / min(cs) - 1.0
    return HalfDiskResult(tuple(resolutions), tuple(cs), float(stab), tuple(neg), osc)


def half_disk_minimal_growth(resolutions=(64, 128, 256), pole=(0.0, 0.5), inner_radius: float = 0.25) -> dict:
    """``sup_U G(p0, .)/v`` with ``v`` the discrete harmonic ``y`` normalized at ``p0``."""
    out = {}
    for res in resolutions:
        dom = half_disk_grid(res)
        sys_ = discretize(dom)
        p0 = dom.nearest_node(pole)
        G = green_function(sys_, p0).values
        v = solve_dirichlet(sys_, lambda P: np.maximum(P[:, 1], 0.0)).values
        v = v / v[p0]
        U = dom.interior & (dom.radius < inner_radius)
        grow = solve_dirichlet(sys_, 1.0).values
        out[res] = {
            "c": minimal_growth_check(G, v, U),
            "c_growing": [minimal_growth_check(G, grow, dom.interior & (dom.radius < s)) for s in (0.25, 0.125, 0.0625)],
        }
    return out


def hardy_model(n_nodes: int = 1000, log_length: float = 40.0, m: int = 8):
    """``-d^2/dr^2`` with weight ``1/r^2`` on ``[e^{-log_length}, 1]``.

    Geometric nodes; exhaustion elements ``[e^{-L_k}, 1]`` with
    ``L_k = log_length * k / m``.

    Returns
    -------
    system, exhaustion (list of masks), sizes (L_k)
    """
    dom = radial_grid(math.exp(-log_length), 1.0, n_nodes, n=1, spacing="geometric")
    sys_ = discretize(dom, OperatorSpec(weight=lambda X: 1.0 / X[:, 0] ** 2))
    r = dom.coords[:, 0]
    sizes = [log_length * k / m for k in range(1, m + 1)]
    exh = [r > math.exp(-L) * (1 + 1e-12) for L in sizes]
    return sys_, exh, np.array(sizes)


def hardy_trichotomy(n_nodes: int = 1000, log_length: float = 40.0, m: int = 8, band: float = 1e-3,
                     lambdas=(0.1, 0.25, 0.5)) -> dict:
    """Weighted principal eigenvalue and classification for several ``lambda``."""
    sys_, exh, sizes = hardy_model(n_nodes, log_length, m)
    eig = weighted_principal_eigenvalue(sys_, exh, sizes=sizes)
    cls = {lam: criticality_classify(sys_, lam, eig, band=band) for lam in lambdas}
    return {"system": sys_, "eig": eig, "classes": cls}
