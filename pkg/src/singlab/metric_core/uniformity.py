"""Uniform-curve checks, skin-uniformity constants and the metric inequality suite."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import DensityField
from .geodesics import GeodesicPath, path_from_distances
from .space import SampledSpace

__all__ = [
    "UniformityResult",
    "check_uniform_curve",
    "b_const",
    "b_star",
    "c_bound",
    "skin_uniformity_from_geodesic",
    "fit_skin_parameter",
    "MetricSuiteReport",
    "metric_inequality_suite",
    "NotGeodesicError",
]


class NotGeodesicError(ValueError):
    """The supplied path is longer than the conformal distance of its ends."""


@dataclass(frozen=True)
class UniformityResult:
    """Outcome of a c-uniform curve test.

    ``ratio_quasigeodesic`` is ``l_g / d_g(p, q)``; ``ratio_cone`` the
    largest ``l_min(z) / delta(z)`` along the path, attained at
    ``worst_vertex``. The curve passes for every ``c >= c_needed``.
    """

    passed: bool
    c: float
    ratio_quasigeodesic: float
    ratio_cone: float
    worst_vertex: int

    @property
    def c_needed(self) -> float:
        return max(self.ratio_quasigeodesic, self.ratio_cone)


def check_uniform_curve(path: GeodesicPath, density: DensityField, c: float,
                        base_distance: float | None = None) -> UniformityResult:
    """Test ``l_g <= c d_g(p, q)`` and ``l_min(z) <= c delta(z)`` on the path."""
    if c <= 0:
        raise ValueError("c must be positive")
    if len(path) < 2 or path.start == path.end:
        return UniformityResult(True, c, 1.0, 0.0, path.start)
    if base_distance is None:
        base_distance = float(density.space.base_distances(path.start)[path.end])
    rq = path.l_g / base_distance
    cone = path.l_min / density.delta[path.vertices]
    k = int(np.argmax(cone))
    rc = float(cone[k])
    return UniformityResult(bool(rq <= c and rc <= c), float(c), float(rq), rc, int(path.vertices[k]))


def b_const(a: float) -> float:
    """``64 a^4 exp(32 a^4)``; ``inf`` on overflow."""
    try:
        return 64.0 * a ** 4 * math.exp(32.0 * a ** 4)
    except OverflowError:
        return math.inf


def b_star(a: float) -> float:
    """``exp(4 a^2 log(1 + 4 b(a))) - 1``; ``inf`` on overflow."""
    b = b_const(a)
    if math.isinf(b):
        return math.inf
    try:
        return math.exp(4.0 * a * a * math.log1p(4.0 * b)) - 1.0
    except OverflowError:
        return math.inf


def c_bound(a: float) -> float:
    """Uniformity constant ``1 + b*(a)(4a^2 + 1) + 8a^2`` of conformal geodesics."""
    return 1.0 + b_star(a) * (4 * a * a + 1) + 8 * a * a


def skin_uniformity_from_geodesic(path: GeodesicPath, density: DensityField, a: float,
                                  rel_tol: float = 1e-9):
    """Measured and theoretical uniformity constants of a conformal geodesic.

    Returns ``(c_measured, c_bound, holds)``.
    """
    if a < 1:
        raise ValueError("skin-uniformity parameter a must be >= 1")
    if len(path) >= 2:
        d = float(density.distances(path.start)[path.end])
        if path.l_rho > d * (1 + rel_tol) + 1e-12:
            raise NotGeodesicError(f"path length {path.l_rho} exceeds distance {d}")
    res = check_uniform_curve(path, density, 1.0)
    cm = res.c_needed if len(path) >= 2 else 1.0
    cb = c_bound(a)
    return cm, cb, bool(cm <= cb)


def fit_skin_parameter(space: SampledSpace, density: DensityField, n_geodesics: int = 16,
                       seed: int = 0, sources: int = 4) -> float:
    """Smallest ``a >= 1`` making every sampled conformal geodesic a-uniform."""
    rng = np.random.default_rng(seed)
    src = rng.choice(space.n_vertices, size=min(sources, space.n_vertices), replace=False)
    per = max(1, n_geodesics // len(src))
    a = 1.0
    for s in src:
        row = density.distances(int(s))
        base = space.base_distances(int(s))
        for t in rng.choice(space.n_vertices, size=per, replace=False):
            if t == s:
                continue
            path = path_from_distances(density, row, int(t))
            a = max(a, check_uniform_curve(path, density, 1.0, float(base[t])).c_needed)
    return a


@dataclass(frozen=True)
class MetricSuiteReport:
    """Worst ratio lhs/rhs per inequality (<= 1 means it holds exactly)."""

    n_pairs: int
    a: float
    lipschitz: float
    worst: dict
    slack: float
    witnesses: dict

    @property
    def passed(self) -> bool:
        return all(v <= 1.0 + self.slack for v in self.worst.values())

    def flags(self) -> dict:
        return {k: bool(v <= 1.0 + self.slack) for k, v in self.worst.items()}


def metric_inequality_suite(space: SampledSpace, density: DensityField, pair_samples: int = 1000,
                            a: float = 1.0, seed: int = 0, slack: float = 0.05,
                            n_sources: int = 20) -> MetricSuiteReport:
    """Check the comparison inequalities between d_rho, k and d_g on sampled pairs.

    Inequalities (ratio of left to right side is reported):

    - ``qh_lower``:  L k <= d_rho
    - ``log_lower``: (1/2) log((1 + d_g/dist_x)(1 + d_g/dist_y)) <= k
    - ``upper``:     d_rho <= 4 a^2 log(1 + d_g max rho)
    - ``log_rho``:   log(1 + d_g max rho) <= L' d_rho
    - ``log_delta``: |log delta(x) - log delta(y)| <= L' d_rho

    ``L`` is the measured Lipschitz constant of delta and
    ``L' = max(1, L)`` (the last two follow from a 1-Lipschitz delta; a larger
    measured constant rescales them).
    """
    rng = np.random.default_rng(seed)
    n = space.n_vertices
    n_src = min(n_sources, n)
    per = int(math.ceil(pair_samples / n_src))
    src = rng.choice(n, size=n_src, replace=False)
    lip = density.lipschitz_estimate
    lip_eff = max(1.0, lip)
    dsig = space.dist_to_sigma
    qh = DensityField(space, "custom", 1.0 / dsig) if np.all(np.isfinite(dsig)) else None
    d_rho = density.distances(src)
    d_g = space.base_distances(src)
    d_k = qh.distances(src) if qh is not None else None
    names = ["qh_lower", "log_lower", "upper", "log_rho", "log_delta"]
    worst = {k: 0.0 for k in names}
    wit = {k: None for k in names}
    count = 0
    for i, s in enumerate(src):
        tgt = rng.integers(n, size=per)
        tgt = tgt[tgt != s]
        if count + tgt.size > pair_samples:
            tgt = tgt[: pair_samples - count]
        count += tgt.size
        if tgt.size == 0:
            continue
        dr, dg = d_rho[i, tgt], d_g[i, tgt]
        mrho = np.maximum(density.values[s], density.values[tgt])
        logrho = np.log1p(dg * mrho)
        ratios = {
            "upper": dr / (4 * a * a * logrho),
            "log_rho": logrho / (lip_eff * dr),
            "log_delta": np.abs(np.log(density.delta[s]) - np.log(density.delta[tgt])) / (lip_eff * dr),
        }
        if d_k is not None:
            k = d_k[i, tgt]
            ratios["qh_lower"] = lip * k / dr
            ratios["log_lower"] = 0.5 * np.log((1 + dg / dsig[s]) * (1 + dg / dsig[tgt])) / k
        for name, r in ratios.items():
            j = int(np.argmax(r))
            if r[j] > worst[name]:
                worst[name] = float(r[j])
                wit[name] = (int(s), int(tgt[j]))
    return MetricSuiteReport(count, a, lip, worst, slack, wit)
