"""Phi-chains along geodesic rays and classification of boundary rays."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .density import DensityField
from .geodesics import GeodesicPath, make_path, path_from_distances
from .hyperbolicity import sample_pool
from .space import SampledSpace

__all__ = [
    "ChainKind",
    "PhiFormula",
    "PhiChain",
    "ChainValidation",
    "phi_halfspace",
    "phi_gromov",
    "gromov_admissible_delta",
    "build_phi_chain",
    "validate_phi_chain",
    "inner_boundary",
    "RayRecord",
    "classify_boundary_rays",
]


class ChainKind(str, enum.Enum):
    HALFSPACE = "halfspace"
    GROMOV_PRODUCT = "gromov_product"


def phi_halfspace(t, delta):
    """``max{min{delta, 1/(22 delta)}, t - 6 delta}``."""
    return np.maximum(min(delta, 1.0 / (22.0 * delta)), np.asarray(t, dtype=float) - 6.0 * delta)


def phi_gromov(t, delta):
    """``max{t - 2(delta + 2), delta - 2}``."""
    return np.maximum(np.asarray(t, dtype=float) - 2.0 * (delta + 2.0), delta - 2.0)


def gromov_admissible_delta():
    """Interval of delta for which the Gromov-product chain constants are consistent.

    Needs ``c0 = delta - 2 > 0`` and a spacing ``4 delta <= 1/c0``.
    """
    return 2.0, 1.0 + math.sqrt(1.25)


@dataclass(frozen=True)
class PhiFormula:
    """Explicit separation function of a chain."""

    kind: ChainKind
    delta: float

    def __call__(self, t):
        f = phi_halfspace if self.kind is ChainKind.HALFSPACE else phi_gromov
        return f(t, self.delta)

    @property
    def c0(self) -> float:
        return float(self(0.0))

    @property
    def spacing(self) -> float:
        return (22.0 if self.kind is ChainKind.HALFSPACE else 4.0) * self.delta

    def describe(self) -> str:
        if self.kind is ChainKind.HALFSPACE:
            return f"max(min({self.delta}, 1/(22*{self.delta})), t - 6*{self.delta})"
        return f"max(t - 2*({self.delta}+2), {self.delta} - 2)"


@dataclass(frozen=True, eq=False)
class PhiChain:
    """Nested vertex sets ``V_1 > V_2 > ... > V_m`` with basepoints.

    ``sets`` holds boolean vertex masks.
    """

    kind: ChainKind
    sets: tuple
    basepoints: tuple
    phi: PhiFormula
    m: int
    ray: GeodesicPath | None = None

    @property
    def delta(self) -> float:
        return self.phi.delta

    @property
    def c0(self) -> float:
        return self.phi.c0


@dataclass(frozen=True)
class ChainValidation:
    passed: bool
    nesting: bool
    spacing: bool
    separation: bool
    basepoints_on_boundary: bool
    min_separation_slack: float
    spacings: tuple
    witnesses: list = field(default_factory=list)


def inner_boundary(space: SampledSpace, mask: np.ndarray) -> np.ndarray:
    """Vertices of ``mask`` with at least one neighbour outside it."""
    adj = space.adjacency
    outside = (~mask).astype(float)
    touch = adj.copy()
    touch.data[:] = 1.0
    return mask & (touch @ outside > 0)


def build_phi_chain(space: SampledSpace, density: DensityField, ray: GeodesicPath, kind,
                    delta: float, m: int) -> PhiChain:
    """Build a Phi-chain of ``m`` levels along a conformal geodesic ray.

    HALFSPACE: with split indices ``k_i`` spaced (greedily, at most) ``22 delta``
    apart along the ray, ``V_i`` collects the vertices strictly closer to
    the ray tail ``ray[k_i:]`` than to the head ``ray[:k_i]``; ``x_i = ray[k_i]``.

    GROMOV_PRODUCT: ``V_i = {x : (x . g_i)_p >= 4 i delta - 2 delta}`` with
    ``p = ray[0]`` and ``g_i`` the ray vertex at conformal arclength
    ``4 i delta``; ``x_i`` is the first ray vertex in ``V_i``.
    """
    kind = ChainKind(kind)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if m < 2:
        raise ValueError("a chain needs m >= 2")
    phi = PhiFormula(kind, float(delta))
    pre = ray.conformal_prefix
    need = m * phi.spacing
    if pre[-1] < need:
        raise ValueError(f"ray too short for the chain: length {pre[-1]:.4g} < {need:.4g}")
    verts = ray.vertices
    sets, bases = [], []
    if kind is ChainKind.HALFSPACE:
        k = 0
        for _ in range(m):
            nk = int(np.searchsorted(pre, pre[k] + phi.spacing, side="right") - 1)
            if nk <= k:
                raise ValueError("ray edge longer than the chain spacing")
            k = nk
            tail = density.distance_to_set(verts[k:])
            head = density.distance_to_set(verts[:k])
            sets.append(tail < head)
            bases.append(int(verts[k]))
    else:
        p = int(verts[0])
        dp = density.distances(p)
        for i in range(1, m + 1):
            T = 4.0 * i * delta
            j = int(np.searchsorted(pre, T, side="right") - 1)
            g = int(verts[j])
            dg = density.distances(g)
            prod = 0.5 * (dp + dp[g] - dg)
            mask = prod >= T - 2.0 * delta
            sets.append(mask)
            first = int(np.argmax(mask[verts]))
            bases.append(int(verts[first]))
    for s in sets:
        s.setflags(write=False)
    return PhiChain(kind, tuple(sets), tuple(bases), phi, m, ray)


def validate_phi_chain(chain: PhiChain, metric: DensityField, max_boundary_samples: int | None = None,
                       seed: int = 0, atol: float = 1e-9) -> ChainValidation:
    """Check nesting, basepoint spacing and the separation condition.

    Every inner-boundary vertex of every level is tested unless
    ``max_boundary_samples`` caps the count (seeded subsample).
    """
    if not chain.sets:
        raise ValueError("empty chain")
    space = metric.space
    rng = np.random.default_rng(seed)
    wit = []
    nesting = True
    for i in range(len(chain.sets) - 1):
        bad = chain.sets[i + 1] & ~chain.sets[i]
        if bad.any():
            nesting = False
            wit.append(("nesting", i, int(np.flatnonzero(bad)[0])))
    on_bd = True
    bds = [inner_boundary(space, s) for s in chain.sets]
    for i, (x, bd) in enumerate(zip(chain.basepoints, bds)):
        if not bd[x]:
            on_bd = False
            wit.append(("basepoint", i, x))
    c0 = chain.c0
    spac = []
    spacing_ok = True
    for i in range(len(chain.basepoints) - 1):
        d = float(metric.distances(chain.basepoints[i])[chain.basepoints[i + 1]])
        spac.append(d)
        if not (c0 - atol <= d <= 1.0 / c0 + atol):
            spacing_ok = False
            wit.append(("spacing", i, d))
    sep_ok = True
    min_slack = math.inf
    for i in range(len(chain.sets) - 1):
        cand = np.flatnonzero(bds[i])
        if max_boundary_samples is not None and cand.size > max_boundary_samples:
            cand = np.sort(rng.choice(cand, size=max_boundary_samples, replace=False))
        if cand.size == 0:
            continue
        to_next = metric.distance_to_set(np.flatnonzero(chain.sets[i + 1]))[cand]
        to_base = metric.distances(chain.basepoints[i])[cand]
        slack = to_next - chain.phi(to_base)
        j = int(np.argmin(slack))
        min_slack = min(min_slack, float(slack[j]))
        if slack[j] < -atol:
            sep_ok = False
            wit.append(("separation", i, int(cand[j]), float(to_next[j]), float(chain.phi(to_base[j]))))
    passed = nesting and on_bd and spacing_ok and sep_ok
    return ChainValidation(passed, nesting, spacing_ok, sep_ok, on_bd, min_slack, tuple(spac), wit)


@dataclass(frozen=True)
class RayRecord:
    start: int
    through: int
    end: int
    label: str
    base_length: float
    conformal_length: float
    end_dist_sigma: float


def classify_boundary_rays(space: SampledSpace, density: DensityField, ray_count: int, seed: int = 0,
                           divergence_factor: float = 10.0, basepoint: int | None = None) -> list:
    """Trace maximal conformal geodesics from the basepoint and label their ends.

    Ray ``j`` runs from the basepoint through a seeded direction vertex
    ``s_j`` and is continued to the vertex of largest conformal distance
    among those whose geodesic from the basepoint passes through ``s_j``;
    from there it climbs ``d_rho(p, .)`` greedily until a local maximum
    (on truncated graphs: an outer face).
    Labels: ``"sigma"`` (ends in the cutoff layer next to Sigma: finite
    base length), ``"diverging"`` (base length beyond ``divergence_factor``
    times the basepoint's distance to Sigma), ``"domain-boundary"`` (stops at
    the outer domain boundary) or ``"undetermined"``. On cone graphs the
    first two read ``"tip-directed"`` and ``"infinity-directed"``.
    """
    if ray_count <= 0:
        return []
    p = space.basepoint if basepoint is None else int(basepoint)
    rng = np.random.default_rng(seed)
    through = sample_pool(space, ray_count + 1, rng)
    through = [int(t) for t in through if t != p][:ray_count]
    dp = density.distances(p)
    ref = float(space.dist_to_sigma[p]) if np.isfinite(space.dist_to_sigma[p]) else space.diameter_estimate
    cone = space.kind == "cone"
    out = []
    tol = 1e-9 * max(1.0, float(np.max(dp[np.isfinite(dp)])))
    for s in through:
        ds = density.distances(s)
        shadow = np.abs(dp - dp[s] - ds) <= tol
        f = int(np.argmax(np.where(shadow, dp, -np.inf)))
        head = path_from_distances(density, dp, s).vertices
        tail = path_from_distances(density, ds, f).vertices
        verts = list(head) + list(tail[1:])
        # greedy continuation: climb d_rho(p, .) until a local maximum
        adj = density.adjacency
        v = verts[-1]
        while True:
            nb = adj.indices[adj.indptr[v]:adj.indptr[v + 1]]
            up = nb[dp[nb] > dp[v]]
            if up.size == 0:
                break
            best = dp[up].max()
            v = int(up[dp[up] == best].min())
            verts.append(v)
        f = verts[-1]
        path = make_path(density, verts)
        if space.cutoff[f]:
            label = "tip-directed" if cone else "sigma"
        elif path.l_g > divergence_factor * ref:
            label = "infinity-directed" if cone else "diverging"
        elif space.boundary[f]:
            label = "domain-boundary"
        else:
            label = "undetermined"
        out.append(RayRecord(p, s, f, label, path.l_g, path.l_rho, float(space.dist_to_sigma[f])))
    return out
