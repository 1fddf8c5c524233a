"""Conformal densities on sampled spaces and their smoothing."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from .space import SampledSpace, edge_matrix

__all__ = [
    "DensityMode",
    "DensityField",
    "attach_density",
    "constant_density",
    "hybrid_density_value",
    "smooth_density",
]


class DensityMode(str, enum.Enum):
    INV_DIST_SIGMA = "inv_dist_sigma"
    SKIN_MODEL = "skin_model"
    HYBRID = "hybrid"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class DensityField:
    """Positive per-vertex density rho with reciprocal delta = 1/rho.

    Attributes
    ----------
    space : SampledSpace
    mode : DensityMode
    values : ndarray
        rho(v) > 0.
    lipschitz_estimate : float
        Largest ``|delta(u) - delta(v)| / l_g(u, v)`` over the edges.
    info : dict
        Free-form diagnostics (smoothing constants, parameters).
    """

    space: SampledSpace
    mode: DensityMode
    values: np.ndarray
    lipschitz_estimate: float = field(default=np.nan)
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if vals.shape[0] != self.space.n_vertices:
            raise ValueError("density needs one value per vertex")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("density must be strictly positive and finite at every vertex")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mode", DensityMode(self.mode))
        if np.isnan(self.lipschitz_estimate):
            e = self.space.edges
            d = self.delta
            lip = float(np.max(np.abs(d[e[:, 0]] - d[e[:, 1]]) / self.space.lengths))
            object.__setattr__(self, "lipschitz_estimate", lip)

    @cached_property
    def delta(self) -> np.ndarray:
        d = 1.0 / self.values
        d.setflags(write=False)
        return d

    @cached_property
    def edge_weights(self) -> np.ndarray:
        """Trapezoid conformal length of every edge."""
        e = self.space.edges
        return 0.5 * (self.values[e[:, 0]] + self.values[e[:, 1]]) * self.space.lengths

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        return edge_matrix(self.space.n_vertices, self.space.edges, self.edge_weights)

    def distances(self, sources) -> np.ndarray:
        """Conformal graph distances from one vertex or a list of vertices."""
        return csgraph.dijkstra(self.adjacency, directed=False, indices=sources)

    def distance_to_set(self, vertices) -> np.ndarray:
        """Conformal distance from every vertex to the nearest member of ``vertices``."""
        vertices = np.asarray(vertices, dtype=np.int64).reshape(-1)
        if vertices.size == 0:
            return np.full(self.space.n_vertices, np.inf)
        return csgraph.dijkstra(self.adjacency, directed=False, indices=vertices, min_only=True)

    def __call__(self, x: int, y: int) -> float:
        return float(self.distances(x)[y])


def constant_density(space: SampledSpace, value: float = 1.0) -> DensityField:
    return DensityField(space, DensityMode.CUSTOM, np.full(space.n_vertices, float(value)))


def hybrid_density_value(lipschitz: float, dist_boundary, delta_skin):
    """``1/rho = min(L * dist(z, dD), delta_skin(z))``; returns rho."""
    if lipschitz <= 0:
        raise ValueError("Lipschitz constant must be positive")
    d = np.minimum(lipschitz * np.asarray(dist_boundary, dtype=float), np.asarray(delta_skin, dtype=float))
    return 1.0 / d


def attach_density(space: SampledSpace, mode, **params) -> DensityField:
    """Attach a conformal density to ``space``.

    Parameters
    ----------
    space : SampledSpace
    mode : DensityMode or str
        ``INV_DIST_SIGMA``: rho = 1/dist(v, Sigma).
        ``SKIN_MODEL``: rho = max(|A|(v), Lambda/dist(v, Sigma)); ``A_norm``
        defaults to the space field of that name, ``Lambda`` to 1.
        ``HYBRID``: 1/rho = min(L * dist(v, dD), delta_skin(v)); takes
        ``L``, ``dist_boundary`` (array) or ``boundary_radius`` (distance
        to the circle |x| = R), and ``delta_skin`` (array; defaults to the
        skin model).
        ``CUSTOM``: explicit ``values``.
    """
    mode = DensityMode(mode.lower() if isinstance(mode, str) else mode)
    n = space.n_vertices
    if mode is DensityMode.INV_DIST_SIGMA:
        _no_extra(params, set())
        dist = space.dist_to_sigma
        _check_dist(dist)
        rho = 1.0 / dist
    elif mode is DensityMode.SKIN_MODEL:
        _no_extra(params, {"A_norm", "Lambda"})
        rho = _skin_model(space, params)
    elif mode is DensityMode.HYBRID:
        _no_extra(params, {"L", "dist_boundary", "boundary_radius", "delta_skin", "A_norm", "Lambda"})
        lip = float(params.get("L", 1.0))
        if "dist_boundary" in params:
            db = np.broadcast_to(np.asarray(params["dist_boundary"], dtype=float), (n,))
        elif "boundary_radius" in params:
            db = float(params["boundary_radius"]) - np.linalg.norm(space.coords, axis=1)
        else:
            raise ValueError("HYBRID density needs dist_boundary or boundary_radius")
        if np.any(db <= 0):
            raise ValueError("vertex on the domain boundary: dist(v, dD) = 0")
        if "delta_skin" in params:
            ds = np.broadcast_to(np.asarray(params["delta_skin"], dtype=float), (n,))
        else:
            ds = 1.0 / _skin_model(space, {k: params[k] for k in ("A_norm", "Lambda") if k in params})
        rho = hybrid_density_value(lip, db, ds)
        params = {"L": lip}
    else:
        _no_extra(params, {"values"})
        if "values" not in params:
            raise ValueError("CUSTOM density needs values")
        rho = np.broadcast_to(np.asarray(params["values"], dtype=float), (n,)).copy()
        if np.any(rho < 0):
            raise ValueError("negative density values")
    return DensityField(space, mode, rho, info={k: v for k, v in params.items() if np.isscalar(v)})


def _no_extra(params, allowed):
    extra = set(params) - set(allowed)
    if extra:
        raise ValueError(f"unexpected density parameters {sorted(extra)}")


def _check_dist(dist):
    if np.any(dist <= 0):
        raise ValueError("vertex with dist(v, Sigma) = 0")
    if not np.all(np.isfinite(dist)):
        raise ValueError("distance to Sigma undefined: space has no Sigma samples")


def _skin_model(space, params):
    lam = float(params.get("Lambda", 1.0))
    if lam <= 0:
        raise ValueError("Lambda must be positive")
    a = params.get("A_norm", space.fields.get("A_norm"))
    a = np.zeros(space.n_vertices) if a is None else np.broadcast_to(np.asarray(a, dtype=float), (space.n_vertices,))
    if np.any(a < 0):
        raise ValueError("|A| must be non-negative")
    dist = space.dist_to_sigma
    _check_dist(dist)
    return np.maximum(a, lam / dist)


def smooth_density(density: DensityField, radius: float, n_neighbors: int = 64,
                   qi_pairs: int = 32, seed: int = 0) -> DensityField:
    """Average delta over ambient balls of radius ``radius * delta(v)``.

    The ball around ``v`` is truncated to its ``n_neighbors`` nearest
    vertices. The returned field records the sandwich constants
    ``c1 <= delta_smooth / delta <= c2`` and the observed quasi-isometry
    range of the two conformal metrics on sampled pairs in ``info``.
    """
    if radius < 0:
        raise ValueError("smoothing radius must be non-negative")
    space = density.space
    delta = density.delta
    if radius == 0:
        return DensityField(space, density.mode, density.values, density.lipschitz_estimate,
                            info={"c1": 1.0, "c2": 1.0, "qi_low": 1.0, "qi_high": 1.0})
    k = min(n_neighbors, space.n_vertices)
    tree = cKDTree(space.coords)
    dist, idx = tree.query(space.coords, k=k)
    dist, idx = dist.reshape(space.n_vertices, k), idx.reshape(space.n_vertices, k)
    inside = dist <= radius * delta[:, None]
    inside[:, 0] = True
    smoothed = np.where(inside, delta[idx], 0.0).sum(axis=1) / inside.sum(axis=1)
    out = DensityField(space, DensityMode.CUSTOM, 1.0 / smoothed)
    ratio = smoothed / delta
    info = {"c1": float(ratio.min()), "c2": float(ratio.max())}
    rng = np.random.default_rng(seed)
    src = rng.choice(space.n_vertices, size=min(qi_pairs, space.n_vertices), replace=False)
    dst = rng.integers(space.n_vertices, size=src.size)
    d0 = density.distances(src)[np.arange(src.size), dst]
    d1 = out.distances(src)[np.arange(src.size), dst]
    ok = d0 > 0
    q = d1[ok] / d0[ok] if ok.any() else np.ones(1)
    info.update(qi_low=float(q.min()), qi_high=float(q.max()))
    object.__setattr__(out, "info", info)
    return out
