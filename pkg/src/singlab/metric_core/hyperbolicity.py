"""Gromov products and sampled estimates of the hyperbolicity constant."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .density import DensityField
from .geodesics import path_from_distances
from .space import SampledSpace

__all__ = ["gromov_product", "HyperbolicityReport", "estimate_delta", "sample_pool", "fourpoint_delta"]

_ROUND = 1e-12


def gromov_product(dist_fn, x, y, z) -> float:
    """``(y . z)_x = (d(x, y) + d(x, z) - d(y, z)) / 2``.

    ``dist_fn`` is a callable ``d(a, b)`` or a square distance matrix.
    Rounding-level negatives are clamped to 0.
    """
    d = (lambda a, b: dist_fn[a][b]) if not callable(dist_fn) else dist_fn
    dxy, dxz, dyz = float(d(x, y)), float(d(x, z)), float(d(y, z))
    for val in (dxy, dxz, dyz):
        if not np.isfinite(val):
            raise ValueError("infinite distance in Gromov product")
    g = 0.5 * (dxy + dxz - dyz)
    scale = max(dxy, dxz, dyz, 1.0)
    if g < 0 and g > -_ROUND * scale * 1e3:
        g = 0.0
    return g


@dataclass(frozen=True)
class HyperbolicityReport:
    """Sampled four-point and thin-triangle hyperbolicity constants."""

    delta_fourpoint: float
    delta_thin_triangles: float
    n_quadruples: int
    n_triangles: int
    pool_size: int
    refinement: object = None
    witness: tuple = field(default=())

    @property
    def delta(self) -> float:
        return max(self.delta_fourpoint, self.delta_thin_triangles)


def sample_pool(space: SampledSpace, size: int, rng: np.random.Generator) -> np.ndarray:
    """Pick ``size`` distinct vertices.

    On polar-type spaces (fields ``r`` and ``theta``) continuum points are
    drawn log-uniformly in radius and uniformly in angle and snapped to the
    nearest vertex, so the same seed selects geometrically matching points at
    every resolution. Cone graphs use the same recipe on both link angles.
    """
    f = space.fields
    if size >= space.n_vertices:
        return np.arange(space.n_vertices)
    if "r" in f and ("theta" in f or "theta1" in f):
        lo, hi = np.log(f["r"].min()), np.log(f["r"].max())
        picks, seen = [], set()
        for _ in range(50 * size):
            u = rng.random(3)
            r = np.exp(lo + (hi - lo) * u[0])
            v = _snap(space, r, u[1:])
            if v not in seen:
                seen.add(v)
                picks.append(v)
            if len(picks) == size:
                break
        return np.array(picks, dtype=np.int64)
    return np.sort(rng.choice(space.n_vertices, size=size, replace=False))


def _snap(space, r, u):
    f = space.fields
    if "theta" in f:
        if space.kind == "half_disk":
            th = np.pi * u[0]
        else:
            th = 2 * np.pi * u[0]
        return space.nearest_vertex([r * np.cos(th), r * np.sin(th)])
    from ..cone_geometry import cone_point_coords

    return space.nearest_vertex(cone_point_coords(space.meta["p"], space.meta["q"], r, 2 * np.pi * u[0], 2 * np.pi * u[1]))


def fourpoint_delta(D: np.ndarray, quads: np.ndarray | None = None):
    """Largest four-point defect on a pool distance matrix.

    For rows ``(w, x, y, z)`` of ``quads`` the defect is
    ``min{(y.w)_x, (z.w)_x} - (y.z)_x`` clamped at 0; with ``quads=None``
    every ordered quadruple is examined. Returns ``(delta, witness)``.
    """
    D = np.asarray(D, dtype=float)
    scale = max(float(D.max()), 1.0)
    best, witness = 0.0, ()
    if quads is None:
        P = D.shape[0]
        for x in range(P):
            G = 0.5 * (D[x][:, None] + D[x][None, :] - D)
            # val[y, z, w] = min(G[y, w], G[z, w]) - G[y, z]
            val = np.minimum(G[:, None, :], G[None, :, :]) - G[:, :, None]
            k = int(np.argmax(val))
            if val.flat[k] > best:
                y, z, w = np.unravel_index(k, val.shape)
                best, witness = float(val.flat[k]), (int(w), x, int(y), int(z))
    else:
        w, x, y, z = quads.T
        gyw = 0.5 * (D[x, y] + D[x, w] - D[y, w])
        gzw = 0.5 * (D[x, z] + D[x, w] - D[z, w])
        gyz = 0.5 * (D[x, y] + D[x, z] - D[y, z])
        val = np.minimum(gyw, gzw) - gyz
        k = int(np.argmax(val))
        if val[k] > 0:
            best, witness = float(val[k]), tuple(int(t) for t in quads[k])
    if best <= _ROUND * scale:
        return 0.0, ()
    return best, witness


def estimate_delta(space: SampledSpace, density: DensityField, quadruple_samples: int = 2000,
                   triangle_samples: int = 8, seed: int = 0, exhaustive_threshold: int = 12,
                   pool_size: int = 32) -> HyperbolicityReport:
    """Sampled hyperbolicity constants of ``(space, d_rho)``.

    A seeded pool of vertices is drawn first (see :func:`sample_pool`);
    quadruples and triangles are then drawn from the pool with independent
    seeded streams, so enlarging a sample count only appends samples and
    the estimates are non-decreasing in the counts. Pools of at most
    ``exhaustive_threshold`` vertices are searched exhaustively.
    """
    if quadruple_samples < 1 or triangle_samples < 1:
        raise ValueError("sample counts must be >= 1")
    if density.space is not space:
        raise ValueError("density is attached to a different space")
    ss = np.random.SeedSequence(seed)
    pool_rng, quad_rng, tri_rng = (np.random.default_rng(s) for s in ss.spawn(3))
    pool = sample_pool(space, pool_size, pool_rng)
    P = pool.size
    rows = density.distances(pool)
    D = rows[:, pool]
    D = 0.5 * (D + D.T)
    if P <= exhaustive_threshold:
        d4, wit = fourpoint_delta(D)
        nq = P ** 4
    else:
        quads = quad_rng.integers(P, size=(quadruple_samples, 4))
        d4, wit = fourpoint_delta(D, quads)
        nq = quadruple_samples
    wit = tuple(int(pool[i]) for i in wit)

    if P < 3:
        return HyperbolicityReport(d4, 0.0, nq, 0, P, space.meta.get("resolution"), wit)
    tris = [tri_rng.choice(P, size=3, replace=False) for _ in range(triangle_samples)]
    dthin = 0.0
    for a, b, c in tris:
        sides = [path_from_distances(density, rows[a], pool[b]).vertices,
                 path_from_distances(density, rows[b], pool[c]).vertices,
                 path_from_distances(density, rows[c], pool[a]).vertices]
        for k in range(3):
            others = np.concatenate([sides[(k + 1) % 3], sides[(k + 2) % 3]])
            dd = density.distance_to_set(others)
            dthin = max(dthin, float(dd[sides[k]].max()))
    return HyperbolicityReport(d4, dthin, nq, len(tris), P, space.meta.get("resolution"), wit)


def all_quadruples(P):
    """Every ordered quadruple of ``range(P)`` as an array (small P only)."""
    return np.array(list(itertools.product(range(P), repeat=4)), dtype=np.int64)
