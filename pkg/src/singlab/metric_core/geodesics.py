"""Shortest conformal paths with deterministic tie-breaking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import DensityField
from .space import SampledSpace

__all__ = [
    "GeodesicPath",
    "UnreachableError",
    "conformal_distance",
    "geodesic_between",
    "path_from_distances",
    "make_path",
]

_REL_TOL = 1e-10


class UnreachableError(ValueError):
    """Raised when two vertices lie in different components."""


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    """Vertex path with cumulative base and conformal lengths.

    Attributes
    ----------
    vertices : (k,) int array
    base_prefix : (k,) array
        Cumulative g_H length; ``base_prefix[0] == 0``.
    conformal_prefix : (k,) array
        Cumulative trapezoid conformal length.
    """

    vertices: np.ndarray
    base_prefix: np.ndarray
    conformal_prefix: np.ndarray

    @property
    def l_g(self) -> float:
        return float(self.base_prefix[-1])

    @property
    def l_rho(self) -> float:
        return float(self.conformal_prefix[-1])

    @property
    def l_min(self) -> np.ndarray:
        """``min(prefix, suffix)`` base length at every path vertex."""
        return np.minimum(self.base_prefix, self.l_g - self.base_prefix)

    @property
    def start(self) -> int:
        return int(self.vertices[0])

    @property
    def end(self) -> int:
        return int(self.vertices[-1])

    def __len__(self):
        return len(self.vertices)


def _check_pair(space, density, *vertices):
    if density.space is not space:
        raise ValueError("density is attached to a different space")
    for v in vertices:
        if not 0 <= int(v) < space.n_vertices:
            raise IndexError(f"vertex {v} not in space")


def conformal_distance(space: SampledSpace, density: DensityField, x: int, y: int) -> float:
    """Shortest-path distance with trapezoid edge weights."""
    _check_pair(space, density, x, y)
    if x == y:
        return 0.0
    d = float(density.distances(int(x))[int(y)])
    if not np.isfinite(d):
        raise UnreachableError(f"vertices {x} and {y} are not connected")
    return d


def make_path(density: DensityField, vertices) -> GeodesicPath:
    """Build a :class:`GeodesicPath` record from an explicit vertex list."""
    verts = np.asarray(vertices, dtype=np.int64).reshape(-1)
    if verts.size == 1:
        z = np.zeros(1)
        return GeodesicPath(verts, z, z.copy())
    space = density.space
    a, b = verts[:-1], verts[1:]
    base = np.asarray(space.adjacency[a, b]).ravel()
    if np.any(base <= 0):
        raise ValueError("consecutive path vertices are not adjacent")
    conf = 0.5 * (density.values[a] + density.values[b]) * base
    return GeodesicPath(verts, np.concatenate([[0.0], np.cumsum(base)]), np.concatenate([[0.0], np.cumsum(conf)]))


def path_from_distances(density: DensityField, dist: np.ndarray, target: int) -> GeodesicPath:
    """Trace a shortest path back from ``target`` along a distance array.

    At each step the smallest-id neighbour ``u`` with
    ``dist[u] + w(u, v) == dist[v]`` (up to rounding) is taken, so the path
    is a deterministic function of the inputs.
    """
    adj = density.adjacency
    target = int(target)
    if not np.isfinite(dist[target]):
        raise UnreachableError(f"vertex {target} unreachable")
    path = [target]
    v = target
    while dist[v] > 0:
        lo, hi = adj.indptr[v], adj.indptr[v + 1]
        nb, w = adj.indices[lo:hi], adj.data[lo:hi]
        gap = dist[nb] + w - dist[v]
        ok = (np.abs(gap) <= _REL_TOL * max(1.0, dist[v])) & (dist[nb] < dist[v])
        if not ok.any():
            ok = dist[nb] < dist[v]
            nb, gap = nb[ok], gap[ok]
            v = int(nb[np.argmin(np.abs(gap))])
        else:
            v = int(nb[ok].min())
        path.append(v)
    return make_path(density, path[::-1])


def geodesic_between(space: SampledSpace, density: DensityField, x: int, y: int) -> GeodesicPath:
    """Conformal geodesic from ``x`` to ``y`` with both lengths recorded."""
    _check_pair(space, density, x, y)
    if x == y:
        return make_path(density, [int(x)])
    return path_from_distances(density, density.distances(int(x)), int(y))
