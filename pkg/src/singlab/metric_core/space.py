"""Sampled singular spaces: weighted graphs discretizing H minus Sigma."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

__all__ = [
    "SampledSpace",
    "DegenerateSpaceError",
    "build_space",
    "read_space",
    "write_space",
    "punctured_disk",
    "annulus",
    "half_disk",
    "segment",
    "euclidean_grid",
    "random_tree",
]

STENCILS = {
    4: [(1, 0), (0, 1)],
    8: [(1, 0), (0, 1), (1, 1), (1, -1)],
    16: [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1)],
}


class DegenerateSpaceError(ValueError):
    """Raised when a space is disconnected or too small to carry a metric."""


@dataclass(frozen=True, eq=False)
class SampledSpace:
    """Weighted metric graph with off-graph singular samples.

    Parameters
    ----------
    coords : (n, k) array
        Ambient coordinates of the vertices.
    edges : (m, 2) int array
        Undirected vertex pairs, stored with ``u < v``.
    lengths : (m,) array
        Base (g_H) length of every edge.
    sigma : (s, k) array
        Point samples of the singular set. Never coincide with a vertex.
    sigma_at_origin : bool
        Sigma is the single point at the origin (cones, punctured disks).
    basepoint : int
    boundary : (n,) bool array
        Domain-boundary vertices (outer rims).
    cutoff : (n,) bool array
        Truncation vertices closest to Sigma.
    volumes : (n,) array or None
        Vertex measure used by quadratic forms.
    axis_edges : (m,) bool array or None
        Edges aligned with a product-grid axis; the only edges entering
        Dirichlet energies when present.
    fields : dict
        Named per-vertex arrays (``"r"``, ``"A_norm"``, ...).
    """

    coords: np.ndarray
    edges: np.ndarray
    lengths: np.ndarray
    sigma: np.ndarray
    sigma_at_origin: bool = False
    basepoint: int = 0
    boundary: np.ndarray | None = None
    cutoff: np.ndarray | None = None
    volumes: np.ndarray | None = None
    axis_edges: np.ndarray | None = None
    fields: dict = field(default_factory=dict)
    kind: str = "explicit"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        coords = np.atleast_2d(np.asarray(self.coords, dtype=float))
        n = coords.shape[0]
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        lengths = np.asarray(self.lengths, dtype=float).reshape(-1)
        if n < 2 or edges.shape[0] == 0:
            raise DegenerateSpaceError("disconnected/degenerate space: fewer than two vertices or no edges")
        if lengths.shape[0] != edges.shape[0]:
            raise ValueError("one length per edge required")
        if not np.all(np.isfinite(lengths)) or np.any(lengths <= 0):
            raise ValueError("edge lengths must be strictly positive and finite")
        if edges.min() < 0 or edges.max() >= n or np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("edge endpoints must be distinct vertex ids")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        edges = np.column_stack([lo, hi])
        sigma = np.asarray(self.sigma, dtype=float).reshape(-1, coords.shape[1])
        boundary = np.zeros(n, bool) if self.boundary is None else np.asarray(self.boundary, bool)
        cutoff = np.zeros(n, bool) if self.cutoff is None else np.asarray(self.cutoff, bool)
        set_ = object.__setattr__
        set_(self, "coords", coords)
        set_(self, "edges", edges)
        set_(self, "lengths", lengths)
        set_(self, "sigma", sigma)
        set_(self, "boundary", boundary)
        set_(self, "cutoff", cutoff)
        if self.volumes is not None:
            set_(self, "volumes", np.asarray(self.volumes, dtype=float))
        if self.axis_edges is not None:
            set_(self, "axis_edges", np.asarray(self.axis_edges, bool))
        for arr in (coords, edges, lengths, sigma, boundary, cutoff):
            arr.setflags(write=False)
        if not 0 <= self.basepoint < n:
            raise ValueError("basepoint out of range")
        if sigma.shape[0] and np.min(self.dist_to_sigma) <= 0.0:
            raise ValueError("sigma samples must be disjoint from the vertex set")
        self._check_connected()

    def _check_connected(self):
        keep = ~self.boundary
        if keep.sum() < 2:
            keep = np.ones(self.n_vertices, bool)
        sub = self.adjacency[keep][:, keep]
        ncomp, _ = csgraph.connected_components(sub, directed=False)
        if ncomp != 1:
            raise DegenerateSpaceError(f"disconnected space: {ncomp} components among interior vertices")

    @property
    def n_vertices(self) -> int:
        return self.coords.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric CSR matrix of base edge lengths."""
        return edge_matrix(self.n_vertices, self.edges, self.lengths)

    @cached_property
    def dist_to_sigma(self) -> np.ndarray:
        if self.sigma_at_origin:
            return np.linalg.norm(self.coords, axis=1)
        if self.sigma.shape[0] == 0:
            return np.full(self.n_vertices, np.inf)
        d, _ = cKDTree(self.sigma).query(self.coords)
        return d

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.coords)

    def nearest_vertex(self, point) -> int:
        """Vertex id closest (ambient metric) to ``point``."""
        point = np.asarray(point, dtype=float)
        if point.shape[0] < self.coords.shape[1]:
            point = np.concatenate([point, np.zeros(self.coords.shape[1] - point.shape[0])])
        return int(self._tree.query(point)[1])

    def base_distances(self, sources) -> np.ndarray:
        """g_H graph distances from one or several sources."""
        return csgraph.dijkstra(self.adjacency, directed=False, indices=sources)

    def base_distance(self, x: int, y: int) -> float:
        return float(self.base_distances(x)[y])

    @cached_property
    def diameter_estimate(self) -> float:
        """Double-sweep lower bound of the g_H graph diameter."""
        d = self.base_distances(self.basepoint)
        far = int(np.argmax(np.where(np.isfinite(d), d, -1)))
        d2 = self.base_distances(far)
        return float(np.max(d2[np.isfinite(d2)]))

    def neighbors(self, v: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[v]:a.indptr[v + 1]]

    @cached_property
    def edge_volumes(self) -> np.ndarray:
        if self.volumes is not None:
            return 0.5 * (self.volumes[self.edges[:, 0]] + self.volumes[self.edges[:, 1]])
        # dual-cell heuristic for unstructured graphs
        deg = np.bincount(self.edges.ravel(), minlength=self.n_vertices)
        vol = np.bincount(self.edges.ravel(), weights=np.repeat(self.lengths, 2), minlength=self.n_vertices)
        vol = vol / np.maximum(deg, 1)
        return 0.5 * (vol[self.edges[:, 0]] + vol[self.edges[:, 1]])

    @cached_property
    def vertex_volumes(self) -> np.ndarray:
        if self.volumes is not None:
            return self.volumes
        vol = np.bincount(self.edges.ravel(), weights=np.repeat(0.5 * self.lengths, 2), minlength=self.n_vertices)
        return vol

    def dirichlet_energy_matrix(self) -> sparse.csr_matrix:
        """Graph stiffness matrix approximating the integral of |grad f|^2."""
        mask = self.axis_edges if self.axis_edges is not None else np.ones(self.n_edges, bool)
        e = self.edges[mask]
        w = self.edge_volumes[mask] / self.lengths[mask] ** 2
        n = self.n_vertices
        off = sparse.coo_matrix((np.concatenate([-w, -w]), (np.concatenate([e[:, 0], e[:, 1]]), np.concatenate([e[:, 1], e[:, 0]]))), shape=(n, n))
        diag = np.bincount(e.ravel(), weights=np.repeat(w, 2), minlength=n)
        return (off + sparse.diags(diag)).tocsr()

    @classmethod
    def from_edges(cls, coords, edges, lengths=None, sigma=None, **kw) -> "SampledSpace":
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if lengths is None:
            lengths = np.linalg.norm(coords[edges[:, 0]] - coords[edges[:, 1]], axis=1)
        if sigma is None:
            sigma = np.zeros((0, coords.shape[1]))
        return cls(coords=coords, edges=edges, lengths=lengths, sigma=sigma, **kw)


def edge_matrix(n, edges, weights) -> sparse.csr_matrix:
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    vals = np.concatenate([weights, weights])
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _dedupe(edges):
    e = np.sort(np.asarray(edges, dtype=np.int64), axis=1)
    e = e[e[:, 0] != e[:, 1]]
    return np.unique(e, axis=0)


def _polar_product_edges(n_rad, n_ang, stencil, periodic=True):
    """Edges of an (n_rad x n_ang) index grid, angular axis optionally periodic."""
    idx = np.arange(n_rad * n_ang).reshape(n_rad, n_ang)
    out, axis = [], []
    for di, dj in STENCILS[stencil]:
        i0 = np.arange(max(0, -di), n_rad - max(0, di))
        j0 = np.arange(n_ang) if periodic else np.arange(max(0, -dj), n_ang - max(0, dj))
        a = idx[np.ix_(i0, j0)]
        jj = (j0 + dj) % n_ang if periodic else j0 + dj
        b = idx[np.ix_(i0 + di, jj)]
        out.append(np.column_stack([a.ravel(), b.ravel()]))
        axis.append(np.full(a.size, di == 0 or dj == 0))
    edges = np.vstack(out)
    is_axis = np.concatenate(axis)
    e = np.sort(edges, axis=1)
    keep = e[:, 0] != e[:, 1]
    e, is_axis = e[keep], is_axis[keep]
    e, first = np.unique(e, axis=0, return_index=True)
    return e, is_axis[first]


def punctured_disk(resolution: int, r_min: float = 1e-2, stencil: int = 8) -> SampledSpace:
    """Unit disk minus the origin on a log-polar grid.

    Angular step ``2*pi/resolution`` and radial ratio ``exp(2*pi/resolution)``
    make cells square in the quasi-hyperbolic metric. The innermost ring is
    the cutoff, the unit circle the domain boundary.
    """
    _check_resolution(resolution)
    n_ang = max(int(resolution), 3)
    ds = 2 * math.pi / n_ang
    n_rad = int(math.ceil(math.log(1.0 / r_min) / ds)) + 1
    radii = np.exp(-ds * np.arange(n_rad))
    theta = ds * np.arange(n_ang)
    rr, tt = np.meshgrid(radii, theta, indexing="ij")
    coords = np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])
    edges, axis = _polar_product_edges(n_rad, n_ang, stencil)
    lengths = np.linalg.norm(coords[edges[:, 0]] - coords[edges[:, 1]], axis=1)
    ring = np.repeat(np.arange(n_rad), n_ang)
    vol = (rr * rr * ds * ds).ravel()
    return SampledSpace(
        coords=coords, edges=edges, lengths=lengths, sigma=np.zeros((1, 2)), sigma_at_origin=True,
        basepoint=int(np.argmin(np.abs(rr.ravel() - 0.5) + np.abs(tt.ravel()))),
        boundary=ring == 0, cutoff=ring == n_rad - 1, volumes=vol, axis_edges=axis,
        fields={"r": rr.ravel().copy(), "theta": tt.ravel().copy()}, kind="punctured_disk",
        meta={"resolution": int(resolution), "n_rad": n_rad, "n_ang": n_ang, "r_min": float(radii[-1])},
    )


def annulus(resolution: int, r_in: float = 0.1, r_out: float = 1.0, stencil: int = 8) -> SampledSpace:
    """Polar grid on r in [r_in, r_out], uniform radial spacing, Sigma = {0}."""
    _check_resolution(resolution)
    if not 0 < r_in < r_out:
        raise ValueError("annulus requires 0 < r_in < r_out")
    n_ang = max(int(resolution), 3)
    n_rad = max(int(resolution) // 2, 2) + 1
    radii = np.linspace(r_out, r_in, n_rad)
    h_r = (r_out - r_in) / (n_rad - 1)
    theta = 2 * math.pi * np.arange(n_ang) / n_ang
    rr, tt = np.meshgrid(radii, theta, indexing="ij")
    coords = np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])
    edges, axis = _polar_product_edges(n_rad, n_ang, stencil)
    lengths = np.linalg.norm(coords[edges[:, 0]] - coords[edges[:, 1]], axis=1)
    ring = np.repeat(np.arange(n_rad), n_ang)
    return SampledSpace(
        coords=coords, edges=edges, lengths=lengths, sigma=np.zeros((1, 2)), sigma_at_origin=True,
        boundary=ring == 0, cutoff=ring == n_rad - 1, volumes=(rr * h_r * 2 * math.pi / n_ang).ravel(),
        axis_edges=axis, fields={"r": rr.ravel().copy(), "theta": tt.ravel().copy()}, kind="annulus",
        meta={"resolution": int(resolution), "h_r": h_r, "n_rad": n_rad, "n_ang": n_ang},
    )


def half_disk(resolution: int, stencil: int = 8) -> SampledSpace:
    """Upper half disk; Sigma is the diameter, sampled off-graph."""
    _check_resolution(resolution)
    n_rad = max(int(resolution), 2)
    n_ang = max(int(resolution), 2)
    h = 1.0 / n_rad
    radii = 1.0 - h * np.arange(n_rad)
    dth = math.pi / n_ang
    theta = dth * (np.arange(n_ang) + 0.5)
    rr, tt = np.meshgrid(radii, theta, indexing="ij")
    coords = np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])
    edges, axis = _polar_product_edges(n_rad, n_ang, stencil, periodic=False)
    lengths = np.linalg.norm(coords[edges[:, 0]] - coords[edges[:, 1]], axis=1)
    xs = np.linspace(-1.0, 1.0, 16 * n_rad + 1)
    sigma = np.column_stack([xs, np.zeros_like(xs)])
    ring = np.repeat(np.arange(n_rad), n_ang)
    return SampledSpace(
        coords=coords, edges=edges, lengths=lengths, sigma=sigma, boundary=ring == 0,
        volumes=(rr * h * dth).ravel(), axis_edges=axis,
        fields={"r": rr.ravel().copy(), "theta": tt.ravel().copy()}, kind="half_disk",
        meta={"resolution": int(resolution)},
    )


def segment(resolution: int, r_min: float = 1e-3, r_max: float = 1.0, spacing: str = "geometric") -> SampledSpace:
    """The interval [r_min, r_max] approximating (0, r_max], Sigma = {0}."""
    _check_resolution(resolution)
    if not 0 < r_min < r_max:
        raise ValueError("segment requires 0 < r_min < r_max")
    if spacing == "geometric":
        r = np.geomspace(r_min, r_max, resolution + 1)
    else:
        r = np.linspace(r_min, r_max, resolution + 1)
    coords = r[:, None]
    edges = np.column_stack([np.arange(resolution), np.arange(1, resolution + 1)])
    h = np.diff(r)
    vol = np.zeros_like(r)
    vol[:-1] += h / 2
    vol[1:] += h / 2
    boundary = np.zeros(r.size, bool)
    boundary[-1] = True
    cutoff = np.zeros(r.size, bool)
    cutoff[0] = True
    return SampledSpace(
        coords=coords, edges=edges, lengths=h, sigma=np.zeros((1, 1)), sigma_at_origin=True,
        basepoint=resolution // 2, boundary=boundary, cutoff=cutoff, volumes=vol,
        axis_edges=np.ones(resolution, bool), fields={"r": r.copy()}, kind="segment",
        meta={"resolution": int(resolution)},
    )


def euclidean_grid(n: int, spacing: float = 1.0) -> SampledSpace:
    """Flat n x n 4-neighbour grid without singular set."""
    if n < 2:
        raise DegenerateSpaceError("disconnected/degenerate grid")
    idx = np.arange(n * n).reshape(n, n)
    e = np.vstack([
        np.column_stack([idx[:-1, :].ravel(), idx[1:, :].ravel()]),
        np.column_stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()]),
    ])
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    coords = spacing * np.column_stack([ii.ravel(), jj.ravel()]).astype(float)
    return SampledSpace(coords=coords, edges=e, lengths=np.full(e.shape[0], float(spacing)),
                        sigma=np.zeros((0, 2)), kind="grid", meta={"n": n})


def random_tree(n: int, seed: int = 0) -> SampledSpace:
    """Seeded random recursive tree on ``n`` vertices with lengths in [0.5, 1.5].

    Vertex ``k`` attaches to a uniformly chosen earlier vertex; coordinates
    are a planar embedding by depth used only for bookkeeping.
    """
    if n < 2:
        raise DegenerateSpaceError("disconnected/degenerate space: a single vertex")
    rng = np.random.default_rng(seed)
    parent = np.array([rng.integers(0, k) for k in range(1, n)])
    edges = np.column_stack([parent, np.arange(1, n)])
    lengths = rng.uniform(0.5, 1.5, n - 1)
    depth = np.zeros(n)
    for k in range(1, n):
        depth[k] = depth[parent[k - 1]] + lengths[k - 1]
    coords = np.column_stack([depth, np.arange(n, dtype=float)])
    return SampledSpace(coords=coords, edges=edges, lengths=lengths, sigma=np.zeros((0, 2)), kind="tree",
                        meta={"n": n, "seed": seed})


def _check_resolution(resolution):
    if not isinstance(resolution, (int, np.integer)) or resolution < 2:
        raise ValueError(f"resolution must be an integer >= 2, got {resolution!r}")


def build_space(domain_spec, resolution: int) -> SampledSpace:
    """Discretize a named domain.

    ``domain_spec`` is a mapping with key ``"kind"`` in ``punctured_disk``,
    ``annulus``, ``half_disk``, ``segment``, ``grid``, ``tree``, ``cone`` or ``file``;
    the remaining keys are forwarded to the builder. A bare string is taken
    as the kind.
    """
    if isinstance(domain_spec, str):
        domain_spec = {"kind": domain_spec}
    spec = dict(domain_spec)
    kind = spec.pop("kind", None)
    if not isinstance(resolution, (int, np.integer)) or resolution <= 0:
        raise ValueError(f"non-positive resolution {resolution!r}")
    if kind == "single_vertex":
        raise DegenerateSpaceError("disconnected/degenerate space: a single vertex")
    if kind == "punctured_disk":
        return punctured_disk(resolution, **spec)
    if kind == "annulus":
        return annulus(resolution, **spec)
    if kind == "half_disk":
        return half_disk(resolution, **spec)
    if kind == "segment":
        return segment(resolution, **spec)
    if kind == "grid":
        return euclidean_grid(resolution, **spec)
    if kind == "tree":
        return random_tree(resolution, **spec)
    if kind == "cone":
        from ..cone_geometry import export_cone_graph, make_lawson_cone

        cone = make_lawson_cone(spec.pop("p", 3), spec.pop("q", 3), warn=False)
        r_min = spec.pop("r_min", 1e-2)
        r_max = spec.pop("r_max", 1e2)
        link_steps = spec.pop("link_steps", max(8, resolution // 8))
        if spec:
            raise ValueError(f"unknown cone options {sorted(spec)}")
        return export_cone_graph(cone, r_min, r_max, resolution, link_steps)
    if kind == "file":
        return read_space(spec["path"])
    raise ValueError(f"unknown domain kind {kind!r}")


def read_space(path) -> SampledSpace:
    """Parse the ``V``/``E``/``S`` line format."""
    ids, coords, edges, lengths, sigma = {}, [], [], [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *rest = line.split()
        try:
            if tag == "V":
                ids[rest[0]] = len(coords)
                coords.append([float(t) for t in rest[1:]])
            elif tag == "E":
                edges.append((rest[0], rest[1]))
                lengths.append(float(rest[2]))
            elif tag == "S":
                sigma.append([float(t) for t in rest])
            else:
                raise ValueError(f"unknown record {tag!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    if len(coords) < 2:
        raise DegenerateSpaceError("disconnected/degenerate space: fewer than two vertices")
    try:
        e = np.array([(ids[a], ids[b]) for a, b in edges], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"edge references unknown vertex {exc}") from None
    k = len(coords[0])
    sig = np.array(sigma, dtype=float).reshape(-1, k)
    return SampledSpace(coords=np.array(coords), edges=e, lengths=np.array(lengths), sigma=sig, kind="file")


def write_space(space: SampledSpace, path) -> None:
    lines = []
    for i, x in enumerate(space.coords):
        lines.append("V " + " ".join([str(i)] + [repr(float(t)) for t in x]))
    for (u, v), ln in zip(space.edges, space.lengths):
        lines.append(f"E {u} {v} {float(ln)!r}")
    sig = space.sigma if not space.sigma_at_origin else np.zeros((1, space.coords.shape[1]))
    for s in sig:
        lines.append("S " + " ".join(repr(float(t)) for t in s))
    Path(path).write_text("\n".join(lines) + "\n")
