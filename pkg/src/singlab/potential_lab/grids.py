"""Structured and imported discretization substrates.

Every domain is stored in the same finite-volume form: nodes with
coordinates, cell volumes and a role (interior, Dirichlet, singular
boundary, free), and a list of faces ``(u, v, g)`` with a geometric
transmissibility ``g = face measure / node distance``. A second-order
operator with coefficient ``a`` then contributes ``a_face * g`` to the
stiffness matrix on each face.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DomainKind",
    "Role",
    "GridDomain",
    "disk_grid",
    "half_disk_grid",
    "annulus_grid",
    "radial_grid",
    "imported_grid",
]


class DomainKind(str, enum.Enum):
    DISK = "disk"
    HALF_DISK = "half_disk"
    ANNULUS_POLAR = "annulus_polar"
    RADIAL_1D = "radial_1d"
    IMPORTED = "imported"


class Role(enum.IntEnum):
    INTERIOR = 0
    DIRICHLET = 1
    SINGULAR = 2
    FREE = 3


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Finite-volume substrate.

    Attributes
    ----------
    kind : DomainKind
    coords : (N, d) array
    roles : (N,) int array of :class:`Role`
    volumes : (N,) array
        Cell volumes (boundary nodes carry their half cells).
    faces : (F, 2) int array
    trans : (F,) array
        Geometric transmissibilities.
    params : dict
        Mesh parameters (``h``, ring counts, radii...).
    """

    kind: DomainKind
    coords: np.ndarray
    roles: np.ndarray
    volumes: np.ndarray
    faces: np.ndarray
    trans: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("coords", "roles", "volumes", "faces", "trans"):
            getattr(self, name).setflags(write=False)
        if np.any(self.trans <= 0):
            raise ValueError("stencil failure: non-positive transmissibility")
        interior = self.roles == Role.INTERIOR
        if not interior.any():
            raise ValueError("domain has no interior nodes")
        if np.any(self.volumes[interior] <= 0):
            raise ValueError("stencil failure: interior cell with non-positive volume")

    @property
    def n_nodes(self) -> int:
        return self.coords.shape[0]

    @property
    def interior(self) -> np.ndarray:
        return self.roles == Role.INTERIOR

    @property
    def boundary(self) -> np.ndarray:
        return (self.roles == Role.DIRICHLET) | (self.roles == Role.SINGULAR)

    @property
    def radius(self) -> np.ndarray:
        return np.linalg.norm(self.coords, axis=1)

    def nearest_node(self, point, interior_only: bool = True) -> int:
        d = np.linalg.norm(self.coords - np.asarray(point, dtype=float), axis=1)
        if interior_only:
            d = np.where(self.interior, d, np.inf)
        return int(np.argmin(d))

    def polar_index(self, ring: int, j: int) -> int:
        """Node id of ring ``ring`` (1-based) and angle index ``j`` on polar grids."""
        nth = self.params["n_theta"]
        return self.params["ring_offset"] + (ring - 1) * nth + (j % nth)


def disk_grid(n_r: int, n_theta: int | None = None, radius: float = 1.0) -> GridDomain:
    """Polar finite-volume grid of the disk with a central origin cell.

    Rings ``r_i = i h`` (``h = radius / n_r``), angles ``theta_j = j 2pi/n_theta``;
    the outer ring is Dirichlet. ``n_theta`` defaults to ``4 n_r``.
    """
    if n_r < 2:
        raise ValueError("need at least two rings")
    nth = 4 * n_r if n_theta is None else int(n_theta)
    h = radius / n_r
    dth = 2 * math.pi / nth
    r = h * np.arange(1, n_r + 1)
    th = dth * np.arange(nth)
    R, T = np.meshgrid(r, th, indexing="ij")
    coords = np.vstack([[0.0, 0.0], np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])])
    roles = np.zeros(coords.shape[0], dtype=np.int8)
    roles[1 + (n_r - 1) * nth:] = Role.DIRICHLET
    vol = np.concatenate([[math.pi * (h / 2) ** 2], (R * h * dth).ravel()])
    vol[1 + (n_r - 1) * nth:] *= 0.5
    idx = 1 + np.arange(n_r * nth).reshape(n_r, nth)
    faces, trans = [], []
    # origin to ring 1
    faces.append(np.column_stack([np.zeros(nth, dtype=np.int64), idx[0]]))
    trans.append(np.full(nth, dth / 2))
    # radial faces
    faces.append(np.column_stack([idx[:-1].ravel(), idx[1:].ravel()]))
    trans.append(np.repeat((r[:-1] + h / 2) * dth / h, nth))
    # angular faces (interior rings)
    faces.append(np.column_stack([idx[:-1].ravel(), np.roll(idx[:-1], -1, axis=1).ravel()]))
    trans.append(np.repeat(h / (r[:-1] * dth), nth))
    return GridDomain(DomainKind.DISK, coords, roles, vol, np.vstack(faces), np.concatenate(trans),
                      {"h": h, "n_r": n_r, "n_theta": nth, "dtheta": dth, "ring_offset": 1, "radius": radius})


def half_disk_grid(n_r: int, n_theta: int | None = None) -> GridDomain:
    """Upper half of the unit disk on a polar grid with cell-centred angles.

    Angles ``theta_j = (j + 1/2) pi/n_theta``; the diameter (including the
    origin) is represented by explicit SINGULAR nodes at ``(+-r_i, 0)``, the
    arc by DIRICHLET nodes. ``n_theta`` defaults to ``2 n_r``.
    """
    if n_r < 2:
        raise ValueError("need at least two rings")
    nth = 2 * n_r if n_theta is None else int(n_theta)
    h = 1.0 / n_r
    dth = math.pi / nth
    r = h * np.arange(1, n_r + 1)
    th = dth * (np.arange(nth) + 0.5)
    R, T = np.meshgrid(r, th, indexing="ij")
    ring = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
    # layout: origin, diameter right (+r_i), diameter left (-r_i), rings
    right = np.column_stack([r, np.zeros(n_r)])
    left = np.column_stack([-r, np.zeros(n_r)])
    coords = np.vstack([[0.0, 0.0], right, left, ring])
    off = 1 + 2 * n_r
    N = coords.shape[0]
    roles = np.full(N, Role.INTERIOR, dtype=np.int8)
    roles[:off] = Role.SINGULAR
    roles[off + (n_r - 1) * nth:] = Role.DIRICHLET
    vol = np.zeros(N)
    vol[:off] = 0.25 * h * h
    vol[off:] = (R * h * dth).ravel()
    vol[off + (n_r - 1) * nth:] *= 0.5
    idx = off + np.arange(n_r * nth).reshape(n_r, nth)
    faces, trans = [], []
    faces.append(np.column_stack([np.zeros(nth, dtype=np.int64), idx[0]]))
    trans.append(np.full(nth, dth / 2))
    faces.append(np.column_stack([idx[:-1].ravel(), idx[1:].ravel()]))
    trans.append(np.repeat((r[:-1] + h / 2) * dth / h, nth))
    faces.append(np.column_stack([idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel()]))
    trans.append(np.repeat(h / (r[:-1] * dth), nth - 1))
    faces.append(np.column_stack([idx[:-1, 0], 1 + np.arange(n_r - 1)]))
    trans.append(h / (r[:-1] * dth / 2))
    faces.append(np.column_stack([idx[:-1, -1], 1 + n_r + np.arange(n_r - 1)]))
    trans.append(h / (r[:-1] * dth / 2))
    return GridDomain(DomainKind.HALF_DISK, coords, roles, vol, np.vstack(faces), np.concatenate(trans),
                      {"h": h, "n_r": n_r, "n_theta": nth, "dtheta": dth, "ring_offset": off})


def annulus_grid(r_in: float, r_out: float, n_r: int, n_theta: int) -> GridDomain:
    """Periodic polar grid on ``r_in <= r <= r_out``; the inner circle is
    SINGULAR, the outer DIRICHLET."""
    if not 0 < r_in < r_out or n_r < 2:
        raise ValueError("invalid annulus")
    h = (r_out - r_in) / n_r
    dth = 2 * math.pi / n_theta
    r = r_in + h * np.arange(n_r + 1)
    th = dth * np.arange(n_theta)
    R, T = np.meshgrid(r, th, indexing="ij")
    coords = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
    ring = np.repeat(np.arange(n_r + 1), n_theta)
    roles = np.where(ring == 0, Role.SINGULAR, np.where(ring == n_r, Role.DIRICHLET, Role.INTERIOR)).astype(np.int8)
    vol = (R * h * dth).ravel()
    vol[(ring == 0) | (ring == n_r)] *= 0.5
    idx = np.arange(R.size).reshape(R.shape)
    faces = [np.column_stack([idx[:-1].ravel(), idx[1:].ravel()]),
             np.column_stack([idx[1:-1].ravel(), np.roll(idx[1:-1], -1, axis=1).ravel()])]
    trans = [np.repeat((r[:-1] + h / 2) * dth / h, n_theta), np.repeat(h / (r[1:-1] * dth), n_theta)]
    return GridDomain(DomainKind.ANNULUS_POLAR, coords, roles, vol, np.vstack(faces), np.concatenate(trans),
                      {"h": h, "n_r": n_r, "n_theta": n_theta, "dtheta": dth, "r_in": r_in, "r_out": r_out})


def radial_grid(r_min: float, r_max: float, n_nodes: int, n: int = 1, spacing: str = "uniform",
                left: Role = Role.DIRICHLET) -> GridDomain:
    """Nodes on ``[r_min, r_max]`` carrying the radial measure ``r^{n-1} dr``.

    Faces use ``g = r_{i+1/2}^{n-1} / (r_{i+1} - r_i)`` so that the assembled
    operator is the conservative form of ``-u'' - (n-1)/r u'``.
    """
    if not 0 <= r_min < r_max or n_nodes < 3 or (r_min == 0 and (n != 1 or spacing != "uniform")):
        raise ValueError("invalid radial grid (r_min = 0 needs n = 1 and uniform spacing)")
    if spacing == "uniform":
        r = np.linspace(r_min, r_max, n_nodes)
    elif spacing == "geometric":
        r = np.geomspace(r_min, r_max, n_nodes)
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    d = np.diff(r)
    mid = 0.5 * (r[:-1] + r[1:])
    vol = np.zeros(n_nodes)
    vol[:-1] += d / 2
    vol[1:] += d / 2
    vol *= r ** (n - 1)
    roles = np.zeros(n_nodes, dtype=np.int8)
    roles[0], roles[-1] = left, Role.DIRICHLET
    faces = np.column_stack([np.arange(n_nodes - 1), np.arange(1, n_nodes)])
    return GridDomain(DomainKind.RADIAL_1D, r[:, None], roles, vol, faces, mid ** (n - 1) / d,
                      {"n": n, "spacing": spacing, "r_min": r_min, "r_max": r_max})


def imported_grid(space) -> GridDomain:
    """Graph form of a :class:`~singlab.metric_core.SampledSpace`.

    Domain-boundary vertices become DIRICHLET, cutoff vertices SINGULAR.
    Faces are the axis edges (all edges if none are flagged) with
    ``g = edge volume / length^2``; an ``A_norm`` field is carried along for
    curvature potentials.
    """
    mask = space.axis_edges if space.axis_edges is not None else np.ones(space.n_edges, bool)
    e = space.edges[mask]
    g = space.edge_volumes[mask] / space.lengths[mask] ** 2
    roles = np.zeros(space.n_vertices, dtype=np.int8)
    roles[space.cutoff] = Role.SINGULAR
    roles[space.boundary] = Role.DIRICHLET
    params = {"space_kind": space.kind, **{k: v for k, v in space.meta.items() if np.isscalar(v)}}
    if "A_norm" in space.fields:
        params["A_norm"] = np.asarray(space.fields["A_norm"], dtype=float)
    return GridDomain(DomainKind.IMPORTED, space.coords, roles, space.vertex_volumes.copy(), e.copy(), g, params)
