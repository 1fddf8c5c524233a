"""Lawson cones C^{p,q}: curvature data, skin densities, pencils and graph export.

The cone over ``S^p(a) x S^q(b)`` with ``a = sqrt(p/(p+q))``,
``b = sqrt(q/(p+q))`` is a minimal hypersurface of dimension
``n = p + q + 1`` in ``R^{p+q+2}``, singular only at the tip.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .linalg import smallest_generalized_eigenpair
from .metric_core.space import SampledSpace

__all__ = [
    "ConeSpec",
    "ConePoint",
    "PencilSpec",
    "SkinDensityRule",
    "make_lawson_cone",
    "minimality_residual",
    "second_fundamental_norm",
    "scalar_curvature",
    "principal_curvatures",
    "skin_density_on_cone",
    "pencil_contains",
    "cone_point_coords",
    "export_cone_graph",
    "hardy_constant",
    "sphere_volume",
    "link_volume",
    "HOMOGENEITY_WEIGHTS",
]


@dataclass(frozen=True)
class ConeSpec:
    """Lawson cone data (p, q >= 1)."""

    p: int
    q: int

    @property
    def n(self) -> int:
        return self.p + self.q + 1

    @property
    def a_link(self) -> float:
        return math.sqrt(self.p / (self.p + self.q))

    @property
    def b_link(self) -> float:
        return math.sqrt(self.q / (self.p + self.q))

    @property
    def A_link_norm(self) -> float:
        return math.sqrt(self.p + self.q)

    @property
    def certified_minimizing(self) -> bool:
        return self.p + self.q >= 6

    @property
    def sigma(self) -> str:
        return "tip"

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q}


def make_lawson_cone(p: int, q: int, warn: bool = True) -> ConeSpec:
    """Cone over ``S^p(sqrt(p/(p+q))) x S^q(sqrt(q/(p+q)))``.

    Cones with ``p + q < 6`` are built with a warning: they are minimal but
    outside the area-minimizing regime.
    """
    if int(p) != p or int(q) != q or p < 1 or q < 1:
        raise ValueError(f"p and q must be positive integers, got {p!r}, {q!r}")
    cone = ConeSpec(int(p), int(q))
    if warn and not cone.certified_minimizing:
        warnings.warn(f"C^{{{p},{q}}} has p+q < 6: minimal but not area minimizing", stacklevel=2)
    return cone


def minimality_residual(cone: ConeSpec) -> float:
    """Mean curvature of the link in the unit sphere, ``p b/a - q a/b``."""
    a, b = cone.a_link, cone.b_link
    return cone.p * b / a - cone.q * a / b


def principal_curvatures(cone: ConeSpec, r: float = 1.0) -> np.ndarray:
    """Principal curvatures at radius r: ``sqrt(q/p)/r`` (p times), ``-sqrt(p/q)/r`` (q times), 0."""
    _check_r(r)
    p, q = cone.p, cone.q
    return np.concatenate([np.full(p, math.sqrt(q / p)), np.full(q, -math.sqrt(p / q)), [0.0]]) / r


def second_fundamental_norm(cone: ConeSpec, r):
    """``|A|(r) = sqrt(p+q)/r`` (homogeneity weight -1)."""
    r = _check_r(r)
    return cone.A_link_norm / r


def scalar_curvature(cone: ConeSpec, r):
    """``scal = -|A|^2 = -(p+q)/r^2`` (homogeneity weight -2)."""
    r = _check_r(r)
    return -(cone.p + cone.q) / r ** 2


HOMOGENEITY_WEIGHTS = {
    "second_fundamental_norm": -1,
    "scalar_curvature": -2,
    "skin_density": -1,
    "distance_to_tip": 1,
}


def _check_r(r):
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise ValueError("radius must be positive")
    return arr if arr.ndim else float(arr)


@dataclass(frozen=True)
class ConePoint:
    """Point ``(omega, r)`` on the desk link model (two great-circle angles)."""

    r: float
    theta1: float = 0.0
    theta2: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("cone points need r > 0 (the tip is excluded)")

    def ambient(self, cone: ConeSpec) -> np.ndarray:
        return cone_point_coords(cone.p, cone.q, self.r, self.theta1, self.theta2)

    def scaled(self, t: float) -> "ConePoint":
        return ConePoint(self.r * t, self.theta1, self.theta2)


def cone_point_coords(p, q, r, theta1, theta2) -> np.ndarray:
    """Ambient coordinates in ``R^{p+q+2}``; first factor uses a great circle
    of ``S^p(a r)``, second factor one of ``S^q(b r)``."""
    a, b = math.sqrt(p / (p + q)), math.sqrt(q / (p + q))
    x = np.zeros(p + q + 2)
    x[0], x[1] = a * r * math.cos(theta1), a * r * math.sin(theta1)
    x[p + 1], x[p + 2] = b * r * math.cos(theta2), b * r * math.sin(theta2)
    return x


@dataclass(frozen=True)
class SkinDensityRule:
    """``rho(x) = max{|A|(x), Lambda/dist(x, tip)} = max{sqrt(p+q), Lambda}/r``."""

    cone: ConeSpec
    Lambda: float = 1.0

    @property
    def A_cross(self) -> float:
        """Link value ``<A>^x`` (the density at r = 1)."""
        return max(self.cone.A_link_norm, self.Lambda)

    def __call__(self, r):
        r = _check_r(r)
        return self.A_cross / r

    def delta(self, r):
        return 1.0 / self(r)


def skin_density_on_cone(cone: ConeSpec, Lambda: float = 1.0) -> SkinDensityRule:
    if not Lambda > 0:
        raise ValueError("Lambda must be positive")
    return SkinDensityRule(cone, float(Lambda))


@dataclass(frozen=True)
class PencilSpec:
    """Pencil ``{x : delta(x) > aperture * d(x, apex)}`` with apex at the tip."""

    aperture: float
    apex: str = "tip"

    def __post_init__(self):
        if not self.aperture > 0:
            raise ValueError("pencil aperture must be positive")
        if self.apex != "tip":
            raise ValueError("only tip-apex pencils are supported on cones")


def pencil_contains(cone: ConeSpec, density: SkinDensityRule, x: ConePoint, pencil: PencilSpec) -> bool:
    """Membership ``delta(x) > aperture * r`` (rays through the tip are geodesics)."""
    return bool(density.delta(x.r) > pencil.aperture * x.r)


_OFFSETS26 = [(i, j, k) for i in (-1, 0, 1) for j in (-1, 0, 1) for k in (-1, 0, 1)
              if (i, j, k) > (0, 0, 0)]


def export_cone_graph(cone: ConeSpec, r_min: float, r_max: float, radial_steps: int,
                      link_steps: int) -> SampledSpace:
    """Product mesh of a truncated cone.

    Radial nodes are geometric, ``r_k = r_min h^k``; the link is the flat
    torus of two great circles with radii ``a_link``, ``b_link`` sampled by
    ``link_steps`` angles each. Neighbours use the 26-point stencil; an edge
    joining radii ``r1, r2`` at link separation ``phi`` has length
    ``sqrt((r2 - r1)^2 + r1 r2 phi^2)``, which is exact for radial edges
    (``r (h - 1)``) and for link edges (``r a dtheta``). Vertex volumes carry
    the full cone measure ``r^{n-1} dr``.
    """
    if not (0 < r_min < r_max) or not np.isfinite(r_max):
        raise ValueError("need 0 < r_min < r_max")
    if radial_steps < 2 or link_steps < 2:
        raise ValueError("radial_steps and link_steps must be >= 2")
    p, q = cone.p, cone.q
    a, b = cone.a_link, cone.b_link
    nr, nl = int(radial_steps), int(link_steps)
    log_h = math.log(r_max / r_min) / (nr - 1)
    radii = r_min * np.exp(log_h * np.arange(nr))
    radii[-1] = r_max
    dth = 2 * math.pi / nl
    th = dth * np.arange(nl)
    R, T1, T2 = np.meshgrid(radii, th, th, indexing="ij")
    idx = np.arange(R.size).reshape(R.shape)
    coords = np.zeros((R.size, p + q + 2))
    coords[:, 0] = a * (R * np.cos(T1)).ravel()
    coords[:, 1] = a * (R * np.sin(T1)).ravel()
    coords[:, p + 1] = b * (R * np.cos(T2)).ravel()
    coords[:, p + 2] = b * (R * np.sin(T2)).ravel()
    edges, lens, axis = [], [], []
    for di, dj, dk in _OFFSETS26:
        i0 = np.arange(max(0, -di), nr - max(0, di))
        u = idx[i0][:, :, :]
        v = idx[i0 + di][:, (np.arange(nl) + dj) % nl][:, :, (np.arange(nl) + dk) % nl]
        r1 = R[i0].ravel()
        r2 = R[i0 + di].ravel()
        phi = math.hypot(a * dj * dth, b * dk * dth)
        edges.append(np.column_stack([u.ravel(), v.ravel()]))
        lens.append(np.sqrt((r2 - r1) ** 2 + r1 * r2 * phi * phi))
        axis.append(np.full(u.size, (di != 0) + (dj != 0) + (dk != 0) == 1))
    edges = np.vstack(edges)
    lens = np.concatenate(lens)
    axis = np.concatenate(axis)
    e = np.sort(edges, axis=1)
    keep = e[:, 0] != e[:, 1]
    e, lens, axis = e[keep], lens[keep], axis[keep]
    e, first = np.unique(e, axis=0, return_index=True)
    lens, axis = lens[first], axis[first]
    rr = R.ravel()
    vol = rr ** cone.n * log_h * (a * dth) * (b * dth)
    layer = np.repeat(np.arange(nr), nl * nl)
    base = int(np.argmin(np.abs(np.log(rr)) + T1.ravel() + T2.ravel()))
    return SampledSpace(
        coords=coords, edges=e, lengths=lens, sigma=np.zeros((1, p + q + 2)), sigma_at_origin=True,
        basepoint=base, boundary=layer == nr - 1, cutoff=layer == 0, volumes=vol, axis_edges=axis,
        fields={"r": rr.copy(), "theta1": T1.ravel().copy(), "theta2": T2.ravel().copy(),
                "A_norm": cone.A_link_norm / rr},
        kind="cone",
        meta={"p": p, "q": q, "n": cone.n, "radial_steps": nr, "link_steps": nl, "log_h": log_h,
              "r_min": float(r_min), "r_max": float(r_max), "resolution": nr},
    )


def hardy_constant(space: SampledSpace, density, base_operator: bool = True, tol: float = 1e-11,
                   maxiter: int = 2000):
    """Smallest Rayleigh quotient ``(int |grad f|^2 [+ |A|^2 f^2]) / int rho^2 f^2``.

    Functions vanish on domain-boundary and cutoff vertices. The gradient
    term is the graph Dirichlet energy, the zeroth-order terms are lumped
    against the vertex volumes. Returns ``(tau, ground_state)`` with the
    ground state extended by zero to all vertices.
    """
    rho = np.asarray(density.values if hasattr(density, "values") else density, dtype=float)
    if rho.shape != (space.n_vertices,) or np.any(rho <= 0):
        raise ValueError("density must be positive at every vertex")
    from scipy import sparse

    free = ~(space.boundary | space.cutoff)
    K = space.dirichlet_energy_matrix()
    vol = space.vertex_volumes
    if base_operator:
        A2 = space.fields.get("A_norm")
        A2 = np.zeros(space.n_vertices) if A2 is None else np.asarray(A2) ** 2
        K = K + sparse.diags(A2 * vol)
    M = sparse.diags(rho ** 2 * vol)
    K = sparse.csr_matrix(K)[free][:, free]
    M = sparse.csr_matrix(M)[free][:, free]
    res = smallest_generalized_eigenpair(K, M, tol=tol, maxiter=maxiter)
    phi = np.zeros(space.n_vertices)
    phi[free] = res.vector
    return res.value, phi


def sphere_volume(k: int, radius: float = 1.0) -> float:
    """Volume of the round k-sphere of the given radius."""
    return math.exp(math.log(2) + (k + 1) / 2 * math.log(math.pi) - gammaln((k + 1) / 2)) * radius ** k


def link_volume(cone: ConeSpec) -> float:
    """``Vol(S^p(a)) Vol(S^q(b))``."""
    return sphere_volume(cone.p, cone.a_link) * sphere_volume(cone.q, cone.b_link)
