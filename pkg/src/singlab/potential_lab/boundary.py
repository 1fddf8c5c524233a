"""Martin kernels, boundary Harnack ratios, oscillation decay and Fatou traces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import DomainKind, GridDomain, Role
from .operators import GridFunction, GridOperator
from .solvers import green_matrix_columns

__all__ = [
    "DiscreteMeasure",
    "MartinSequence",
    "martin_sequence",
    "RotationalKernels",
    "martin_integral",
    "bhp_ratio",
    "OscillationResult",
    "oscillation_decay",
    "predicted_rate",
    "FatouResult",
    "fatou_experiment",
    "minimal_growth_check",
]


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weights ``mu_j >= 0`` on boundary nodes ``y_j``."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=int)
        w = np.asarray(self.weights, dtype=float)
        if nodes.shape != w.shape:
            raise ValueError("one weight per support node required")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("measure weights must be finite and non-negative")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", w)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def validate(self, domain: GridDomain) -> None:
        roles = domain.roles[self.nodes]
        if np.any((roles != Role.DIRICHLET) & (roles != Role.SINGULAR)):
            raise ValueError("measure support must lie on DIRICHLET or SINGULAR boundary nodes")

    def weight_at(self, node: int) -> float:
        hit = self.weights[self.nodes == node]
        return float(hit.sum())

    def __mul__(self, s: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.nodes, self.weights * float(s))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class MartinSequence:
    """Normalized kernels ``K(., p_n) = G(., p_n) / G(p0, p_n)``.

    Attributes
    ----------
    kernels : (n_poles, N) array
    normalizers : ndarray
        ``G(p0, p_n)``.
    cauchy : ndarray
        ``sup_region |K_{n+1} - K_n|``.
    limit : GridFunction
        Martin-kernel approximation (Richardson-extrapolated in the pole
        depth when depths are given).
    """

    poles: np.ndarray
    kernels: np.ndarray
    normalizers: np.ndarray
    cauchy: np.ndarray
    limit: GridFunction
    depths: np.ndarray | None = None


def martin_sequence(system: GridOperator, p0: int, poles, region=None, depths=None,
                    extrapolate: bool = True) -> MartinSequence:
    """Green's-function ratios along a pole sequence approaching a boundary point.

    Parameters
    ----------
    p0 : int
        Normalization node.
    poles : sequence of int
        Interior nodes ordered toward the boundary point.
    region : bool array, optional
        Compact set on which Cauchy differences are measured (default: all
        interior nodes).
    depths : sequence of float, optional
        Distances ``|p_n - y|``. With ``extrapolate`` the last two kernels are
        combined linearly to cancel the first-order term in the depth.

    Raises
    ------
    ValueError
        Non-positive normalizer.
    """
    poles = np.asarray(poles, dtype=int)
    if poles.size == 0:
        raise ValueError("empty pole sequence")
    cols = green_matrix_columns(system, poles)
    N = system.domain.n_nodes
    G = np.zeros((poles.size, N))
    G[:, system.interior_index] = cols.T
    norm = G[:, p0].copy()
    if np.any(norm <= 0):
        raise ValueError("non-positive normalizer G(p0, p_n)")
    K = G / norm[:, None]
    reg = system.domain.interior if region is None else np.asarray(region, bool)
    cauchy = np.array([np.abs(K[i + 1, reg] - K[i, reg]).max() for i in range(poles.size - 1)])
    lim = K[-1].copy()
    dep = None
    if depths is not None:
        dep = np.asarray(depths, dtype=float)
        if extrapolate and poles.size >= 2:
            ea, eb = dep[-2], dep[-1]
            lim = (ea * K[-1] - eb * K[-2]) / (ea - eb)
    return MartinSequence(poles, K, norm, cauchy, GridFunction(system.domain, lim), dep)


@dataclass(frozen=True, eq=False)
class RotationalKernels:
    """Martin kernels on a disk grid generated from one kernel by rotation.

    The polar grid is invariant under rotation by the angular step, so the
    kernel for the outer-ring node with angle index ``j`` is the base kernel
    (pole direction ``theta = 0``) rolled by ``j`` along the angle axis.
    """

    domain: GridDomain
    base: np.ndarray

    def __post_init__(self):
        if self.domain.kind is not DomainKind.DISK:
            raise ValueError("rotational kernels need a DISK grid")

    @property
    def boundary_nodes(self) -> np.ndarray:
        n_r, nth = self.domain.params["n_r"], self.domain.params["n_theta"]
        return self.domain.polar_index(n_r, 0) + np.arange(nth)

    def _rings(self, values):
        nth = self.domain.params["n_theta"]
        return values[1:].reshape(-1, nth)

    def kernel(self, node: int) -> np.ndarray:
        j = int(node) - int(self.boundary_nodes[0])
        out = self.base.copy()
        self._rings(out)[:] = np.roll(self._rings(self.base), j, axis=1)
        return out

    def combine(self, measure: DiscreteMeasure) -> np.ndarray:
        nth = self.domain.params["n_theta"]
        dens = np.zeros(nth)
        np.add.at(dens, measure.nodes - int(self.boundary_nodes[0]), measure.weights)
        rings = self._rings(self.base)
        conv = np.fft.irfft(np.fft.rfft(rings, axis=1) * np.fft.rfft(dens)[None, :], n=nth, axis=1)
        out = np.empty_like(self.base)
        out[0] = self.base[0] * measure.mass
        out[1:] = conv.ravel()
        return out


def martin_integral(kernels, measure: DiscreteMeasure, domain: GridDomain | None = None) -> GridFunction:
    """``u_mu = sum_j mu_j k(.; y_j)``.

    Parameters
    ----------
    kernels : RotationalKernels or dict {node: kernel array}
    measure : DiscreteMeasure

    Raises
    ------
    ValueError
        Support node without a kernel.
    """
    if isinstance(kernels, RotationalKernels):
        measure.validate(kernels.domain)
        ok = np.isin(measure.nodes, kernels.boundary_nodes)
        if not ok.all():
            raise ValueError("support/kernel mismatch")
        return GridFunction(kernels.domain, kernels.combine(measure))
    if domain is None:
        raise ValueError("domain required for explicit kernel dictionaries")
    measure.validate(domain)
    out = np.zeros(domain.n_nodes)
    for y, w in zip(measure.nodes, measure.weights):
        if int(y) not in kernels:
            raise ValueError(f"support/kernel mismatch at node {int(y)}")
        out += w * np.asarray(kernels[int(y)], dtype=float)
    return GridFunction(domain, out)


def bhp_ratio(u, v, region) -> float:
    """``sup_{x,y in U} (u(x)/v(x)) (v(y)/u(y)) = max(u/v) / min(u/v)`` over ``U``.

    Raises
    ------
    ValueError
        ``v`` (or ``u``) not positive on ``U``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    U = np.asarray(region, bool)
    if not U.any():
        raise ValueError("empty region")
    if np.any(v[U] <= 0):
        raise ValueError("v has zeros in the region")
    if np.any(u[U] <= 0):
        raise ValueError("u has zeros in the region")
    q = u[U] / v[U]
    return float(q.max() / q.min())


def predicted_rate(c_star: float) -> float:
    """``a = (C* - 1)/(C* + 1)``."""
    return (c_star - 1.0) / (c_star + 1.0)


@dataclass(frozen=True)
class OscillationResult:
    """Oscillation of ``u/v`` over nested neighbourhoods.

    ``c_star_levels[k]`` is the boundary Harnack constant of the shifted
    pairs ``(sup_k(u/v) v - u, v)`` and ``(u - inf_k(u/v) v, v)`` on
    ``N_{k+1}``; ``c_star`` their maximum.
    """

    osc: tuple
    fitted_rate: float
    c_star: float
    predicted_rate: float
    c_star_levels: tuple
    recursion_holds: bool
    non_increasing: bool
    slack: float = 0.1
    level_ratios: tuple = field(default=())


def oscillation_decay(u, v, chain, c_star: float | None = None, slack: float = 0.1) -> OscillationResult:
    """Oscillation sequence of ``u/v`` along a nested chain ``N_0 > N_1 > ...``.

    The predicted rate uses ``c_star`` when given, otherwise the measured
    shifted-pair constants. The recursion
    ``osc(k+1) <= a osc(k) + slack osc(k)`` is checked per level.

    Raises
    ------
    ValueError
        Fewer than three levels or non-nested chain.
    """
    chain = [np.asarray(N, bool) for N in chain]
    if len(chain) < 3:
        raise ValueError("chain too short (< 3 levels)")
    for a, b in zip(chain, chain[1:]):
        if np.any(b & ~a):
            raise ValueError("neighbourhoods are not nested")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    for N in chain:
        if np.any(v[N] <= 0):
            raise ValueError("v has zeros in a neighbourhood")
    q = [u[N] / v[N] for N in chain]
    hi = np.array([x.max() for x in q])
    lo = np.array([x.min() for x in q])
    osc = hi - lo
    scale = max(1.0, float(np.abs(hi).max()))
    levels = []
    for k in range(len(chain) - 1):
        if osc[k] <= 1e-14 * scale:
            levels.append(1.0)
            continue
        N1 = chain[k + 1]
        top = hi[k] - u[N1] / v[N1]
        bot = u[N1] / v[N1] - lo[k]
        cs = []
        for w in (top, bot):
            cs.append(np.inf if w.min() <= 0 else float(w.max() / w.min()))
        levels.append(max(cs))
    measured = float(max(levels))
    cs = measured if c_star is None else float(c_star)
    a = predicted_rate(cs) if np.isfinite(cs) else 1.0
    pos = osc > 1e-14 * scale
    if pos.sum() >= 2:
        i = np.flatnonzero(pos)
        rate = float(np.exp(np.polyfit(i, np.log(osc[pos]), 1)[0]))
    else:
        rate = 0.0
    ratios = tuple(float(osc[k + 1] / osc[k]) if osc[k] > 0 else 0.0 for k in range(len(osc) - 1))
    holds = all(osc[k + 1] <= (a + slack) * osc[k] + 1e-14 * scale for k in range(len(osc) - 1))
    noninc = bool(np.all(np.diff(osc) <= 1e-14 * scale))
    return OscillationResult(tuple(float(x) for x in osc), rate, cs, a, tuple(levels), holds, noninc, slack, ratios)


@dataclass(frozen=True)
class FatouResult:
    """Ratio traces ``u_mu / u_nu`` along approach paths toward ``z``."""

    expected: float
    traces: dict
    limits: dict
    tangential: dict


def fatou_experiment(u_mu, u_nu, nu: DiscreteMeasure, mu: DiscreteMeasure, z: int, domain: GridDomain,
                     paths: dict, tangential: dict | None = None) -> FatouResult:
    """Trace ``u_mu / u_nu`` along node paths approaching the boundary node ``z``.

    Parameters
    ----------
    paths : dict name -> sequence of node ids
        Nontangential (pencil) approaches, ordered toward ``z``.
    tangential : dict, optional
        Control paths, reported without a convergence claim.

    Returns
    -------
    FatouResult
        ``traces[name] = (distance to z, ratio)``; ``limits[name]`` is the
        ratio at the node closest to ``z``; ``expected = mu_z / nu_z``.

    Raises
    ------
    ValueError
        ``nu`` has zero density at ``z``.
    """
    nz = nu.weight_at(z)
    if nz <= 0:
        raise ValueError("nu has zero density at z")
    expected = mu.weight_at(z) / nz
    um = np.asarray(u_mu, dtype=float)
    un = np.asarray(u_nu, dtype=float)
    zc = domain.coords[z]

    def trace(nodes):
        nodes = np.asarray(nodes, dtype=int)
        d = np.linalg.norm(domain.coords[nodes] - zc, axis=1)
        return d, um[nodes] / un[nodes]

    traces = {k: trace(p) for k, p in paths.items()}
    limits = {k: float(t[1][np.argmin(t[0])]) for k, t in traces.items()}
    tang = {k: trace(p) for k, p in (tangential or {}).items()}
    return FatouResult(float(expected), traces, limits, tang)


def minimal_growth_check(G, v, region) -> float:
    """``sup_U G(p0, .) / v``.

    Raises
    ------
    ValueError
        ``v`` vanishes in the region.
    """
    G = np.asarray(G, dtype=float)
    v = np.asarray(v, dtype=float)
    U = np.asarray(region, bool)
    if not U.any():
        raise ValueError("empty region")
    if np.any(v[U] <= 0):
        raise ValueError("v vanishes inside the region")
    return float(np.max(G[U] / v[U]))
