"""Separation of variables on Lawson cones.

A natural operator ``L = -Laplace + V`` on a cone with ``V(t x) = t^-2 V(x)``
splits in polar coordinates ``x = (omega, r)`` as

    L v = -v_rr - (n-1)/r v_r + r^-2 L^x v,
    L^x_lambda = -Laplace_link + V^x - lambda (<A>^x)^2,

so that ``psi(omega) r^alpha`` solves ``L_lambda u = 0`` exactly when
``L^x psi = mu psi`` and ``alpha^2 + (n-2) alpha - mu = 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import sparse

from .cone_geometry import ConeSpec, link_volume, make_lawson_cone
from .linalg import smallest_generalized_eigenpair

__all__ = [
    "PotentialKind",
    "LinkOperatorSpec",
    "IndicialData",
    "RadialSolution",
    "ExponentFit",
    "SolutionRecord",
    "BoundsReport",
    "NoRealExponentsError",
    "conformal_factor",
    "link_principal_eigenvalue",
    "indicial_exponents",
    "build_fixed_point_solution",
    "radial_residual_check",
    "radial_exponent_fit",
    "scaling_action",
    "attractor_limit_check",
    "theorem12_bounds_check",
    "shifted_bounds_check",
    "largest_passing_lambda",
    "link_ground_state_norms",
    "jacobi_discriminant",
    "mixed_record",
]


class PotentialKind(str, enum.Enum):
    JACOBI = "jacobi"
    CONFORMAL = "conformal"
    SHIFTED_CONFORMAL = "shifted_conformal"
    BASE = "base"
    CUSTOM = "custom"


class NoRealExponentsError(ValueError):
    """Negative indicial discriminant: no real fixed-point exponents."""


def conformal_factor(m: int) -> float:
    """``(m - 2) / (4 (m - 1))``, the conformal-Laplacian coefficient in dimension m."""
    return (m - 2) / (4 * (m - 1))


@dataclass(frozen=True)
class LinkOperatorSpec:
    """Link operator ``L^x_lambda = -Laplace_link + V^x - lambda (<A>^x)^2``.

    Parameters
    ----------
    cone : ConeSpec
    kind : PotentialKind
    lam : float
        Weight coefficient lambda.
    n_shift : int, optional
        Dimension m >= n for ``SHIFTED_CONFORMAL``.
    custom : float or callable, optional
        ``CUSTOM`` potential: a constant, or ``V(theta1, theta2)`` on the
        desk link torus (solved numerically).
    Lambda : float
        Skin-density constant; ``<A>^x = max(sqrt(p+q), Lambda)``.
    grid : int
        Link grid size per angle for non-constant ``CUSTOM`` potentials.
    """

    cone: ConeSpec
    kind: PotentialKind = PotentialKind.JACOBI
    lam: float = 0.0
    n_shift: int | None = None
    custom: object = None
    Lambda: float = 1.0
    grid: int = 64

    def __post_init__(self):
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        if self.kind is PotentialKind.SHIFTED_CONFORMAL:
            if self.n_shift is None or self.n_shift < self.cone.n:
                raise ValueError(f"shifted operator needs m >= n = {self.cone.n}")
        if self.kind is PotentialKind.CUSTOM and self.custom is None:
            raise ValueError("CUSTOM potential needs a value or callable")

    @property
    def A_cross(self) -> float:
        return max(self.cone.A_link_norm, self.Lambda)

    @property
    def constant_potential(self) -> bool:
        return not (self.kind is PotentialKind.CUSTOM and callable(self.custom))

    @property
    def V_cross(self) -> float:
        s = self.cone.p + self.cone.q
        if self.kind is PotentialKind.JACOBI:
            return -float(s)
        if self.kind is PotentialKind.CONFORMAL:
            return -conformal_factor(self.cone.n) * s
        if self.kind is PotentialKind.SHIFTED_CONFORMAL:
            return -conformal_factor(self.n_shift) * s
        if self.kind is PotentialKind.BASE:
            return float(s)
        if callable(self.custom):
            raise ValueError("non-constant CUSTOM potential has no single V^x value")
        return float(self.custom)


def link_principal_eigenvalue(op: LinkOperatorSpec, tol: float = 1e-12):
    """Principal eigenvalue mu of the link operator and its ground state.

    Constant potentials give ``mu = V^x - lambda (<A>^x)^2`` with constant
    ground state (returned as ``1.0``). A callable CUSTOM potential is
    discretized on the flat link torus (circle radii ``a_link``,
    ``b_link``) with periodic second differences and solved by inverse
    iteration; the ground state is returned as a grid array normalized to
    maximum 1.
    """
    if op.constant_potential:
        return op.V_cross - op.lam * op.A_cross ** 2, 1.0
    N = int(op.grid)
    a, b = op.cone.a_link, op.cone.b_link
    h = 2 * math.pi / N
    th = h * np.arange(N)
    T1, T2 = np.meshgrid(th, th, indexing="ij")
    V = np.asarray(op.custom(T1, T2), dtype=float).ravel() - op.lam * op.A_cross ** 2
    e = np.ones(N)
    D = sparse.diags([-e[:-1], 2 * e, -e[:-1]], [-1, 0, 1], format="lil")
    D[0, N - 1] = D[N - 1, 0] = -1
    D = sparse.csr_matrix(D)
    I = sparse.identity(N)
    lap = sparse.kron(D, I) / (a * h) ** 2 + sparse.kron(I, D) / (b * h) ** 2
    res = smallest_generalized_eigenpair(lap + sparse.diags(V), sparse.identity(N * N), tol=tol)
    psi = res.vector.reshape(N, N)
    return res.value, psi / psi.max()


@dataclass(frozen=True)
class IndicialData:
    """Roots of ``alpha^2 + (n-2) alpha - mu = 0``."""

    mu: float
    n: int
    alpha_plus: float
    alpha_minus: float
    discriminant: float
    boundary: bool

    def row(self) -> dict:
        return {"mu": self.mu, "n": self.n, "alpha_plus": self.alpha_plus,
                "alpha_minus": self.alpha_minus, "discriminant": self.discriminant,
                "double_root": self.boundary}


def indicial_exponents(mu: float, n: int, tol: float = 1e-14) -> IndicialData:
    """``alpha_pm = -(n-2)/2 +- sqrt(((n-2)/2)^2 + mu)``."""
    h = (n - 2) / 2
    disc = h * h + mu
    if disc < -tol:
        raise NoRealExponentsError(
            f"no real fixed-point exponents: ((n-2)/2)^2 + mu = {disc:.6g} < 0")
    boundary = abs(disc) <= tol
    s = 0.0 if boundary else math.sqrt(disc)
    return IndicialData(float(mu), int(n), -h + s, -h - s, float(disc), bool(boundary))


@dataclass(frozen=True)
class RadialSolution:
    """``Psi(omega, r) = psi(omega) r^alpha`` with ``Psi(p0) = 1`` at ``r = 1``."""

    alpha: float
    psi0: float = 1.0
    label: str = "PLUS"
    mu: float = float("nan")
    n: int = 0

    def __call__(self, r):
        return self.psi0 * np.asarray(r, dtype=float) ** self.alpha


def build_fixed_point_solution(cone: ConeSpec, op: LinkOperatorSpec, which: str = "PLUS") -> RadialSolution:
    which = which.upper()
    if which not in ("PLUS", "MINUS"):
        raise ValueError("which must be PLUS or MINUS")
    mu, _ = link_principal_eigenvalue(op)
    ind = indicial_exponents(mu, cone.n)
    if ind.boundary:
        raise NoRealExponentsError("double indicial root: the two fixed points coincide")
    alpha = ind.alpha_plus if which == "PLUS" else ind.alpha_minus
    return RadialSolution(alpha, 1.0, which, mu, cone.n)


def radial_residual_check(cone: ConeSpec, op: LinkOperatorSpec, solution: RadialSolution, sample_radii) -> float:
    """Largest ``|L_lambda Psi|`` over the radii, using exact radial derivatives
    and ``L^x psi = mu psi``."""
    mu, _ = link_principal_eigenvalue(op)
    r = np.asarray(sample_radii, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radii must be positive")
    a, n = solution.alpha, cone.n
    u = solution.psi0 * r ** a
    du = solution.psi0 * a * r ** (a - 1)
    d2u = solution.psi0 * a * (a - 1) * r ** (a - 2)
    res = -d2u - (n - 1) / r * du + mu / r ** 2 * u
    return float(np.max(np.abs(res)))


@dataclass(frozen=True)
class ExponentFit:
    alpha: float
    monomial: bool
    max_log_deviation: float
    n_nodes: int


def radial_exponent_fit(mu: float, n: int, alpha: float | None = None, r_min: float = 0.5,
                        r_max: float = 2.0, n_nodes: int = 1000, boundary_values=None,
                        monomial_tol: float = 1e-3, solver=None) -> ExponentFit:
    """Solve the radial two-point problem and fit a log-log slope.

    Boundary values default to ``r_min^alpha`` and ``r_max^alpha``. The
    interior solution is fitted by least squares in ``(log r, log u)``; if
    ``u`` changes sign or the fit residual exceeds ``monomial_tol`` the
    solution is flagged as non-monomial (``monomial=False``).
    ``solver`` defaults to the radial finite-difference solver of
    :mod:`singlab.potential_lab`.
    """
    if solver is None:
        from .potential_lab import solve_radial_problem as solver
    if boundary_values is None:
        if alpha is None:
            raise ValueError("need alpha or explicit boundary values")
        boundary_values = (r_min ** alpha, r_max ** alpha)
    r, u = solver(n=n, V_cross=mu, r_min=r_min, r_max=r_max, n_nodes=n_nodes, boundary_values=boundary_values)
    inner = slice(1, -1)
    ri, ui = r[inner], u[inner]
    if np.any(ui <= 0) and np.any(ui >= 0) or np.any(ui == 0):
        return ExponentFit(float("nan"), False, float("inf"), n_nodes)
    sign = np.sign(ui[0])
    x, y = np.log(ri), np.log(sign * ui)
    slope, icpt = np.polyfit(x, y, 1)
    dev = float(np.max(np.abs(y - (slope * x + icpt))))
    return ExponentFit(float(slope), bool(dev <= monomial_tol), dev, n_nodes)


# ---------------------------------------------------------------- scaling action

@dataclass(frozen=True)
class SolutionRecord:
    """Finite combination ``sum_i c_i r^{alpha_i} psi_i`` with ``psi_i(omega_0) = 1``.

    ``terms`` is a tuple of ``(coefficient, alpha, label)``. Coefficients are
    :class:`fractions.Fraction` when all exponents are integers, so the
    scaling action is exact.
    """

    terms: tuple

    def value_at_p0(self):
        return sum(c for c, _, _ in self.terms)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return sum(float(c) * r ** float(a) for c, a, _ in self.terms)

    def coefficient(self, label):
        for c, _, lab in self.terms:
            if lab == label:
                return c
        return 0

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c, _, _ in self.terms)


def mixed_record(cone: ConeSpec, op: LinkOperatorSpec, c_minus=1, c_plus=1, extra=()) -> SolutionRecord:
    """Record ``c_minus Psi_- + c_plus Psi_+ (+ extra terms)``."""
    mu, _ = link_principal_eigenvalue(op)
    ind = indicial_exponents(mu, cone.n)
    terms = [(c_minus, ind.alpha_minus, "MINUS"), (c_plus, ind.alpha_plus, "PLUS")]
    terms += [tuple(t) for t in extra]
    terms = [t for t in terms if t[0] != 0]
    return _exactify(SolutionRecord(tuple(terms)))


def _exactify(rec: SolutionRecord) -> SolutionRecord:
    if all(float(a).is_integer() for _, a, _ in rec.terms) and all(
            isinstance(c, (int, Fraction)) for c, _, _ in rec.terms):
        return SolutionRecord(tuple((Fraction(c), int(a), lab) for c, a, lab in rec.terms))
    return SolutionRecord(tuple((float(c), float(a), lab) for c, a, lab in rec.terms))


def scaling_action(record: SolutionRecord, eta) -> SolutionRecord:
    """``S*_eta``: scale ``c_i -> c_i eta^{alpha_i}`` and renormalize to 1 at p0."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    if all(c == 0 for c, _, _ in record.terms) or not record.terms:
        raise ValueError("all coefficients are zero")
    exact = record.exact and isinstance(eta, (int, Fraction))
    if exact:
        eta = Fraction(eta)
        new = [(c * eta ** a, a, lab) for c, a, lab in record.terms]
    else:
        new = [(float(c) * float(eta) ** float(a), float(a), lab) for c, a, lab in record.terms]
    norm = sum(c for c, _, _ in new)
    if norm == 0:
        raise ValueError("renormalization impossible: value at p0 vanishes")
    return SolutionRecord(tuple((c / norm, a, lab) for c, a, lab in new))


def attractor_limit_check(record: SolutionRecord, direction: str, eta_sequence=None,
                          annulus=(0.5, 2.0), tol: float = 1e-6) -> dict:
    """Follow ``S*_eta record`` along ``eta_sequence`` and name the limit.

    The distance to each normalized component ``r^{alpha_i}`` is measured in
    sup-norm on the reference annulus. The returned label is the component
    whose distance becomes smaller than ``tol`` and decreases along the
    sequence. The MINUS component dominates as ``eta -> 0`` and PLUS as
    ``eta -> infinity``.
    """
    direction = direction.upper()
    if eta_sequence is None:
        ks = range(1, 13)
        eta_sequence = [10.0 ** (-k) for k in ks] if direction == "TO_ZERO" else [10.0 ** k for k in ks]
    if not any(lab in ("PLUS", "MINUS") for _, _, lab in record.terms):
        raise ValueError("record contains neither fixed point")
    rs = np.linspace(annulus[0], annulus[1], 64)
    labels = [lab for _, _, lab in record.terms]
    dists = {lab: [] for lab in labels}
    for eta in eta_sequence:
        rec = scaling_action(record, eta)
        vals = rec(rs)
        for c, a, lab in rec.terms:
            dists[lab].append(float(np.max(np.abs(vals - rs ** float(a)))))
    winner = None
    for lab, d in dists.items():
        if d[-1] < tol and all(x >= y - 1e-15 for x, y in zip(d, d[1:])):
            winner = lab
    if winner is None:
        raise RuntimeError("no convergence of the renormalized record")
    return {"label": winner, "distances": dists, "direction": direction}


# ---------------------------------------------------------------- eigenvalue bounds

@dataclass(frozen=True)
class BoundsReport:
    cone: tuple
    lam: float
    mu: float
    alpha_plus: float
    alpha_minus: float
    checks: dict
    bounds: dict
    largest_passing_lambda: float | None = None
    potential: str = "conformal"
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _bound_checks(mu, n_dim, const):
    """Five inequalities with constant ``const`` (sqrt(3/4) or sqrt(2/3))."""
    h = (n_dim - 2) / 2
    mu_bound = -(1 - const ** 2) * h * h
    bounds = {"mu_lower": mu_bound, "alpha_plus_lower": -(1 - const) * h,
              "alpha_minus_upper": -(1 + const) * h, "alpha_minus_lower": -(n_dim - 2)}
    try:
        ind = indicial_exponents(mu, n_dim)
        ap, am = ind.alpha_plus, ind.alpha_minus
    except NoRealExponentsError:
        ap = am = float("nan")
    checks = {
        "mu_lower": bool(mu >= mu_bound),
        "alpha_plus_negative": bool(ap < 0),
        "alpha_plus_lower": bool(ap >= bounds["alpha_plus_lower"]),
        "alpha_minus_upper": bool(am <= bounds["alpha_minus_upper"]),
        "alpha_minus_lower": bool(am > bounds["alpha_minus_lower"]),
    }
    return ap, am, checks, bounds


def largest_passing_lambda(mu_of_lambda, n_dim, const, lam_hi: float = 10.0, tol: float = 1e-12) -> float:
    """Bisection for the largest lambda at which all five inequalities hold."""
    def ok(lam):
        return all(_bound_checks(mu_of_lambda(lam), n_dim, const)[2].values())

    lo, hi = 0.0, lam_hi
    if not ok(lo):
        return float("nan")
    while ok(hi):
        hi *= 2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


def theorem12_bounds_check(cone: ConeSpec, lam: float) -> BoundsReport:
    """Eigenvalue and exponent bounds for the conformal Laplacian at weight lambda.

    Checks ``mu >= -(1/4)((n-2)/2)^2``, ``alpha_+ < 0``,
    ``alpha_+ >= -(1 - sqrt(3/4))(n-2)/2``, ``alpha_- <= -(1 + sqrt(3/4))(n-2)/2``
    and ``alpha_- > -(n-2)``; also reports the largest passing lambda.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")

    def mu_of(l):
        return link_principal_eigenvalue(LinkOperatorSpec(cone, PotentialKind.CONFORMAL, l))[0]

    const = math.sqrt(0.75)
    mu = mu_of(lam)
    ap, am, checks, bounds = _bound_checks(mu, cone.n, const)
    best = largest_passing_lambda(mu_of, cone.n, const)
    return BoundsReport((cone.p, cone.q), float(lam), mu, ap, am, checks, bounds, best, "conformal")


def shifted_bounds_check(cone: ConeSpec, m: int, lam: float) -> BoundsReport:
    """Bounds for the conformal Laplacian of dimension ``m >= k`` on the k-cone:
    ``mu >= -(1/3)((k-2)/2)^2`` and exponent bounds with ``sqrt(2/3)``."""
    k = cone.n
    if m < k:
        raise ValueError(f"shift dimension m = {m} must be >= cone dimension k = {k}")
    if lam < 0:
        raise ValueError("lambda must be non-negative")

    def mu_of(l):
        return link_principal_eigenvalue(LinkOperatorSpec(cone, PotentialKind.SHIFTED_CONFORMAL, l, n_shift=m))[0]

    const = math.sqrt(2.0 / 3.0)
    mu = mu_of(lam)
    ap, am, checks, bounds = _bound_checks(mu, k, const)
    best = largest_passing_lambda(mu_of, k, const)
    return BoundsReport((cone.p, cone.q), float(lam), mu, ap, am, checks, bounds, best,
                        f"shifted_conformal_{m}", {"V_cross": -conformal_factor(m) * (cone.p + cone.q)})


def link_ground_state_norms(cone: ConeSpec, op: LinkOperatorSpec, psi0: float = 1.0) -> dict:
    """L1 norm, inf, sup and L1/inf of the (constant) link ground state."""
    if not op.constant_potential:
        raise ValueError("norms implemented for constant link potentials")
    vol = link_volume(cone)
    l1 = vol * psi0
    return {"L1": l1, "inf": psi0, "sup": psi0, "ratio": l1 / psi0, "link_volume": vol}


def jacobi_discriminant(n: int) -> Fraction:
    """Exact discriminant ``((n-2)/2)^2 - (n-1)`` of the Jacobi indicial equation
    on a cone over a product link with ``p + q = n - 1``."""
    return Fraction(n - 2, 2) ** 2 - (n - 1)


def jacobi_stability_table(ns=range(3, 10)) -> list:
    """Rows ``(n, discriminant, real_exponents)`` for the Jacobi operator."""
    rows = []
    for n in ns:
        d = jacobi_discriminant(n)
        mu, _ = link_principal_eigenvalue(LinkOperatorSpec(make_lawson_cone(1, n - 2, warn=False)))
        if mu != -(n - 1):
            raise RuntimeError("Jacobi link eigenvalue differs from -(p+q)")
        rows.append((n, d, d >= 0))
    return rows
