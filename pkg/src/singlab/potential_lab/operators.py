"""Assembly of second-order elliptic operators on :class:`GridDomain` substrates.

The assembled matrix ``A`` is the cell-integrated (weak) form: for a nodal
function ``u`` the pointwise operator is ``(L u)_i = (A u)_i / vol_i``. With
``b = 0`` the matrix is symmetric.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from ..linalg import SolverError
from .grids import DomainKind, GridDomain, Role

__all__ = [
    "BaseOperator",
    "EllipticityError",
    "OperatorSpec",
    "GridOperator",
    "GridFunction",
    "discretize",
]


class EllipticityError(ValueError):
    """Coefficient field is not symmetric positive definite or exceeds the ellipticity ratio."""


class BaseOperator(str, enum.Enum):
    LAPLACIAN = "laplacian"
    BASE = "base"
    CONFORMAL = "conformal"
    CUSTOM = "custom"


@dataclass
class OperatorSpec:
    """Description of ``L u = -div(a grad u) + b.grad u + c u``.

    Parameters
    ----------
    base : BaseOperator
        LAPLACIAN (``a = 1``), BASE (``-Delta + |A|^2``, needs the
        ``A_norm`` field on imported spaces, reduces to the Laplacian on flat
        domains), CONFORMAL (``-Delta + (n-2)/(4(n-1)) scal`` with
        ``scal = -|A|^2``) or CUSTOM (use ``a``).
    a : float, array (N,), array (N, d, d) or callable
        Second-order coefficient, scalar or tensor per node.
    b : array (N, d) or callable, optional
        First-order coefficient (makes the system non-symmetric).
    c : float, array (N,) or callable, optional
        Additional zeroth-order coefficient.
    weight : array (N,) or callable, optional
        Weight ``w`` of weighted eigenproblems (``w = rho^2``).
    k : float
        Admissible ellipticity ratio.
    beta : float
        Hoelder exponent recorded as metadata.
    """

    base: BaseOperator = BaseOperator.LAPLACIAN
    a: object = 1.0
    b: object = None
    c: object = None
    weight: object = None
    k: float = 1e6
    beta: float = 1.0

    def __post_init__(self):
        self.base = BaseOperator(self.base)


def _field(value, coords, n, shape=()):
    if value is None:
        return None
    if callable(value):
        value = value(coords)
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0 or arr.shape == shape:
        arr = np.broadcast_to(arr, (n,) + shape).copy()
    if arr.shape[0] != n:
        raise ValueError(f"coefficient has {arr.shape[0]} rows, domain has {n} nodes")
    return arr


@dataclass(frozen=True, eq=False)
class GridOperator:
    """Assembled operator on a domain.

    Attributes
    ----------
    domain : GridDomain
    A : scipy.sparse.csr_matrix
        Weak-form matrix over all nodes.
    c : (N,) array
        Total zeroth-order coefficient.
    weight : (N,) array or None
    symmetric : bool
    spec : OperatorSpec
    ellipticity : float
        Measured ratio of largest to smallest coefficient eigenvalue.
    """

    domain: GridDomain
    A: sparse.csr_matrix
    c: np.ndarray
    weight: np.ndarray | None
    symmetric: bool
    spec: OperatorSpec
    ellipticity: float
    info: dict = field(default_factory=dict)

    @property
    def volumes(self) -> np.ndarray:
        return self.domain.volumes

    @cached_property
    def interior_index(self) -> np.ndarray:
        return np.flatnonzero(self.domain.interior)

    @cached_property
    def boundary_index(self) -> np.ndarray:
        return np.flatnonzero(~self.domain.interior)

    @cached_property
    def A_II(self) -> sparse.csc_matrix:
        i = self.interior_index
        return self.A[i][:, i].tocsc()

    @cached_property
    def A_IB(self) -> sparse.csr_matrix:
        return self.A[self.interior_index][:, self.boundary_index].tocsr()

    @cached_property
    def factor(self):
        """Cached sparse LU of the interior block (read-only after creation)."""
        try:
            return splu(self.A_II, permc_spec="COLAMD")
        except RuntimeError as exc:
            raise SolverError(f"singular linear system: {exc}") from None

    def apply(self, u) -> np.ndarray:
        """Pointwise ``L u`` (meaningful at interior nodes)."""
        return (self.A @ np.asarray(u, dtype=float)) / np.where(self.volumes > 0, self.volumes, 1.0)

    def residual(self, u) -> np.ndarray:
        return self.apply(u)[self.interior_index]

    @cached_property
    def is_m_matrix_form(self) -> bool:
        """Off-diagonal entries non-positive and row sums non-negative on interior rows."""
        A = self.A.tocoo()
        off = A.row != A.col
        rows_int = self.domain.interior[A.row]
        if np.any(A.data[off & rows_int] > 1e-14 * np.abs(A.data).max()):
            return False
        return bool(np.all(self.row_sums[self.interior_index] >= -1e-12 * np.abs(A.data).max()))

    @cached_property
    def row_sums(self) -> np.ndarray:
        return np.asarray(self.A.sum(axis=1)).ravel()

    @cached_property
    def constants_solve(self) -> bool:
        """True when constant functions are annihilated at interior nodes."""
        scale = np.abs(self.A.diagonal()).max()
        return bool(np.all(np.abs(self.row_sums[self.interior_index]) <= 1e-12 * scale))

    def skin_adapted_bounds(self, delta) -> dict:
        """Discrete skin-adaptedness quantities ``delta*|b|``, ``delta^2*|c|`` and
        ``delta^beta`` times the difference quotient of the face coefficients."""
        delta = np.asarray(delta, dtype=float)
        out = {"c": float(np.max(delta ** 2 * np.abs(self.c)))}
        b = self.info.get("b")
        out["b"] = 0.0 if b is None else float(np.max(delta * np.linalg.norm(b, axis=1)))
        af = self.info["a_face"]
        u, v = self.domain.faces.T
        dist = np.linalg.norm(self.domain.coords[u] - self.domain.coords[v], axis=1)
        au, av = self.info["a_node"][u], self.info["a_node"][v]
        beta = self.spec.beta
        dq = np.abs(au - av) / dist ** beta
        out["a"] = float(np.max(np.minimum(delta[u], delta[v]) ** beta * dq + np.abs(af)))
        out["k"] = self.spec.k
        out["passed"] = all(out[key] <= self.spec.k for key in ("a", "b", "c"))
        return out

    def to_coo_text(self, path) -> None:
        """Dump ``A`` as ``row col value`` lines."""
        A = self.A.tocoo()
        with open(path, "w") as fh:
            fh.write(f"# {A.shape[0]} {A.shape[1]} {A.nnz}\n")
            for r, c, v in zip(A.row, A.col, A.data):
                fh.write(f"{r} {c} {v:.17g}\n")


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nodal values on a domain."""

    domain: GridDomain
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.domain.n_nodes,):
            raise ValueError("grid function does not conform to the domain's node set")
        self.values.setflags(write=False)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def at(self, point) -> float:
        return float(self.values[self.domain.nearest_node(point, interior_only=False)])

    def to_csv(self, path) -> None:
        d = self.domain.coords.shape[1]
        head = ",".join([f"x{i}" for i in range(d)] + ["value"])
        np.savetxt(path, np.column_stack([self.domain.coords, self.values]), delimiter=",",
                   header=head, comments="", fmt="%.17g")


def _curvature_potential(domain: GridDomain, base: BaseOperator) -> np.ndarray:
    n = domain.n_nodes
    if base in (BaseOperator.LAPLACIAN, BaseOperator.CUSTOM) or domain.kind is not DomainKind.IMPORTED:
        return np.zeros(n)
    A2 = domain.params.get("A_norm")
    if A2 is None:
        raise ValueError(f"{base.value} operator needs an 'A_norm' field on the imported space")
    A2 = np.asarray(A2) ** 2
    if base is BaseOperator.BASE:
        return A2
    dim = domain.params.get("n")
    if dim is None:
        raise ValueError("conformal operator needs the dimension 'n' in the space metadata")
    return -(dim - 2) / (4.0 * (dim - 1)) * A2


def discretize(domain: GridDomain, spec: OperatorSpec | dict | None = None) -> GridOperator:
    """Assemble ``L`` on ``domain``.

    Structured grids use the two-point flux (central difference) form on
    every face; imported spaces use the graph Laplacian with weights
    ``edge volume / length^2``. Tensor coefficients enter through their
    component along the face direction.

    Parameters
    ----------
    domain : GridDomain
    spec : OperatorSpec or dict

    Raises
    ------
    EllipticityError
        Coefficient not SPD or ratio above ``spec.k``.
    """
    if spec is None:
        spec = OperatorSpec()
    elif isinstance(spec, dict):
        spec = OperatorSpec(**spec)
    N = domain.n_nodes
    X = domain.coords
    d = X.shape[1]
    u, v = domain.faces.T
    a_raw = np.asarray(spec.a(X) if callable(spec.a) else spec.a, dtype=float)
    if a_raw.ndim == 0 or a_raw.ndim == 1:
        a_node = _field(a_raw, X, N)
        if np.any(~np.isfinite(a_node)) or np.any(a_node <= 0):
            raise EllipticityError("coefficient must be positive (symmetric positive definite)")
        ratio = float(a_node.max() / a_node.min())
        e = None
    else:
        if a_raw.shape != (N, d, d):
            raise ValueError(f"tensor coefficient must have shape {(N, d, d)}")
        if not np.allclose(a_raw, np.swapaxes(a_raw, 1, 2), atol=1e-12):
            raise EllipticityError("coefficient tensor is not symmetric")
        ev = np.linalg.eigvalsh(a_raw)
        if np.any(ev[:, 0] <= 0):
            raise EllipticityError("coefficient tensor is not positive definite")
        ratio = float(ev[:, -1].max() / ev[:, 0].min())
        e = X[v] - X[u]
        e /= np.linalg.norm(e, axis=1)[:, None]
        a_node = ev.mean(axis=1)
    if ratio > spec.k:
        raise EllipticityError(f"ellipticity ratio {ratio:.3g} exceeds k = {spec.k:.3g}")
    if e is None:
        a_face = 0.5 * (a_node[u] + a_node[v])
    else:
        a_face = 0.5 * (np.einsum("fi,fij,fj->f", e, a_raw[u], e) + np.einsum("fi,fij,fj->f", e, a_raw[v], e))
    w = a_face * domain.trans
    A = sparse.coo_matrix((np.concatenate([-w, -w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
                          shape=(N, N)).tocsr()
    A = A + sparse.diags(-np.asarray(A.sum(axis=1)).ravel())
    c = _curvature_potential(domain, spec.base)
    extra = _field(spec.c, X, N)
    if extra is not None:
        c = c + extra
    A = A + sparse.diags(c * domain.volumes)
    b = _field(spec.b, X, N, (d,))
    symmetric = True
    if b is not None and np.any(b != 0):
        symmetric = False
        # Green-Gauss central gradient: (b.grad u)_i ~ sum_j g_ij b_i.(x_j - x_i)(u_j - u_i) / (2 vol_i)
        dx = X[v] - X[u]
        bu = domain.trans * np.einsum("fi,fi->f", b[u], dx) / 2
        bv = domain.trans * np.einsum("fi,fi->f", b[v], -dx) / 2
        B = sparse.coo_matrix((np.concatenate([bu, bv]), (np.concatenate([u, v]), np.concatenate([v, u]))),
                              shape=(N, N)).tocsr()
        A = A + B - sparse.diags(np.asarray(B.sum(axis=1)).ravel())
    A = A.tocsr()
    A.eliminate_zeros()
    weight = _field(spec.weight, X, N)
    if weight is not None and np.any(weight[domain.interior] <= 0):
        raise ValueError("weight must be positive at interior nodes")
    return GridOperator(domain, A, c, weight, symmetric, spec, ratio,
                        {"a_face": a_face, "a_node": a_node, "b": b})
