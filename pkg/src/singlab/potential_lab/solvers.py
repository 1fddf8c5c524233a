"""Dirichlet problems, Green's functions and the radial two-point problem."""

from __future__ import annotations

import numpy as np
from scipy import sparse

from ..linalg import SolverError, smallest_generalized_eigenpair
from .grids import radial_grid
from .operators import GridFunction, GridOperator, OperatorSpec, discretize

__all__ = [
    "MaximumPrincipleError",
    "NotSubcriticalError",
    "solve_dirichlet",
    "green_function",
    "green_matrix_columns",
    "certify_subcritical",
    "solve_radial_problem",
]


class MaximumPrincipleError(ValueError):
    """The operator does not satisfy the discrete maximum principle."""


class NotSubcriticalError(ValueError):
    """The operator has a non-positive Dirichlet eigenvalue on the domain."""


def _boundary_vector(system: GridOperator, f) -> np.ndarray:
    dom = system.domain
    if callable(f):
        vals = np.asarray(f(dom.coords), dtype=float)
    else:
        vals = np.asarray(f, dtype=float)
        if vals.ndim == 0:
            vals = np.full(dom.n_nodes, float(vals))
    if vals.shape == (system.boundary_index.size,):
        full = np.zeros(dom.n_nodes)
        full[system.boundary_index] = vals
        vals = full
    if vals.shape != (dom.n_nodes,):
        raise ValueError("boundary data must be given on all boundary nodes")
    return vals[system.boundary_index]


def solve_dirichlet(system: GridOperator, f, supersolution=None, check: bool = True) -> GridFunction:
    """Solve ``L F = 0`` in the interior with ``F = f`` on boundary nodes.

    Parameters
    ----------
    system : GridOperator
    f : callable, scalar or array
        Boundary data: a callable of node coordinates, a constant, an array
        over all nodes, or an array over the boundary nodes only.
    supersolution : array, optional
        Positive nodal function with ``L w >= 0``, accepted in place of the
        M-matrix structure as a maximum-principle certificate.
    check : bool
        Verify the discrete maximum principle ``min f <= F <= max f`` when
        constants solve ``L v = 0``.

    Raises
    ------
    MaximumPrincipleError
        Neither the M-matrix structure nor a valid supersolution is available,
        or the computed solution violates the maximum principle.
    SolverError
        Singular interior system.
    """
    if not system.is_m_matrix_form:
        if supersolution is None:
            raise MaximumPrincipleError("operator is not of maximum-principle form and no supersolution was supplied")
        w = np.asarray(supersolution, dtype=float)
        Lw = system.residual(w)
        if np.any(w <= 0) or np.any(Lw < -1e-10 * np.abs(Lw).max(initial=1.0)):
            raise MaximumPrincipleError("supplied supersolution is not positive with L w >= 0")
    fb = _boundary_vector(system, f)
    out = _dirichlet_solve(system, fb)
    uI = out[system.interior_index]
    if check and system.constants_solve and fb.size:
        lo, hi = fb.min(), fb.max()
        tol = 1e-9 * max(1.0, abs(lo), abs(hi))
        if uI.size and (uI.min() < lo - tol or uI.max() > hi + tol):
            raise MaximumPrincipleError("discrete maximum principle violated")
    return GridFunction(system.domain, out)


def _dirichlet_solve(system: GridOperator, fb: np.ndarray) -> np.ndarray:
    uI = system.factor.solve(-(system.A_IB @ fb))
    if not np.all(np.isfinite(uI)):
        raise SolverError("singular linear system")
    out = np.zeros(system.domain.n_nodes)
    out[system.boundary_index] = fb
    out[system.interior_index] = uI
    return out


def certify_subcritical(system: GridOperator) -> float:
    """Smallest Dirichlet eigenvalue of ``L`` relative to the cell volumes.

    Raises :class:`NotSubcriticalError` when it is not positive.
    """
    M = sparse.diags(system.volumes[system.interior_index])
    lam = smallest_generalized_eigenpair(system.A_II, M, tol=1e-8, maxiter=2000).value
    if lam <= 0:
        raise NotSubcriticalError(f"Dirichlet eigenvalue {lam:.6g} <= 0: operator is not subcritical")
    return lam


def green_function(system: GridOperator, pole, check_subcritical: bool = True) -> GridFunction:
    """Discrete Green's function ``L G(., p) = delta_p`` with Dirichlet zero data.

    The Dirac load is ``1/vol_p`` at the pole so that the cell-integrated
    equation reads ``A_II G = e_p``.

    Parameters
    ----------
    pole : int or point
        Interior node id, or a coordinate snapped to the nearest interior node.
    check_subcritical : bool
        Verify positivity of the Dirichlet spectrum (skipped for M-matrix forms
        whose positivity follows from the maximum principle).

    Raises
    ------
    ValueError
        Pole on the boundary.
    NotSubcriticalError
        Non-positive Dirichlet eigenvalue or a non-positive Green's function.
    """
    dom = system.domain
    p = int(pole) if np.ndim(pole) == 0 else dom.nearest_node(pole)
    if not dom.interior[p]:
        raise ValueError(f"pole {p} is on the boundary")
    if check_subcritical and not system.is_m_matrix_form:
        certify_subcritical(system)
    col = green_matrix_columns(system, [p])[:, 0]
    out = np.zeros(dom.n_nodes)
    out[system.interior_index] = col
    if check_subcritical and np.any(col <= 0):
        raise NotSubcriticalError("Green's function is not positive: operator is not subcritical")
    return GridFunction(dom, out)


def green_matrix_columns(system: GridOperator, poles) -> np.ndarray:
    """Interior values of ``G(., p)`` for several poles (columns)."""
    i = system.interior_index
    pos = np.full(system.domain.n_nodes, -1)
    pos[i] = np.arange(i.size)
    poles = np.asarray(poles, dtype=int)
    if np.any(pos[poles] < 0):
        raise ValueError("pole is on the boundary")
    rhs = np.zeros((i.size, poles.size))
    rhs[pos[poles], np.arange(poles.size)] = 1.0
    sol = system.factor.solve(rhs)
    if not np.all(np.isfinite(sol)):
        raise SolverError("singular linear system")
    return sol


def solve_radial_problem(n: int, V_cross: float, r_min: float, r_max: float, n_nodes: int,
                         boundary_values) -> tuple:
    """Solve ``-u'' - (n-1)/r u' + V/r^2 u = 0`` on ``[r_min, r_max]``.

    Conservative second-order differences on a uniform grid with Dirichlet
    values ``boundary_values = (u(r_min), u(r_max))``. The two-point problem
    is solved directly; no maximum principle is required since negative
    potentials (Jacobi operators) are the main use.

    Returns
    -------
    r, u : ndarray
    """
    dom = radial_grid(r_min, r_max, n_nodes, n=n)
    system = discretize(dom, OperatorSpec(c=lambda X: V_cross / X[:, 0] ** 2))
    u = _dirichlet_solve(system, np.asarray(boundary_values, dtype=float))
    return dom.coords[:, 0].copy(), u
