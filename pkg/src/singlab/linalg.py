"""Sparse generalized symmetric eigensolver shared by the spectral modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

__all__ = ["EigenResult", "SolverError", "smallest_generalized_eigenpair"]


class SolverError(RuntimeError):
    """An iterative solver failed to converge or a factorization failed."""


@dataclass(frozen=True)
class EigenResult:
    value: float
    vector: np.ndarray
    iterations: int
    residual: float


def smallest_generalized_eigenpair(A, M, tol: float = 1e-11, maxiter: int = 500,
                                   shift: float | None = None, x0=None) -> EigenResult:
    """Lowest eigenpair of ``A x = lam M x`` by shifted inverse iteration.

    ``A`` is symmetric, ``M`` symmetric positive (diagonal or sparse). The
    shift defaults to a Gershgorin-type lower bound so that ``A - shift M``
    is positive definite and the iteration converges to the bottom of the
    spectrum. The Rayleigh quotient is returned; the eigenvector is
    normalized to be positive at its largest entry with ``x^T M x = 1``.
    """
    A = sparse.csc_matrix(A)
    M = sparse.csc_matrix(M)
    n = A.shape[0]
    if n == 0:
        raise SolverError("empty eigenproblem")
    mdiag = M.diagonal()
    if np.any(mdiag <= 0):
        raise ValueError("mass matrix must be positive")
    if shift is None:
        # lower bound of the spectrum of M^{-1/2} A M^{-1/2}
        d = A.diagonal()
        off = np.asarray(abs(A).sum(axis=1)).ravel() - np.abs(d)
        shift = float(np.min((d - off) / mdiag)) - 1.0
        shift = min(shift, 0.0) - 1e-3 * max(1.0, abs(shift))
    try:
        lu = splu((A - shift * M).tocsc())
    except RuntimeError as exc:
        raise SolverError(f"factorization failed: {exc}") from None
    x = np.ones(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    x /= np.sqrt(x @ (M @ x))
    lam_old = np.inf
    for it in range(1, maxiter + 1):
        y = lu.solve(M @ x)
        y /= np.sqrt(y @ (M @ y))
        lam = float(y @ (A @ y))
        res = float(np.linalg.norm(A @ y - lam * (M @ y)) / max(1.0, abs(lam)))
        x = y
        if abs(lam - lam_old) <= tol * max(1.0, abs(lam)) and res < 1e-6:
            break
        lam_old = lam
    else:
        raise SolverError(f"inverse iteration did not converge in {maxiter} steps (residual {res:.3g})")
    k = int(np.argmax(np.abs(x)))
    if x[k] < 0:
        x = -x
    return EigenResult(lam, x, it, res)
