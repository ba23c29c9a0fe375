"""Steady-state covariance from the Lyapunov equation A V + V A^T = -D."""

from __future__ import annotations

import numpy as np

from .errors import NumericalError, StabilityError

RESIDUAL_RTOL = 1e-10
MARGINAL_THRESHOLD = 1e3  # rad/s; -1e3 < max Re(eig) < 0 is flagged marginal


def is_stable(A: np.ndarray) -> tuple:
    """Return ``(stable, max_real_eig)``; stable means every Re(eig) < 0 strictly."""
    try:
        eig = np.linalg.eigvals(np.asarray(A, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigen-decomposition failed: {exc}") from exc
    if not np.all(np.isfinite(eig)):
        raise NumericalError("drift matrix has non-finite eigenvalues")
    max_re = float(np.max(eig.real))
    return max_re < 0, max_re


def is_marginal(max_real_eig: float) -> bool:
    return -MARGINAL_THRESHOLD < max_real_eig < 0


def lyapunov_residual(A, V, D) -> float:
    """Relative residual ||A V + V A^T + D|| / ||D|| (Frobenius)."""
    R = A @ V + V @ A.T + D
    return float(np.linalg.norm(R) / np.linalg.norm(D))


def solve_lyapunov(A: np.ndarray, D: np.ndarray, *, check_stable: bool = True) -> np.ndarray:
    """Solve A V + V A^T = -D by vectorizing to a dense (n^2 x n^2) system.

    Raises StabilityError for an unstable drift matrix rather than returning
    the (unphysical) algebraic solution.
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or D.shape != (n, n):
        raise ValueError("A and D must be square matrices of equal size")
    if check_stable:
        stable, max_re = is_stable(A)
        if not stable:
            raise StabilityError(f"drift matrix unstable (max Re eig = {max_re:.6g})", max_re)

    eye = np.eye(n)
    # row-major vec: vec(A V) = (A kron I) vec(V), vec(V A^T) = (I kron A) vec(V)
    L = np.kron(A, eye) + np.kron(eye, A)
    rhs = -D.reshape(-1)
    try:
        v = np.linalg.solve(L, rhs)
        # one step of iterative refinement tames the 1e5 spread of rates
        v += np.linalg.solve(L, rhs - L @ v)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Lyapunov system is singular: {exc}") from exc
    V = v.reshape(n, n)
    V = 0.5 * (V + V.T)
    res = lyapunov_residual(A, V, D)
    if not res < RESIDUAL_RTOL:
        raise NumericalError(f"Lyapunov residual {res:.3g} exceeds {RESIDUAL_RTOL:g}")
    return V


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form for (x1, p1, x2, p2, ...) ordering."""
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), J)


def uncertainty_floor(V: np.ndarray) -> float:
    """Smallest eigenvalue of V + (i/2) Omega; non-negative for a physical state."""
    n = V.shape[0] // 2
    H = V + 0.5j * symplectic_form(n)
    return float(np.min(np.linalg.eigvalsh(H)))


def is_physical(V: np.ndarray, tol: float = 1e-9) -> bool:
    return uncertainty_floor(V) >= -tol
