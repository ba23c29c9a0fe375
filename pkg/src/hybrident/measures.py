"""Entanglement and occupation measures on the steady-state covariance matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PhysicalityError
from .model import MODE_INDEX, MODES

CLAMP_TOL = 1e-9


def _mode_index(mode) -> int:
    if isinstance(mode, str):
        try:
            return MODE_INDEX[mode]
        except KeyError:
            raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}") from None
    return int(mode)


def _mode_name(mode) -> str:
    return mode if isinstance(mode, str) else MODES[int(mode)]


@dataclass(frozen=True)
class BipartiteCM:
    """4x4 covariance of two modes, ordered (x_i, p_i, x_j, p_j)."""

    v4: np.ndarray
    mode_i: str
    mode_j: str

    @property
    def V_i(self) -> np.ndarray:
        return self.v4[:2, :2]

    @property
    def V_j(self) -> np.ndarray:
        return self.v4[2:, 2:]

    @property
    def V_ij(self) -> np.ndarray:
        return self.v4[:2, 2:]


def extract_bipartite(V: np.ndarray, mode_i, mode_j) -> BipartiteCM:
    """Principal 4x4 submatrix of `V` for two distinct modes (names or indices)."""
    i, j = _mode_index(mode_i), _mode_index(mode_j)
    if i == j:
        raise ValueError("a bipartite block needs two different modes")
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    return BipartiteCM(np.array(V[np.ix_(idx, idx)]), _mode_name(mode_i), _mode_name(mode_j))


def smallest_pt_eigenvalue(v4: np.ndarray) -> tuple:
    """Smallest symplectic eigenvalue of the partial transpose of `v4`.

    Returns ``(eta_minus, clamped)``; `clamped` is True when a round-off
    negative discriminant was set to zero.
    """
    v4 = np.asarray(v4, dtype=float)
    det_i = np.linalg.det(v4[:2, :2])
    det_j = np.linalg.det(v4[2:, 2:])
    det_ij = np.linalg.det(v4[:2, 2:])
    det_v = np.linalg.det(v4)
    sigma = det_i + det_j - 2.0 * det_ij
    disc = sigma**2 - 4.0 * det_v
    clamped = False
    # |disc| below the cancellation noise of sigma^2 - 4 det is a degenerate
    # spectrum; taking sqrt of the noise would split it by ~1e-8
    if abs(disc) <= 16 * np.finfo(float).eps * sigma**2:
        disc = 0.0
    elif disc < 0:
        if disc < -CLAMP_TOL * max(1.0, sigma**2):
            raise PhysicalityError(f"negative discriminant {disc:.3g} in partial-transpose spectrum")
        disc, clamped = 0.0, True
    if sigma <= 0 or det_v <= 0:
        raise PhysicalityError("two-mode covariance is not positive definite")
    # (sigma - sqrt(disc)) / 2 rewritten without cancellation
    eta_sq = 2.0 * det_v / (sigma + math.sqrt(disc))
    return math.sqrt(eta_sq), clamped


def log_negativity_flagged(bp) -> tuple:
    """``(E_N, clamped)`` for a BipartiteCM or a bare 4x4 array."""
    v4 = bp.v4 if isinstance(bp, BipartiteCM) else bp
    eta, clamped = smallest_pt_eigenvalue(v4)
    if eta == 0.0:
        return math.inf, clamped
    return max(0.0, -math.log(2.0 * eta)), clamped


def log_negativity(bp) -> float:
    """Logarithmic negativity max(0, -ln 2 eta^-), vacuum variance 1/2."""
    return log_negativity_flagged(bp)[0]


def effective_occupation_flagged(V: np.ndarray, mode) -> tuple:
    k = _mode_index(mode)
    n = 0.5 * (V[2 * k, 2 * k] + V[2 * k + 1, 2 * k + 1] - 1.0)
    if n < 0:
        if n < -CLAMP_TOL:
            raise PhysicalityError(f"negative occupation {n:.3g} for mode {_mode_name(mode)}")
        return 0.0, True
    return float(n), False


def effective_occupation(V: np.ndarray, mode) -> float:
    """Mean excitation number of one mode, (V_xx + V_yy - 1)/2."""
    return effective_occupation_flagged(V, mode)[0]


def mode_pairs():
    """All 10 unordered mode pairs in the fixed ordering."""
    return [(MODES[i], MODES[j]) for i in range(len(MODES)) for j in range(i + 1, len(MODES))]
