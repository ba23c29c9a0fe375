"""Optical output spectrum from the frequency-domain fluctuation equations.

Fluctuations are solved in the doubled basis
(db1, db1^dag, db2, db2^dag, dm, dm^dag, dc, dc^dag, da, da^dag) with the
convention f(w) = int f(t) exp(i w t) dt and input-noise correlations

    <j_in(w) j_in^dag(w')> = 2 pi (N_j + 1) delta(w + w')
    <j_in^dag(w) j_in(w')> = 2 pi N_j delta(w + w')

where j_in^dag(w) is the transform of j_in^dag(t). The spectrum is normal
ordered, so vacuum input gives S = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import signal

from .errors import NumericalError
from .model import MODES, SQRT2, SystemParams
from .steady_state import SteadyState

C_ROW = 2 * MODES.index("c")


def _couplings(params: SystemParams, steady: Optional[SteadyState]) -> tuple:
    """Complex single-quadrature couplings (G_mb1, G_cb2)."""
    if steady is None:
        return complex(params.G_m / SQRT2), complex(params.G_c / SQRT2)
    return -1j * params.g_mb1 * steady.m_avg, 1j * params.g_cb2 * steady.c_avg


def mode_drift_matrix(params: SystemParams, steady: Optional[SteadyState] = None) -> np.ndarray:
    """Complex drift matrix K of the linearized equations in the doubled basis."""
    p = params
    G1, G2 = _couplings(params, steady)
    if steady is not None:
        p = p.replace(delta_m_eff=steady.delta_m_eff, delta_c_eff=steady.delta_c_eff)
    idx = {name: 2 * k for k, name in enumerate(MODES)}
    K = np.zeros((10, 10), dtype=complex)
    freq = {"b1": p.omega_b1, "b2": p.omega_b2, "m": p.delta_m_eff, "c": p.delta_c_eff, "a": p.delta_a}
    damp = p.dampings()
    for j in MODES:
        K[idx[j], idx[j]] = -(1j * freq[j] + damp[j])
        K[idx[j] + 1, idx[j] + 1] = -(-1j * freq[j] + damp[j])

    # (row mode, column mode, column is dagger, coefficient) for the
    # non-conjugated equations; the dagger rows are their complex conjugates
    terms = [
        ("b1", "m", True, G1),
        ("b1", "m", False, -np.conj(G1)),
        ("b1", "b2", False, -1j * p.g_b1b2),
        ("b2", "c", True, G2),
        ("b2", "c", False, -np.conj(G2)),
        ("b2", "b1", False, -1j * p.g_b1b2),
        ("m", "b1", False, G1),
        ("m", "b1", True, G1),
        ("m", "a", False, -1j * p.g_ma),
        ("c", "b2", False, G2),
        ("c", "b2", True, G2),
        ("a", "m", False, -1j * p.g_ma),
    ]
    for row, col, dag, val in terms:
        K[idx[row], idx[col] + dag] += val
        K[idx[row] + 1, idx[col] + (not dag)] += np.conj(val)
    return K


def _noise_gains(params: SystemParams) -> np.ndarray:
    damp = params.dampings()
    return np.repeat([math.sqrt(2 * damp[j]) for j in MODES], 2)


@dataclass(frozen=True)
class FrequencyResponse:
    """Transfer coefficients from every input noise to dc at frequency omega.

    ``A[k]`` multiplies j_in(w) and ``B[k]`` multiplies j_in^dag(w) for the
    k-th mode in ``MODES``.
    """

    omega: float
    A: np.ndarray
    B: np.ndarray

    def coefficient(self, mode: str, dagger: bool = False) -> complex:
        k = MODES.index(mode)
        return complex((self.B if dagger else self.A)[k])


@dataclass(frozen=True)
class SpectrumTrace:
    omega: np.ndarray  # rad/s, rotating frame of the laser
    S: np.ndarray

    @property
    def freq_hz(self) -> np.ndarray:
        return self.omega / (2 * math.pi)


def _response_rows(params, steady, omegas) -> np.ndarray:
    """Rows of (-i w - K)^-1 L selecting dc, shape (len(omegas), 10)."""
    K = mode_drift_matrix(params, steady)
    L = _noise_gains(params)
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    M = -1j * omegas[:, None, None] * np.eye(10) - K
    # solve M^T y = e_c, so y^T = e_c^T M^-1 is the dc row of the inverse
    e = np.zeros(10, dtype=complex)
    e[C_ROW] = 1.0
    Mt = np.transpose(M, (0, 2, 1))
    rhs = np.broadcast_to(e, (len(omegas), 10))[..., None]
    try:
        y = np.linalg.solve(Mt, rhs)[..., 0]
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"fluctuation system singular: {exc}") from exc
    resid = np.linalg.norm(np.einsum("nij,nj->ni", Mt, y) - e, axis=1)
    scale = np.linalg.norm(Mt, axis=(1, 2)) * np.linalg.norm(y, axis=1)
    if np.any(resid > 1e-10 * np.maximum(scale, 1.0)):
        raise NumericalError("fluctuation solve residual too large")
    return y * L


def solve_fluctuations(params: SystemParams, steady: Optional[SteadyState], omega: float) -> FrequencyResponse:
    """Noise-to-intracavity transfer coefficients at a single frequency.

    With ``steady=None`` the real couplings and effective detunings stored
    in `params` are used.
    """
    row = _response_rows(params, steady, [omega])[0]
    return FrequencyResponse(float(omega), row[0::2].copy(), row[1::2].copy())


def _contract(params: SystemParams, rows: np.ndarray) -> np.ndarray:
    occ = params.occupations()
    N = np.array([occ[j] for j in MODES])
    A, B = rows[:, 0::2], rows[:, 1::2]
    S = (N * np.abs(A) ** 2 + (N + 1) * np.abs(B) ** 2).sum(axis=1)
    return S


def intracavity_spectrum(params: SystemParams, steady: Optional[SteadyState], grid) -> SpectrumTrace:
    """Normal-ordered spectrum of the intracavity field dc."""
    omega = np.asarray(grid, dtype=float)
    return SpectrumTrace(omega, _contract(params, _response_rows(params, steady, omega)))


def output_spectrum(params: SystemParams, steady: Optional[SteadyState], grid) -> SpectrumTrace:
    """Normal-ordered optical output spectrum S_c^out on an angular-frequency grid."""
    omega = np.asarray(grid, dtype=float)
    rows = _response_rows(params, steady, omega) * math.sqrt(2 * params.gamma_c)
    rows[:, C_ROW] -= 1.0
    return SpectrumTrace(omega, _contract(params, rows))


def default_grid(params: SystemParams, half_span_hz: float = 8e6, count: int = 4001) -> np.ndarray:
    """Uniform grid centred on the mean mechanical frequency, rad/s."""
    centre = 0.5 * (params.omega_b1 + params.omega_b2)
    half = 2 * math.pi * half_span_hz
    return np.linspace(centre - half, centre + half, count)


def find_peaks(trace: SpectrumTrace, rel_height: float = 0.1) -> np.ndarray:
    """Grid indices of local maxima above `rel_height` times the global maximum."""
    S = trace.S
    if S.size == 0 or not np.max(S) > 0:
        return np.array([], dtype=int)
    idx, _ = signal.find_peaks(S, height=rel_height * np.max(S))
    return idx


def peak_splitting(trace: SpectrumTrace, rel_height: float = 0.1) -> Optional[float]:
    """Distance (rad/s) between the outermost detected peaks, None if < 2 peaks."""
    idx = find_peaks(trace, rel_height)
    if len(idx) < 2:
        return None
    return float(trace.omega[idx[-1]] - trace.omega[idx[0]])


def peak_linewidth(trace: SpectrumTrace) -> float:
    """Full width at half maximum (rad/s) of the highest peak."""
    S = trace.S
    k = int(np.argmax(S))
    # measure at half the absolute height, not half the prominence
    base = (np.array([S[k]]), np.array([0]), np.array([len(S) - 1]))
    width = signal.peak_widths(S, [k], rel_height=0.5, prominence_data=base)[0][0]
    step = (trace.omega[-1] - trace.omega[0]) / (len(trace.omega) - 1)
    return float(width * step)


def write_trace(trace: SpectrumTrace, fh, header: str = "") -> None:
    """Two-column text: frequency (Hz) and S, full double precision."""
    for line in header.splitlines():
        fh.write(f"# {line}\n")
    fh.write("# freq_hz S\n")
    for f, s in zip(trace.freq_hz, trace.S):
        fh.write(f"{f:.17g} {s:.17g}\n")
