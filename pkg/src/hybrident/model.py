"""Physical parameters of the five-mode system and its linearized dynamics.

All quantities are stored in SI angular units (rad/s). The quadrature
vector is ordered as::

    (X_b1, Y_b1, X_b2, Y_b2, X_m, Y_m, X_c, Y_c, X_a, Y_a)

with X = (j + j^dag)/sqrt(2) and Y = i(j^dag - j)/sqrt(2), so the vacuum
variance of every quadrature is 1/2.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import DomainError

MODES = ("b1", "b2", "m", "c", "a")
MODE_INDEX = {name: i for i, name in enumerate(MODES)}

MODE_LABELS = {
    "b1": "YIG mechanics",
    "b2": "silica mechanics",
    "m": "magnon",
    "c": "optical WGM",
    "a": "microwave cavity",
}

SQRT2 = math.sqrt(2.0)


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein mean occupation of a bath mode at angular frequency `omega`.

    Returns exactly 0 at zero temperature.
    """
    if not omega > 0:
        raise DomainError(f"mode frequency must be positive, got {omega!r}")
    if temperature < 0:
        raise DomainError(f"temperature must be non-negative, got {temperature!r}")
    if temperature == 0:
        return 0.0
    denom = constants.k * temperature
    if denom == 0:
        return 0.0  # subnormal temperature underflows kT
    x = constants.hbar * omega / denom
    if x > 700.0:
        # expm1 overflows; 1/(e^x - 1) == e^-x to double precision here
        return math.exp(-x)
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class SystemParams:
    """Constants of the linearized model, angular units (rad/s) throughout.

    ``G_m`` and ``G_c`` are the drive-enhanced couplings taken as real
    magnitudes; ``delta_m_eff`` and ``delta_c_eff`` already include the
    displacement-induced shift.
    """

    omega_a: float
    omega_m: float
    omega_b1: float
    omega_b2: float
    lambda_c: float
    gamma_a: float
    gamma_m: float
    gamma_c: float
    gamma_b1: float
    gamma_b2: float
    g_ma: float
    g_b1b2: float
    g_mb1: float
    g_cb2: float
    G_m: float
    G_c: float
    delta_a: float
    delta_m_eff: float
    delta_c_eff: float
    temperature: float

    def __post_init__(self):
        for name in ("gamma_a", "gamma_m", "gamma_c", "gamma_b1", "gamma_b2"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")
        for name in ("g_ma", "g_b1b2", "g_mb1", "g_cb2", "G_m", "G_c"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} must be non-negative")
        for name in ("omega_a", "omega_m", "omega_b1", "omega_b2", "lambda_c"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")
        if not self.temperature >= 0:
            raise DomainError("temperature must be non-negative")
        for f in dataclasses.fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise DomainError(f"{f.name} must be finite")

    @property
    def omega_c(self) -> float:
        """Optical resonance angular frequency from the wavelength."""
        return 2 * math.pi * constants.c / self.lambda_c

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def occupations(self) -> dict:
        """Thermal bath occupation per mode, keyed by mode name."""
        T = self.temperature
        return {
            "b1": thermal_occupation(self.omega_b1, T),
            "b2": thermal_occupation(self.omega_b2, T),
            "m": thermal_occupation(self.omega_m, T),
            "c": thermal_occupation(self.omega_c, T),
            "a": thermal_occupation(self.omega_a, T),
        }

    def dampings(self) -> dict:
        return {
            "b1": self.gamma_b1,
            "b2": self.gamma_b2,
            "m": self.gamma_m,
            "c": self.gamma_c,
            "a": self.gamma_a,
        }


def build_drift_matrix(params: SystemParams) -> np.ndarray:
    """Drift matrix of the linearized quadrature equations, du/dt = A u + n."""
    p = params
    A = np.zeros((10, 10))

    def rotate(k, gamma, delta):
        A[2 * k, 2 * k] = -gamma
        A[2 * k + 1, 2 * k + 1] = -gamma
        A[2 * k, 2 * k + 1] = delta
        A[2 * k + 1, 2 * k] = -delta

    rotate(0, p.gamma_b1, p.omega_b1)
    rotate(1, p.gamma_b2, p.omega_b2)
    rotate(2, p.gamma_m, p.delta_m_eff)
    rotate(3, p.gamma_c, p.delta_c_eff)
    rotate(4, p.gamma_a, p.delta_a)

    # b1 <-> b2 beamsplitter
    A[0, 3] = p.g_b1b2
    A[1, 2] = -p.g_b1b2
    A[2, 1] = p.g_b1b2
    A[3, 0] = -p.g_b1b2
    # m <-> a beamsplitter
    A[4, 9] = p.g_ma
    A[5, 8] = -p.g_ma
    A[8, 5] = p.g_ma
    A[9, 4] = -p.g_ma
    # magnomechanics: Y_b1 driven by Y_m, X_m driven by X_b1
    A[1, 5] = -SQRT2 * p.G_m
    A[4, 0] = SQRT2 * p.G_m
    # optomechanics: Y_b2 driven by Y_c, X_c driven by X_b2
    A[3, 7] = -SQRT2 * p.G_c
    A[6, 2] = SQRT2 * p.G_c
    return A


def build_diffusion_matrix(params: SystemParams) -> np.ndarray:
    """Diagonal input-noise matrix with entries gamma_j (2 N_j + 1)."""
    occ = params.occupations()
    damp = params.dampings()
    diag = [damp[j] * (2 * occ[j] + 1) for j in MODES]
    return np.diag(np.repeat(diag, 2))
