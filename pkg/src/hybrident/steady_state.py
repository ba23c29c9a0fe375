"""Classical steady state of the driven system and drive-power conversions.

The figure presets never need this module: they parameterize the model
directly by effective couplings and detunings. It is used to connect
those couplings to laboratory drive powers and to check that the
displacement-induced detuning shifts are small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy import constants

from .errors import ConvergenceError, DegeneracyError, DomainError
from .model import SQRT2, SystemParams

# External reference value, not part of the model inputs: spin density of YIG.
YIG_SPIN_DENSITY = 4.22e27  # m^-3
GYROMAGNETIC_RATIO = constants.physical_constants["electron gyromag. ratio"][0]  # rad s^-1 T^-1


def yig_spin_count(radius: float, density: float = YIG_SPIN_DENSITY) -> float:
    """Total number of spins in a YIG sphere of the given radius (m)."""
    if not radius > 0:
        raise DomainError("sphere radius must be positive")
    return density * 4.0 / 3.0 * math.pi * radius**3


def drive_field_from_power(P_0: float, R: float) -> float:
    """Drive magnetic field amplitude (T) produced by microwave power `P_0` (W)
    on a sphere of radius `R` (m)."""
    if not R > 0:
        raise DomainError(f"sphere radius must be positive, got {R!r}")
    if P_0 < 0:
        raise DomainError(f"drive power must be non-negative, got {P_0!r}")
    return math.sqrt(2 * P_0 * constants.mu_0 / (math.pi * constants.c)) / R


def rabi_frequency(H_d: float, spin_count: float) -> float:
    """Magnon drive strength (rad/s) for field amplitude `H_d` (T)."""
    if spin_count < 0:
        raise DomainError("spin count must be non-negative")
    return math.sqrt(5) / 4 * GYROMAGNETIC_RATIO * math.sqrt(spin_count) * H_d


def laser_coupling(P_L: float, gamma_c: float, omega_d: float) -> float:
    """Optical drive strength (rad/s) for laser power `P_L` (W) at `omega_d`."""
    if P_L < 0:
        raise DomainError("laser power must be non-negative")
    if not omega_d > 0:
        raise DomainError("laser frequency must be positive")
    return math.sqrt(2 * gamma_c * P_L / (constants.hbar * omega_d))


@dataclass(frozen=True)
class DriveSpec:
    """Microwave and laser drives.

    Give exactly one of ``rabi_omega`` (rad/s) or ``P_0`` (W). With ``P_0``
    the sphere ``radius`` and ``spin_count`` are required. ``omega_d2``
    defaults to the optical resonance minus the bare optical detuning.
    """

    P_L: float = 0.0
    rabi_omega: Optional[float] = None
    P_0: Optional[float] = None
    radius: Optional[float] = None
    spin_count: Optional[float] = None
    omega_d2: Optional[float] = None

    def __post_init__(self):
        if (self.rabi_omega is None) == (self.P_0 is None):
            raise DomainError("supply exactly one of rabi_omega or P_0")
        if self.P_0 is not None:
            if self.P_0 < 0:
                raise DomainError("P_0 must be non-negative")
            if self.radius is None or self.spin_count is None:
                raise DomainError("P_0 requires radius and spin_count")
        if self.P_L < 0:
            raise DomainError("P_L must be non-negative")

    def rabi(self) -> float:
        if self.rabi_omega is not None:
            return self.rabi_omega
        return rabi_frequency(drive_field_from_power(self.P_0, self.radius), self.spin_count)

    def laser(self, params: SystemParams, delta_c: float) -> float:
        omega_d = self.omega_d2 if self.omega_d2 is not None else params.omega_c - delta_c
        return laser_coupling(self.P_L, params.gamma_c, omega_d)


@dataclass(frozen=True)
class SteadyState:
    m_avg: complex
    c_avg: complex
    b1_avg: complex
    b2_avg: complex
    delta_m_eff: float
    delta_c_eff: float
    G_m: float
    G_c: float
    iterations: int = 0


def steady_amplitudes(params: SystemParams, rabi: float, E: float) -> tuple:
    """Magnon and optical steady-state amplitudes at the effective detunings
    stored in `params`."""
    p = params
    den_a = 1j * p.delta_a + p.gamma_a
    den_m = (1j * p.delta_m_eff + p.gamma_m) + p.g_ma**2 / den_a
    den_c = 1j * p.delta_c_eff + p.gamma_c
    if den_m == 0 or den_c == 0 or not (math.isfinite(abs(den_m)) and math.isfinite(abs(den_c))):
        raise DegeneracyError("steady-state amplitude denominator vanishes")
    return rabi / den_m, E / den_c


def mechanical_displacements(m_avg: complex, c_avg: complex, params: SystemParams) -> tuple:
    """Static mechanical amplitudes set by radiation pressure and magnetostriction."""
    p = params
    s1 = 1j * p.gamma_b1 - p.omega_b1
    s2 = 1j * p.gamma_b2 - p.omega_b2
    den = p.g_b1b2**2 - s1 * s2
    if den == 0:
        raise DegeneracyError("mechanical displacement denominator vanishes")
    nm = abs(m_avg) ** 2 * p.g_mb1
    nc = abs(c_avg) ** 2 * p.g_cb2
    b1 = (nc * p.g_b1b2 - nm * s2) / den
    b2 = (nc * s1 - nm * p.g_b1b2) / den
    return b1, b2


def effective_couplings(m_avg: complex, c_avg: complex, params: SystemParams) -> tuple:
    """Real magnitudes of the drive-enhanced magno- and optomechanical couplings."""
    return SQRT2 * params.g_mb1 * abs(m_avg), SQRT2 * params.g_cb2 * abs(c_avg)


def solve_self_consistent(
    params: SystemParams,
    delta_m: float,
    delta_c: float,
    drive: DriveSpec,
    *,
    rtol: float = 1e-12,
    max_iter: int = 10_000,
) -> SteadyState:
    """Close the loop between amplitudes, displacements and effective detunings.

    Plain successive substitution starting from the bare detunings.
    """
    rabi = drive.rabi()
    E = drive.laser(params, delta_c)
    dm, dc = delta_m, delta_c
    old = (0j, 0j, 0j, 0j)
    for it in range(1, max_iter + 1):
        p = params.replace(delta_m_eff=dm, delta_c_eff=dc)
        m, c = steady_amplitudes(p, rabi, E)
        b1, b2 = mechanical_displacements(m, c, p)
        new = (m, c, b1, b2)
        dm = delta_m + 2 * params.g_mb1 * b1.real
        dc = delta_c - 2 * params.g_cb2 * b2.real
        if all(abs(x - y) <= rtol * abs(x) for x, y in zip(new, old)):
            # amplitudes were computed at the detunings implied by `old`
            # which equal those implied by `new` to within rtol
            G_m, G_c = effective_couplings(m, c, params)
            return SteadyState(m, c, b1, b2, p.delta_m_eff, p.delta_c_eff, G_m, G_c, it)
        old = new
    G_m, G_c = effective_couplings(old[0], old[1], params)
    last = SteadyState(*old, dm, dc, G_m, G_c, max_iter)
    raise ConvergenceError(
        f"self-consistent steady state did not converge in {max_iter} iterations",
        last=last,
        iterations=max_iter,
    )


def apply_steady_state(params: SystemParams, steady: SteadyState) -> SystemParams:
    """Copy effective couplings and detunings of `steady` into `params`."""
    return params.replace(
        G_m=steady.G_m,
        G_c=steady.G_c,
        delta_m_eff=steady.delta_m_eff,
        delta_c_eff=steady.delta_c_eff,
    )
