"""Steady-state entanglement, cooling and spectra of a coupled
magnomechanical / optomechanical microsphere system."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    ConvergenceError,
    DegeneracyError,
    DomainError,
    NumericalError,
    PhysicalityError,
    StabilityError,
)
from .lyapunov import is_stable, solve_lyapunov  # noqa: E402
from .measures import effective_occupation, extract_bipartite, log_negativity  # noqa: E402
from .model import (  # noqa: E402
    MODES,
    SystemParams,
    build_diffusion_matrix,
    build_drift_matrix,
    thermal_occupation,
)
from .config import params_from_config, reference_config, reference_params  # noqa: E402
from .spectrum import output_spectrum, solve_fluctuations  # noqa: E402
from .sweep import figure_preset, run_point, run_sweep, SweepSpec  # noqa: E402
