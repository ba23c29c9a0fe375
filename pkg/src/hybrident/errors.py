"""Exception hierarchy shared by the numerical modules and the CLI."""


class HybridEntError(Exception):
    """Base class for all package errors."""


class ConfigError(HybridEntError, ValueError):
    """Invalid configuration document, parameter path or sweep spec."""


class DomainError(HybridEntError, ValueError):
    """Argument outside the mathematical domain of a formula."""


class NumericalError(HybridEntError, ArithmeticError):
    """A numerical routine failed or produced an unusable result."""


class DegeneracyError(NumericalError):
    """A steady-state denominator vanished."""


class ConvergenceError(NumericalError):
    """Fixed-point iteration did not converge.

    The last iterate is kept on ``last`` so callers can inspect it.
    """

    def __init__(self, message, last=None, iterations=0):
        super().__init__(message)
        self.last = last
        self.iterations = iterations


class StabilityError(NumericalError):
    """The drift matrix has an eigenvalue with non-negative real part."""

    def __init__(self, message, max_real_eig=float("nan")):
        super().__init__(message)
        self.max_real_eig = max_real_eig


class PhysicalityError(NumericalError):
    """A covariance matrix violates the uncertainty principle beyond round-off."""
