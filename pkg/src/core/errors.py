"""
src/core/errors.py

Failure types shared by every engine. Each class carries the process exit
code the CLI reports when the error reaches the dispatch boundary.
"""

from typing import Optional


class MagnonCoolingError(Exception):
    exit_code = 1


class ParameterError(MagnonCoolingError, ValueError):
    """A physical parameter is outside its domain (negative rate, etc.)."""
    exit_code = 2


class ConfigError(MagnonCoolingError):
    exit_code = 2


class SchemaError(ConfigError):
    """Structurally valid input that names an unknown variable, metric or block."""


class SingularSpectrumError(MagnonCoolingError):
    exit_code = 3

    def __init__(self, omega: float, message: Optional[str] = None):
        self.omega = float(omega)
        super().__init__(message or f"spectrum denominator vanishes at omega={self.omega:.12g} (stability boundary)")


class InstabilityError(MagnonCoolingError):
    exit_code = 3

    def __init__(self, abscissa: float, message: Optional[str] = None):
        self.abscissa = float(abscissa)
        super().__init__(message or f"drift matrix is not stable, spectral abscissa = {self.abscissa:.6g}")


class HeatingError(MagnonCoolingError):
    """gamma_b + Gamma_b <= 0: the perturbative phonon number does not exist."""
    exit_code = 3


class UnphysicalCovarianceError(MagnonCoolingError):
    exit_code = 3


class NoFeasiblePointError(MagnonCoolingError):
    exit_code = 3


class ConvergenceError(MagnonCoolingError):
    exit_code = 4

    def __init__(self, residual: float, iterations: int):
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(
            f"steady state did not converge after {self.iterations} iterations (last residual {self.residual:.3e})"
        )
