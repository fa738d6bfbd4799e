"""
Exception hierarchy shared by all modules.

Every error carries an ``error_code`` that service results and CLI exit codes
are derived from.
"""

from typing import Optional


class FinrayError(Exception):
    """Base class for toolkit errors."""

    error_code = "FINRAY_ERROR"


class UnknownMaterialError(FinrayError):
    error_code = "UNKNOWN_MATERIAL"

    def __init__(self, name: str, available: Optional[list] = None):
        self.name = name
        self.available = sorted(available or [])
        message = f"Material '{name}' not found."
        if self.available:
            message += f" Available: {', '.join(self.available)}"
        super().__init__(message)


class DomainError(FinrayError, ValueError):
    error_code = "DOMAIN_ERROR"


class GeometryError(FinrayError):
    error_code = "GEOMETRY_ERROR"


class DegenerateRibLayoutError(GeometryError):
    error_code = "DEGENERATE_RIB_LAYOUT"


class SingularSystemError(FinrayError):
    error_code = "SINGULAR_SYSTEM"


class SolverDivergedError(FinrayError):
    error_code = "SOLVER_DIVERGED"

    def __init__(self, message: str, step: Optional[int] = None, residual: Optional[float] = None):
        self.step = step
        self.residual = residual
        super().__init__(message)


class ElasticRangeError(FinrayError):
    error_code = "ELASTIC_RANGE"

    def __init__(self, amplitude: float, axis: str, stress: float, limit: float):
        self.amplitude = amplitude
        self.axis = axis
        super().__init__(
            f"tip displacement exceeded elastic range at {axis} amplitude {amplitude:g} mm "
            f"(stress {stress:.2f} MPa >= {limit:.2f} MPa)"
        )


class NotPositiveDefiniteError(FinrayError):
    error_code = "NOT_POSITIVE_DEFINITE"


class AlreadyCalibratedError(FinrayError):
    error_code = "ALREADY_CALIBRATED"


class FitError(FinrayError):
    error_code = "FIT_ERROR"


class NoFailureError(FinrayError):
    error_code = "NO_FAILURE"


class ContactResolutionError(FinrayError):
    error_code = "CONTACT_RESOLUTION"

    def __init__(self, message: str, step: int):
        self.step = step
        super().__init__(f"step {step}: {message}")


class ConfigError(FinrayError):
    error_code = "CONFIG_ERROR"


class UnknownEntityError(FinrayError):
    error_code = "UNKNOWN_ENTITY"


NUMERICAL_ERRORS = (
    SingularSystemError,
    SolverDivergedError,
    ContactResolutionError,
    NotPositiveDefiniteError,
    ElasticRangeError,
    FitError,
    NoFailureError,
)
