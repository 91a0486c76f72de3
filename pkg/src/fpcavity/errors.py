"""Exception hierarchy shared by all modules.

Every error class carries a stable ``exit_code`` so the CLI can map
failures onto distinct process exit statuses and machine-readable error
objects.
"""


class FpCavityError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1

    @property
    def error_class(self) -> str:
        return type(self).__name__


class ConfigError(FpCavityError):
    """Invalid configuration or scenario file (schema violation, unknown keys)."""

    exit_code = 3


class UnitError(FpCavityError, ValueError):
    """Unparseable quantity token or unit of the wrong dimension."""

    exit_code = 4


class DomainError(FpCavityError, ValueError):
    """Input violates a documented precondition or physical invariant."""

    exit_code = 5


class NumericalError(FpCavityError, RuntimeError):
    """A numerical procedure failed to converge."""

    exit_code = 6


class FitError(NumericalError):
    """Least-squares fit did not converge within the iteration budget."""

    exit_code = 7

    def __init__(self, message, residual_rms=None):
        if residual_rms is not None:
            message = f"{message} (last residual RMS: {residual_rms:.4g})"
        super().__init__(message)
        self.residual_rms = residual_rms


class DetectionError(FpCavityError):
    """Expected spectral features were not found in the data."""

    exit_code = 8


class InsufficientDataError(DetectionError):
    """Too few usable features or samples for the requested analysis."""

    exit_code = 8


class CalibrationError(FpCavityError):
    """Scan-axis calibration failed (wrong peak count, overlapping peaks)."""

    exit_code = 8


class QualityError(FpCavityError):
    """Data quality gate tripped (e.g. too many clipped samples)."""

    exit_code = 9
