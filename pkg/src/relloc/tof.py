"""Time-of-flight conversion of a momentum resolution into a detector resolution."""
from __future__ import annotations

from dataclasses import dataclass

from scipy import constants

from .errors import InvalidParameterError

__all__ = ["TofParameters", "TofResult", "tof_resolution"]


@dataclass(frozen=True)
class TofParameters:
    """Apparatus for the release-and-image momentum measurement (SI units, momentum in h/lambda)."""

    mass_amu: float = 87.0
    wavelength: float = 400e-9
    flight_time: float = 5e-3
    detector_length: float = 10e-3
    dp: float = 0.5

    def __post_init__(self):
        if not self.mass_amu > 0:
            raise InvalidParameterError("mass must be positive")
        if not self.wavelength > 0:
            raise InvalidParameterError("wavelength must be positive")
        if not self.detector_length > 0:
            raise InvalidParameterError("detector length must be positive")
        if self.flight_time < 0 or self.dp < 0:
            raise InvalidParameterError("flight time and dp must be non-negative")


@dataclass(frozen=True)
class TofResult:
    resolution: float
    """Spatial separation (m) after free flight for a momentum difference dp."""
    window_span: float
    """Spread (m) of the momentum window +-p_max after the same flight."""
    fits_detector: bool


def tof_resolution(params: TofParameters, p_max: float = 8.0) -> TofResult:
    """Detector resolution needed to resolve ``params.dp``: (dp h / lambda) t / m."""
    mass = params.mass_amu * constants.atomic_mass
    unit = constants.h / params.wavelength * params.flight_time / mass
    span = 2.0 * p_max * unit
    return TofResult(resolution=params.dp * unit, window_span=span, fits_detector=span <= params.detector_length)
