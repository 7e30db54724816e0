"""Photon wavelength sources: monochromatic light or a truncated Planck spectrum.

All wavelengths handed to the simulators are in units of the run's reference
wavelength. A :class:`Blackbody` source keeps its table in those units too, so
the physical reference wavelength (metres) is fixed at construction time.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import constants, integrate, optimize

from .errors import InvalidParameterError

__all__ = [
    "Monochromatic",
    "Blackbody",
    "SpectralSource",
    "build_blackbody",
    "draw_wavelength",
    "parse_source",
    "planck_energy_density",
    "wien_peak",
]

#: Number of nodes in a tabulated blackbody CDF.
CDF_POINTS = 4096

_HC_OVER_K = constants.h * constants.c / constants.k


@dataclass(frozen=True)
class Monochromatic:
    """Every photon has the same wavelength (reference units)."""

    wavelength: float = 1.0

    def __post_init__(self):
        if not self.wavelength > 0:
            raise InvalidParameterError(f"wavelength must be positive, got {self.wavelength}")

    def draw(self, rng: np.random.Generator) -> float:
        return self.wavelength

    def describe(self) -> str:
        return f"mono:{self.wavelength!r}"


@dataclass(frozen=True, eq=False)
class Blackbody:
    """Planck spectrum truncated to ``[lambda_min, lambda_max]`` and tabulated as a CDF.

    ``grid`` and ``cdf`` are the interpolation table, wavelengths in reference
    units. Use :func:`build_blackbody` rather than constructing this directly.
    """

    temperature: float
    lambda_min: float
    lambda_max: float
    grid: np.ndarray = field(repr=False)
    cdf: np.ndarray = field(repr=False)
    reference_wavelength: float = 1e-6
    weighting: str = "energy"

    def __post_init__(self):
        if not self.temperature > 0:
            raise InvalidParameterError(f"temperature must be positive, got {self.temperature}")
        if not 0 < self.lambda_min < self.lambda_max:
            raise InvalidParameterError("need 0 < lambda_min < lambda_max")
        cdf = np.asarray(self.cdf)
        if cdf[0] != 0.0 or cdf[-1] != 1.0 or np.any(np.diff(cdf) < 0):
            raise InvalidParameterError("CDF table must rise monotonically from 0 to 1")

    def draw(self, rng: np.random.Generator) -> float:
        return float(self.inverse_cdf(rng.random()))

    def inverse_cdf(self, u):
        """Map uniform variates in [0, 1] to wavelengths (monotone in ``u``)."""
        return np.interp(u, self.cdf, self.grid)

    @property
    def peak(self) -> float:
        """Wien peak in reference units."""
        return wien_peak(self.temperature) / self.reference_wavelength

    def describe(self) -> str:
        return f"blackbody:{self.temperature!r}"


SpectralSource = Monochromatic | Blackbody


def draw_wavelength(source: SpectralSource, rng: np.random.Generator) -> float:
    """Draw one photon wavelength, in reference units."""
    return source.draw(rng)


def wien_peak(temperature: float) -> float:
    """Wavelength (m) at which the spectral energy density peaks."""
    return constants.Wien / temperature


def planck_energy_density(wavelength, temperature):
    """Spectral energy density u_lambda up to a constant factor; wavelength in metres."""
    wavelength = np.asarray(wavelength, dtype=float)
    return wavelength**-5 / np.expm1(_HC_OVER_K / (wavelength * temperature))


def _tail_mass(t0, power):
    # mass of t**power / (e**t - 1) above t0, with t = hc / (lambda k T)
    val, _ = integrate.quad(lambda t: t**power * np.exp(-t) / -np.expm1(-t), t0, np.inf, limit=200)
    return val


def build_blackbody(
    temperature: float,
    coverage: float = 0.999,
    reference_wavelength: float = 1e-6,
    weighting: str = "energy",
) -> Blackbody:
    """Tabulate a truncated Planck spectrum holding ``coverage`` of its mass.

    Equal mass ``(1 - coverage) / 2`` is cut from each tail. ``weighting`` is
    ``"energy"`` (u_lambda) or ``"number"`` (photon number density,
    u_lambda * lambda).
    """
    if not temperature > 0:
        raise InvalidParameterError(f"temperature must be positive, got {temperature}")
    if not 0 < coverage < 1:
        raise InvalidParameterError(f"coverage must lie in (0, 1), got {coverage}")
    if not reference_wavelength > 0:
        raise InvalidParameterError("reference_wavelength must be positive")
    if weighting not in ("energy", "number"):
        raise InvalidParameterError(f"unknown weighting {weighting!r}")

    # u_lambda dlambda -> t**3/(e**t - 1) dt; number density -> t**2/(e**t - 1) dt
    power = 3 if weighting == "energy" else 2
    total = _tail_mass(0.0, power)
    cut = 0.5 * (1.0 - coverage) * total
    # short-wavelength tail = large t
    t_hi = optimize.brentq(lambda t: _tail_mass(t, power) - cut, 1e-3, 200.0, xtol=1e-12)
    t_lo = optimize.brentq(lambda t: (total - _tail_mass(t, power)) - cut, 1e-9, 50.0, xtol=1e-14)

    scale = _HC_OVER_K / temperature
    lam_min, lam_max = scale / t_hi, scale / t_lo
    grid = np.linspace(lam_min, lam_max, CDF_POINTS)
    dens = planck_energy_density(grid, temperature)
    if weighting == "number":
        dens = dens * grid
    cdf = integrate.cumulative_trapezoid(dens, grid, initial=0.0)
    cdf /= cdf[-1]
    cdf[-1] = 1.0

    return Blackbody(
        temperature=float(temperature),
        lambda_min=lam_min / reference_wavelength,
        lambda_max=lam_max / reference_wavelength,
        grid=grid / reference_wavelength,
        cdf=cdf,
        reference_wavelength=float(reference_wavelength),
        weighting=weighting,
    )


def parse_source(text: str, reference_wavelength: float = 1e-6) -> SpectralSource:
    """Parse ``mono:<lambda>`` (reference units) or ``blackbody:<T kelvin>``."""
    kind, _, value = text.partition(":")
    try:
        number = float(value) if value else None
    except ValueError:
        raise InvalidParameterError(f"bad source value in {text!r}") from None
    kind = kind.strip().lower()
    if kind in ("mono", "monochromatic"):
        return Monochromatic(1.0 if number is None else number)
    if kind in ("blackbody", "bb"):
        if number is None:
            raise InvalidParameterError("blackbody source needs a temperature")
        return build_blackbody(number, reference_wavelength=reference_wavelength)
    raise InvalidParameterError(f"unknown source {text!r}")
