"""One-dimensional relative-position wavefunction under photon scattering.

The relative coordinate ``x`` lives on ``[-d, d]`` in units of the reference
wavelength. Amplitudes are real: every collapse factor (a cosine for a photon
detected at angle theta, the no-scatter amplitude ``A(x)`` otherwise) is real.

Angles cover the full circle ``[0, 2 pi)`` with ``ANGLE_BINS`` midpoint bins,
used both for the ``A(x)`` quadrature and for drawing scattering angles.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import interpolate, signal

from .errors import DegenerateCollapseError, EmptyHalfError, InvalidDimensionError
from .momentum import MomentumDensity, momentum_grid, transform_density
from .spectra import Monochromatic, SpectralSource

__all__ = [
    "ANGLE_BINS",
    "GRID_POINTS",
    "EventKind",
    "EventLog",
    "RelativeWavefunction1D",
    "ScatterOutcome1D",
    "apply_event",
    "flat_state",
    "density_peaks",
    "has_mirror_peaks",
    "make_rng",
    "momentum_density",
    "nonscatter_amplitude",
    "nonscatter_probability",
    "peak_mean",
    "peak_variance",
    "position_density",
    "run_localisation",
    "sample_event",
    "sample_events",
    "scatter_density",
    "symmetric_grid",
]

GRID_POINTS = 2048
ANGLE_BINS = 4096
NORM_TOL = 1e-9
COLLAPSE_FLOOR = 1e-300

_DTHETA = 2.0 * np.pi / ANGLE_BINS
_THETA = (np.arange(ANGLE_BINS) + 0.5) * _DTHETA
_SIN_THETA = np.sin(_THETA)
# sin^2(a sin(theta)) only depends on |sin(theta)|, and the midpoint grid maps
# onto itself under theta -> pi - theta and theta -> theta + pi
_SIN_QUARTER = np.sin(_THETA[: ANGLE_BINS // 4])


class EventKind(str, enum.Enum):
    NON_SCATTERED = "non_scattered"
    SCATTERED = "scattered"


@dataclass(frozen=True)
class ScatterOutcome1D:
    """A detected photon: undeflected, or scattered at ``theta``."""

    kind: EventKind
    theta: float | None = None
    wavelength: float = 1.0

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if self.kind is EventKind.SCATTERED:
            if self.theta is None or not 0.0 <= self.theta < 2.0 * np.pi:
                raise ValueError(f"theta must lie in [0, 2pi), got {self.theta}")
        elif self.theta is not None:
            raise ValueError("a non-scattered event carries no angle")

    @classmethod
    def scattered(cls, theta: float, wavelength: float = 1.0) -> "ScatterOutcome1D":
        return cls(EventKind.SCATTERED, float(theta), float(wavelength))

    @classmethod
    def non_scattered(cls, wavelength: float = 1.0) -> "ScatterOutcome1D":
        return cls(EventKind.NON_SCATTERED, None, float(wavelength))

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "theta": self.theta, "wavelength": self.wavelength}


@dataclass
class EventLog:
    """Ordered record of every photon outcome in a run, plus the seed that produced it."""

    seed: int | None = None
    events: list = field(default_factory=list)

    @property
    def photon_count(self) -> int:
        return len(self.events)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "photon_count": self.photon_count,
            "events": [e.to_dict() for e in self.events],
        }


def symmetric_grid(n: int, d: float) -> np.ndarray:
    """Cell midpoints of ``n`` equal cells on ``[-d, d]``; exactly odd under negation."""
    return (np.arange(n) - (n - 1) / 2.0) * (2.0 * d / n)


@dataclass(frozen=True, eq=False)
class RelativeWavefunction1D:
    """Real amplitudes of c(x) at the midpoints of ``n`` cells spanning ``[-d, d]``."""

    amplitudes: np.ndarray
    half_width: float

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        if amps.ndim != 1 or amps.size < 2:
            raise InvalidDimensionError(f"need at least 2 grid points, got shape {amps.shape}")
        if not self.half_width > 0:
            raise InvalidDimensionError(f"half-width must be positive, got {self.half_width}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        norm = float(amps @ amps) * self.dx
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised (norm {norm!r}); use from_amplitudes")

    @classmethod
    def from_amplitudes(cls, amplitudes, half_width: float) -> "RelativeWavefunction1D":
        """Build a state from unnormalised amplitudes."""
        amps = np.asarray(amplitudes, dtype=float)
        if amps.ndim != 1 or amps.size < 2:
            raise InvalidDimensionError(f"need at least 2 grid points, got shape {amps.shape}")
        if not half_width > 0:
            raise InvalidDimensionError(f"half-width must be positive, got {half_width}")
        return cls(_normalise(amps, 2.0 * half_width / amps.size), half_width)

    @property
    def n(self) -> int:
        return self.amplitudes.size

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.amplitudes.size

    @property
    def x(self) -> np.ndarray:
        return symmetric_grid(self.n, self.half_width)

    def norm(self) -> float:
        return float(self.amplitudes @ self.amplitudes) * self.dx


def _normalise(amps, dx):
    norm = np.sqrt(float(amps @ amps) * dx)
    if not norm >= COLLAPSE_FLOOR:
        raise DegenerateCollapseError("state annihilated by the collapse factor")
    return amps / norm


def make_rng(rng) -> tuple[np.random.Generator, int | None]:
    """Accept a Generator, an integer seed or None; return the generator and the seed (if known)."""
    if isinstance(rng, np.random.Generator):
        return rng, None
    if rng is None:
        seed = int(np.random.SeedSequence().entropy % (2**63))
        return np.random.default_rng(seed), seed
    return np.random.default_rng(rng), int(rng)


def flat_state(d: float = 1.0, n: int = GRID_POINTS) -> RelativeWavefunction1D:
    """The fully delocalised state c(x) = 1/sqrt(2d)."""
    if n < 2:
        raise InvalidDimensionError(f"need at least 2 grid points, got {n}")
    if not d > 0:
        raise InvalidDimensionError(f"half-width must be positive, got {d}")
    return RelativeWavefunction1D(np.full(n, 1.0 / np.sqrt(2.0 * d)), d)


def _nonscatter_sq(x, wavelength):
    # midpoint rule over the first quadrant is the full-circle rule, by symmetry
    x = np.asarray(x, dtype=float)
    u, inverse = np.unique(np.abs(x).ravel(), return_inverse=True)
    out = np.empty(u.size)
    k = 2.0 * np.pi / wavelength
    for start in range(0, u.size, 1024):
        block = np.sin(np.outer(k * u[start:start + 1024], _SIN_QUARTER))
        out[start:start + 1024] = np.mean(block * block, axis=1)
    return out[inverse].reshape(x.shape)


def nonscatter_amplitude(x, wavelength: float = 1.0):
    """A(x): square root of the angle-averaged sin^2((2 pi x / wavelength) sin theta)."""
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    return np.sqrt(_nonscatter_sq(x, wavelength))


@lru_cache(maxsize=32)
def _grid_nonscatter(n, d, wavelength):
    a = np.sqrt(_nonscatter_sq(symmetric_grid(n, d), wavelength))
    a.flags.writeable = False
    return a


_TABLE_STEP = 2e-4


@lru_cache(maxsize=8)
def _nonscatter_table(umax):
    u = np.arange(0.0, umax + 4 * _TABLE_STEP, _TABLE_STEP)
    return interpolate.CubicSpline(u, _nonscatter_sq(u, 1.0))


def _interp_nonscatter(n, d, wavelength):
    """A on the grid from a spline of A^2 in |x| / wavelength; for per-photon wavelengths."""
    u = np.abs(symmetric_grid(n, d)) / wavelength
    umax = 2.0 ** np.ceil(np.log2(max(u.max(), 1.0)))
    return np.sqrt(np.clip(_nonscatter_table(umax)(u), 0.0, 1.0))


def scatter_density(state: RelativeWavefunction1D, theta, wavelength: float = 1.0):
    """P_S(theta): probability per radian of detecting a photon scattered to ``theta``."""
    theta = np.asarray(theta, dtype=float)
    rho = state.amplitudes**2 * state.dx
    phase = np.multiply.outer(np.sin(theta), 2.0 * np.pi * state.x / wavelength)
    return np.cos(phase) ** 2 @ rho / (2.0 * np.pi)


def nonscatter_probability(state: RelativeWavefunction1D, wavelength: float = 1.0) -> float:
    """P_NS = integral of |c|^2 A^2 dx."""
    a = _grid_nonscatter(state.n, state.half_width, float(wavelength))
    return float(np.sum(state.amplitudes**2 * a**2) * state.dx)


def _angle_weights(xj, wavelength):
    w = np.cos((2.0 * np.pi * xj / wavelength) * _SIN_THETA) ** 2
    return w, np.cumsum(w)


def _invert_angle(w, cw, u):
    """Angle for uniform(s) ``u``; the CDF is linear inside each bin."""
    target = np.asarray(u) * cw[-1]
    k = np.minimum(np.searchsorted(cw, target, side="right"), ANGLE_BINS - 1)
    below = np.where(k > 0, cw[k - 1], 0.0)
    wk = w[k]
    frac = np.where(wk > 0, (target - below) / np.where(wk > 0, wk, 1.0), 0.5)
    theta = (k + np.clip(frac, 0.0, 1.0)) * _DTHETA
    return np.minimum(theta, np.nextafter(2.0 * np.pi, 0.0))


def _draw(amps, x, wavelength, u):
    """Draw one outcome from three uniforms ``u``.

    A grid cell is picked from |c|^2, then the photon is left undeflected with
    probability A^2 at that cell, or given an angle bin with weight cos^2 of the
    cell's phase. Summed over cells this is exactly the inverse-CDF draw from the
    discretised P_S(theta) and P_NS.
    """
    cdf = np.cumsum(amps * amps)
    j = min(int(np.searchsorted(cdf, u[0] * cdf[-1], side="right")), amps.size - 1)
    w, cw = _angle_weights(x[j], wavelength)
    if u[1] * ANGLE_BINS >= cw[-1]:
        return ScatterOutcome1D.non_scattered(wavelength)
    return ScatterOutcome1D.scattered(float(_invert_angle(w, cw, u[2])), wavelength)


def sample_event(state: RelativeWavefunction1D, wavelength: float, rng) -> ScatterOutcome1D:
    """Draw the next photon outcome for ``state``."""
    rng, _ = make_rng(rng)
    return _draw(state.amplitudes, state.x, float(wavelength), rng.random(3))


def sample_events(state: RelativeWavefunction1D, wavelength: float, rng, size: int):
    """``size`` independent outcomes for the same state, as arrays.

    Returns ``(scattered, theta)``; ``theta`` is NaN for undeflected photons.
    Same algorithm as :func:`sample_event`, grouped by grid cell.
    """
    rng, _ = make_rng(rng)
    u = rng.random((size, 3))
    amps = state.amplitudes
    cdf = np.cumsum(amps * amps)
    cells = np.minimum(np.searchsorted(cdf, u[:, 0] * cdf[-1], side="right"), amps.size - 1)
    scattered = np.zeros(size, dtype=bool)
    theta = np.full(size, np.nan)
    x = state.x
    for j in np.unique(cells):
        rows = np.flatnonzero(cells == j)
        w, cw = _angle_weights(x[j], wavelength)
        hit = rows[u[rows, 1] * ANGLE_BINS < cw[-1]]
        scattered[hit] = True
        theta[hit] = _invert_angle(w, cw, u[hit, 2])
    return scattered, theta


def _collapse(amps, x, dx, half_width, event, nonscatter=None):
    if event.kind is EventKind.SCATTERED:
        factor = np.cos(np.abs((2.0 * np.pi * np.sin(event.theta) / event.wavelength) * x))
    else:
        factor = (nonscatter or _grid_nonscatter)(amps.size, half_width, float(event.wavelength))
    return _normalise(amps * factor, dx)


def apply_event(state: RelativeWavefunction1D, event: ScatterOutcome1D) -> RelativeWavefunction1D:
    """Condition the state on a detected photon and renormalise."""
    amps = _collapse(state.amplitudes, state.x, state.dx, state.half_width, event)
    return RelativeWavefunction1D(amps, state.half_width)


def run_localisation(
    state: RelativeWavefunction1D,
    photons: int,
    source: SpectralSource | None = None,
    rng=None,
) -> tuple[RelativeWavefunction1D, EventLog]:
    """Scatter ``photons`` photons off the pair, one at a time.

    ``rng`` may be a Generator or an integer seed; an integer is recorded in the
    returned log. Each photon draws a fresh wavelength from ``source``
    (monochromatic at the reference wavelength by default).
    """
    if photons < 0:
        raise ValueError(f"photons must be non-negative, got {photons}")
    source = Monochromatic(1.0) if source is None else source
    rng, seed = make_rng(rng)
    log = EventLog(seed=seed)
    x, dx, d = state.x, state.dx, state.half_width
    amps = state.amplitudes
    nonscatter = _grid_nonscatter if isinstance(source, Monochromatic) else _interp_nonscatter
    for _ in range(photons):
        wavelength = source.draw(rng)
        event = _draw(amps, x, wavelength, rng.random(3))
        amps = _collapse(amps, x, dx, d, event, nonscatter)
        log.events.append(event)
    if photons == 0:
        return state, log
    return RelativeWavefunction1D(amps, d), log


def position_density(state: RelativeWavefunction1D) -> np.ndarray:
    """|c(x_j)|^2 at the grid points."""
    return state.amplitudes**2


def momentum_density(state: RelativeWavefunction1D, p_grid=None) -> MomentumDensity:
    """Relative-momentum density Q(p), p in h / wavelength."""
    p_grid = momentum_grid() if p_grid is None else p_grid
    return transform_density(state.amplitudes, state.x, p_grid)


def peak_variance(density, x, side: str = "right") -> float:
    """Variance of x within one half-line (x > 0 or x < 0), that half renormalised."""
    density = np.asarray(density, dtype=float)
    x = np.asarray(x, dtype=float)
    if side == "right":
        mask = x > 0
    elif side == "left":
        mask = x < 0
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    dx = float(x[1] - x[0])
    mass = density[mask].sum() * dx
    if not mass >= 1e-12:
        raise EmptyHalfError(f"no probability mass on the {side} half")
    w = density[mask] * dx / mass
    mean = float(w @ x[mask])
    return float(w @ (x[mask] - mean) ** 2)


def peak_mean(density, x, side: str = "right") -> float:
    """Mean position within one half-line."""
    density = np.asarray(density, dtype=float)
    x = np.asarray(x, dtype=float)
    mask = x > 0 if side == "right" else x < 0
    mass = density[mask].sum()
    if not mass * (x[1] - x[0]) >= 1e-12:
        raise EmptyHalfError(f"no probability mass on the {side} half")
    return float(density[mask] @ x[mask] / mass)


def density_peaks(density, x, rel_height: float = 0.1) -> np.ndarray:
    """Positions of local maxima higher than ``rel_height`` times the global maximum."""
    density = np.asarray(density, dtype=float)
    idx, _ = signal.find_peaks(density, height=rel_height * density.max())
    # find_peaks ignores the end points; count them if they are maxima
    ends = []
    if density[0] > density[1] and density[0] >= rel_height * density.max():
        ends.append(0)
    if density[-1] > density[-2] and density[-1] >= rel_height * density.max():
        ends.append(density.size - 1)
    return np.asarray(x)[np.sort(np.concatenate([idx, ends]).astype(int))]


def has_mirror_peaks(state: RelativeWavefunction1D, rel_height: float = 0.1) -> bool:
    """True when the density has exactly two significant maxima at mirror positions."""
    peaks = density_peaks(position_density(state), state.x, rel_height)
    return peaks.size == 2 and abs(peaks[0] + peaks[1]) <= 2.0 * state.dx
