"""Three-dimensional relative-position wavefunction on a cube, photons incident along z.

A photon leaving at polar angle theta and azimuth phi kicks the pair by
``+-(h / wavelength) * (sin t cos p, sin t sin p, cos t - 1)``; with positions
in wavelengths the collapse factor is ``cos(2 pi gamma / wavelength)`` where
``gamma`` is the kick direction dotted into the relative position.

Solid-angle integrals use a ``THETA_BINS x PHI_BINS`` midpoint grid weighted
by ``sin(theta)``, with the weights scaled to sum to one (i.e. to 4 pi sr).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateCollapseError, InvalidDimensionError
from .spectra import Monochromatic, SpectralSource
from .wave1d import COLLAPSE_FLOOR, EventKind, EventLog, make_rng, symmetric_grid

__all__ = [
    "GRID_POINTS_3D",
    "THETA_BINS",
    "PHI_BINS",
    "RelativeWavefunction3D",
    "ScatterOutcome3D",
    "PointCloud",
    "gamma_kernel",
    "flat_state_3d",
    "nonscatter_amplitude_3d",
    "scatter_density_3d",
    "nonscatter_probability_3d",
    "sample_event_3d",
    "sample_events_3d",
    "apply_event_3d",
    "run_localisation_3d",
    "density_export_3d",
    "marginals",
    "principal_axis",
    "axis_profile",
]

GRID_POINTS_3D = 64
THETA_BINS = 128
PHI_BINS = 256
NORM_TOL = 1e-8

_DTHETA = np.pi / THETA_BINS
_DPHI = 2.0 * np.pi / PHI_BINS
_THETA = (np.arange(THETA_BINS) + 0.5) * _DTHETA
_PHI = (np.arange(PHI_BINS) + 0.5) * _DPHI
_ST, _CT = np.sin(_THETA), np.cos(_THETA)
_SP, _CP = np.sin(_PHI), np.cos(_PHI)
# solid-angle weights per (theta, phi) cell as a fraction of the full sphere
_W_THETA = _ST / _ST.sum()
_WEIGHTS = np.repeat(_W_THETA[:, None] / PHI_BINS, PHI_BINS, axis=1)
# kick direction components on the angle grid
_KX = np.outer(_ST, _CP)
_KY = np.outer(_ST, _SP)
_KZ = np.repeat((_CT - 1.0)[:, None], PHI_BINS, axis=1)


@dataclass(frozen=True)
class ScatterOutcome3D:
    kind: EventKind
    theta: float | None = None
    phi: float | None = None
    wavelength: float = 1.0

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if self.kind is EventKind.SCATTERED:
            if self.theta is None or not 0.0 <= self.theta <= np.pi:
                raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
            if self.phi is None or not 0.0 <= self.phi < 2.0 * np.pi:
                raise ValueError(f"phi must lie in [0, 2pi), got {self.phi}")
        elif self.theta is not None or self.phi is not None:
            raise ValueError("a non-scattered event carries no angles")

    @classmethod
    def scattered(cls, theta, phi, wavelength=1.0) -> "ScatterOutcome3D":
        return cls(EventKind.SCATTERED, float(theta), float(phi), float(wavelength))

    @classmethod
    def non_scattered(cls, wavelength=1.0) -> "ScatterOutcome3D":
        return cls(EventKind.NON_SCATTERED, None, None, float(wavelength))

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "theta": self.theta, "phi": self.phi, "wavelength": self.wavelength}


@dataclass(frozen=True, eq=False)
class RelativeWavefunction3D:
    """Real amplitudes of c(x, y, z), axes ordered (x, y, z), on cell midpoints of ``[-d, d]^3``."""

    amplitudes: np.ndarray
    half_width: float

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        if amps.ndim != 3 or len(set(amps.shape)) != 1 or amps.shape[0] < 2:
            raise InvalidDimensionError(f"need an n x n x n grid with n >= 2, got {amps.shape}")
        if not self.half_width > 0:
            raise InvalidDimensionError(f"half-width must be positive, got {self.half_width}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        if abs(self.norm() - 1.0) > NORM_TOL:
            raise ValueError("state is not normalised; use from_amplitudes")

    @classmethod
    def from_amplitudes(cls, amplitudes, half_width: float) -> "RelativeWavefunction3D":
        amps = np.asarray(amplitudes, dtype=float)
        if amps.ndim != 3 or len(set(amps.shape)) != 1 or amps.shape[0] < 2:
            raise InvalidDimensionError(f"need an n x n x n grid with n >= 2, got {amps.shape}")
        if not half_width > 0:
            raise InvalidDimensionError(f"half-width must be positive, got {half_width}")
        return cls(_normalise(amps, (2.0 * half_width / amps.shape[0]) ** 3), half_width)

    @property
    def n(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def dv(self) -> float:
        return self.dx**3

    @property
    def axis(self) -> np.ndarray:
        return symmetric_grid(self.n, self.half_width)

    def norm(self) -> float:
        a = self.amplitudes.ravel()
        return float(a @ a) * self.dv

    def density(self) -> np.ndarray:
        return self.amplitudes**2


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Points drawn from |c|^2 plus the three one-dimensional marginal densities."""

    points: np.ndarray
    axis: np.ndarray
    marginals: tuple


def _normalise(amps, dv):
    flat = amps.ravel()
    norm = np.sqrt(float(flat @ flat) * dv)
    if not norm >= COLLAPSE_FLOOR:
        raise DegenerateCollapseError("state annihilated by the collapse factor")
    return amps / norm


def gamma_kernel(x, y, z, theta, phi):
    """Kick direction (in units of h / wavelength) dotted into the relative position."""
    st = np.sin(theta)
    return x * st * np.cos(phi) + y * st * np.sin(phi) + z * (np.cos(theta) - 1.0)


def flat_state_3d(d: float = 1.0, n: int = GRID_POINTS_3D) -> RelativeWavefunction3D:
    """c = (2d)^(-3/2) everywhere in the cube."""
    if n < 2:
        raise InvalidDimensionError(f"need at least 2 grid points per axis, got {n}")
    if not d > 0:
        raise InvalidDimensionError(f"half-width must be positive, got {d}")
    return RelativeWavefunction3D(np.full((n, n, n), (2.0 * d) ** -1.5), d)


def nonscatter_amplitude_3d(x, y, z, wavelength: float = 1.0):
    """A(x, y, z) from the direct solid-angle midpoint sum of sin^2(2 pi gamma / wavelength)."""
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    k = 2.0 * np.pi / wavelength
    out = np.empty(x.size)
    for i, (a, b, c) in enumerate(zip(x.ravel(), y.ravel(), z.ravel())):
        s = np.sin(k * (a * _KX + b * _KY + c * _KZ))
        out[i] = np.sum(_WEIGHTS * s * s)
    return np.sqrt(out).reshape(x.shape)


@lru_cache(maxsize=8)
def _grid_nonscatter_3d(n, d, wavelength):
    """A on the whole grid.

    Summing the midpoint rule over azimuth first leaves a function of the
    cylindrical radius and |z| only:
    A^2 = 1/2 - 1/2 sum_t w_t cos(2k z (cos t - 1)) C(2k R sin t), where C is
    the azimuthal mean of cos(a cos phi). The sin-term cancels because the
    azimuth grid is symmetric under phi -> pi - phi.
    """
    axis = symmetric_grid(n, d)
    k = 2.0 * np.pi / wavelength
    r2 = np.add.outer(axis**2, axis**2)
    radii, inverse = np.unique(r2.ravel(), return_inverse=True)
    radii = np.sqrt(radii)
    c_tab = np.empty((radii.size, THETA_BINS))
    for start in range(0, radii.size, 64):
        a = 2.0 * k * np.multiply.outer(radii[start:start + 64], _ST)
        c_tab[start:start + 64] = np.cos(a[..., None] * _CP).mean(axis=-1)
    cz = np.cos(2.0 * k * np.multiply.outer(np.abs(axis), _CT - 1.0))
    a2 = 0.5 - 0.5 * (c_tab * _W_THETA) @ cz.T
    # the origin has gamma = 0 for every direction; keep it exact rather than a rounding residue
    a2[np.ix_(radii == 0.0, axis == 0.0)] = 0.0
    a2 = a2[inverse].reshape(n, n, n)
    amp = np.sqrt(np.clip(a2, 0.0, 1.0))
    amp.flags.writeable = False
    return amp


def scatter_density_3d(state: RelativeWavefunction3D, theta: float, phi: float, wavelength: float = 1.0) -> float:
    """P_S(theta, phi) per steradian: (1/4pi) * integral |c|^2 cos^2(2 pi gamma / wavelength)."""
    ax = state.axis
    g = gamma_kernel(ax[:, None, None], ax[None, :, None], ax[None, None, :], theta, phi)
    c2 = np.cos(2.0 * np.pi * g / wavelength) ** 2
    return float(np.sum(state.density() * c2) * state.dv / (4.0 * np.pi))


def nonscatter_probability_3d(state: RelativeWavefunction3D, wavelength: float = 1.0) -> float:
    a = _grid_nonscatter_3d(state.n, state.half_width, float(wavelength))
    return float(np.sum(state.density() * a * a) * state.dv)


def _angle_weights(point, wavelength):
    k = 2.0 * np.pi / wavelength
    c = np.cos(k * (point[0] * _KX + point[1] * _KY + point[2] * _KZ))
    w = (_WEIGHTS * c * c).ravel()
    return w, np.cumsum(w)


def _invert_angle(w, cw, u_theta, u_phi):
    target = np.asarray(u_theta) * cw[-1]
    cell = np.minimum(np.searchsorted(cw, target, side="right"), cw.size - 1)
    below = np.where(cell > 0, cw[cell - 1], 0.0)
    wc = w[cell]
    frac = np.where(wc > 0, (target - below) / np.where(wc > 0, wc, 1.0), 0.5)
    ti, pj = np.divmod(cell, PHI_BINS)
    theta = np.minimum((ti + np.clip(frac, 0.0, 1.0)) * _DTHETA, np.pi)
    phi = np.minimum((pj + np.asarray(u_phi)) * _DPHI, np.nextafter(2.0 * np.pi, 0.0))
    return theta, phi


def _draw(amps, axis, wavelength, u):
    # pick a cell from |c|^2, then undeflected or an angle cell from that cell's conditional
    flat = amps.ravel()
    cdf = np.cumsum(flat * flat)
    idx = min(int(np.searchsorted(cdf, u[0] * cdf[-1], side="right")), flat.size - 1)
    i, j, l = np.unravel_index(idx, amps.shape)
    w, cw = _angle_weights((axis[i], axis[j], axis[l]), wavelength)
    if u[1] >= cw[-1]:
        return ScatterOutcome3D.non_scattered(wavelength)
    theta, phi = _invert_angle(w, cw, u[2], u[3])
    return ScatterOutcome3D.scattered(float(theta), float(phi), wavelength)


def sample_event_3d(state: RelativeWavefunction3D, wavelength: float, rng) -> ScatterOutcome3D:
    rng, _ = make_rng(rng)
    return _draw(state.amplitudes, state.axis, float(wavelength), rng.random(4))


def sample_events_3d(state: RelativeWavefunction3D, wavelength: float, rng, size: int):
    """Vectorised draws for one state: ``(scattered, theta, phi)`` arrays, NaN angles if undeflected."""
    rng, _ = make_rng(rng)
    u = rng.random((size, 4))
    flat = state.amplitudes.ravel()
    cdf = np.cumsum(flat * flat)
    cells = np.minimum(np.searchsorted(cdf, u[:, 0] * cdf[-1], side="right"), flat.size - 1)
    scattered = np.zeros(size, dtype=bool)
    theta = np.full(size, np.nan)
    phi = np.full(size, np.nan)
    axis = state.axis
    for c in np.unique(cells):
        rows = np.flatnonzero(cells == c)
        i, j, l = np.unravel_index(c, state.amplitudes.shape)
        w, cw = _angle_weights((axis[i], axis[j], axis[l]), wavelength)
        hit = rows[u[rows, 1] < cw[-1]]
        scattered[hit] = True
        theta[hit], phi[hit] = _invert_angle(w, cw, u[hit, 2], u[hit, 3])
    return scattered, theta, phi


def _collapse(amps, axis, d, event):
    n = amps.shape[0]
    if event.kind is EventKind.SCATTERED:
        k = 2.0 * np.pi / event.wavelength
        st = np.sin(event.theta)
        gx = axis * (st * np.cos(event.phi))
        gy = axis * (st * np.sin(event.phi))
        gz = axis * (np.cos(event.theta) - 1.0)
        g = gx[:, None, None] + gy[None, :, None] + gz[None, None, :]
        factor = np.cos(np.abs(k * g))
    else:
        factor = _grid_nonscatter_3d(n, d, float(event.wavelength))
    return _normalise(amps * factor, (2.0 * d / n) ** 3)


def apply_event_3d(state: RelativeWavefunction3D, event: ScatterOutcome3D) -> RelativeWavefunction3D:
    return RelativeWavefunction3D(_collapse(state.amplitudes, state.axis, state.half_width, event), state.half_width)


def run_localisation_3d(
    state: RelativeWavefunction3D,
    photons: int,
    source: SpectralSource | None = None,
    rng=None,
) -> tuple[RelativeWavefunction3D, EventLog]:
    """Scatter ``photons`` photons; see :func:`relloc.wave1d.run_localisation`."""
    if photons < 0:
        raise ValueError(f"photons must be non-negative, got {photons}")
    source = Monochromatic(1.0) if source is None else source
    rng, seed = make_rng(rng)
    log = EventLog(seed=seed)
    axis, d = state.axis, state.half_width
    amps = state.amplitudes
    for _ in range(photons):
        wavelength = source.draw(rng)
        event = _draw(amps, axis, wavelength, rng.random(4))
        amps = _collapse(amps, axis, d, event)
        log.events.append(event)
    if photons == 0:
        return state, log
    return RelativeWavefunction3D(amps, d), log


def marginals(state: RelativeWavefunction3D) -> tuple:
    """One-dimensional marginal densities along x, y and z."""
    rho = state.density() * state.dx**2
    return rho.sum(axis=(1, 2)), rho.sum(axis=(0, 2)), rho.sum(axis=(0, 1))


def density_export_3d(state: RelativeWavefunction3D, samples: int, rng=None) -> PointCloud:
    """Draw ``samples`` points from |c|^2, each placed uniformly inside its grid cell."""
    if samples < 0:
        raise ValueError(f"samples must be non-negative, got {samples}")
    rng, _ = make_rng(rng)
    axis = state.axis
    flat = state.density().ravel()
    cdf = np.cumsum(flat)
    idx = np.searchsorted(cdf, rng.random(samples) * cdf[-1], side="right")
    idx = np.minimum(idx, flat.size - 1)
    cells = np.stack(np.unravel_index(idx, state.amplitudes.shape), axis=-1)
    jitter = rng.random((samples, 3)) - 0.5
    points = axis[cells] + jitter * state.dx
    return PointCloud(points=points.reshape(samples, 3), axis=axis, marginals=marginals(state))


def principal_axis(state: RelativeWavefunction3D) -> np.ndarray:
    """Unit vector along which the density has the largest second moment."""
    ax = state.axis
    rho = state.density() * state.dv
    X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
    coords = np.stack([X.ravel(), Y.ravel(), Z.ravel()])
    w = rho.ravel()
    tensor = (coords * w) @ coords.T
    vals, vecs = np.linalg.eigh(tensor)
    return vecs[:, np.argmax(vals)]


def axis_profile(state: RelativeWavefunction3D, direction, bins: int | None = None):
    """Density of the projection r . direction, as (bin centres, density)."""
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    ax = state.axis
    X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
    proj = (X * direction[0] + Y * direction[1] + Z * direction[2]).ravel()
    reach = np.sqrt(3.0) * state.half_width
    bins = state.n if bins is None else bins
    hist, edges = np.histogram(proj, bins=bins, range=(-reach, reach), weights=state.density().ravel() * state.dv)
    width = edges[1] - edges[0]
    return 0.5 * (edges[1:] + edges[:-1]), hist / width
