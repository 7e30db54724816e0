"""Relative-momentum densities from real position amplitudes.

Positions are in units of the reference wavelength and momenta in units of
h / wavelength, so the transform kernel is ``exp(-2j*pi*p*x)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidGridError

__all__ = ["MomentumDensity", "momentum_grid", "check_momentum_grid", "transform_density"]

#: Default momentum window and resolution (h / wavelength).
P_MAX = 8.0
P_BINS = 1025


@dataclass(frozen=True, eq=False)
class MomentumDensity:
    """Normalised density ``q`` sampled on the uniform momentum grid ``p``."""

    p: np.ndarray
    q: np.ndarray

    @property
    def dp(self) -> float:
        return float(self.p[1] - self.p[0])

    def mass(self) -> float:
        return float(self.q.sum() * self.dp)

    def at(self, p1):
        """Linear interpolation of the density; momenta outside the grid are clamped to its ends."""
        return np.interp(p1, self.p, self.q)

    def sample(self, u):
        """Inverse-CDF draw for uniform variates ``u`` (piecewise-linear CDF over grid cells)."""
        mass = self.q * self.dp
        cdf = np.concatenate(([0.0], np.cumsum(mass)))
        cdf /= cdf[-1]
        edges = np.concatenate(([self.p[0] - 0.5 * self.dp], self.p + 0.5 * self.dp))
        return np.interp(u, cdf, edges)


def momentum_grid(p_max: float = P_MAX, bins: int = P_BINS) -> np.ndarray:
    """Uniform grid on ``[-p_max, p_max]``, exactly symmetric about zero."""
    if bins < 2 or not p_max > 0:
        raise InvalidGridError(f"need bins >= 2 and p_max > 0, got {bins}, {p_max}")
    step = 2.0 * p_max / (bins - 1)
    return (np.arange(bins) - (bins - 1) / 2.0) * step


def check_momentum_grid(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise InvalidGridError("momentum grid must be 1-D with at least two points")
    steps = np.diff(p)
    if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise InvalidGridError("momentum grid must be uniform and increasing")
    return p


@lru_cache(maxsize=8)
def _kernel(x_bytes: bytes, p_bytes: bytes):
    x = np.frombuffer(x_bytes)
    p = np.frombuffer(p_bytes)
    arg = 2.0 * np.pi * np.outer(p, x)
    cos, sin = np.cos(arg), np.sin(arg)
    cos.flags.writeable = False
    sin.flags.writeable = False
    return cos, sin


def transform_density(amplitudes, x, p) -> MomentumDensity:
    """|sum_j c_j exp(-2 pi i p x_j) dx|^2 on the grid ``p``, renormalised to unit mass.

    The transform is evaluated directly rather than by FFT, so the momentum grid
    is free to be any uniform grid. The constant factor dx drops out in the
    renormalisation.
    """
    p = check_momentum_grid(p)
    x = np.ascontiguousarray(x, dtype=float)
    c = np.asarray(amplitudes, dtype=float)
    cos, sin = _kernel(x.tobytes(), np.ascontiguousarray(p).tobytes())
    re = cos @ c
    im = sin @ c
    q = re * re + im * im
    total = q.sum() * (p[1] - p[0])
    if total > 0:
        q = q / total
    return MomentumDensity(p=p, q=q)
