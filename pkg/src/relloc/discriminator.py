"""Bayesian test separating induced localisation from pre-existing localisation.

Each run localises a fresh delocalised pair, then releases it and measures the
relative momentum once. Two hypotheses predict that measurement:

* ``q1`` -- the pair was delocalised and scattering induced a coherent
  superposition of the two mirror peaks (fringed momentum density);
* ``q2`` -- the pair was localised all along, an equal mixture of the two
  peaks, whose momentum density is that of a single peak (no fringes).

The probability of the first hypothesis is updated run after run.
"""
from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import EmptyHalfError, ZeroLikelihoodError
from .momentum import MomentumDensity, momentum_grid, transform_density
from .spectra import Monochromatic, SpectralSource
from .wave1d import GRID_POINTS, RelativeWavefunction1D, flat_state, run_localisation

__all__ = [
    "Truth",
    "HypothesisDensities",
    "PosteriorTrace",
    "build_hypotheses",
    "convolve_resolution",
    "bayes_update",
    "simulate_experiment",
    "average_experiments",
    "resolution_sweep",
    "fringe_contrast",
    "fringe_period",
]

LIKELIHOOD_FLOOR = 1e-300
KERNEL_HALF_WIDTH = 6.0


class Truth(str, enum.Enum):
    DELOCALISED = "delocalised"
    LOCALISED = "localised"


@dataclass(frozen=True, eq=False)
class HypothesisDensities:
    q1: MomentumDensity
    q2: MomentumDensity

    @property
    def p(self) -> np.ndarray:
        return self.q1.p

    def convolved(self, dp: float) -> "HypothesisDensities":
        return HypothesisDensities(convolve_resolution(self.q1, dp), convolve_resolution(self.q2, dp))


@dataclass(frozen=True, eq=False)
class PosteriorTrace:
    """P_nl after each run; entry 0 is the prior."""

    p_nl: np.ndarray
    truth: Truth
    dp: float = 0.0

    @property
    def runs(self) -> int:
        return self.p_nl.size - 1

    @property
    def p_l(self) -> np.ndarray:
        return 1.0 - self.p_nl


def build_hypotheses(final_state: RelativeWavefunction1D, p_grid=None) -> HypothesisDensities:
    """Momentum densities of the final state and of its x > 0 half alone.

    The mirror-image half gives the same momentum density, so the right half
    stands for the whole equal-weight mixture.
    """
    p_grid = momentum_grid() if p_grid is None else p_grid
    x = final_state.x
    right = np.where(x > 0, final_state.amplitudes, 0.0)
    if not float(right @ right) * final_state.dx >= 1e-12:
        raise EmptyHalfError("final state has no mass at x > 0")
    q1 = transform_density(final_state.amplitudes, x, p_grid)
    q2 = transform_density(right, x, p_grid)
    return HypothesisDensities(q1, q2)


def convolve_resolution(q: MomentumDensity, dp: float) -> MomentumDensity:
    """Blur with a Gaussian of standard deviation ``dp``, cut at six deviations."""
    if dp < 0:
        raise ValueError(f"resolution must be non-negative, got {dp}")
    if dp == 0:
        return q
    step = q.dp
    half = int(np.floor(KERNEL_HALF_WIDTH * dp / step))
    offsets = np.arange(-half, half + 1) * step
    kernel = np.exp(-0.5 * (offsets / dp) ** 2)
    kernel /= kernel.sum()
    blurred = np.convolve(q.q, kernel, mode="same") if kernel.size <= q.q.size else _wide_convolve(q.q, kernel)
    blurred /= blurred.sum() * step
    return MomentumDensity(p=q.p, q=blurred)


def _wide_convolve(values, kernel):
    full = np.convolve(values, kernel, mode="full")
    start = (kernel.size - 1) // 2
    return full[start:start + values.size]


def bayes_update(prior_nl: float, p1: float, hyp: HypothesisDensities) -> float:
    """Posterior probability of induced localisation after measuring momentum ``p1``."""
    if not 0.0 <= prior_nl <= 1.0:
        raise ValueError(f"prior must lie in [0, 1], got {prior_nl}")
    l1 = float(hyp.q1.at(p1))
    l2 = float(hyp.q2.at(p1))
    if l1 < LIKELIHOOD_FLOOR and l2 < LIKELIHOOD_FLOOR:
        raise ZeroLikelihoodError(f"neither hypothesis supports p = {p1}")
    a = l1 * prior_nl
    b = l2 * (1.0 - prior_nl)
    return a / (a + b)


def _seed_sequence(rng) -> np.random.SeedSequence:
    if isinstance(rng, np.random.SeedSequence):
        return rng
    if isinstance(rng, np.random.Generator):
        return np.random.SeedSequence(int(rng.integers(2**63)))
    return np.random.SeedSequence(rng)


def _experiment(truth, runs, photons, dps, source, seq, d, n, p_grid, prior):
    """Traces for several resolutions sharing the same localisation runs and draws.

    Every run owns two child streams, one for the photons and one for the
    momentum measurement; the measured value is true draw + dp * (standard
    normal), so changing the resolution list never changes the other traces.
    """
    truth = Truth(truth)
    traces = np.empty((len(dps), runs + 1))
    traces[:, 0] = prior
    for r, run_seq in enumerate(seq.spawn(runs), start=1):
        loc_seq, meas_seq = run_seq.spawn(2)
        state, _ = run_localisation(flat_state(d, n), photons, source, np.random.default_rng(loc_seq))
        hyp = build_hypotheses(state, p_grid)
        meas = np.random.default_rng(meas_seq)
        true_density = hyp.q1 if truth is Truth.DELOCALISED else hyp.q2
        p_true = float(true_density.sample(meas.random()))
        noise = meas.standard_normal()
        for i, dp in enumerate(dps):
            model = hyp.convolved(dp) if dp > 0 else hyp
            traces[i, r] = bayes_update(traces[i, r - 1], p_true + dp * noise, model)
    return traces


def simulate_experiment(
    truth: Truth | str,
    runs: int,
    photons: int = 150,
    dp: float = 0.0,
    source: SpectralSource | None = None,
    rng=None,
    *,
    d: float = 1.0,
    n: int = GRID_POINTS,
    p_grid=None,
    prior: float = 0.5,
) -> PosteriorTrace:
    """One simulated experiment: ``runs`` localise-release-measure cycles."""
    if runs < 1:
        raise ValueError(f"an experiment needs at least one run, got {runs}")
    source = Monochromatic(1.0) if source is None else source
    p_grid = momentum_grid() if p_grid is None else p_grid
    traces = _experiment(truth, runs, photons, [dp], source, _seed_sequence(rng), d, n, p_grid, prior)
    return PosteriorTrace(traces[0], Truth(truth), dp)


def resolution_sweep(
    truth: Truth | str,
    dps,
    experiments: int,
    runs: int,
    photons: int = 150,
    source: SpectralSource | None = None,
    seed=None,
    *,
    d: float = 1.0,
    n: int = GRID_POINTS,
    p_grid=None,
    prior: float = 0.5,
    workers: int = 1,
    return_traces: bool = False,
):
    """Mean P_nl curves, one row per resolution in ``dps``.

    Experiment ``i`` uses the ``i``-th child of ``seed``, so results do not
    depend on ``workers``. With ``return_traces`` the full
    ``(experiments, len(dps), runs + 1)`` array is returned as well.
    """
    if experiments < 1:
        raise ValueError(f"need at least one experiment, got {experiments}")
    if runs < 1:
        raise ValueError(f"an experiment needs at least one run, got {runs}")
    dps = [float(v) for v in np.atleast_1d(dps)]
    source = Monochromatic(1.0) if source is None else source
    p_grid = momentum_grid() if p_grid is None else np.asarray(p_grid, dtype=float)
    children = _seed_sequence(seed).spawn(experiments)
    args = [(Truth(truth), runs, photons, dps, source, c, d, n, p_grid, prior) for c in children]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_experiment_star, args))
    else:
        traces = [_experiment(*a) for a in args]
    traces = np.stack(traces)
    mean = traces.mean(axis=0)
    return (mean, traces) if return_traces else mean


def _experiment_star(args):
    return _experiment(*args)


def average_experiments(
    truth: Truth | str,
    experiments: int,
    runs: int,
    photons: int = 150,
    dp: float = 0.0,
    source: SpectralSource | None = None,
    seed=None,
    **kwargs,
) -> np.ndarray:
    """Mean P_nl at each run index over independent experiments (length ``runs + 1``)."""
    return resolution_sweep(truth, [dp], experiments, runs, photons, source, seed, **kwargs)[0]


def fringe_period(q1: MomentumDensity, q2: MomentumDensity, floor: float = 0.05) -> float:
    """Mean spacing of the minima of ``q1`` where the envelope ``q2`` exceeds ``floor`` of its peak.

    Returns ``inf`` when fewer than two minima fall inside that window.
    """
    window = q2.q >= floor * q2.q.max()
    idx, _ = signal.find_peaks(-q1.q)
    idx = idx[window[idx]]
    if idx.size < 2:
        return float("inf")
    p = q1.p
    # sub-grid position of each minimum from a parabola through its neighbours
    y0, y1, y2 = q1.q[idx - 1], q1.q[idx], q1.q[idx + 1]
    denom = y0 - 2 * y1 + y2
    shift = np.where(denom > 0, 0.5 * (y0 - y2) / np.where(denom > 0, denom, 1.0), 0.0)
    pos = p[idx] + shift * q1.dp
    return float((pos[-1] - pos[0]) / (pos.size - 1))


def fringe_contrast(q: MomentumDensity, period: float, centre: float = 0.0) -> float:
    """(max - min) / (max + min) of ``q`` over one period centred on ``centre``."""
    mask = np.abs(q.p - centre) <= 0.5 * period
    if mask.sum() < 2:
        return 0.0
    hi, lo = q.q[mask].max(), q.q[mask].min()
    return float((hi - lo) / (hi + lo)) if hi + lo > 0 else 0.0
