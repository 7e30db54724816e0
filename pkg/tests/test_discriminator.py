import numpy as np
import pytest

from relloc.discriminator import (
    HypothesisDensities,
    PosteriorTrace,
    Truth,
    average_experiments,
    bayes_update,
    build_hypotheses,
    convolve_resolution,
    fringe_contrast,
    fringe_period,
    resolution_sweep,
    simulate_experiment,
)
from relloc.errors import EmptyHalfError, ZeroLikelihoodError
from relloc.momentum import MomentumDensity, momentum_grid
from relloc.wave1d import RelativeWavefunction1D, flat_state

SMALL = dict(n=256, p_grid=momentum_grid(8.0, 257))


def two_point_hypotheses(l1, l2):
    p = momentum_grid(1.0, 3)
    return HypothesisDensities(MomentumDensity(p, np.full(3, l1)), MomentumDensity(p, np.full(3, l2)))


# -- bayes_update ------------------------------------------------------------

def test_bayes_equal_likelihoods_keep_prior():
    assert bayes_update(0.5, 0.0, two_point_hypotheses(0.3, 0.3)) == pytest.approx(0.5)


def test_bayes_worked_example():
    # 0.5 * 0.3 / (0.5 * 0.3 + 0.5 * 0.1) = 0.75
    assert bayes_update(0.5, 0.0, two_point_hypotheses(0.3, 0.1)) == pytest.approx(0.75)
    assert bayes_update(0.2, 0.0, two_point_hypotheses(0.3, 0.1)) == pytest.approx(0.06 / 0.14)


def test_bayes_certain_priors_are_fixed_points():
    hyp = two_point_hypotheses(0.3, 0.1)
    assert bayes_update(1.0, 0.0, hyp) == 1.0
    assert bayes_update(0.0, 0.0, hyp) == 0.0


def test_bayes_zero_likelihoods_raise():
    with pytest.raises(ZeroLikelihoodError):
        bayes_update(0.5, 0.0, two_point_hypotheses(0.0, 0.0))
    with pytest.raises(ValueError):
        bayes_update(1.5, 0.0, two_point_hypotheses(0.3, 0.1))


# -- hypotheses and convolution ------------------------------------------------

def test_hypotheses_normalised(localised_state):
    hyp = build_hypotheses(localised_state)
    assert hyp.q1.mass() == pytest.approx(1.0, abs=1e-12)
    assert hyp.q2.mass() == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(hyp.p, momentum_grid())


def test_q2_has_no_fringes_q1_does(localised_state):
    hyp = build_hypotheses(localised_state)
    period = fringe_period(hyp.q1, hyp.q2)
    assert np.isfinite(period)
    assert fringe_contrast(hyp.q1, period) > 0.9
    assert fringe_contrast(hyp.q2, period) < 0.1


def test_left_half_gives_same_q2(localised_state):
    hyp = build_hypotheses(localised_state)
    mirrored = RelativeWavefunction1D(localised_state.amplitudes[::-1], localised_state.half_width)
    np.testing.assert_allclose(build_hypotheses(mirrored).q2.q, hyp.q2.q, rtol=1e-10, atol=1e-15)


def test_empty_right_half_raises():
    s = flat_state(1.0, 64)
    amps = np.where(s.x < 0, s.amplitudes, 0.0)
    with pytest.raises(EmptyHalfError):
        build_hypotheses(RelativeWavefunction1D.from_amplitudes(amps, 1.0))


def test_convolution_zero_is_identity():
    q = MomentumDensity(momentum_grid(), np.ones(1025) / 16)
    assert convolve_resolution(q, 0.0) is q
    with pytest.raises(ValueError):
        convolve_resolution(q, -0.1)


def test_convolution_of_spike_is_gaussian():
    p = momentum_grid()
    spike = np.zeros_like(p)
    spike[512] = 1 / (p[1] - p[0])
    out = convolve_resolution(MomentumDensity(p, spike), 0.5)
    oracle = np.exp(-0.5 * (p / 0.5) ** 2)
    oracle[np.abs(p) > 3.0 + 1e-12] = 0.0
    oracle /= oracle.sum() * (p[1] - p[0])
    np.testing.assert_allclose(out.q, oracle, atol=1e-12)
    assert out.mass() == pytest.approx(1.0)


def test_convolution_washes_out_fringes(localised_state):
    hyp = build_hypotheses(localised_state)
    period = fringe_period(hyp.q1, hyp.q2)
    blurred = hyp.convolved(0.5)
    assert fringe_contrast(blurred.q1, period) < 0.5 * fringe_contrast(hyp.q1, period)


def test_fringe_period_two_peak_oracle():
    s = flat_state()
    x0 = 0.4
    amps = np.exp(-((s.x - x0) ** 2) / 0.0036) + np.exp(-((s.x + x0) ** 2) / 0.0036)
    hyp = build_hypotheses(RelativeWavefunction1D.from_amplitudes(amps, 1.0))
    assert fringe_period(hyp.q1, hyp.q2) == pytest.approx(1 / (2 * x0), rel=0.01)


def test_fringe_period_without_minima_is_inf():
    p = momentum_grid()
    g = MomentumDensity(p, np.exp(-p**2))
    assert fringe_period(g, g) == float("inf")


# -- experiments ---------------------------------------------------------------

def test_trace_structure():
    tr = simulate_experiment("delocalised", 4, photons=30, rng=1, **SMALL)
    assert isinstance(tr, PosteriorTrace)
    assert tr.runs == 4 and tr.p_nl[0] == 0.5 and tr.truth is Truth.DELOCALISED
    assert np.all((tr.p_nl >= 0) & (tr.p_nl <= 1))
    np.testing.assert_allclose(tr.p_l, 1 - tr.p_nl)


def test_experiment_deterministic():
    a = simulate_experiment("localised", 3, photons=30, dp=0.25, rng=5, **SMALL)
    b = simulate_experiment("localised", 3, photons=30, dp=0.25, rng=5, **SMALL)
    assert np.array_equal(a.p_nl, b.p_nl)


def test_sweep_rows_match_single_experiments():
    mean, traces = resolution_sweep("delocalised", [0.0, 0.5], 3, 3, photons=30, seed=9,
                                    return_traces=True, **SMALL)
    assert mean.shape == (2, 4) and traces.shape == (3, 2, 4)
    single = average_experiments("delocalised", 3, 3, photons=30, dp=0.5, seed=9, **SMALL)
    np.testing.assert_array_equal(single, mean[1])


def test_sweep_independent_of_workers():
    a = resolution_sweep("delocalised", [0.0], 2, 2, photons=20, seed=4, **SMALL)
    b = resolution_sweep("delocalised", [0.0], 2, 2, photons=20, seed=4, workers=2, **SMALL)
    np.testing.assert_array_equal(a, b)


def test_experiment_argument_checks():
    with pytest.raises(ValueError):
        simulate_experiment("delocalised", 0)
    with pytest.raises(ValueError):
        resolution_sweep("delocalised", [0.0], 0, 1)
    with pytest.raises(ValueError):
        simulate_experiment("sideways", 1, photons=5, **SMALL)
