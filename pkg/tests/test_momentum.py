import numpy as np
import pytest
from scipy import stats

from relloc.errors import InvalidGridError
from relloc.momentum import MomentumDensity, check_momentum_grid, momentum_grid, transform_density
from relloc.wave1d import RelativeWavefunction1D, flat_state, momentum_density


def test_grid_symmetric_and_uniform():
    p = momentum_grid()
    assert p.size == 1025 and p[0] == -8.0 and p[-1] == 8.0
    assert np.array_equal(p, -p[::-1])
    assert p[512] == 0.0


@pytest.mark.parametrize("p_max, bins", [(8.0, 1), (0.0, 11), (-1.0, 11)])
def test_grid_rejects_bad_parameters(p_max, bins):
    with pytest.raises(InvalidGridError):
        momentum_grid(p_max, bins)


def test_non_uniform_grid_rejected():
    with pytest.raises(InvalidGridError):
        check_momentum_grid([0.0, 1.0, 3.0])
    with pytest.raises(InvalidGridError):
        check_momentum_grid([1.0, 0.0, -1.0])


def test_flat_state_is_dirichlet_kernel():
    s = flat_state()
    q = momentum_density(s)
    p = q.p
    a = np.pi * p * s.dx
    with np.errstate(invalid="ignore", divide="ignore"):
        oracle = np.where(p == 0, s.n**2, np.sin(s.n * a) ** 2 / np.sin(a) ** 2)
    oracle /= oracle.sum() * q.dp
    np.testing.assert_allclose(q.q, oracle, rtol=1e-9, atol=1e-12)


def test_flat_state_close_to_sinc_squared():
    q = momentum_density(flat_state())
    oracle = np.sinc(2 * q.p) ** 2
    oracle /= oracle.sum() * q.dp
    np.testing.assert_allclose(q.q, oracle, atol=1e-3 * oracle.max())
    # zeros of the sinc at p = k/2
    for k in (1, 2, 3, 4):
        assert q.at(k / 2) < 1e-6 * q.q.max()


def test_two_peaks_give_cosine_fringes():
    s = flat_state()
    x, x0, sigma = s.x, 0.4, 0.03
    amps = np.exp(-((x - x0) ** 2) / (4 * sigma**2)) + np.exp(-((x + x0) ** 2) / (4 * sigma**2))
    state = RelativeWavefunction1D.from_amplitudes(amps, 1.0)
    q = momentum_density(state)
    oracle = np.cos(2 * np.pi * q.p * x0) ** 2 * np.exp(-8 * np.pi**2 * sigma**2 * q.p**2)
    oracle /= oracle.sum() * q.dp
    np.testing.assert_allclose(q.q, oracle, atol=1e-6 * oracle.max())


def test_density_even_for_even_state(localised_state):
    q = momentum_density(localised_state)
    np.testing.assert_allclose(q.q, q.q[::-1], rtol=1e-10, atol=1e-15)
    assert q.mass() == pytest.approx(1.0, abs=1e-12)


def test_at_clamps_outside_grid():
    p = momentum_grid(1.0, 5)
    q = MomentumDensity(p, np.array([1.0, 2.0, 3.0, 2.0, 1.0]))
    assert q.at(-5.0) == 1.0 and q.at(5.0) == 1.0
    assert q.at(0.25) == pytest.approx(2.5)


def test_sample_follows_density():
    q = momentum_density(flat_state())
    draws = q.sample(np.random.default_rng(2).random(50_000))
    edges = np.concatenate(([q.p[0] - q.dp / 2], q.p + q.dp / 2))
    cdf = np.concatenate(([0.0], np.cumsum(q.q * q.dp)))
    res = stats.kstest(draws, lambda v: np.interp(v, edges, cdf))
    assert res.pvalue > 0.01
    assert draws.min() >= edges[0] and draws.max() <= edges[-1]


def test_zero_amplitudes_give_zero_density():
    x = np.linspace(-1, 1, 8)
    q = transform_density(np.zeros(8), x, momentum_grid(2.0, 9))
    assert np.all(q.q == 0)
