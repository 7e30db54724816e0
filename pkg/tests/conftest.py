import numpy as np
import pytest

from relloc.wave1d import flat_state, run_localisation


@pytest.fixture(scope="session")
def localised_state():
    """A 150-photon run from the flat state, d = lambda = 1."""
    state, _ = run_localisation(flat_state(), 150, rng=0)
    return state


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
