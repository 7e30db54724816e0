import pytest
from scipy import constants

from relloc.errors import InvalidParameterError
from relloc.tof import TofParameters, tof_resolution


def test_rubidium_default():
    res = tof_resolution(TofParameters())
    oracle = 0.5 * constants.h / 400e-9 * 5e-3 / (87 * constants.atomic_mass)
    assert res.resolution == pytest.approx(oracle, rel=1e-12)
    assert res.resolution == pytest.approx(28.67e-6, rel=0.01)


def test_window_span_and_detector():
    res = tof_resolution(TofParameters(), p_max=8.0)
    assert res.window_span == pytest.approx(32 * res.resolution, rel=1e-12)
    assert res.fits_detector
    assert not tof_resolution(TofParameters(detector_length=1e-4)).fits_detector


def test_scaling():
    base = tof_resolution(TofParameters()).resolution
    assert tof_resolution(TofParameters(flight_time=10e-3)).resolution == pytest.approx(2 * base)
    assert tof_resolution(TofParameters(mass_amu=174)).resolution == pytest.approx(base / 2)
    assert tof_resolution(TofParameters(wavelength=800e-9)).resolution == pytest.approx(base / 2)


def test_zero_time_or_resolution():
    assert tof_resolution(TofParameters(flight_time=0.0)).resolution == 0.0
    assert tof_resolution(TofParameters(dp=0.0)).resolution == 0.0


@pytest.mark.parametrize("kw", [dict(mass_amu=0), dict(wavelength=-1e-9), dict(flight_time=-1.0),
                                dict(dp=-0.1), dict(detector_length=0.0)])
def test_invalid_parameters(kw):
    with pytest.raises(InvalidParameterError):
        TofParameters(**kw)
