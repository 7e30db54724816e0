import numpy as np
import pytest
from scipy import constants

from relloc.errors import InvalidParameterError
from relloc.spectra import (
    Monochromatic,
    build_blackbody,
    draw_wavelength,
    parse_source,
    planck_energy_density,
    wien_peak,
)


def test_monochromatic_is_constant(rng):
    src = Monochromatic(1.0)
    assert all(draw_wavelength(src, rng) == 1.0 for _ in range(100))


def test_monochromatic_rejects_nonpositive():
    with pytest.raises(InvalidParameterError):
        Monochromatic(0.0)


def test_cdf_endpoints_exact():
    src = build_blackbody(5000.0, coverage=0.999)
    assert src.cdf[0] == 0.0 and src.cdf[-1] == 1.0
    assert np.all(np.diff(src.cdf) >= 0)
    assert src.cdf.size == 4096


def test_coverage_is_captured():
    # independent check of the tail cut: integrate u_lambda on a wide log grid
    T = 3000.0
    src = build_blackbody(T, coverage=0.99, reference_wavelength=1e-6)
    lam = np.geomspace(1e-8, 1e-2, 400001)
    u = planck_energy_density(lam, T)
    total = np.trapezoid(u, lam)
    inside = (lam >= src.lambda_min * 1e-6) & (lam <= src.lambda_max * 1e-6)
    frac = np.trapezoid(u[inside], lam[inside]) / total
    assert frac == pytest.approx(0.99, abs=2e-4)


def test_temperature_scaling_of_window():
    a = build_blackbody(3000.0)
    b = build_blackbody(6000.0)
    assert b.lambda_min == pytest.approx(a.lambda_min / 2, rel=1e-6)
    assert b.lambda_max == pytest.approx(a.lambda_max / 2, rel=1e-6)


@pytest.mark.parametrize("T", [0.0, -10.0])
def test_bad_temperature(T):
    with pytest.raises(InvalidParameterError):
        build_blackbody(T)


@pytest.mark.parametrize("coverage", [0.0, 1.0, 1.5])
def test_bad_coverage(coverage):
    with pytest.raises(InvalidParameterError):
        build_blackbody(3000.0, coverage=coverage)


def test_samples_within_window(rng):
    src = build_blackbody(4000.0)
    lam = src.inverse_cdf(rng.random(100_000))
    assert lam.min() >= src.lambda_min and lam.max() <= src.lambda_max


def test_inverse_cdf_monotone(rng):
    src = build_blackbody(4000.0)
    u = np.sort(rng.random(10_000))
    assert np.all(np.diff(src.inverse_cdf(u)) >= 0)


def test_mode_at_wien_peak():
    T = 2897.771955  # peak at one micrometre
    src = build_blackbody(T, reference_wavelength=1e-6)
    rng = np.random.default_rng(2)
    lam = np.array([draw_wavelength(src, rng) for _ in range(1000)])  # exercise the scalar path too
    lam = np.concatenate([lam, src.inverse_cdf(rng.random(999_000))])
    counts, edges = np.histogram(lam, bins=200, range=(0.0, 5.0))
    width = edges[1] - edges[0]
    mode = 0.5 * (edges[:-1] + edges[1:])[np.argmax(counts)]
    peak = constants.Wien / T / 1e-6
    assert peak == pytest.approx(1.0, rel=1e-9)
    assert abs(mode - peak) <= 2 * width


def test_number_weighting_shifts_to_longer_wavelengths(rng):
    e = build_blackbody(4000.0, weighting="energy")
    n = build_blackbody(4000.0, weighting="number")
    u = rng.random(200_000)
    assert np.mean(n.inverse_cdf(u)) > np.mean(e.inverse_cdf(u))


def test_wien_peak_value():
    assert wien_peak(5000.0) == pytest.approx(2.897771955e-3 / 5000.0)


def test_parse_source():
    assert parse_source("mono:0.5").wavelength == 0.5
    bb = parse_source("blackbody:3000", reference_wavelength=5e-7)
    assert bb.temperature == 3000.0 and bb.reference_wavelength == 5e-7
    with pytest.raises(InvalidParameterError):
        parse_source("laser:1")
    with pytest.raises(InvalidParameterError):
        parse_source("blackbody:")
