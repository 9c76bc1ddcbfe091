import math

import numpy as np
from numpy.testing import assert_allclose
import pytest

from leo_spectra.physics.antenna import (
    FIRST_NULL,
    BeamPattern,
    PatternKind,
    beamwidth_from_k,
    bessel_ratio,
    combined_gain,
    gain,
    half_power_angle,
)
from leo_spectra.utils.errors import PatternDomainError


@pytest.fixture
def pattern() -> BeamPattern:
    return BeamPattern.from_degrees(10.0)


def test_peak_is_exactly_one(pattern):
    assert gain(pattern, 0.0) == 1.0


def test_first_null(pattern):
    assert gain(pattern, math.radians(10.0)) <= 1e-6


def test_small_angle_series(pattern):
    theta = 1e-5
    x = pattern.k * math.sin(theta)
    assert gain(pattern, theta) == pytest.approx(1 - x**2 / 4, abs=1e-12)
    assert_allclose(bessel_ratio(np.array([0.0, 1e-4, 2e-3])), [0.5, 0.5, 0.5], atol=1e-6)


def test_k_round_trip():
    for deg in (1.0, 5.0, 10.0, 20.0, 40.0, 89.0):
        p = BeamPattern.from_degrees(deg)
        assert math.sin(p.first_null_beamwidth) == pytest.approx(FIRST_NULL / p.k, abs=1e-12)
        assert beamwidth_from_k(p.k) == pytest.approx(p.first_null_beamwidth, abs=1e-12)


def test_k_below_first_null():
    with pytest.raises(PatternDomainError):
        beamwidth_from_k(1.0)


def test_global_maximum_at_boresight(pattern):
    theta = np.linspace(0, math.pi / 2, 10_000)
    values = pattern.gain(theta)
    assert int(np.argmax(values)) == 0
    assert np.all((values >= 0) & (values <= 1))


def test_envelope_is_monotone_upper_bound(pattern):
    theta = np.linspace(0, math.pi / 2, 10_000)
    bessel = pattern.gain(theta)
    envelope = pattern.envelope().gain(theta)
    assert np.all(np.diff(envelope) <= 1e-15)
    assert np.all(envelope >= bessel - 1e-15)
    assert envelope[0] == pytest.approx(1.0)


def test_no_sidelobe_pattern(pattern):
    no_lobe = pattern.without_sidelobes()
    assert no_lobe.kind == PatternKind.NO_SIDELOBE
    assert no_lobe.gain(math.radians(10.0)) == 0.0
    assert no_lobe.gain(math.radians(30.0)) == 0.0
    assert no_lobe.gain(math.radians(3.0)) == pytest.approx(pattern.gain(math.radians(3.0)))


def test_back_hemisphere_uses_horizontal_value(pattern):
    assert pattern.gain(math.radians(120.0)) == pytest.approx(pattern.gain(math.pi / 2))


@pytest.mark.parametrize("theta", [-0.1, float("nan")])
def test_bad_angles(pattern, theta):
    with pytest.raises(PatternDomainError):
        pattern.gain(theta)


def test_bad_beamwidth():
    with pytest.raises(PatternDomainError):
        BeamPattern.from_degrees(0.0)
    with pytest.raises(PatternDomainError):
        BeamPattern.from_degrees(95.0)


def test_combined_gain():
    sat = BeamPattern.from_degrees(10.0)
    gs = BeamPattern.from_degrees(20.0)
    assert combined_gain(sat, gs, 0.0, 0.0) == 1.0
    five = math.radians(5.0)
    assert combined_gain(sat, gs, five, five) == pytest.approx(sat.gain(five) * gs.gain(five))
    assert combined_gain(sat.without_sidelobes(), gs, math.radians(10.0), 0.0) == 0.0


def test_half_power_angle(pattern):
    theta = half_power_angle(pattern)
    assert pattern.gain(theta) == pytest.approx(0.5, abs=1e-6)
    # Commonly quoted as 1.6216; the exact half-power point of 4(J1(x)/x)² is near 1.6163
    assert pattern.k * math.sin(theta) == pytest.approx(1.6216, abs=0.01)
    assert theta < pattern.first_null_beamwidth
