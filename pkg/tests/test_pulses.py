import numpy as np
import pytest

from combmem import PulseSpec, TemporalMode, grid_for, make_gaussian, spectral_fwhm
from combmem.pulses import TIME_BANDWIDTH


def test_time_bandwidth_constant():
    assert TIME_BANDWIDTH == pytest.approx(4 * np.log(2) / np.pi)
    assert PulseSpec(57e-9, 0).spectral_fwhm == pytest.approx(15.48e6, rel=1e-3)


def test_envelope_half_maximum():
    p = PulseSpec(57e-9, 200e-9)
    assert abs(p.envelope(200e-9)) == pytest.approx(1)
    assert abs(p.envelope(200e-9 + 28.5e-9)) == pytest.approx(0.5)


@pytest.mark.parametrize("fwhm", [20e-9, 57e-9, 150e-9])
def test_fft_bandwidth_matches_oracle(fwhm):
    p = PulseSpec(fwhm, 6 * fwhm)
    mode = make_gaussian(p, grid_for(p, 0.1e-9, 12 * fwhm))
    assert spectral_fwhm(mode) == pytest.approx(TIME_BANDWIDTH / fwhm, rel=2e-3)


def test_energy_closed_form_against_quadrature():
    p = PulseSpec(57e-9, 400e-9, amplitude=0.7)
    mode = make_gaussian(p, grid_for(p, 0.05e-9, 800e-9))
    assert mode.energy() == pytest.approx(p.energy, rel=1e-9)
    assert p.energy == pytest.approx(0.49 * 57e-9 * np.sqrt(np.pi / (8 * np.log(2))))


def test_carrier_detuning_shifts_spectrum():
    p = PulseSpec(57e-9, 300e-9, carrier_detuning=5e6)
    mode = make_gaussian(p, grid_for(p, 0.1e-9, 600e-9))
    n = 16 * len(mode)
    spec = np.abs(np.fft.fft(mode.samples, n))
    freqs = np.fft.fftfreq(n, mode.dt)
    assert freqs[np.argmax(spec)] == pytest.approx(5e6, abs=2 * 1 / (n * mode.dt))


def test_truncated_grid_rejected():
    p = PulseSpec(57e-9, 100e-9)
    with pytest.raises(ValueError, match="pulse truncated"):
        make_gaussian(p, grid_for(p, 1e-10, 200e-9))


def test_invalid_pulse():
    with pytest.raises(ValueError):
        PulseSpec(-1e-9, 0)
    with pytest.raises(ValueError):
        PulseSpec(1e-9, 0, shape="square")


def test_spectral_fwhm_needs_band():
    with pytest.raises(ValueError):
        # an impulse has a flat spectrum with no half-maximum crossing
        spectral_fwhm(TemporalMode(0, 1e-9, np.eye(1, 8, 3)[0]), pad=1)
