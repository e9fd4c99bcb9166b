import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from combmem import (ControlSchedule, coupler_state, device_matched_kappa, fidelity, hold_run, make_gaussian,
                     grid_for, matched_flux, matched_kappa, reference_run, revival_period,
                     run_memory_experiment, simulate)

from conftest import single_resonator_device


def test_matched_kappa_closed_form():
    assert matched_kappa(4.38e6, 6e6) == 2 * np.pi * 4.38e6**2 / 6e6
    assert matched_kappa(4.85e6, 6e6) == pytest.approx(24.6e6, rel=2e-3)
    assert matched_kappa(8.76e6, 6e6) == pytest.approx(4 * matched_kappa(4.38e6, 6e6))


@settings(max_examples=50)
@given(g=st.floats(1e5, 1e8), d=st.floats(1e5, 1e8), c=st.floats(0.01, 100))
def test_matched_kappa_homogeneous(g, d, c):
    assert matched_kappa(c * g, c * d) == pytest.approx(c * matched_kappa(g, d), rel=1e-12)


def test_matched_kappa_rejects_bad_input():
    with pytest.raises(ValueError):
        matched_kappa(0, 6e6)
    with pytest.raises(ValueError):
        matched_kappa(4e6, -1)


def test_matched_flux(ideal):
    dev = ideal.device
    x = matched_flux(dev, 20e6)
    assert x == pytest.approx(0.33, abs=0.005)
    assert abs(coupler_state(x, dev.coupler).kappa - 20e6) < 1e3
    assert matched_flux(dev, 0) == dev.coupler.switch_off_flux
    with pytest.raises(ValueError, match="out of coupler range"):
        matched_flux(dev, 10 * coupler_state(0.5, dev.coupler).kappa)


@settings(max_examples=25, deadline=None)
@given(x=st.floats(0.01, 0.5))
def test_matched_flux_round_trip(ideal, x):
    k = coupler_state(x, ideal.device.coupler).kappa
    assert matched_flux(ideal.device, k) == pytest.approx(x, abs=1e-9)


def test_device_matched_kappa(ideal):
    assert device_matched_kappa(ideal.device) == pytest.approx(matched_kappa(4.38e6, 6e6), rel=1e-9)


def test_ideal_first_release(ideal_runs):
    run = ideal_runs[0]
    assert run.report.F >= 0.9
    assert run.storage_time == pytest.approx(1 / 6e6, rel=0.01)


def test_fidelity_nearly_flat_without_loss(ideal_runs):
    # only dispersive leakage: at most 1 % change per cycle
    F = [r.report.F for r in ideal_runs]
    for a, b in zip(F, F[1:]):
        assert abs(b - a) <= 0.01


def test_switched_off_run_equals_reference(ideal, pulse):
    ref = reference_run(ideal.device, pulse, 500e-9)
    mode = make_gaussian(pulse, grid_for(pulse, 1e-10, 500e-9), 6e9)
    held = simulate(ideal.device, mode, ControlSchedule.constant(0, 1, 0.0))
    rep = fidelity(ref.output, held.output)
    assert rep.F == pytest.approx(1, abs=1e-12)
    assert rep.response_energy == pytest.approx(1, abs=1e-12)


def test_revival_equidistant(ideal):
    res = hold_run(ideal.device, ideal.pulse, 1e-6)
    assert revival_period(res, (100e-9, 250e-9)) == pytest.approx(1 / 6e6, rel=0.01)


def test_revival_search_range_checked(ideal):
    res = hold_run(ideal.device, ideal.pulse, 0.5e-6)
    with pytest.raises(ValueError, match="search_range"):
        revival_period(res, (0.4e-6, 0.9e-6))


def test_revival_single_resonator(pulse):
    dev = single_resonator_device()
    mode = make_gaussian(pulse, grid_for(pulse, 1e-10, 600e-9), dev.reference_input_frequency)
    res = simulate(dev, mode, ControlSchedule.constant(0, 1, 0.3))
    with pytest.raises(ValueError, match="no revival"):
        revival_period(res, (50e-9, 200e-9))


def test_memory_experiment_needs_cycles(ideal):
    with pytest.raises(ValueError):
        run_memory_experiment(ideal.device, ideal.pulse, [])


def test_full_window_scores_whole_trace(ideal):
    rel, full = (run_memory_experiment(ideal.device, ideal.pulse, [1], window=w)[0] for w in ("release", "full"))
    assert full.report.response_energy > rel.report.response_energy


def test_lossless_hold_conserves_energy(ideal):
    res = hold_run(ideal.device, ideal.pulse, 10e-6)
    t1 = res.schedule.segments[1].t_start + 5e-9     # past the switch-off ramp
    e = res.stored_energy[res.t >= t1]
    assert np.ptp(e) / e[0] < 1e-6


def test_revival_preserves_superposition_magnitude(ideal):
    res = hold_run(ideal.device, ideal.pulse, 1e-6)
    k = int(np.searchsorted(res.t, res.schedule.segments[1].t_start + 10e-9))
    shift = int(round(1 / 6e6 / res.dt))
    s = np.abs(res.internal_superposition)
    # 2% of the peak: pointwise ratios are meaningless at the dark-state nulls
    np.testing.assert_allclose(s[k + shift:k + 3 * shift], s[k:k + 2 * shift], rtol=0, atol=0.02 * s.max())
