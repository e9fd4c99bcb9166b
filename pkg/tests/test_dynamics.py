import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import simpson

from combmem import (ControlSchedule, PulseSpec, ResonatorBank, TemporalMode, coupler_state, free_evolution,
                     grid_for, make_gaussian, simulate, steady_state_reflection)
from combmem.dynamics import reflection, system_matrix


def _pulse_run(dev, flux, pulse, t_end, dt=1e-10):
    mode = make_gaussian(pulse, grid_for(pulse, dt, t_end), dev.reference_input_frequency)
    return simulate(dev, mode, ControlSchedule.constant(0, mode.t_end + dt, flux), dt)


def test_switched_off_device_reflects_input(ideal, pulse):
    res = _pulse_run(ideal.device, 0.0, pulse, 500e-9)
    np.testing.assert_allclose(res.output.samples, -res.input.samples, atol=1e-15)
    assert np.all(res.stored_energy == 0)


def test_single_mode_cw_transient_closed_form(ideal):
    # g = 0 leaves the common resonator alone: a(t) = a_ss (1 - exp(lambda t))
    bank = dataclasses.replace(ideal.device.bank, couplings=(0.0,) * 4)
    dev = dataclasses.replace(ideal.device, bank=bank)
    st0 = coupler_state(0.33, dev.coupler)
    dt, n = 1e-10, 3001
    res = simulate(dev, TemporalMode(0, dt, np.ones(n), 6e9), ControlSchedule.constant(0, 1, 0.33), dt)
    lam = system_matrix(dev, st0.kappa, st0.common_pull)[0, 0]
    a_ss = -np.sqrt(2 * np.pi * st0.kappa) / lam
    np.testing.assert_allclose(res.a_c, a_ss * (1 - np.exp(lam * res.t)), atol=1e-9 * abs(a_ss))


def test_rk4_matches_eigendecomposition(ideal, pulse):
    res = _pulse_run(ideal.device, 0.33, pulse, 700e-9)
    k = int(np.searchsorted(res.t, 500e-9))
    y0 = np.concatenate([[res.a_c[k]], res.b[k]])
    st0 = coupler_state(0.33, ideal.device.coupler)
    taus = res.t[k:] - res.t[k]
    ys = free_evolution(ideal.device, y0, taus, st0.kappa, st0.common_pull)
    np.testing.assert_allclose(ys[:, 0], res.a_c[k:], atol=1e-8 * np.abs(y0).max())
    np.testing.assert_allclose(ys[:, 1:], res.b[k:], atol=1e-8 * np.abs(y0).max())


def test_lossless_flux_balance(ideal, pulse):
    res = _pulse_run(ideal.device, 0.33, pulse, 1e-6)
    net = simpson(np.abs(res.input.samples) ** 2 - np.abs(res.output.samples) ** 2, x=res.t)
    e_in = simpson(np.abs(res.input.samples) ** 2, x=res.t)
    assert abs(res.stored_energy[-1] - net) / e_in < 1e-6


def test_linearity(ideal, pulse):
    a = _pulse_run(ideal.device, 0.33, pulse, 500e-9)
    b = _pulse_run(ideal.device, 0.33, dataclasses.replace(pulse, amplitude=2.5), 500e-9)
    np.testing.assert_allclose(b.output.samples, 2.5 * a.output.samples, atol=1e-12)


def test_cw_simulation_reaches_steady_state(ideal):
    f = 5.997e9
    dev = dataclasses.replace(ideal.device, reference_input_frequency=f)
    dt, T = 2e-10, 3e-6
    n = int(T / dt) + 1
    res = simulate(dev, TemporalMode(0, dt, np.ones(n), f), ControlSchedule.constant(0, 1, 0.33), dt)
    assert abs(res.output.samples[-1] - steady_state_reflection(ideal.device, f, 0.33)) < 1e-3


def test_step_too_coarse(ideal, pulse):
    mode = make_gaussian(pulse, grid_for(pulse, 1e-9, 500e-9), 6e9)
    with pytest.raises(ValueError, match="step too coarse"):
        # common resonator 150 MHz from the frame at flux 0
        simulate(ideal.device, mode, ControlSchedule.constant(0, 1, 0.0), 1e-9)


def test_frame_mismatch(ideal, pulse):
    mode = make_gaussian(pulse, grid_for(pulse, 1e-10, 500e-9), 5.9e9)
    with pytest.raises(ValueError, match="frame"):
        simulate(ideal.device, mode, ControlSchedule.constant(0, 1, 0.33))


def test_schedule_must_cover_span(ideal, pulse):
    mode = make_gaussian(pulse, grid_for(pulse, 1e-10, 500e-9), 6e9)
    with pytest.raises(ValueError, match="does not cover"):
        simulate(ideal.device, mode, ControlSchedule.constant(0, 300e-9, 0.33))


def test_reflection_switched_off_is_minus_one(ideal):
    f = np.linspace(5.98e9, 6.02e9, 101)
    np.testing.assert_array_equal(steady_state_reflection(ideal.device, f, 0.0), -1)


def test_lossless_reflection_is_unimodular(ideal):
    f = np.linspace(5.95e9, 6.05e9, 2001)
    s = steady_state_reflection(ideal.device, f, 0.33)
    np.testing.assert_allclose(np.abs(s), 1, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(flux=st.floats(0.0, 0.45), f=st.floats(5.9e9, 6.1e9), q=st.floats(1e3, 1e7))
def test_passive_reflection_bounded(ideal, flux, f, q):
    bank = ResonatorBank.equidistant(6.15e9, 5.991e9, 6e6, 4, 4.38e6, q, q)
    dev = dataclasses.replace(ideal.device, bank=bank)
    assert abs(steady_state_reflection(dev, f, flux)) <= 1 + 1e-12


def test_reflection_vectorises(ideal):
    k = np.array([[1e6], [2e7]])
    s = reflection(ideal.device, np.linspace(5.99e9, 6.01e9, 5), k, -7.5 * k)
    assert s.shape == (2, 5)
