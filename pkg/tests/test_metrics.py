import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from combmem import (PulseSpec, TemporalMode, efficiency, effective_q, estimate_photons, fidelity, fit_decay,
                     grid_for, make_gaussian, reference_run)
from combmem.metrics import PHOTON_CONVENTIONS


@pytest.fixture(scope="module")
def ref():
    p = PulseSpec(57e-9, 250e-9)
    return make_gaussian(p, grid_for(p, 1e-10, 500e-9))


def test_identity(ref):
    assert fidelity(ref, ref).F == pytest.approx(1, abs=1e-12)


def test_half_amplitude(ref):
    assert fidelity(ref, ref.scaled(0.5)).F == pytest.approx(0.25, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(shift=st.integers(-500, 500), phase=st.floats(-np.pi, np.pi))
def test_delayed_rotated_copy(ref, shift, phase):
    s = np.roll(np.pad(ref.samples, 600), shift)
    f = TemporalMode(ref.t0 - 600 * ref.dt, ref.dt, np.pad(ref.samples, 600))
    g = TemporalMode(f.t0, f.dt, np.exp(1j * phase) * s)
    rep = fidelity(f, g)
    assert rep.F == pytest.approx(1, abs=1e-9)
    assert rep.best_lag == pytest.approx(shift * ref.dt, abs=1e-15)


def test_lag_accounts_for_time_origin(ref):
    later = TemporalMode(ref.t0 + 300e-9, ref.dt, ref.samples)
    assert fidelity(ref, later).best_lag == pytest.approx(300e-9)


def test_window_restricts_response(ref):
    rep = fidelity(ref, ref, window=(0, 250e-9))
    assert rep.response_energy == pytest.approx(0.5, abs=0.01)


def test_mismatched_dt_rejected(ref):
    with pytest.raises(ValueError):
        fidelity(ref, TemporalMode(0, 2e-10, ref.samples))


def test_reference_run_efficiency(ideal, pulse):
    res = reference_run(ideal.device, pulse, 500e-9)
    assert efficiency(res, (0, 500e-9)) == pytest.approx(1, rel=1e-9)


@pytest.mark.parametrize("T,A", [(11.44e-6, 0.97), (2e-6, 0.5), (50e-6, 1.0)])
def test_fit_decay_round_trip(T, A):
    t = np.linspace(0.17e-6, 10e-6, 12)
    fit = fit_decay(t, A * np.exp(-t / T), 5.992e9)
    assert fit.T_decay == pytest.approx(T, rel=1e-6)
    assert fit.amplitude == pytest.approx(A, rel=1e-6)
    assert fit.Q_eff == pytest.approx(2 * np.pi * 5.992e9 * T, rel=1e-6)


def test_fit_decay_flat_series():
    fit = fit_decay([1e-6, 2e-6, 3e-6], [0.9, 0.9, 0.9], 6e9)
    assert fit.T_decay == np.inf
    assert fit.to_dict()["T_decay"] is None


def test_fit_decay_errors():
    with pytest.raises(ValueError):
        fit_decay([1e-6, 2e-6], [0.9, 0.8], 6e9)
    with pytest.raises(ValueError, match="non-positive"):
        fit_decay([1e-6, 2e-6, 3e-6], [0.9, 0.0, 0.5], 6e9)


def test_effective_q_arithmetic():
    assert effective_q(5.992e9, 11.44e-6) == pytest.approx(4.307e5, rel=1e-3)


def test_photon_estimate():
    n = estimate_photons(-135, 57e-9, 6e9)
    assert n == pytest.approx(0.4826, rel=1e-3)
    rect = estimate_photons(-135, 57e-9, 6e9, "rectangular")
    assert n / rect == pytest.approx(PHOTON_CONVENTIONS["gaussian-amplitude"])
    # 10 dB more power, ten times the photons
    assert estimate_photons(-125, 57e-9, 6e9) == pytest.approx(10 * n)


def test_photon_estimate_rejects_bad_input():
    with pytest.raises(ValueError):
        estimate_photons(-135, 0, 6e9)
    with pytest.raises(KeyError):
        estimate_photons(-135, 57e-9, 6e9, "triangle")
