import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import bisect

from combmem import (PHI0, CouplerModel, calibrate_coupler, coupler_state, effective_mutual, flux_to_voltage,
                     junction_phase, voltage_to_flux)


def test_beta_l_of_preset(coupler):
    assert coupler.beta_l == pytest.approx(2 * np.pi * 0.65e-9 * 0.3e-6 / PHI0)
    assert coupler.beta_l < 1


@settings(max_examples=60, deadline=None)
@given(flux=st.floats(-1.0, 1.0), beta=st.floats(0.01, 0.99))
def test_junction_phase_matches_bisection(flux, beta):
    # independent oracle: plain bisection on the monotone screening relation
    lc = beta * PHI0 / (2 * np.pi * 1e-6)
    cm = CouplerModel(1e-6, lc)
    f = lambda p: p + beta * np.sin(p) - 2 * np.pi * flux
    oracle = bisect(f, 2 * np.pi * flux - 1.0, 2 * np.pi * flux + 1.0, xtol=1e-14)
    assert junction_phase(flux, cm) == pytest.approx(oracle, abs=1e-10)


def test_junction_phase_vectorised(coupler):
    x = np.linspace(-0.5, 0.5, 101)
    phi = junction_phase(x, coupler)
    assert phi.shape == x.shape
    assert np.all(np.diff(phi) > 0)
    np.testing.assert_allclose(phi + coupler.beta_l * np.sin(phi), 2 * np.pi * x, atol=1e-12)


def test_hysteretic_regime_rejected():
    cm = CouplerModel(1e-6, 1e-9)
    assert cm.beta_l > 1
    with pytest.raises(ValueError, match="hysteretic"):
        junction_phase(0.2, cm)


def test_switch_off_point_has_zero_kappa(coupler):
    st0 = coupler_state(coupler.switch_off_flux, coupler)
    assert st0.kappa == 0 and st0.common_pull == 0


def test_calibrated_operating_point(coupler):
    st0 = coupler_state(0.33, coupler)
    assert st0.kappa == pytest.approx(2 * np.pi * 4.38e6**2 / 6e6, rel=1e-12)
    assert st0.common_pull == pytest.approx(-150e6, rel=1e-12)


def test_kappa_monotone_on_operating_branch(coupler):
    x = np.linspace(0.0, 0.5, 201)
    k = coupler_state(x, coupler).kappa
    assert np.all(np.diff(k) > 0)


def test_pull_over_kappa_is_fixed(coupler):
    x = np.linspace(0.05, 0.45, 9)
    s = coupler_state(x, coupler)
    np.testing.assert_allclose(s.common_pull / s.kappa, -coupler.pull_scale / coupler.kappa_scale)


def test_effective_mutual_formula(coupler):
    phi = junction_phase(0.2, coupler)
    c = coupler.beta_l * np.cos(phi)
    assert effective_mutual(0.2, coupler) == pytest.approx(c / (1 + c))


def test_degenerate_calibration(coupler):
    with pytest.raises(ValueError, match="degenerate"):
        calibrate_coupler(1e-9, 20e6, -150e6, coupler)


def test_voltage_mapping(coupler):
    assert voltage_to_flux(0.0, coupler) == pytest.approx(0.33)
    assert flux_to_voltage(0.0, coupler) == pytest.approx(-0.22)
    v = np.linspace(-0.3, 0.1, 5)
    np.testing.assert_allclose(flux_to_voltage(voltage_to_flux(v, coupler), coupler), v, atol=1e-12)
