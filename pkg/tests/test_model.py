import numpy as np
import pytest

from combmem import ConfigError, DeviceModel, ResonatorBank, ResonatorSpec, TemporalMode, comb_statistics
from combmem.model import validate_device


def test_q_internal_round_trip():
    r = ResonatorSpec.from_q(6e9, 4.3e5)
    assert r.internal_rate == pytest.approx(6e9 / 4.3e5)
    assert r.q_internal == pytest.approx(4.3e5)
    assert ResonatorSpec(6e9).q_internal == np.inf


def test_equidistant_comb_statistics():
    bank = ResonatorBank.equidistant(6.15e9, 5.991e9, 6e6, 4, 4.38e6)
    spacing, irregularity = comb_statistics(bank)
    assert spacing == pytest.approx(6e6)
    assert irregularity == pytest.approx(0, abs=1e-3)


def test_disordered_comb_statistics(disordered):
    spacing, irregularity = comb_statistics(disordered.device.bank)
    assert spacing == pytest.approx(6e6)
    assert irregularity == pytest.approx(660e3, rel=1e-6)


def test_comb_needs_two_resonators():
    bank = ResonatorBank.equidistant(6.15e9, 6e9, 6e6, 1, 4e6)
    with pytest.raises(ValueError, match="comb undefined"):
        comb_statistics(bank)


def test_device_json_round_trip(ideal):
    dev = ideal.device
    assert DeviceModel.from_json(dev.to_json()) == dev


def test_validation_lists_violations(ideal):
    d = ideal.device.to_dict()
    d["internal"][0]["internal_rate"] = -1.0
    d["internal"][2]["frequency"] = 5.0e9
    problems = validate_device(DeviceModel.from_dict(d))
    assert any("internal_rate" in p for p in problems)
    assert any("strictly increasing" in p for p in problems)


def test_hysteretic_coupler_is_a_violation(ideal):
    d = ideal.device.to_dict()
    d["coupler"]["critical_current"] = 1e-6
    problems = validate_device(DeviceModel.from_dict(d))
    assert any("beta_L" in p for p in problems)


def test_unknown_device_key_rejected(ideal):
    d = ideal.device.to_dict()
    d["colour"] = "blue"
    with pytest.raises(ConfigError, match="unknown keys"):
        DeviceModel.from_dict(d)


def test_temporal_mode_energy_and_window():
    m = TemporalMode(0.0, 1e-9, np.ones(11))
    assert m.energy() == pytest.approx(11e-9)
    w = m.windowed(2e-9, 4e-9)
    assert np.count_nonzero(w.samples) == 3
    assert m.t_end == pytest.approx(1e-8)
