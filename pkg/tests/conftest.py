import numpy as np
import pytest

from combmem import (CouplerModel, DeviceModel, PulseSpec, ResonatorBank, calibrate_coupler, load_preset,
                     matched_kappa, run_memory_experiment)

G = 4.38e6
SPACING = 6e6


@pytest.fixture(scope="session")
def ideal():
    return load_preset("paper-ideal")


@pytest.fixture(scope="session")
def disordered():
    return load_preset("paper-disordered")


@pytest.fixture(scope="session")
def measured():
    return load_preset("paper-measured")


@pytest.fixture(scope="session")
def coupler():
    base = CouplerModel(0.3e-6, 0.65e-9, 0.5e-9, flux_per_volt=1.5, flux_offset=0.33)
    return calibrate_coupler(0.33, matched_kappa(G, SPACING), -150e6, base)


@pytest.fixture(scope="session")
def pulse():
    return PulseSpec(57e-9, 250e-9)


@pytest.fixture(scope="session")
def ideal_runs(ideal):
    return run_memory_experiment(ideal.device, ideal.pulse, [1, 2, 3], keep_results=True, jobs=3)


def single_resonator_device(f_r=6.0e9, kappa_frame=6.0e9):
    """One internal resonator far from the common one: handy for limits."""
    cm = CouplerModel(0.3e-6, 0.65e-9)
    bank = ResonatorBank.equidistant(6.15e9, f_r, 1e6, 1, 1e6)
    return DeviceModel(bank, cm, kappa_frame)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
