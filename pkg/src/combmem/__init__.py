"""Simulation and analysis toolkit for a multi-resonator microwave quantum memory.

A common resonator couples to a waveguide through a flux-tunable RF-SQUID
coupler and to a comb of high-Q internal resonators. The package models the
coupler, integrates the coupled-mode equations, builds record/store/release
protocols and scores retrieved pulses.
"""
from .calibration import (MemoryRun, device_matched_kappa, hold_run, matched_flux, matched_kappa,
                          recording_run, reference_run, revival_period, run_memory_experiment)
from .config import ExperimentConfig, load_config, parse_config
from .coupler import (PHI0, CouplerModel, CouplerState, calibrate_coupler, coupler_state, effective_mutual,
                      flux_to_voltage, junction_phase, voltage_to_flux)
from .dynamics import SimulationResult, SystemState, free_evolution, simulate, steady_state_reflection
from .exceptions import ConfigError
from .metrics import DecayFit, FidelityReport, efficiency, effective_q, estimate_photons, fidelity, fit_decay
from .model import (DeviceModel, ResonatorBank, ResonatorSpec, TemporalMode, comb_statistics,
                    validate_device)
from .presets import load_preset, preset_names
from .pulses import PulseSpec, grid_for, make_gaussian, spectral_fwhm
from .schedule import (ControlSchedule, Segment, build_protocol, detect_dark_states, storage_time,
                       switching_instant)
from .spectroscopy import (ResonanceFit, fit_resonance, initial_reflection_map, reflection_resonance,
                           spectroscopy_map)

__version__ = "0.1.0"
