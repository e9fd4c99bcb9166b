"""RF-SQUID active coupler: flux to (external linewidth, common-resonator pull).

The junction phase follows the non-hysteretic screening relation

    phi + beta_L * sin(phi) = 2*pi*flux,

with ``beta_L = 2*pi*L*I_c/Phi_0 < 1``. The coupler acts through an effective
dimensionless mutual ``m = beta_L cos(phi) / (1 + beta_L cos(phi))``; both the
external linewidth and the (negative) common-resonator pull grow
quadratically with ``m - m_off``, where ``m_off`` is the mutual at the
switching-off flux.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.constants import physical_constants

from .exceptions import ConfigError, check_keys

PHI0 = physical_constants["mag. flux quantum"][0]


@dataclass(frozen=True)
class CouplerModel:
    """Josephson and calibration parameters of the RF-SQUID coupler.

    ``loop_inductance`` must already include any wire-bond parasitic; the
    separate ``wirebond_inductance`` field only records that contribution.
    Flux quantities are in units of the flux quantum.
    """

    critical_current: float
    loop_inductance: float
    wirebond_inductance: float = 0.0
    flux_per_volt: float = 1.0
    kappa_scale: float = 1.0
    pull_scale: float = 1.0
    flux_offset: float = 0.0
    switch_off_flux: float = 0.0

    @property
    def beta_l(self) -> float:
        return 2 * np.pi * self.loop_inductance * self.critical_current / PHI0

    def violations(self) -> list[str]:
        out = []
        if not self.critical_current > 0:
            out.append("critical_current: must be > 0")
        if not self.loop_inductance > 0:
            out.append("loop_inductance: must be > 0")
        if not self.wirebond_inductance >= 0:
            out.append("wirebond_inductance: must be >= 0")
        if not out and not self.beta_l < 1:
            out.append(f"beta_L = {self.beta_l:.4g}: must be < 1 (non-hysteretic)")
        if self.kappa_scale < 0 or self.pull_scale < 0:
            out.append("kappa_scale/pull_scale: must be >= 0")
        return out

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CouplerModel":
        names = {f.name for f in dataclasses.fields(cls)}
        check_keys(d, names, "coupler")
        try:
            return cls(**{k: float(v) for k, v in d.items()})
        except TypeError as exc:
            raise ConfigError(f"coupler: {exc}") from None


@dataclass(frozen=True)
class CouplerState:
    kappa: float
    common_pull: float


def _check_regime(model: CouplerModel) -> float:
    beta = model.beta_l
    if not beta < 1:
        raise ValueError(f"hysteretic regime unsupported (beta_L = {beta:.4g})")
    return beta


def junction_phase(flux, model: CouplerModel):
    """Solve ``phi + beta_L sin(phi) = 2 pi flux`` for the junction phase.

    Safeguarded Newton iteration inside the bracket
    ``[2 pi flux - beta_L, 2 pi flux + beta_L]``; a Newton step that leaves
    the bracket is replaced by bisection. Vectorised over ``flux``.
    """
    beta = _check_regime(model)
    target = 2 * np.pi * np.asarray(flux, dtype=float)
    lo, hi = target - beta, target + beta
    phi = target.copy()
    for _ in range(100):
        res = phi + beta * np.sin(phi) - target
        if np.all(np.abs(res) < 1e-13):
            break
        lo = np.where(res < 0, phi, lo)
        hi = np.where(res > 0, phi, hi)
        step = phi - res / (1 + beta * np.cos(phi))
        inside = (step > lo) & (step < hi)
        phi = np.where(res == 0, phi, np.where(inside, step, 0.5 * (lo + hi)))
    return phi if phi.ndim else float(phi)


def effective_mutual(flux, model: CouplerModel):
    beta = model.beta_l
    c = beta * np.cos(junction_phase(flux, model))
    return c / (1 + c)


def coupler_state(flux, model: CouplerModel) -> CouplerState:
    """External linewidth and common-resonator pull at ``flux`` (flux quanta).

    Array input gives a CouplerState holding arrays.
    """
    d = effective_mutual(flux, model) - effective_mutual(model.switch_off_flux, model)
    d2 = d * d
    if np.ndim(d2) == 0:
        d2 = float(d2)
    return CouplerState(model.kappa_scale * d2, -model.pull_scale * d2)


def calibrate_coupler(target_flux: float, target_kappa: float, target_pull: float,
                      model: CouplerModel) -> CouplerModel:
    """Set ``kappa_scale`` and ``pull_scale`` so ``coupler_state(target_flux)`` hits the targets."""
    if not target_kappa > 0:
        raise ValueError("target_kappa must be > 0")
    if not target_pull < 0:
        raise ValueError("target_pull must be < 0")
    if not 0 < target_flux < 0.5:
        raise ValueError("target_flux must lie in (0, 0.5)")
    d = effective_mutual(target_flux, model) - effective_mutual(model.switch_off_flux, model)
    if abs(d) < 1e-12:
        raise ValueError("degenerate calibration point: mutual equals its switching-off value")
    return dataclasses.replace(model, kappa_scale=float(target_kappa / d**2), pull_scale=float(-target_pull / d**2))


def voltage_to_flux(voltage, model: CouplerModel):
    flux = model.flux_offset + model.flux_per_volt * np.asarray(voltage, dtype=float)
    return flux if flux.ndim else float(flux)


def flux_to_voltage(flux, model: CouplerModel):
    return (np.asarray(flux, dtype=float) - model.flux_offset) / model.flux_per_volt
