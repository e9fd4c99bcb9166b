"""Temporal-mode fidelity, efficiency, decay fits and photon-number estimates."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import h as PLANCK
from scipy.signal import correlate

from .model import TemporalMode


@dataclass(frozen=True)
class FidelityReport:
    """Best normalized cross-correlation between a reference and a response.

    ``best_lag`` is positive when the response is delayed relative to the
    reference. ``correlation[i]`` is evaluated at ``lags[i]``.
    """

    F: float
    best_lag: float
    response_energy: float
    correlation: np.ndarray = field(repr=False)
    lags: np.ndarray = field(repr=False)

    def to_dict(self, with_trace: bool = False) -> dict:
        d = {"F": self.F, "best_lag": self.best_lag, "response_energy": self.response_energy}
        if with_trace:
            d["lags"] = self.lags.tolist()
            d["correlation"] = self.correlation.tolist()
        return d


@dataclass(frozen=True)
class DecayFit:
    T_decay: float
    amplitude: float
    residual_rms: float
    Q_eff: float
    f_ref: float

    def to_dict(self) -> dict:
        return {k: (None if np.isinf(v) else v) for k, v in self.__dict__.items()}


def fidelity(reference: TemporalMode, response: TemporalMode,
             window: tuple[float, float] | None = None) -> FidelityReport:
    """Maximum over integer-sample lags of ``|sum_t f(t) g*(t + tau)|^2``.

    The reference is scaled to unit discrete energy (``sum |f|^2 = 1``) and
    the response is scaled by the same factor. ``window`` restricts the
    response to an absolute time interval before correlating; the reported
    ``response_energy`` (``sum |g|^2``) is taken over the same interval.
    """
    if not np.isclose(reference.dt, response.dt, rtol=1e-9, atol=0):
        raise ValueError("reference and response must share dt")
    norm = np.sum(np.abs(reference.samples) ** 2)
    if norm == 0:
        raise ValueError("reference has no energy")
    scale = 1 / np.sqrt(norm)
    f = reference.samples * scale
    if window is not None:
        response = response.windowed(*window)
    g = response.samples * scale
    corr = correlate(g, f, mode="full")
    C = np.abs(corr) ** 2
    shift = np.arange(-(len(f) - 1), len(g))
    lags = shift * reference.dt + (response.t0 - reference.t0)
    k = int(np.argmax(C))
    return FidelityReport(float(C[k]), float(lags[k]), float(np.sum(np.abs(g) ** 2)), C, lags)


def efficiency(result, release_window: tuple[float, float]) -> float:
    """Energy emitted inside ``release_window`` over total input energy."""
    e_in = result.input.energy()
    if e_in <= 0:
        raise ValueError("input has no energy")
    t = result.t
    mask = (t >= release_window[0]) & (t <= release_window[1])
    return float(np.sum(np.abs(result.output.samples[mask]) ** 2) * result.dt / e_in)


def fit_decay(storage_times, fidelities, f_ref: float) -> DecayFit:
    """Fit ``F(t) = A exp(-t / T_decay)``.

    Linear regression on ``log F`` gives the starting point; one Gauss-Newton
    step on the unweighted nonlinear residual refines it. ``Q_eff`` is
    ``2 pi f_ref T_decay``. A flat series yields ``T_decay = inf``.
    """
    t = np.asarray(storage_times, dtype=float)
    F = np.asarray(fidelities, dtype=float)
    if t.size < 3 or t.size != F.size:
        raise ValueError("need at least 3 (time, fidelity) points")
    if np.any(F <= 0):
        raise ValueError("log-fit undefined; filter or offset non-positive fidelities")
    slope, intercept = np.polyfit(t, np.log(F), 1)
    A, rate = np.exp(intercept), -slope
    model = A * np.exp(-rate * t)
    r = F - model
    J = np.column_stack([np.exp(-rate * t), -A * t * np.exp(-rate * t)])
    step, *_ = np.linalg.lstsq(J, r, rcond=None)
    if np.all(np.isfinite(step)):
        A, rate = A + step[0], rate + step[1]
    resid = F - A * np.exp(-rate * t)
    rms = float(np.sqrt(np.mean(resid**2)))
    if rate <= 0 or abs(rate) * np.ptp(t) < 1e-12:
        return DecayFit(np.inf, float(A), rms, np.inf, f_ref)
    T = 1.0 / rate
    return DecayFit(float(T), float(A), rms, effective_q(f_ref, T), f_ref)


def effective_q(f_ref: float, T_decay: float) -> float:
    return 2 * np.pi * f_ref * T_decay


# effective pulse duration in units of the amplitude FWHM
PHOTON_CONVENTIONS = {
    "gaussian-amplitude": np.sqrt(np.pi / (4 * np.log(2))),
    "gaussian-intensity": np.sqrt(np.pi / (8 * np.log(2))),
    "rectangular": 1.0,
}


def estimate_photons(power_dbm: float, fwhm: float, f: float,
                     convention: str = "gaussian-amplitude") -> float:
    """Mean photon number of a pulse of peak power ``power_dbm``.

    ``E = P * fwhm * c`` with ``c`` chosen by ``convention``; ``<n> = E / (h f)``.
    The default reproduces ``c = sqrt(pi / (4 ln 2))``.
    """
    if not fwhm > 0 or not f > 0:
        raise ValueError("fwhm and f must be > 0")
    p = 10 ** ((power_dbm - 30) / 10)
    return p * fwhm * PHOTON_CONVENTIONS[convention] / (PLANCK * f)
