"""Coupled-mode time-domain simulation and steady-state reflection.

In the frame rotating at the reference input frequency ``f_d``::

    da_c/dt = -[i 2pi (f_c + pull - f_d) + pi kappa + pi gamma_c] a_c
              - i 2pi sum_j g_j b_j + sqrt(2 pi kappa) s_in
    db_j/dt = -[i 2pi (f_j - f_d) + pi gamma_j] b_j - i 2pi g_j a_c
    s_out   = sqrt(2 pi kappa) a_c - s_in

All rates are linear (Hz). With these factors the impedance-matching
condition of a comb is ``kappa = 2 pi g^2 / spacing``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from scipy.interpolate import CubicSpline

from .coupler import coupler_state
from .model import DeviceModel, TemporalMode

if TYPE_CHECKING:
    from .schedule import ControlSchedule

DEFAULT_DT = 1e-10


@dataclass(frozen=True)
class SystemState:
    a_c: complex
    b: np.ndarray
    t: float

    @property
    def stored_energy(self) -> float:
        return float(abs(self.a_c) ** 2 + np.sum(np.abs(self.b) ** 2))


@dataclass(frozen=True)
class SimulationResult:
    """Traces of one run; every array shares the grid ``t``."""

    t: np.ndarray = field(repr=False)
    a_c: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    input: TemporalMode = field(repr=False)
    output: TemporalMode = field(repr=False)
    kappa: np.ndarray = field(repr=False)
    pull: np.ndarray = field(repr=False)
    schedule: "ControlSchedule"
    model: DeviceModel = field(repr=False)

    @property
    def dt(self) -> float:
        return self.input.dt

    @property
    def stored_energy(self) -> np.ndarray:
        return np.abs(self.a_c) ** 2 + np.sum(np.abs(self.b) ** 2, axis=1)

    @property
    def internal_superposition(self) -> np.ndarray:
        return self.b.sum(axis=1)

    def state_at(self, k: int) -> SystemState:
        return SystemState(complex(self.a_c[k]), self.b[k].copy(), float(self.t[k]))

    @property
    def states(self) -> list[SystemState]:
        return [self.state_at(k) for k in range(len(self.t))]

    def scaled(self, c: complex) -> "SimulationResult":
        return SimulationResult(self.t, c * self.a_c, c * self.b, self.input.scaled(c), self.output.scaled(c),
                                self.kappa, self.pull, self.schedule, self.model)


def system_matrix(model: DeviceModel, kappa: float, pull: float) -> np.ndarray:
    """Generator ``M`` of the homogeneous dynamics ``dy/dt = M y``, ``y = (a_c, b_1..b_N)``."""
    bank = model.bank
    fd = model.reference_input_frequency
    n = bank.n
    m = np.zeros((n + 1, n + 1), dtype=complex)
    m[0, 0] = -(2j * np.pi * (bank.common.frequency + pull - fd)
                + np.pi * kappa + np.pi * bank.common.internal_rate)
    m[0, 1:] = m[1:, 0] = -2j * np.pi * bank.g
    m[np.arange(1, n + 1), np.arange(1, n + 1)] = -(2j * np.pi * (bank.frequencies - fd) + np.pi * bank.rates)
    return m


def max_detuning(model: DeviceModel, pulls) -> float:
    fd = model.reference_input_frequency
    common = np.abs(model.bank.common.frequency + np.asarray(pulls) - fd)
    return float(max(np.max(common), np.max(np.abs(model.bank.frequencies - fd))))


def _integrate(model: DeviceModel, dt: float, s_half, kappa_half, pull_half):
    """Fixed-step RK4 over a batch of independent runs.

    Arrays are sampled on the half-step grid (``2n - 1`` rows, batch along
    the last axis); controls may also be 1-D over time or shaped ``(1, B)``
    for per-run constants. Returns ``a`` with shape ``(n, B)`` and ``b`` with shape
    ``(n, B, N)``. Initial state is the vacuum.
    """
    bank = model.bank
    s_half = np.atleast_2d(np.asarray(s_half, dtype=complex).T).T
    H, B = s_half.shape
    kappa_half = _as_columns(kappa_half, H, B)
    pull_half = _as_columns(pull_half, H, B)
    fd = model.reference_input_frequency
    dc = -(2j * np.pi * (bank.common.frequency + pull_half - fd)
           + np.pi * kappa_half + np.pi * bank.common.internal_rate)
    dc = np.ascontiguousarray(dc)
    u = np.ascontiguousarray(np.sqrt(2 * np.pi * kappa_half) * s_half)
    w = 2j * np.pi * bank.g
    bd = -(2j * np.pi * (bank.frequencies - fd) + np.pi * bank.rates)

    n = (H + 1) // 2
    A = np.zeros((n, B), dtype=complex)
    Bm = np.zeros((n, B, bank.n), dtype=complex)
    a = np.zeros(B, dtype=complex)
    b = np.zeros((B, bank.n), dtype=complex)
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(n - 1):
        h = 2 * k
        k1a = dc[h] * a - b @ w + u[h]
        k1b = bd * b - np.multiply.outer(a, w)
        a2 = a + half * k1a
        b2 = b + half * k1b
        k2a = dc[h + 1] * a2 - b2 @ w + u[h + 1]
        k2b = bd * b2 - np.multiply.outer(a2, w)
        a3 = a + half * k2a
        b3 = b + half * k2b
        k3a = dc[h + 1] * a3 - b3 @ w + u[h + 1]
        k3b = bd * b3 - np.multiply.outer(a3, w)
        a4 = a + dt * k3a
        b4 = b + dt * k3b
        k4a = dc[h + 2] * a4 - b4 @ w + u[h + 2]
        k4b = bd * b4 - np.multiply.outer(a4, w)
        a = a + sixth * (k1a + 2 * k2a + 2 * k3a + k4a)
        b = b + sixth * (k1b + 2 * k2b + 2 * k3b + k4b)
        A[k + 1] = a
        Bm[k + 1] = b
    return A, Bm


def _as_columns(x, H, B):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return np.broadcast_to(x, (H, B))


def _half_grid(t0: float, dt: float, n: int) -> np.ndarray:
    return t0 + 0.5 * dt * np.arange(2 * n - 1)


def _resample(mode: TemporalMode, t: np.ndarray) -> np.ndarray:
    """Cubic-spline resampling of ``mode`` onto ``t``; zero outside its span."""
    if len(mode) < 2:
        raise ValueError("temporal mode needs at least 2 samples")
    spline = CubicSpline(mode.t, mode.samples, extrapolate=False)
    out = spline(t)
    return np.where(np.isnan(out), 0, out)


def simulation_grid(mode: TemporalMode, dt: float) -> tuple[float, float, int]:
    n = int(np.floor((mode.t_end - mode.t0) / dt + 1e-9)) + 1
    return mode.t0, dt, n


def check_step(model: DeviceModel, dt: float, pulls) -> None:
    det = max_detuning(model, pulls)
    if det > 0 and dt > 1 / (20 * det) * (1 + 1e-9):
        raise ValueError(f"step too coarse: dt = {dt:.3g} s exceeds 1/(20 * {det:.4g} Hz)")


def simulate(model: DeviceModel, input: TemporalMode, schedule: "ControlSchedule",
             dt: float = DEFAULT_DT) -> SimulationResult:
    """Integrate the device driven by ``input`` under the control ``schedule``.

    The simulation grid starts at ``input.t0`` and spans the input with step
    ``dt``; the input is cubic-spline resampled at the RK4 half steps.

    Raises
    ------
    ValueError
        If the frame does not match the model, the step is too coarse for
        the fastest detuning, or the schedule does not cover the span.
    """
    if not np.isclose(input.frame_frequency, model.reference_input_frequency, rtol=0, atol=1e-6):
        raise ValueError("input frame_frequency must equal model.reference_input_frequency")
    t0, dt, n = simulation_grid(input, dt)
    if n < 2:
        raise ValueError("simulation span shorter than one step")
    th = _half_grid(t0, dt, n)
    schedule.check_covers(th[0], th[-1])
    kappa_h, pull_h = schedule.controls(th, model.coupler)
    check_step(model, dt, pull_h)
    s_h = input.samples if (np.isclose(input.dt, dt, rtol=1e-12, atol=0) and len(input) == n) else None
    s_half = _resample(input, th)
    if s_h is not None:
        s_half[::2] = s_h
    A, Bm = _integrate(model, dt, s_half, kappa_h, pull_h)
    return _assemble(model, schedule, t0, dt, n, s_half[::2], A[:, 0], Bm[:, 0], kappa_h[::2], pull_h[::2])


def _assemble(model, schedule, t0, dt, n, s_in, a, b, kappa, pull) -> SimulationResult:
    fd = model.reference_input_frequency
    s_out = np.sqrt(2 * np.pi * kappa) * a - s_in
    t = t0 + dt * np.arange(n)
    return SimulationResult(t, a, b, TemporalMode(t0, dt, s_in, fd), TemporalMode(t0, dt, s_out, fd),
                            np.asarray(kappa, float), np.asarray(pull, float), schedule, model)


def reflection(model: DeviceModel, drive_frequency, kappa, pull):
    """Closed-form CW reflection for given coupler state (broadcasts over arrays)."""
    bank = model.bank
    f = np.asarray(drive_frequency, dtype=float)[..., None]
    kappa = np.asarray(kappa, dtype=float)
    pull = np.asarray(pull, dtype=float)
    den_j = 2j * np.pi * (bank.frequencies - f) + np.pi * bank.rates
    # a lossless internal resonance hit exactly blocks the common mode: S11 = -1
    pole = np.any(den_j == 0, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        comb = np.sum((2 * np.pi * bank.g) ** 2 / np.where(den_j == 0, 1, den_j), axis=-1)
        f = f[..., 0]
        denom = (2j * np.pi * (bank.common.frequency + pull - f) + np.pi * kappa
                 + np.pi * bank.common.internal_rate + comb)
        s = 2 * np.pi * kappa / denom - 1
    return np.where(pole | (kappa == 0), -1 + 0j, s)


def steady_state_reflection(model: DeviceModel, drive_frequency, flux):
    """CW reflection coefficient S11 at ``drive_frequency`` with the coupler at ``flux``."""
    st = coupler_state(flux, model.coupler)
    s = reflection(model, drive_frequency, st.kappa, st.common_pull)
    return complex(s) if np.ndim(s) == 0 else s


def free_evolution(model: DeviceModel, y0, taus, kappa: float = 0.0, pull: float = 0.0) -> np.ndarray:
    """Undriven evolution of ``y0 = (a_c, b)`` at fixed coupler state; rows follow ``taus``."""
    lam, vec = np.linalg.eig(system_matrix(model, kappa, pull))
    c = np.linalg.solve(vec, np.asarray(y0, dtype=complex))
    taus = np.asarray(taus, dtype=float)
    return (np.exp(np.multiply.outer(taus, lam)) * c) @ vec.T
