"""Design relations, operating-point search, revival analysis and memory experiments."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.signal import correlate

from .coupler import coupler_state
from .dynamics import DEFAULT_DT, SimulationResult, simulate
from .metrics import FidelityReport, fidelity
from .model import DeviceModel, comb_statistics
from .pulses import PulseSpec, grid_for, make_gaussian
from .schedule import DEFAULT_RAMP, ControlSchedule, build_protocol, release_time, store_segment


def matched_kappa(g: float, spacing: float) -> float:
    """Impedance-matched external linewidth ``2 pi g^2 / spacing`` (all linear Hz)."""
    if not (g > 0 and spacing > 0):
        raise ValueError("g and spacing must be > 0")
    return 2 * np.pi * g**2 / spacing


def device_matched_kappa(model: DeviceModel) -> float:
    spacing, _ = comb_statistics(model.bank)
    return matched_kappa(float(np.sqrt(np.mean(model.bank.g**2))), spacing)


def matched_flux(model: DeviceModel, target_kappa: float) -> float:
    """Smallest flux in ``[switch_off_flux, 0.5]`` where the coupler reaches ``target_kappa``."""
    cm = model.coupler
    lo = cm.switch_off_flux
    if target_kappa == 0:
        return lo
    hi = 0.5
    k_hi = coupler_state(hi, cm).kappa
    if not 0 < target_kappa <= k_hi:
        raise ValueError(f"kappa out of coupler range (max {k_hi:.4g} Hz)")
    fn = lambda x: coupler_state(x, cm).kappa - target_kappa
    x = brentq(fn, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(fn(x)) >= 1e3:
        raise ValueError("matched_flux did not converge to 1 kHz")
    return float(x)


def revival_period(result: SimulationResult, search_range: tuple[float, float]) -> float:
    """Revival period of the internal superposition during storage.

    The envelope ``|sum_j b_j(t)|`` over the storage segment of the run's
    schedule (whole trace if there is none) is mean-subtracted and
    autocorrelated; the lag with the largest unbiased autocorrelation in
    ``search_range`` is refined by a parabola.
    """
    if result.b.shape[1] < 2:
        raise ValueError("no revival detected: a single internal resonator does not beat")
    t = result.t
    seg = store_segment(result.schedule, result.model.coupler)
    if seg is not None:
        ramp = result.schedule.ramp
        mask = (t >= seg.t_start + ramp) & (t <= seg.t_end - ramp)
    else:
        mask = np.ones_like(t, dtype=bool)
    env = np.abs(result.internal_superposition[mask])
    if env.size < 3 or np.std(env) <= 1e-9 * max(np.mean(env), np.finfo(float).tiny):
        raise ValueError("no revival detected: flat envelope")
    x = env - env.mean()
    n = x.size
    ac = correlate(x, x, mode="full")[n - 1:] / np.arange(n, 0, -1)
    lags = np.arange(n) * result.dt
    lo, hi = search_range
    sel = np.nonzero((lags >= lo) & (lags <= hi))[0]
    if sel.size < 3 or sel[-1] >= n - 1:
        raise ValueError("search_range exceeds the storage span")
    i = sel[np.argmax(ac[sel])]
    y0, y1, y2 = ac[i - 1], ac[i], ac[i + 1]
    curv = y0 - 2 * y1 + y2
    shift = 0.5 * (y0 - y2) / curv if curv < 0 else 0.0
    return float(lags[i] + shift * result.dt)


class MemoryRun(NamedTuple):
    storage_time: float
    report: FidelityReport
    result: SimulationResult | None = None
    release: float = np.nan


def reference_run(model: DeviceModel, pulse: PulseSpec, t_end: float, dt: float = DEFAULT_DT) -> SimulationResult:
    """Full-reflection run with the coupler at its switching-off point."""
    mode = make_gaussian(pulse, grid_for(pulse, dt, t_end), model.reference_input_frequency)
    sched = ControlSchedule.constant(mode.t0, mode.t_end + dt, model.coupler.switch_off_flux)
    return simulate(model, mode, sched, dt)


def recording_run(model: DeviceModel, pulse: PulseSpec, record_flux: float, t_end: float,
                  dt: float = DEFAULT_DT) -> SimulationResult:
    mode = make_gaussian(pulse, grid_for(pulse, dt, t_end), model.reference_input_frequency)
    sched = ControlSchedule.constant(mode.t0, mode.t_end + dt, record_flux)
    return simulate(model, mode, sched, dt)


def run_memory_experiment(model: DeviceModel, pulse: PulseSpec, cycles: Sequence[int],
                          record_flux: float | None = None, dt: float = DEFAULT_DT,
                          ramp: float = DEFAULT_RAMP, release_span: float | None = None,
                          window: str = "release", keep_results: bool = False,
                          jobs: int = 1) -> list[MemoryRun]:
    """Record, store for each ``n`` in ``cycles``, release, and score the output.

    The fidelity reference is the full-reflection (switched-off) response to
    the same pulse. With ``window="release"`` the response is restricted to
    ``[t_release, t_release + release_span]`` (default span: one nominal
    revival period, ``1/spacing``); ``window="full"`` scores the whole trace.

    Returns
    -------
    list of MemoryRun
        ``storage_time`` is the duration of the switched-off segment.
    """
    if not cycles:
        raise ValueError("cycles must be non-empty")
    spacing, _ = comb_statistics(model.bank)
    t_nom = 1.0 / spacing
    if record_flux is None:
        record_flux = matched_flux(model, device_matched_kappa(model))
    if release_span is None:
        release_span = t_nom
    probe_end = pulse.center + 3 * pulse.fwhm + 2 * t_nom
    probe = recording_run(model, pulse, record_flux, probe_end, dt)
    reference = reference_run(model, pulse, pulse.center + 3 * pulse.fwhm, dt)

    def one(n):
        sched = build_protocol(model, record_flux, n, probe, ramp=ramp)
        t_rel = release_time(sched)
        mode = make_gaussian(pulse, grid_for(pulse, dt, t_rel + release_span), model.reference_input_frequency)
        res = simulate(model, mode, sched, dt)
        win = (t_rel, t_rel + release_span) if window == "release" else None
        rep = fidelity(reference.output, res.output, win)
        store = sched.segments[1]
        return MemoryRun(store.t_end - store.t_start, rep, res if keep_results else None, t_rel)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            return list(ex.map(one, cycles))
    return [one(n) for n in cycles]


def hold_run(model: DeviceModel, pulse: PulseSpec, hold: float, record_flux: float | None = None,
             dt: float = DEFAULT_DT, ramp: float = DEFAULT_RAMP) -> SimulationResult:
    """Record, then keep the coupler switched off for ``hold`` seconds (no release)."""
    spacing, _ = comb_statistics(model.bank)
    if record_flux is None:
        record_flux = matched_flux(model, device_matched_kappa(model))
    probe = recording_run(model, pulse, record_flux, pulse.center + 3 * pulse.fwhm + 2 / spacing, dt)
    sched = build_protocol(model, record_flux, 1, probe, ramp=ramp)
    t1 = sched.segments[1].t_start
    store = type(sched.segments[1])(t1, t1 + hold + 2 * dt, flux=model.coupler.switch_off_flux, label="store")
    sched = ControlSchedule((sched.segments[0], store), ramp)
    mode = make_gaussian(pulse, grid_for(pulse, dt, t1 + hold), model.reference_input_frequency)
    return simulate(model, mode, sched, dt)
