"""Piecewise coupler programs and the record/store/release protocol."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .coupler import CouplerModel, coupler_state
from .dynamics import free_evolution
from .exceptions import ConfigError, check_keys
from .model import DeviceModel, comb_statistics

if TYPE_CHECKING:
    from .dynamics import SimulationResult

DEFAULT_RAMP = 1e-9


@dataclass(frozen=True)
class Segment:
    """One constant stretch of the control program.

    Either ``flux`` is given, or both ``kappa`` and ``pull`` override the
    coupler directly.
    """

    t_start: float
    t_end: float
    flux: float | None = None
    kappa: float | None = None
    pull: float | None = None
    label: str = ""

    def __post_init__(self):
        direct = self.kappa is not None or self.pull is not None
        if (self.flux is None) == (not direct) or (direct and (self.kappa is None or self.pull is None)):
            raise ConfigError("segment: give either flux, or both kappa and pull")

    def state(self, coupler: CouplerModel) -> tuple[float, float]:
        if self.flux is not None:
            st = coupler_state(self.flux, coupler)
            return float(st.kappa), float(st.common_pull)
        return float(self.kappa), float(self.pull)

    def to_dict(self) -> dict:
        d = {"t_start": self.t_start, "t_end": None if math.isinf(self.t_end) else self.t_end}
        if self.flux is not None:
            d["flux"] = self.flux
        else:
            d["kappa"], d["pull"] = self.kappa, self.pull
        if self.label:
            d["label"] = self.label
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Segment":
        check_keys(d, {"t_start", "t_end", "flux", "kappa", "pull", "label"}, "segment")
        t_end = d.get("t_end")
        return cls(float(d["t_start"]), math.inf if t_end is None else float(t_end),
                   _opt(d.get("flux")), _opt(d.get("kappa")), _opt(d.get("pull")), d.get("label", ""))


def _opt(x):
    return None if x is None else float(x)


@dataclass(frozen=True)
class ControlSchedule:
    """Contiguous segments joined by raised-cosine ramps of total width ``ramp``.

    Each ramp is centred on the boundary between two segments and blends
    (kappa, pull) linearly in the cosine weight. ``ramp = 0`` gives hard
    switches.
    """

    segments: tuple[Segment, ...]
    ramp: float = DEFAULT_RAMP

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        problems = self.violations()
        if problems:
            raise ConfigError("schedule: " + "; ".join(problems))

    def violations(self) -> list[str]:
        out = []
        if not self.segments:
            out.append("at least one segment required")
        if self.ramp < 0:
            out.append("ramp must be >= 0")
        for i, s in enumerate(self.segments):
            if not s.t_end > s.t_start:
                out.append(f"segment {i}: t_end must exceed t_start")
        for i, (s, nxt) in enumerate(zip(self.segments, self.segments[1:])):
            if not math.isclose(s.t_end, nxt.t_start, rel_tol=0, abs_tol=1e-15):
                out.append(f"segments {i} and {i + 1} are not contiguous")
        return out

    @classmethod
    def constant(cls, t_start: float, t_end: float, flux: float, ramp: float = DEFAULT_RAMP) -> "ControlSchedule":
        return cls((Segment(t_start, t_end, flux=flux),), ramp)

    @property
    def span(self) -> tuple[float, float]:
        return self.segments[0].t_start, self.segments[-1].t_end

    @property
    def boundaries(self) -> list[float]:
        return [s.t_end for s in self.segments[:-1]]

    def check_covers(self, t_start: float, t_end: float) -> None:
        lo, hi = self.span
        tol = 1e-12 * max(1.0, abs(t_end))
        if lo > t_start + tol or hi < t_end - tol:
            raise ValueError("schedule does not cover simulation span")

    def controls(self, t, coupler: CouplerModel) -> tuple[np.ndarray, np.ndarray]:
        """Return (kappa, pull) sampled at times ``t``."""
        t = np.asarray(t, dtype=float)
        states = [s.state(coupler) for s in self.segments]
        kappa = np.full(t.shape, states[0][0])
        pull = np.full(t.shape, states[0][1])
        for tb, (k0, p0), (k1, p1) in zip(self.boundaries, states, states[1:]):
            w = _ramp_weight(t, tb, self.ramp)
            kappa += (k1 - k0) * w
            pull += (p1 - p0) * w
        return np.maximum(kappa, 0.0), pull

    def to_dict(self) -> dict:
        return {"segments": [s.to_dict() for s in self.segments], "ramp": self.ramp}

    @classmethod
    def from_dict(cls, d: dict) -> "ControlSchedule":
        check_keys(d, {"segments", "ramp"}, "schedule")
        return cls(tuple(Segment.from_dict(s) for s in d["segments"]), float(d.get("ramp", DEFAULT_RAMP)))

    def write_csv(self, path, t, coupler: CouplerModel) -> None:
        kappa, pull = self.controls(t, coupler)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_s", "kappa_Hz", "pull_Hz"])
            for row in zip(t, kappa, pull):
                w.writerow([repr(float(x)) for x in row])


def _ramp_weight(t, tb, ramp):
    if ramp == 0:
        return (t >= tb).astype(float)
    u = np.clip((t - tb) / ramp + 0.5, 0.0, 1.0)
    return 0.5 * (1 - np.cos(np.pi * u))


def detect_dark_states(result: "SimulationResult", after: float = -np.inf,
                       threshold: float = 0.05) -> list[float]:
    """Times of deep minima of the common-resonator population ``|a_c|^2``.

    A local minimum after ``after`` qualifies when it lies below
    ``threshold`` times the running peak of ``|a_c|^2``. Times are refined by
    a parabola through the three nearest samples.
    """
    p = np.abs(result.a_c) ** 2
    return _dark_minima(result.t, p, after, threshold)


def _dark_minima(t, p, after, threshold):
    peak = np.maximum.accumulate(p)
    k = np.arange(1, len(p) - 1)
    is_min = (p[k] <= p[k - 1]) & (p[k] < p[k + 1]) & (t[k] > after) & (peak[k] > 0) & (p[k] < threshold * peak[k])
    dt = t[1] - t[0]
    out = []
    for i in k[is_min]:
        y0, y1, y2 = p[i - 1], p[i], p[i + 1]
        curv = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / curv if curv > 0 else 0.0
        out.append(float(t[i] + np.clip(shift, -0.5, 0.5) * dt))
    return out


def input_end(result: "SimulationResult", fraction: float = 1e-4) -> float:
    """Last time the input amplitude exceeds ``fraction`` of its peak."""
    amp = np.abs(result.input.samples)
    if amp.max() == 0:
        return float(result.t[0])
    idx = np.nonzero(amp >= fraction * amp.max())[0]
    return float(result.t[idx[-1]])


def rephasing_overlap(model: DeviceModel, y0, taus, kappa: float = 0.0, pull: float = 0.0) -> np.ndarray:
    """``|<y0|y(tau)>| / |y0|^2`` under undriven evolution at a fixed coupler state."""
    y0 = np.asarray(y0, dtype=complex)
    ys = free_evolution(model, y0, taus, kappa, pull)
    return np.abs(ys @ y0.conj()) / np.vdot(y0, y0).real


def _argmax_refined(x, y):
    i = int(np.argmax(y))
    if 0 < i < len(y) - 1:
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        curv = y0 - 2 * y1 + y2
        if curv < 0:
            return float(x[i] + 0.5 * (y0 - y2) / curv * (x[1] - x[0]))
    return float(x[i])


def storage_time(model: DeviceModel, y0, cycles: int, samples_per_period: int = 400) -> tuple[float, float]:
    """Storage duration locked to the ``cycles``-th rephasing of ``y0``.

    The single-cycle period is the best rephasing within half a nominal
    period of ``1/spacing``; the returned duration is the best rephasing
    within half a period of ``cycles`` times that.

    Returns
    -------
    duration, period : float
    """
    st = coupler_state(model.coupler.switch_off_flux, model.coupler)
    spacing, _ = comb_statistics(model.bank)
    t_nom = 1.0 / spacing
    taus = np.linspace(0.5 * t_nom, 1.5 * t_nom, samples_per_period + 1)
    period = _argmax_refined(taus, rephasing_overlap(model, y0, taus, st.kappa, st.common_pull))
    if cycles == 1:
        return period, period
    taus = np.linspace((cycles - 0.5) * period, (cycles + 0.5) * period, samples_per_period + 1)
    return _argmax_refined(taus, rephasing_overlap(model, y0, taus, st.kappa, st.common_pull)), period


def switching_instant(probe: "SimulationResult", threshold: float = 0.05) -> float:
    """Dark state at which to switch the coupler off after recording.

    After the input peak the common-resonator population first falls below
    ``threshold`` of its running peak (absorption complete) and later rises
    above it again (onset of the first echo). The last dark state inside that
    gap is returned. Without such a gap, the first dark state after the input
    has ended is used.
    """
    p = np.abs(probe.a_c) ** 2
    peak = np.maximum.accumulate(p)
    t = probe.t
    k_in = int(np.argmax(np.abs(probe.input.samples)))
    below = np.nonzero((np.arange(len(p)) > k_in) & (p < threshold * peak))[0]
    if below.size:
        k_abs = below[0]
        above = np.nonzero((np.arange(len(p)) > k_abs) & (p > threshold * peak))[0]
        if above.size:
            gap = [x for x in _dark_minima(t, p, t[k_abs], threshold) if x < t[above[0]]]
            if gap:
                return gap[-1]
    dark = _dark_minima(t, p, input_end(probe), threshold)
    if not dark:
        raise ValueError("no dark state found")
    return dark[0]


def build_protocol(model: DeviceModel, record_flux: float, store_cycles: int, probe: "SimulationResult",
                   ramp: float = DEFAULT_RAMP, threshold: float = 0.05,
                   after: float | None = None) -> ControlSchedule:
    """Record until a dark state, store for ``store_cycles`` rephasings, then release.

    ``probe`` must be a recording-only run at ``record_flux``. The switching
    instant comes from :func:`switching_instant`, or is the first dark state
    after ``after`` when that is given. The storage duration is predicted from
    the probe state at the switching instant by evolving it with the
    switched-off dynamics (see :func:`storage_time`).
    """
    if store_cycles < 1:
        raise ValueError("store_cycles must be >= 1")
    if after is None:
        t1 = switching_instant(probe, threshold)
    else:
        dark = detect_dark_states(probe, after, threshold)
        if not dark:
            raise ValueError("no dark state found")
        t1 = dark[0]
    k = int(np.argmin(np.abs(probe.t - t1)))
    y0 = np.concatenate([[probe.a_c[k]], probe.b[k]])
    duration, _ = storage_time(model, y0, store_cycles)
    t0 = float(probe.t[0])
    off = model.coupler.switch_off_flux
    return ControlSchedule((
        Segment(t0, t1, flux=record_flux, label="record"),
        Segment(t1, t1 + duration, flux=off, label="store"),
        Segment(t1 + duration, math.inf, flux=record_flux, label="release"),
    ), ramp)


def release_time(schedule: ControlSchedule) -> float:
    for s in schedule.segments:
        if s.label == "release":
            return s.t_start
    return schedule.boundaries[-1]


def store_segment(schedule: ControlSchedule, coupler: CouplerModel) -> Segment | None:
    """Longest segment with the coupler switched off, if any."""
    best = None
    for s in schedule.segments:
        if s.state(coupler)[0] == 0 and (best is None or s.t_end - s.t_start > best.t_end - best.t_start):
            best = s
    return best
