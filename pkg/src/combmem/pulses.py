"""Gaussian input envelopes and their spectral width."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import ConfigError, check_keys
from .model import TemporalMode

# amplitude-spectrum FWHM times amplitude-envelope FWHM for a Gaussian
TIME_BANDWIDTH = 4 * np.log(2) / np.pi


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian envelope; ``fwhm`` is the full width at half maximum of the amplitude."""

    fwhm: float
    center: float
    carrier_detuning: float = 0.0
    amplitude: float = 1.0
    shape: str = "gaussian"

    def __post_init__(self):
        if self.shape != "gaussian":
            raise ConfigError(f"pulse: unsupported shape {self.shape!r}")
        if not self.fwhm > 0:
            raise ConfigError("pulse: fwhm must be > 0")

    @property
    def spectral_fwhm(self) -> float:
        return TIME_BANDWIDTH / self.fwhm

    @property
    def energy(self) -> float:
        """Analytic ``integral |s(t)|^2 dt`` of the envelope."""
        return self.amplitude**2 * self.fwhm * np.sqrt(np.pi / (8 * np.log(2)))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PulseSpec":
        check_keys(d, {"fwhm", "center", "carrier_detuning", "amplitude", "shape"}, "pulse")
        try:
            return cls(float(d["fwhm"]), float(d["center"]), float(d.get("carrier_detuning", 0.0)),
                       float(d.get("amplitude", 1.0)), d.get("shape", "gaussian"))
        except KeyError as exc:
            raise ConfigError(f"pulse: missing key {exc.args[0]!r}") from None

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        x = t - self.center
        return (self.amplitude * np.exp(-4 * np.log(2) * x**2 / self.fwhm**2)
                * np.exp(2j * np.pi * self.carrier_detuning * x))


def make_gaussian(spec: PulseSpec, grid: tuple[float, float, int], frame_frequency: float = 0.0,
                  min_span: float = 3.0) -> TemporalMode:
    """Sample ``spec`` on the uniform grid ``(t0, dt, n)``.

    The grid must cover ``center +/- min_span * fwhm``; shorter grids raise
    ``ValueError("pulse truncated")``.
    """
    t0, dt, n = grid
    t_end = t0 + dt * (n - 1)
    slack = 1e-9 * dt
    if t0 > spec.center - min_span * spec.fwhm + slack or t_end < spec.center + min_span * spec.fwhm - slack:
        raise ValueError("pulse truncated: grid must span center +/- %g fwhm" % min_span)
    t = t0 + dt * np.arange(n)
    return TemporalMode(t0, dt, spec.envelope(t), frame_frequency)


def grid_for(spec: PulseSpec, dt: float, t_end: float, t0: float = 0.0) -> tuple[float, float, int]:
    """Grid from ``t0`` to at least ``t_end`` with step ``dt``."""
    n = int(np.ceil((t_end - t0) / dt - 1e-9)) + 1
    return t0, dt, n


def spectral_fwhm(mode: TemporalMode, pad: int = 16) -> float:
    """FWHM of ``|FFT(samples)|``, located by linear interpolation of the half-max crossings.

    The record is zero-padded ``pad`` times for spectral resolution.
    """
    n = len(mode.samples) * pad
    spec = np.abs(np.fft.fftshift(np.fft.fft(mode.samples, n)))
    freqs = np.fft.fftshift(np.fft.fftfreq(n, mode.dt))
    k = int(np.argmax(spec))
    half = spec[k] / 2
    i = k
    while i > 0 and spec[i - 1] > half:
        i -= 1
    j = k
    while j < n - 1 and spec[j + 1] > half:
        j += 1
    if i == 0 or j == n - 1:
        raise ValueError("spectrum does not fall below half maximum inside the band")
    lo = np.interp(half, [spec[i - 1], spec[i]], [freqs[i - 1], freqs[i]])
    hi = np.interp(half, [spec[j + 1], spec[j]], [freqs[j + 1], freqs[j]])
    return float(hi - lo)
