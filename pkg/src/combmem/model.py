"""Device description shared by every other module.

All user-facing frequencies and rates are linear (Hz). Linewidths use the
energy-decay full-width convention, so a resonator with internal rate
``gamma`` has ``Q_i = frequency / gamma`` and its field amplitude decays as
``exp(-pi * gamma * t)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coupler import CouplerModel
from .exceptions import ConfigError, check_keys


@dataclass(frozen=True)
class ResonatorSpec:
    frequency: float
    internal_rate: float = 0.0
    label: str = ""

    @property
    def q_internal(self) -> float:
        if self.internal_rate == 0:
            return np.inf
        return self.frequency / self.internal_rate

    @classmethod
    def from_q(cls, frequency: float, q_internal: float, label: str = "") -> "ResonatorSpec":
        rate = 0.0 if np.isinf(q_internal) else frequency / q_internal
        return cls(frequency, rate, label)

    def to_dict(self) -> dict:
        return {"frequency": self.frequency, "internal_rate": self.internal_rate, "label": self.label}

    @classmethod
    def from_dict(cls, d: dict) -> "ResonatorSpec":
        check_keys(d, {"frequency", "internal_rate", "label"}, "resonator")
        return cls(float(d["frequency"]), float(d.get("internal_rate", 0.0)), str(d.get("label", "")))


@dataclass(frozen=True)
class ResonatorBank:
    """Common resonator plus an ordered comb of internal resonators.

    ``common.frequency`` is the maximal common-resonator frequency, reached
    when the coupler pull is zero. ``couplings`` holds one linear coupling
    rate ``g_j`` per internal resonator.
    """

    common: ResonatorSpec
    internal: tuple[ResonatorSpec, ...]
    couplings: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "internal", tuple(self.internal))
        object.__setattr__(self, "couplings", tuple(float(g) for g in self.couplings))

    @property
    def n(self) -> int:
        return len(self.internal)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([r.frequency for r in self.internal])

    @property
    def rates(self) -> np.ndarray:
        return np.array([r.internal_rate for r in self.internal])

    @property
    def g(self) -> np.ndarray:
        return np.array(self.couplings)

    @classmethod
    def equidistant(cls, common_frequency: float, first: float, spacing: float, n: int,
                    g: float, q_internal: float = np.inf, q_common: float = np.inf) -> "ResonatorBank":
        """Comb of ``n`` resonators starting at ``first`` with identical coupling ``g``."""
        internal = [ResonatorSpec.from_q(first + k * spacing, q_internal, f"r{k}") for k in range(n)]
        return cls(ResonatorSpec.from_q(common_frequency, q_common, "common"), tuple(internal), (g,) * n)

    @classmethod
    def from_frequencies(cls, common_frequency: float, frequencies: Sequence[float], g: float,
                         q_internal: float = np.inf, q_common: float = np.inf) -> "ResonatorBank":
        internal = [ResonatorSpec.from_q(f, q_internal, f"r{k}") for k, f in enumerate(frequencies)]
        return cls(ResonatorSpec.from_q(common_frequency, q_common, "common"),
                   tuple(internal), (g,) * len(internal))


@dataclass(frozen=True)
class DeviceModel:
    bank: ResonatorBank
    coupler: CouplerModel
    reference_input_frequency: float

    def to_dict(self) -> dict:
        return {
            "common": self.bank.common.to_dict(),
            "internal": [r.to_dict() for r in self.bank.internal],
            "g": list(self.bank.couplings),
            "coupler": self.coupler.to_dict(),
            "reference_input_frequency": self.reference_input_frequency,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeviceModel":
        check_keys(d, {"common", "internal", "g", "coupler", "reference_input_frequency"}, "device")
        try:
            internal = tuple(ResonatorSpec.from_dict(r) for r in d["internal"])
            bank = ResonatorBank(ResonatorSpec.from_dict(d["common"]), internal, tuple(d["g"]))
            return cls(bank, CouplerModel.from_dict(d["coupler"]), float(d["reference_input_frequency"]))
        except KeyError as exc:
            raise ConfigError(f"device: missing key {exc.args[0]!r}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "DeviceModel":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TemporalMode:
    """Uniformly sampled complex envelope ``samples = I + iQ``.

    Waveguide fields carry sqrt(photon flux) units, intracavity fields
    sqrt(photon) units.
    """

    t0: float
    dt: float
    samples: np.ndarray = field(repr=False)
    frame_frequency: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=complex))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.samples))

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (len(self.samples) - 1)

    def energy(self) -> float:
        """Time-integrated power, ``sum |s|^2 dt``."""
        return float(np.sum(np.abs(self.samples) ** 2) * self.dt)

    def windowed(self, start: float, stop: float) -> "TemporalMode":
        """Copy with samples outside ``[start, stop]`` set to zero."""
        t = self.t
        mask = (t >= start) & (t <= stop)
        return TemporalMode(self.t0, self.dt, np.where(mask, self.samples, 0), self.frame_frequency)

    def scaled(self, c: complex) -> "TemporalMode":
        return TemporalMode(self.t0, self.dt, c * self.samples, self.frame_frequency)


def validate_device(model: DeviceModel) -> list[str]:
    """Return a list of human-readable invariant violations (empty if valid)."""
    out = []
    bank = model.bank
    for r in (bank.common,) + bank.internal:
        name = r.label or "resonator"
        if not r.frequency > 0:
            out.append(f"{name}.frequency: must be > 0 (got {r.frequency})")
        if not r.internal_rate >= 0:
            out.append(f"{name}.internal_rate: must be >= 0 (got {r.internal_rate})")
    if bank.n < 1:
        out.append("internal: at least one internal resonator required")
    if len(bank.couplings) != bank.n:
        out.append(f"g: expected {bank.n} couplings, got {len(bank.couplings)}")
    freqs = bank.frequencies
    if bank.n > 1 and np.any(np.diff(freqs) <= 0):
        out.append("internal: internal frequencies strictly increasing")
    out.extend(f"coupler.{v}" for v in model.coupler.violations())
    if bank.n >= 2 and not out:
        spacing = float(np.mean(np.diff(freqs)))
        lo, hi = freqs.min() - 10 * spacing, freqs.max() + 10 * spacing
        if not lo <= model.reference_input_frequency <= hi:
            out.append("reference_input_frequency: outside comb range +/- 10 spacings")
    elif bank.n == 1 and model.reference_input_frequency <= 0:
        out.append("reference_input_frequency: must be > 0")
    return out


def comb_statistics(bank: ResonatorBank) -> tuple[float, float]:
    """Nominal spacing and irregularity of the internal comb.

    Returns
    -------
    spacing : float
        Mean consecutive spacing (Hz).
    irregularity : float
        Largest absolute deviation of a consecutive spacing from the mean (Hz).
    """
    if bank.n < 2:
        raise ValueError("comb undefined: need at least two internal resonators")
    diffs = np.diff(bank.frequencies)
    spacing = float(np.mean(diffs))
    return spacing, float(np.max(np.abs(diffs - spacing)))
