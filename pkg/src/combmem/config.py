"""Experiment configuration: parsing, validation and serialization.

A configuration is a JSON object with these top-level keys (only
``device`` and ``pulse`` are required)::

    name, description       free text
    device                  DeviceModel document
    pulse                   PulseSpec document
    protocol                record_flux (null = matched), cycles, window, release_span
    schedule                explicit ControlSchedule for ``simulate`` (optional)
    solver                  dt, ramp
    spectroscopy            flux / freq grids, noise
    calibration             voltage / freq grids, reference_window
    revival                 search_range, hold
    outputs                 directory, formats
    seed                    integer, used only where noise is requested

Grids are ``{"start", "stop", "num"}`` objects expanded with ``numpy.linspace``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import DEFAULT_DT
from .exceptions import ConfigError, check_keys
from .model import DeviceModel, validate_device
from .pulses import PulseSpec
from .schedule import DEFAULT_RAMP, ControlSchedule

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    num: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)

    def to_dict(self) -> dict:
        return {"start": self.start, "stop": self.stop, "num": self.num}

    @classmethod
    def from_dict(cls, d, where) -> "Grid":
        check_keys(d, {"start", "stop", "num"}, where)
        try:
            num = d["num"]
            if not isinstance(num, int) or isinstance(num, bool) or num < 1:
                raise ConfigError(f"{where}.num: must be a positive integer")
            return cls(float(d["start"]), float(d["stop"]), num)
        except KeyError as exc:
            raise ConfigError(f"{where}: missing key {exc.args[0]!r}") from None


@dataclass(frozen=True)
class Protocol:
    record_flux: float | None = None
    cycles: tuple[int, ...] = (1,)
    window: str = "release"
    release_span: float | None = None

    def to_dict(self) -> dict:
        return {"record_flux": self.record_flux, "cycles": list(self.cycles),
                "window": self.window, "release_span": self.release_span}

    @classmethod
    def from_dict(cls, d) -> "Protocol":
        check_keys(d, {"record_flux", "cycles", "window", "release_span"}, "protocol")
        cycles = d.get("cycles", [1])
        if (not isinstance(cycles, list) or not cycles
                or not all(isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in cycles)):
            raise ConfigError("protocol.cycles: must be a non-empty list of integers >= 1")
        window = d.get("window", "release")
        if window not in ("release", "full"):
            raise ConfigError("protocol.window: must be 'release' or 'full'")
        return cls(_opt(d.get("record_flux")), tuple(cycles), window, _opt(d.get("release_span")))


@dataclass(frozen=True)
class Solver:
    dt: float = DEFAULT_DT
    ramp: float = DEFAULT_RAMP

    def to_dict(self) -> dict:
        return {"dt": self.dt, "ramp": self.ramp}

    @classmethod
    def from_dict(cls, d) -> "Solver":
        check_keys(d, {"dt", "ramp"}, "solver")
        s = cls(float(d.get("dt", DEFAULT_DT)), float(d.get("ramp", DEFAULT_RAMP)))
        if not s.dt > 0:
            raise ConfigError("solver.dt: must be > 0")
        if not s.ramp >= 0:
            raise ConfigError("solver.ramp: must be >= 0")
        return s


@dataclass(frozen=True)
class SpectroscopySweep:
    flux: Grid
    freq: Grid
    noise: float = 0.0

    def to_dict(self) -> dict:
        return {"flux": self.flux.to_dict(), "freq": self.freq.to_dict(), "noise": self.noise}

    @classmethod
    def from_dict(cls, d) -> "SpectroscopySweep":
        check_keys(d, {"flux", "freq", "noise"}, "spectroscopy")
        try:
            s = cls(Grid.from_dict(d["flux"], "spectroscopy.flux"), Grid.from_dict(d["freq"], "spectroscopy.freq"),
                    float(d.get("noise", 0.0)))
        except KeyError as exc:
            raise ConfigError(f"spectroscopy: missing key {exc.args[0]!r}") from None
        if s.noise < 0:
            raise ConfigError("spectroscopy.noise: must be >= 0")
        return s


@dataclass(frozen=True)
class CalibrationSweep:
    voltage: Grid
    freq: Grid
    reference_window: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        rw = None if self.reference_window is None else list(self.reference_window)
        return {"voltage": self.voltage.to_dict(), "freq": self.freq.to_dict(), "reference_window": rw}

    @classmethod
    def from_dict(cls, d) -> "CalibrationSweep":
        check_keys(d, {"voltage", "freq", "reference_window"}, "calibration")
        try:
            rw = d.get("reference_window")
            return cls(Grid.from_dict(d["voltage"], "calibration.voltage"),
                       Grid.from_dict(d["freq"], "calibration.freq"),
                       None if rw is None else _interval(rw, "calibration.reference_window"))
        except KeyError as exc:
            raise ConfigError(f"calibration: missing key {exc.args[0]!r}") from None


@dataclass(frozen=True)
class RevivalSearch:
    search_range: tuple[float, float]
    hold: float

    def to_dict(self) -> dict:
        return {"search_range": list(self.search_range), "hold": self.hold}

    @classmethod
    def from_dict(cls, d) -> "RevivalSearch":
        check_keys(d, {"search_range", "hold"}, "revival")
        try:
            r = cls(_interval(d["search_range"], "revival.search_range"), float(d["hold"]))
        except KeyError as exc:
            raise ConfigError(f"revival: missing key {exc.args[0]!r}") from None
        if not r.hold > r.search_range[1]:
            raise ConfigError("revival.hold: must exceed the end of search_range")
        return r


@dataclass(frozen=True)
class Outputs:
    directory: str = "out"
    formats: tuple[str, ...] = FORMATS

    def to_dict(self) -> dict:
        return {"directory": self.directory, "formats": list(self.formats)}

    @classmethod
    def from_dict(cls, d) -> "Outputs":
        check_keys(d, {"directory", "formats"}, "outputs")
        formats = d.get("formats", list(FORMATS))
        if not isinstance(formats, list) or any(f not in FORMATS for f in formats):
            raise ConfigError(f"outputs.formats: entries must be among {list(FORMATS)}")
        return cls(str(d.get("directory", "out")), tuple(formats))


@dataclass(frozen=True)
class ExperimentConfig:
    device: DeviceModel
    pulse: PulseSpec
    name: str = ""
    description: str = ""
    protocol: Protocol = field(default_factory=Protocol)
    schedule: ControlSchedule | None = None
    solver: Solver = field(default_factory=Solver)
    spectroscopy: SpectroscopySweep | None = None
    calibration: CalibrationSweep | None = None
    revival: RevivalSearch | None = None
    outputs: Outputs = field(default_factory=Outputs)
    seed: int | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "description": self.description,
             "device": self.device.to_dict(), "pulse": self.pulse.to_dict(),
             "protocol": self.protocol.to_dict(), "solver": self.solver.to_dict(),
             "outputs": self.outputs.to_dict()}
        for key in ("schedule", "spectroscopy", "calibration", "revival"):
            value = getattr(self, key)
            if value is not None:
                d[key] = value.to_dict()
        if self.seed is not None:
            d["seed"] = self.seed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


_TOP = {"name", "description", "device", "pulse", "protocol", "schedule", "solver",
        "spectroscopy", "calibration", "revival", "outputs", "seed"}


def parse_config(d: dict) -> ExperimentConfig:
    """Build and fully validate an :class:`ExperimentConfig` from a plain dict.

    Raises
    ------
    ConfigError
        On unknown keys, missing required keys, wrong types or any device
        invariant violation. The message lists every device violation.
    """
    check_keys(d, _TOP, "config")
    for key in ("device", "pulse"):
        if key not in d:
            raise ConfigError(f"config: missing key {key!r}")
    try:
        device = DeviceModel.from_dict(d["device"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    problems = validate_device(device)
    if problems:
        raise ConfigError("device: " + "; ".join(problems))
    seed = d.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64):
        raise ConfigError("seed: must be an unsigned 64-bit integer")
    sub = lambda key, cls: None if d.get(key) is None else cls.from_dict(d[key])
    try:
        return ExperimentConfig(
            device=device,
            pulse=PulseSpec.from_dict(d["pulse"]),
            name=str(d.get("name", "")),
            description=str(d.get("description", "")),
            protocol=Protocol.from_dict(d.get("protocol", {})),
            schedule=sub("schedule", ControlSchedule),
            solver=Solver.from_dict(d.get("solver", {})),
            spectroscopy=sub("spectroscopy", SpectroscopySweep),
            calibration=sub("calibration", CalibrationSweep),
            revival=sub("revival", RevivalSearch),
            outputs=Outputs.from_dict(d.get("outputs", {})),
            seed=seed,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: {exc}") from None


def load_config(path) -> ExperimentConfig:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(d)


def _opt(x):
    return None if x is None else float(x)


def _interval(x, where) -> tuple[float, float]:
    if not isinstance(x, (list, tuple)) or len(x) != 2:
        raise ConfigError(f"{where}: expected [start, stop]")
    lo, hi = float(x[0]), float(x[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise ConfigError(f"{where}: need finite start < stop")
    return lo, hi
