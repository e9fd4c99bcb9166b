"""Command-line entry point: ``combmem <command> [options]``.

Exit status is 0 on success, 1 on a runtime failure and 2 on a malformed
configuration or command line.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .calibration import (device_matched_kappa, hold_run, matched_flux, matched_kappa, recording_run,
                          reference_run, revival_period, run_memory_experiment)
from .config import ExperimentConfig, load_config
from .coupler import coupler_state, flux_to_voltage
from .dynamics import simulate
from .exceptions import ConfigError
from .metrics import efficiency, fidelity, fit_decay
from .model import comb_statistics
from .presets import load_preset, preset_names
from .pulses import grid_for, make_gaussian
from .schedule import build_protocol, release_time
from .spectroscopy import fit_resonance, initial_reflection_map, spectroscopy_map


def _load(args) -> ExperimentConfig:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        cfg = load_preset(args.preset)
    else:
        raise ConfigError("a configuration is required (--config PATH or --preset NAME)")
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg


def _outdir(args, cfg: ExperimentConfig | None) -> Path:
    out = Path(args.out or (cfg.outputs.directory if cfg else "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _wants(cfg: ExperimentConfig, fmt: str) -> bool:
    return fmt in cfg.outputs.formats


def _record_flux(cfg: ExperimentConfig) -> float:
    if cfg.protocol.record_flux is not None:
        return cfg.protocol.record_flux
    return matched_flux(cfg.device, device_matched_kappa(cfg.device))


def cmd_simulate(args) -> str:
    cfg = _load(args)
    out = _outdir(args, cfg)
    dev, pulse, dt = cfg.device, cfg.pulse, cfg.solver.dt
    spacing, _ = comb_statistics(dev.bank) if dev.bank.n > 1 else (None, None)
    metrics = {"name": cfg.name}
    if cfg.schedule is not None:
        sched = cfg.schedule
        t_end = pulse.center + 3 * pulse.fwhm
        if np.isfinite(sched.span[1]):
            t_end = max(t_end, sched.span[1])
    else:
        if spacing is None:
            raise ConfigError("schedule: required for a single-resonator device")
        flux = _record_flux(cfg)
        probe_end = pulse.center + 3 * pulse.fwhm + 2 / spacing
        probe = recording_run(dev, pulse, flux, probe_end, dt)
        sched = build_protocol(dev, flux, cfg.protocol.cycles[0], probe, ramp=cfg.solver.ramp)
        t_end = release_time(sched) + (cfg.protocol.release_span or 1 / spacing)
        metrics.update(record_flux=flux, cycles=cfg.protocol.cycles[0], release=release_time(sched))
    mode = make_gaussian(pulse, grid_for(pulse, dt, t_end), dev.reference_input_frequency)
    res = simulate(dev, mode, sched, dt)
    ref = reference_run(dev, pulse, pulse.center + 3 * pulse.fwhm, dt)
    rep = fidelity(ref.output, res.output)
    metrics.update(fidelity=rep.to_dict(), input_energy=res.input.energy(),
                   output_energy=res.output.energy(), final_stored_energy=float(res.stored_energy[-1]),
                   schedule=sched.to_dict())
    if "release" in metrics:
        metrics["efficiency"] = efficiency(res, (metrics["release"], res.t[-1]))
    if _wants(cfg, "csv"):
        io.write_trace_csv(res, out / "trace.csv")
        sched.write_csv(out / "schedule.csv", res.t, dev.coupler)
    if _wants(cfg, "json"):
        io.write_json(out / "metrics.json", metrics)
    return f"simulate: {len(res.t)} samples, F = {rep.F:.4f}, output energy = {res.output.energy():.4g}"


def cmd_spectroscopy(args) -> str:
    cfg = _load(args)
    if cfg.spectroscopy is None:
        raise ConfigError("spectroscopy: section required")
    out = _outdir(args, cfg)
    sw = cfg.spectroscopy
    flux, freq = sw.flux.values(), sw.freq.values()
    s11 = spectroscopy_map(cfg.device, flux, freq)
    if sw.noise > 0:
        rng = cfg.rng()
        s11 = s11 + sw.noise * (rng.standard_normal(s11.shape) + 1j * rng.standard_normal(s11.shape))
    power = np.abs(s11) ** 2
    i, j = np.unravel_index(np.argmin(power), power.shape)
    summary = {"name": cfg.name, "min_power": power[i, j], "min_flux": flux[i], "min_frequency": freq[j],
               "shape": list(power.shape)}
    if _wants(cfg, "csv"):
        io.write_complex_matrix(out / "s11", "flux_Phi0", flux, "freq_Hz", freq, s11)
    if _wants(cfg, "json"):
        io.write_json(out / "spectroscopy.json", summary)
    return f"spectroscopy: min |S11|^2 = {power[i, j]:.4g} at flux {flux[i]:.4f}, {freq[j]:.6e} Hz"


def cmd_calibrate(args) -> str:
    cfg = _load(args)
    if cfg.calibration is None:
        raise ConfigError("calibration: section required")
    out = _outdir(args, cfg)
    cal = cfg.calibration
    volts, freq = cal.voltage.values(), cal.freq.values()
    m = initial_reflection_map(cfg.device, cfg.pulse, volts, freq, cal.reference_window, jobs=args.jobs)
    i, j = np.unravel_index(np.argmin(m), m.shape)
    kappa = device_matched_kappa(cfg.device)
    flux = matched_flux(cfg.device, kappa)
    st = coupler_state(flux, cfg.device.coupler)
    summary = {"name": cfg.name, "min_intensity": m[i, j], "min_voltage": volts[i], "min_frequency": freq[j],
               "matched_kappa": kappa, "matched_flux": flux,
               "matched_voltage": flux_to_voltage(flux, cfg.device.coupler),
               "common_frequency_at_match": cfg.device.bank.common.frequency + st.common_pull}
    if _wants(cfg, "csv"):
        io.write_matrix_csv(out / "reflection_map.csv", "voltage_V", volts, "freq_Hz", freq, m)
    if _wants(cfg, "json"):
        io.write_json(out / "calibration.json", summary)
    return (f"calibrate: minimum {m[i, j]:.4g} at {volts[i]:+.4f} V, {freq[j]:.6e} Hz; "
            f"matched kappa = {kappa:.4e} Hz at flux {flux:.4f}")


def cmd_memory(args) -> str:
    cfg = _load(args)
    out = _outdir(args, cfg)
    dev, pulse, sv = cfg.device, cfg.pulse, cfg.solver
    flux = _record_flux(cfg)
    runs = run_memory_experiment(dev, pulse, list(cfg.protocol.cycles), flux, sv.dt, sv.ramp,
                                 cfg.protocol.release_span, cfg.protocol.window,
                                 keep_results=_wants(cfg, "csv"), jobs=args.jobs)
    summary = {"name": cfg.name, "record_flux": flux,
               "runs": [{"cycles": n, "storage_time": r.storage_time, "release": r.release, **r.report.to_dict()}
                        for n, r in zip(cfg.protocol.cycles, runs)]}
    line = "memory: " + ", ".join(f"n={n} F={r.report.F:.4f}" for n, r in zip(cfg.protocol.cycles, runs))
    if len(runs) >= 3:
        f_ref = float(np.mean(dev.bank.frequencies))
        fit = fit_decay([r.storage_time for r in runs], [r.report.F for r in runs], f_ref)
        summary["decay"] = fit.to_dict()
        line += f"; T_decay = {fit.T_decay:.4g} s"
    if cfg.revival is not None:
        held = hold_run(dev, pulse, cfg.revival.hold, flux, sv.dt, sv.ramp)
        period = revival_period(held, cfg.revival.search_range)
        summary["revival_period"] = period
        line += f"; revival period = {period:.4e} s"
    if _wants(cfg, "csv"):
        for n, r in zip(cfg.protocol.cycles, runs):
            io.write_trace_csv(r.result, out / f"cycle_{n}.csv")
    if _wants(cfg, "json"):
        io.write_json(out / "memory.json", summary)
    return line


def cmd_fit(args) -> str:
    cols = io.read_columns(args.file)
    out = Path(args.out) if args.out else None
    if {"freq_Hz", "re_s11", "im_s11"} <= cols.keys():
        fit = fit_resonance(cols["freq_Hz"], cols["re_s11"] + 1j * cols["im_s11"])
        result, line = fit.to_dict(), f"fit: f_r = {fit.f_r:.9e} Hz, Q_i = {fit.Q_i:.4g}, Q_c = {fit.Q_c:.4g}"
    elif {"storage_time_s", "F"} <= cols.keys():
        fit = fit_decay(cols["storage_time_s"], cols["F"], args.f_ref)
        result, line = fit.to_dict(), f"fit: T_decay = {fit.T_decay:.4g} s, Q_eff = {fit.Q_eff:.4g}"
    else:
        raise ConfigError("fit: need columns freq_Hz,re_s11,im_s11 or storage_time_s,F")
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(out / "fit.json", result)
    else:
        print(json.dumps(io._clean(result), sort_keys=True))
    return line


def cmd_design(args) -> str:
    kappa = matched_kappa(args.g, args.spacing)
    return f"{kappa:.4g}"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment configuration (JSON)")
    common.add_argument("--preset", help=f"bundled configuration: {', '.join(preset_names())}")
    common.add_argument("--out", help="output directory (default: config outputs.directory)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for grids and sweeps")
    common.add_argument("--seed", type=int, help="RNG seed (only used where noise is requested)")

    p = argparse.ArgumentParser(prog="combmem", description="Multi-resonator quantum memory simulator.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="one record/store/release run (or explicit schedule)")
    sub.add_parser("spectroscopy", parents=[common], help="CW S11 map over flux and frequency")
    sub.add_parser("calibrate", parents=[common], help="pulsed initial-reflection map over voltage and frequency")
    sub.add_parser("memory", parents=[common], help="fidelity versus storage cycles and revival period")
    f = sub.add_parser("fit", help="fit a resonance (freq_Hz,re_s11,im_s11) or a decay (storage_time_s,F)")
    f.add_argument("file")
    f.add_argument("--out")
    f.add_argument("--f-ref", type=float, default=6e9, help="reference frequency for Q_eff (Hz)")
    d = sub.add_parser("design", help="print the impedance-matched kappa for coupling g and spacing (Hz)")
    d.add_argument("g", type=float)
    d.add_argument("spacing", type=float)
    return p


COMMANDS = {"simulate": cmd_simulate, "spectroscopy": cmd_spectroscopy, "calibrate": cmd_calibrate,
            "memory": cmd_memory, "fit": cmd_fit, "design": cmd_design}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        print(COMMANDS[args.command](args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
