"""Irregular comb spacing and the long memory cycle.

With spacings 6.66, 6.00 and 5.34 MHz the internal superposition no longer
rephases every 1/6 MHz. Partial revivals still occur near 167 ns, but the
full rephasing waits for about 1/660 kHz. Releasing at that later revival
recovers most of the pulse.
"""
from combmem import comb_statistics, hold_run, load_preset, revival_period, run_memory_experiment

cfg = load_preset("paper-disordered")
dev, pulse = cfg.device, cfg.pulse
spacing, irregularity = comb_statistics(dev.bank)
print(f"mean spacing {spacing / 1e6:.3f} MHz, irregularity {irregularity / 1e3:.0f} kHz, "
      f"1/irregularity = {1e6 / irregularity:.3f} us")

held = hold_run(dev, pulse, cfg.revival.hold)
period = revival_period(held, cfg.revival.search_range)
print(f"revival period from the stored-field autocorrelation: {period * 1e6:.4f} us")

runs = run_memory_experiment(dev, pulse, [1, 3, 9], jobs=3)
for n, r in zip([1, 3, 9], runs):
    print(f"n = {n}: storage {r.storage_time * 1e6:.4f} us, F = {r.report.F:.3f}")
