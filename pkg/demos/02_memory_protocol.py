"""Record, store and release on the lossless equidistant comb.

The coupler stays at the matched bias while the pulse is absorbed, is
switched off at a dark state of the common resonator, and is switched back
on after an integer number of rephasings of the comb. The retrieved pulse is
compared to the full-reflection reference.
"""
import numpy as np

from combmem import detect_dark_states, load_preset, recording_run, run_memory_experiment

cfg = load_preset("paper-ideal")
dev, pulse = cfg.device, cfg.pulse

probe = recording_run(dev, pulse, 0.33, 800e-9)
dark = detect_dark_states(probe)
print("dark states of the common resonator after the pulse peak (ns):",
      ", ".join(f"{t * 1e9:.1f}" for t in dark if t > pulse.center))

runs = run_memory_experiment(dev, pulse, [1, 2, 3, 6], keep_results=True, jobs=4)
print("\n n   storage/ns   release/ns   F        sum|g|^2")
for n, r in zip([1, 2, 3, 6], runs):
    print(f"{n:2d}   {r.storage_time * 1e9:9.2f}   {r.release * 1e9:9.2f}   {r.report.F:.4f}   "
          f"{r.report.response_energy:.4f}")

# where the energy goes during the first run
res = runs[0].result
t_rel = runs[0].release
k = int(np.searchsorted(res.t, t_rel))
print(f"\nfraction of the input held in the resonators at release: {res.stored_energy[k] / res.input.energy():.3f}")
print(f"retrieved pulse peaks {(res.t[np.argmax(np.abs(res.output.samples[k:]))+k] - t_rel) * 1e9:.1f} ns after release")
