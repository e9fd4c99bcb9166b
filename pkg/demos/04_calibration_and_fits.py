"""Finding the operating point from pulsed reflection, then fitting a resonance.

A grid of short recording runs over bias voltage and carrier frequency
shows where the pulse is absorbed best; it lands on the matched bias and
the comb centre. A circle fit then recovers the quality factors of a
single reflection resonance.
"""
import numpy as np

from combmem import fit_resonance, initial_reflection_map, load_preset, reflection_resonance

cfg = load_preset("paper-ideal")
volts = np.linspace(-0.02, 0.02, 21)
freqs = np.linspace(5.99e9, 6.01e9, 21)
m = initial_reflection_map(cfg.device, cfg.pulse, volts, freqs, jobs=4)
i, j = np.unravel_index(np.argmin(m), m.shape)
print(f"least initial reflection {m[i, j]:.3g} at {volts[i]:+.3f} V, {freqs[j] / 1e9:.4f} GHz")
print("reflection along the best voltage row:", np.round(m[i, ::4], 3))

# a resonance seen through a cable: scaled, rotated and delayed
q_i, q_c, phi0 = 4.3e5, 1e5, 0.05
q_l = 1 / (1 / q_i + np.cos(phi0) / q_c)
f = np.linspace(5.9915e9, 5.9925e9, 601)
rng = np.random.default_rng(1)
s11 = reflection_resonance(f, 5.992e9, q_l, q_c, phi0, a=0.6, alpha=1.1, delay=45e-9)
s11 = s11 + 0.005 * (rng.standard_normal(f.size) + 1j * rng.standard_normal(f.size))
fit = fit_resonance(f, s11)
print(f"fit: f_r = {fit.f_r / 1e9:.7f} GHz, Q_i = {fit.Q_i:.3g}, Q_c = {fit.Q_c:.3g}, "
      f"delay = {fit.delay * 1e9:.2f} ns, rms residual {fit.rms_residual:.2g}")
