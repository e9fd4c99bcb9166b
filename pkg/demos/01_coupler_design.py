"""Designing the operating point of the tunable coupler.

The comb absorbs an incoming pulse without reflection when the external
linewidth of the common resonator equals 2 pi g^2 / spacing. The RF-SQUID
coupler reaches that value at one flux bias, and the same bias pulls the
common resonator down into the comb band. This script calibrates a coupler
so that both happen at flux 0.33 and prints how steeply kappa varies around
that point.
"""
import numpy as np

from combmem import CouplerModel, calibrate_coupler, coupler_state, flux_to_voltage, matched_kappa

g, spacing = 4.38e6, 6e6
kappa = matched_kappa(g, spacing)
print(f"impedance-matched kappa for g = {g / 1e6} MHz, spacing = {spacing / 1e6} MHz: {kappa / 1e6:.3f} MHz")

# junction and loop from the device design; 1.5 flux quanta per volt
base = CouplerModel(critical_current=0.3e-6, loop_inductance=0.65e-9, wirebond_inductance=0.5e-9,
                    flux_per_volt=1.5, flux_offset=0.33)
print(f"screening parameter beta_L = {base.beta_l:.3f} (single-valued below 1)")

# put the common resonator (6.15 GHz unbiased) at 6.000 GHz when matched
cm = calibrate_coupler(0.33, kappa, -150e6, base)

flux = np.array([0.0, 0.1, 0.2, 0.3, 0.32, 0.33, 0.34, 0.36, 0.4])
st = coupler_state(flux, cm)
print("\n flux   volts    kappa/MHz   common/GHz")
for x, v, k, p in zip(flux, flux_to_voltage(flux, cm), st.kappa, st.common_pull):
    print(f"{x:5.2f}  {v:+6.3f}  {k / 1e6:10.3f}   {(6.15e9 + p) / 1e9:9.4f}")

# the bias tolerance: +/-10 % in kappa
lo, hi = np.interp([0.9 * kappa, 1.1 * kappa], st.kappa, flux)
print(f"\nkappa within 10 % of matched for flux in [{lo:.4f}, {hi:.4f}], "
      f"i.e. {1e3 * (hi - lo) / cm.flux_per_volt:.1f} mV of bias")
