"""Frequency-domain characterization: CW maps, pulsed reflection maps and S11 circle fits."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import least_squares

from .coupler import coupler_state, voltage_to_flux
from .dynamics import DEFAULT_DT, _half_grid, _integrate, max_detuning, reflection
from .model import DeviceModel
from .pulses import PulseSpec


@dataclass(frozen=True)
class ResonanceFit:
    """Reflection-resonance parameters.

    ``Q_c`` is the magnitude of the complex coupling quality factor
    ``Q_c exp(-i phi0)``; the internal quality factor satisfies
    ``1/Q_l = 1/Q_i + cos(phi0)/Q_c``. ``a``, ``alpha`` and ``delay`` describe
    the measurement environment.
    """

    f_r: float
    Q_l: float
    Q_c: float
    phi0: float
    Q_i: float
    rms_residual: float
    a: float = 1.0
    alpha: float = 0.0
    delay: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def model(self, f):
        return reflection_resonance(f, self.f_r, self.Q_l, self.Q_c, self.phi0, self.a, self.alpha, self.delay)


def reflection_resonance(f, f_r, Q_l, Q_c, phi0=0.0, a=1.0, alpha=0.0, delay=0.0):
    """Single-port reflection of one resonance in a delayed, scaled environment."""
    f = np.asarray(f, dtype=float)
    env = a * np.exp(1j * alpha) * np.exp(-2j * np.pi * f * delay)
    return env * (1 - (2 * Q_l / Q_c) * np.exp(1j * phi0) / (1 + 2j * Q_l * (f / f_r - 1)))


def spectroscopy_map(model: DeviceModel, flux_grid, freq_grid) -> np.ndarray:
    """Matrix of CW S11, rows over ``flux_grid`` and columns over ``freq_grid``."""
    flux = np.asarray(flux_grid, dtype=float)
    freq = np.asarray(freq_grid, dtype=float)
    if flux.size == 0 or freq.size == 0:
        raise ValueError("grids must be non-empty")
    st = coupler_state(flux, model.coupler)
    kappa = np.atleast_1d(st.kappa)[:, None]
    pull = np.atleast_1d(st.common_pull)[:, None]
    return reflection(model, np.broadcast_to(freq, (flux.size, freq.size)), kappa, pull)


def _taubin(z):
    """Algebraic circle fit (Taubin, SVD form). Returns centre and radius."""
    x, y = z.real, z.imag
    xm, ym = x.mean(), y.mean()
    X, Y = x - xm, y - ym
    Z = X * X + Y * Y
    zmean = Z.mean()
    if not zmean > 0:
        raise ValueError("no resonance found: degenerate data")
    Z0 = (Z - zmean) / (2 * np.sqrt(zmean))
    _, s, vt = np.linalg.svd(np.column_stack([Z0, X, Y]), full_matrices=False)
    A = vt[-1].copy()
    A[0] /= 2 * np.sqrt(zmean)
    A = np.append(A, -zmean * A[0])
    if abs(A[0]) < 1e-14 * np.linalg.norm(A):
        raise ValueError("no resonance found: points are collinear")
    xc = -A[1] / A[0] / 2 + xm
    yc = -A[2] / A[0] / 2 + ym
    r = np.sqrt(A[1] ** 2 + A[2] ** 2 - 4 * A[0] * A[3]) / abs(A[0]) / 2
    return complex(xc, yc), float(r)


def _wing_delay(f, z, wing_fraction):
    n = len(f)
    k = max(2, int(round(wing_fraction * n / 2)))
    idx = np.r_[0:k, n - k:n]
    phase = np.unwrap(np.angle(z))
    left = np.zeros(n)
    left[:k] = 1
    design = np.column_stack([f[idx] - f.mean(), left[idx], 1 - left[idx]])
    coef, *_ = np.linalg.lstsq(design, phase[idx], rcond=None)
    return -coef[0] / (2 * np.pi)


def _phase_fit(f, zc_centered, f0, Q0):
    theta = np.angle(zc_centered)
    k = int(np.argmin(np.abs(f - f0)))
    th0 = theta[k]

    def res(p):
        t0, lq, x = p
        fr = f0 * (1 + x / Q0)
        model = t0 + 2 * np.arctan(2 * np.exp(lq) * (1 - f / fr))
        return np.angle(np.exp(1j * (theta - model)))

    sol = least_squares(res, [th0, np.log(Q0), 0.0], x_scale=[1.0, 1.0, 1.0])
    t0, lq, x = sol.x
    return float(t0), float(np.exp(lq)), float(f0 * (1 + x / Q0))


def fit_resonance(freqs, s11, wing_fraction: float = 0.2) -> ResonanceFit:
    """Circle fit of one reflection resonance.

    Steps: cable delay from a shared-slope linear phase fit on the outer
    ``wing_fraction`` of the span; Taubin circle fit; arctangent phase fit
    about the circle centre for ``f_r`` and ``Q_l``; ``Q_c`` and ``phi0`` from
    the circle diameter and the off-resonant point; ``Q_i`` from
    ``1/Q_l = 1/Q_i + cos(phi0)/Q_c``. A final least-squares pass on the full
    complex model polishes all parameters jointly.
    """
    f = np.asarray(freqs, dtype=float)
    z = np.asarray(s11, dtype=complex)
    if f.size < 8:
        raise ValueError("need at least 8 points")
    order = np.argsort(f)
    f, z = f[order], z[order]
    spread = np.ptp(z.real) + np.ptp(z.imag)
    if spread <= 1e-9 * max(np.abs(z).max(), 1e-300):
        raise ValueError("no resonance found: flat response")
    sv = np.linalg.svd(np.column_stack([z.real - z.real.mean(), z.imag - z.imag.mean()]), compute_uv=False)
    if sv[1] <= 1e-9 * sv[0]:
        raise ValueError("no resonance found: points are collinear")

    delay = _wing_delay(f, z, wing_fraction)
    z1 = z * np.exp(2j * np.pi * f * delay)
    zc, r = _taubin(z1)
    if r > 100 * spread:
        raise ValueError("no resonance found: points are collinear")

    centered = z1 - zc
    theta = np.unwrap(np.angle(centered))
    dth = np.gradient(theta, f)
    k = int(np.argmax(np.abs(dth)))
    f0 = f[k]
    Q0 = max(abs(dth[k]) * f0 / 4, 1.0)
    theta0, Q_l, f_r = _phase_fit(f, centered, f0, Q0)

    off = zc + r * np.exp(1j * (theta0 + np.pi))
    a, alpha = abs(off), float(np.angle(off))
    zc_n = zc / off
    phi0 = float(np.angle(1 - zc_n))
    Q_c = Q_l / abs(1 - zc_n)

    # environment phase referenced to the band centre so alpha and delay decouple
    f_mid = 0.5 * (f[0] + f[-1])
    alpha_mid = float(np.angle(np.exp(1j * (alpha - 2 * np.pi * f_mid * delay))))
    p0 = np.array([a, alpha_mid, 0.0, 0.0, np.log(Q_l), np.log(Q_c), phi0])
    scale_f = f_r / Q_l
    scale_tau = 1 / (2 * np.pi * (f[-1] - f[0]))

    def unpack(p):
        tau = delay + p[2] * scale_tau
        return (f_r + p[3] * scale_f, np.exp(p[4]), np.exp(p[5]), p[6], p[0],
                p[1] + 2 * np.pi * f_mid * tau, tau)

    def res(p):
        d = reflection_resonance(f, *unpack(p)) - z
        return np.concatenate([d.real, d.imag])

    sol = least_squares(res, p0, method="trf", x_scale="jac", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
    f_r, Q_l, Q_c, phi0, a, alpha, delay = unpack(sol.x)
    alpha = float(np.angle(np.exp(1j * alpha)))
    phi0 = float(np.angle(np.exp(1j * phi0)))
    inv_qi = 1 / Q_l - np.cos(phi0) / Q_c
    Q_i = float(1 / inv_qi) if inv_qi > 0 else np.inf
    resid = reflection_resonance(f, f_r, Q_l, Q_c, phi0, a, alpha, delay) - z
    rms = float(np.sqrt(np.mean(np.abs(resid) ** 2)) / a)
    return ResonanceFit(float(f_r), float(Q_l), float(Q_c), phi0, Q_i, rms, float(a), float(alpha), float(delay))


def initial_reflection_map(model: DeviceModel, pulse: PulseSpec, voltage_grid, freq_grid,
                           reference_window: tuple[float, float] | None = None,
                           dt: float | None = None, jobs: int = 1) -> np.ndarray:
    """Pulsed initial-reflection intensity over (voltage, carrier frequency).

    Each cell is a recording-only run at ``voltage_to_flux(voltage)`` driven
    by ``pulse`` with its carrier at the cell frequency. The value is the
    peak of ``|s_out|^2`` inside ``reference_window`` (default: pulse centre
    +/- 1.5 fwhm), divided by the same peak of the switched-off reference
    run at that frequency.

    ``dt=None`` picks the largest step not above 0.1 ns that satisfies the
    detuning bound for every cell. Cells are integrated as one vectorised
    batch, split into ``jobs`` chunks run on threads.
    """
    volts = np.atleast_1d(np.asarray(voltage_grid, dtype=float))
    freqs = np.atleast_1d(np.asarray(freq_grid, dtype=float))
    if reference_window is None:
        reference_window = (pulse.center - 1.5 * pulse.fwhm, pulse.center + 1.5 * pulse.fwhm)
    fd = model.reference_input_frequency
    st = coupler_state(voltage_to_flux(volts, model.coupler), model.coupler)
    kappa = np.atleast_1d(st.kappa)
    pull = np.atleast_1d(st.common_pull)
    limit = 1 / (20 * max(max_detuning(model, pull), np.max(np.abs(freqs - fd)), 1.0))
    if dt is None:
        dt = min(DEFAULT_DT, limit)
    elif dt > limit * (1 + 1e-9):
        raise ValueError("step too coarse for the requested grid")

    t0 = pulse.center - 3 * pulse.fwhm
    n = int(np.ceil((reference_window[1] - t0) / dt)) + 1
    th = _half_grid(t0, dt, n)
    t = th[::2]
    x = th[:, None] - pulse.center
    env = pulse.amplitude * np.exp(-4 * np.log(2) * x**2 / pulse.fwhm**2)
    drives = env * np.exp(2j * np.pi * (freqs - fd)[None, :] * x)      # (H, F)
    in_win = (t >= reference_window[0]) & (t <= reference_window[1])

    def peak_out(drive, kap, pul):
        A, _ = _integrate(model, dt, drive, kap[None, :], pul[None, :])
        s_out = np.sqrt(2 * np.pi * kap)[None, :] * A - drive[::2]
        return np.max(np.abs(s_out[in_win]) ** 2, axis=0)

    off = coupler_state(model.coupler.switch_off_flux, model.coupler)
    ref = peak_out(drives, np.full(freqs.size, off.kappa), np.full(freqs.size, off.common_pull))

    cells_k = np.repeat(kappa, freqs.size)
    cells_p = np.repeat(pull, freqs.size)
    cells_d = np.tile(drives, (1, volts.size))
    chunks = np.array_split(np.arange(cells_k.size), max(1, jobs))
    work = [(cells_d[:, c], cells_k[c], cells_p[c]) for c in chunks if c.size]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            parts = list(ex.map(lambda w: peak_out(*w), work))
    else:
        parts = [peak_out(*w) for w in work]
    peaks = np.concatenate(parts).reshape(volts.size, freqs.size)
    return peaks / ref[None, :]
