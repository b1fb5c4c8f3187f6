"""Harmonic spectra from acceleration time series.

I(omega) = |FFT(a_x hann)|^2 + |FFT(a_y hann)|^2 on a zero-padded grid;
per-order intensities are band integrals over +-0.25 omega0 around each
harmonic.
"""

from dataclasses import dataclass

import numpy as np

PAD_FACTOR = 8
BAND_HALF_WIDTH = 0.25  # in units of omega0


@dataclass(frozen=True)
class Spectrum:
    freq: np.ndarray  # harmonic order omega / omega0, uniform
    intensity: np.ndarray
    omega0: float

    @property
    def resolution(self) -> float:
        """Frequency-axis spacing in units of omega0."""
        return float(self.freq[1] - self.freq[0])


def hann_window(n: int) -> np.ndarray:
    """Symmetric Hann window w_k = sin^2(pi k / (n-1)), endpoints zero."""
    if n < 2:
        raise ValueError("window needs at least two points")
    k = np.arange(n)
    return np.sin(np.pi * k / (n - 1)) ** 2


def _padded_length(n: int) -> int:
    """Next power of two >= PAD_FACTOR * n (keeps band edges
    interpolation-stable)."""
    target = PAD_FACTOR * n
    return 1 << int(np.ceil(np.log2(target)))


def power_spectrum(accel, dt: float, omega0: float,
                   pad_factor: int = PAD_FACTOR) -> Spectrum:
    """Windowed, zero-padded power spectrum of a (N, 2) acceleration series."""
    accel = np.atleast_2d(np.asarray(accel, dtype=float))
    n = accel.shape[0]
    if n < 16:
        raise ValueError("series too short for spectral analysis")
    window = hann_window(n)
    n_pad = 1 << int(np.ceil(np.log2(pad_factor * n)))
    # dt factor makes the transform approximate the continuous FT, so band
    # intensities are stable under time-step refinement
    transformed = dt * np.fft.rfft(accel * window[:, None], n=n_pad, axis=0)
    intensity = np.sum(np.abs(transformed) ** 2, axis=1)
    omega = 2.0 * np.pi * np.fft.rfftfreq(n_pad, d=dt)
    return Spectrum(freq=omega / omega0, intensity=intensity, omega0=omega0)


def harmonic_intensity(spec: Spectrum, n: int) -> float:
    """Band integral of I(omega) over [(n-0.25) omega0, (n+0.25) omega0],
    trapezoidal with linearly interpolated partial end bins."""
    lo = n - BAND_HALF_WIDTH
    hi = n + BAND_HALF_WIDTH
    if hi > spec.freq[-1]:
        raise ValueError(f"band around order {n} exceeds the Nyquist frequency")
    return _band_integral(spec, lo, hi)


def _band_integral(spec: Spectrum, lo: float, hi: float) -> float:
    freq = spec.freq
    inten = spec.intensity
    inner = np.nonzero((freq > lo) & (freq < hi))[0]
    xs = np.concatenate(([lo], freq[inner], [hi]))
    ys = np.concatenate((
        [np.interp(lo, freq, inten)],
        inten[inner],
        [np.interp(hi, freq, inten)],
    ))
    # integrate in physical omega so intensities compare across omega0 values
    return float(np.trapezoid(ys, xs * spec.omega0))


def harmonic_table(spec: Spectrum, orders) -> dict:
    return {int(n): harmonic_intensity(spec, n) for n in orders}


def even_odd_contrast(spec: Spectrum, max_order: int = 15) -> float:
    """Largest even-harmonic intensity relative to its adjacent odd
    neighbors; ~0 for an inversion-symmetric target."""
    table = harmonic_table(spec, range(1, max_order + 1))
    if max(table.values(), default=0.0) == 0.0:
        return 0.0
    ratios = []
    for n in range(2, max_order, 2):
        neighbor = min(table[n - 1], table[n + 1])
        if neighbor > 0.0:
            ratios.append(table[n] / neighbor)
    return max(ratios, default=0.0)
