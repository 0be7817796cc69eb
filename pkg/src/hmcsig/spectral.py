"""Welch auto/cross spectra, band power and time-resolved band power.

Spectra are one-sided densities (signal^2/Hz) from Hann-windowed segments,
normalised by window energy. No detrending is applied, so the integral of
the PSD equals the mean square of the input (Parseval).
"""

from dataclasses import dataclass

import numpy as np

from .preprocess import epoch_starts, n_samples_for


@dataclass(frozen=True)
class BandSpec:
    name: str
    lo_hz: float
    hi_hz: float

    def __post_init__(self):
        if not (0 <= self.lo_hz < self.hi_hz):
            raise ValueError(f"band {self.name!r}: need 0 <= lo < hi, got {self.lo_hz}, {self.hi_hz}")

    @property
    def width_hz(self):
        return self.hi_hz - self.lo_hz

    @classmethod
    def parse(cls, text):
        """``"beta"`` or ``"15:30"``."""
        if text in BANDS:
            return BANDS[text]
        try:
            lo, hi = (float(v) for v in text.split(":"))
        except ValueError:
            raise ValueError(f"band must be a name ({', '.join(BANDS)}) or lo:hi, got {text!r}") from None
        return cls(f"{lo:g}-{hi:g}Hz", lo, hi)


THETA = BandSpec("theta", 4.0, 8.0)
ALPHA = BandSpec("alpha", 8.0, 12.0)
BETA = BandSpec("beta", 15.0, 30.0)
GAMMA = BandSpec("gamma", 30.0, 45.0)
BANDS = {b.name: b for b in (THETA, ALPHA, BETA, GAMMA)}
# theta overlaps excavator vibration and is left out of default feature sets
PSD_BANDS = (ALPHA, BETA)
CMC_BANDS = (BETA, GAMMA)


@dataclass(frozen=True)
class WelchConfig:
    segment_len_samples: int
    sample_rate_hz: float
    overlap_fraction: float = 0.5
    window_kind: str = "hann"

    def __post_init__(self):
        if self.segment_len_samples < 8:
            raise ValueError("segment length must be at least 8 samples")
        if not (0 <= self.overlap_fraction < 1):
            raise ValueError("overlap fraction must lie in [0, 1)")
        if self.window_kind != "hann":
            raise ValueError(f"unsupported window {self.window_kind!r}")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample rate must be positive")

    @classmethod
    def eighths(cls, n_samples, sample_rate_hz):
        """Segments of 1/8 the data length with half overlap (15 segments)."""
        return cls(int(n_samples) // 8, float(sample_rate_hz), 0.5)

    @property
    def step_samples(self):
        return self.segment_len_samples - int(self.segment_len_samples * self.overlap_fraction)

    @property
    def df_hz(self):
        return self.sample_rate_hz / self.segment_len_samples

    def n_segments(self, n_samples):
        if n_samples < self.segment_len_samples:
            return 0
        return (n_samples - self.segment_len_samples) // self.step_samples + 1

    def freqs(self):
        return np.fft.rfftfreq(self.segment_len_samples, 1.0 / self.sample_rate_hz)

    def check(self, n_samples, min_segments=1):
        k = self.n_segments(n_samples)
        if k < 1:
            raise ValueError(
                f"signal of {n_samples} samples is shorter than one segment ({self.segment_len_samples})")
        if k < min_segments:
            raise ValueError(f"need at least {min_segments} segments, signal gives {k}")
        return k


@dataclass(frozen=True, eq=False)
class SpectralEstimate:
    freqs_hz: np.ndarray
    values: np.ndarray
    n_segments: int

    @property
    def df_hz(self):
        return self.freqs_hz[1] - self.freqs_hz[0]


@dataclass(frozen=True, eq=False)
class CrossSpectrum:
    freqs_hz: np.ndarray
    values: np.ndarray
    n_segments: int


def hann(n):
    """Periodic Hann window (the DFT-even form used for spectral analysis)."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def _segment_spectra(x, cfg):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a single-channel series")
    k = cfg.check(x.size)
    n, step = cfg.segment_len_samples, cfg.step_samples
    idx = np.arange(k)[:, None] * step + np.arange(n)[None, :]
    w = hann(n)
    return np.fft.rfft(x[idx] * w, axis=1), w


def _one_sided(values, n, fs, w):
    scale = 1.0 / (fs * np.sum(w * w))
    out = values * scale
    # double everything except DC and (for even n) Nyquist
    stop = out.shape[-1] - 1 if n % 2 == 0 else out.shape[-1]
    out[..., 1:stop] *= 2.0
    return out


def welch_psd(x, cfg):
    """One-sided Welch PSD of a single channel."""
    spec, w = _segment_spectra(x, cfg)
    pxx = np.mean(np.abs(spec) ** 2, axis=0)
    pxx = _one_sided(pxx, cfg.segment_len_samples, cfg.sample_rate_hz, w)
    return SpectralEstimate(cfg.freqs(), pxx, spec.shape[0])


def cross_psd(x, y, cfg):
    """One-sided Welch cross spectrum, ``mean(conj(X) * Y)``.

    A positive delay of ``y`` relative to ``x`` gives phase ``-2*pi*f*d/fs``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    sx, w = _segment_spectra(x, cfg)
    sy, _ = _segment_spectra(y, cfg)
    pxy = np.mean(np.conj(sx) * sy, axis=0)
    pxy = _one_sided(pxy, cfg.segment_len_samples, cfg.sample_rate_hz, w)
    return CrossSpectrum(cfg.freqs(), pxy, sx.shape[0])


def periodogram(x, fs):
    """Hann-windowed single-segment PSD over the whole input."""
    x = np.asarray(x, dtype=float)
    n = x.size
    w = hann(n)
    pxx = np.abs(np.fft.rfft(x * w)) ** 2
    pxx = _one_sided(pxx, n, fs, w)
    return SpectralEstimate(np.fft.rfftfreq(n, 1.0 / fs), pxx, 1)


def integrate_band(freqs, values, lo, hi):
    """Exact integral over [lo, hi] of the piecewise-linear interpolant.

    Interpolated end points make the integral additive over adjacent bands.
    """
    freqs = np.asarray(freqs, dtype=float)
    if lo < freqs[0] or hi > freqs[-1] or not lo < hi:
        raise ValueError(f"band [{lo}, {hi}] outside the grid [{freqs[0]}, {freqs[-1]}]")
    inner = (freqs > lo) & (freqs < hi)
    f = np.concatenate(([lo], freqs[inner], [hi]))
    v = np.concatenate(([np.interp(lo, freqs, values)], values[inner], [np.interp(hi, freqs, values)]))
    return float(np.sum(0.5 * (v[1:] + v[:-1]) * np.diff(f)))


def band_power(spec, band):
    """Trapezoidal band integral of a PSD."""
    return max(integrate_band(spec.freqs_hz, spec.values, band.lo_hz, band.hi_hz), 0.0)


def sliding_band_power(x, band, fs, window_s=0.25, step_s=0.02):
    """Band power of the Hann periodogram on a sliding window.

    Returns ``(t_s, power)`` with ``t_s`` the window start times; the grid is
    the one produced by :func:`hmcsig.preprocess.epoch`. The band must be at
    least one frequency bin (``fs / window``) wide.
    """
    if step_s <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    w = n_samples_for(window_s, fs)
    s = n_samples_for(step_s, fs)
    resolution = fs / w if w else np.inf
    if band.width_hz < resolution - 1e-9:
        raise ValueError(
            f"band {band.name} ({band.width_hz:g} Hz) is narrower than the {resolution:g} Hz "
            f"resolution of a {window_s:g} s window")
    starts = epoch_starts(x.size, w, s)
    idx = starts[:, None] + np.arange(w)[None, :]
    win = hann(w)
    spec = np.abs(np.fft.rfft(x[idx] * win, axis=1)) ** 2
    spec = _one_sided(spec, w, fs, win)
    freqs = np.fft.rfftfreq(w, 1.0 / fs)
    power = np.array([integrate_band(freqs, row, band.lo_hz, band.hi_hz) for row in spec])
    return starts / fs, np.maximum(power, 0.0)
