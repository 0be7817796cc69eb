"""Corticomuscular coherence (CMC) and its significance threshold.

Coherence is the magnitude-squared cross spectrum normalised by both auto
spectra, all three taken from one shared Welch segmentation. A coherence
value is called significant when it exceeds

    sqrt(1 - alpha ** (1 / (df - 1)))

with ``df`` the number of Welch segments. ``form="conventional"`` drops the
square root, giving the usual ``1 - alpha ** (1 / (df - 1))`` level.
"""

from dataclasses import dataclass

import numpy as np

from .spectral import BandSpec, WelchConfig, cross_psd, integrate_band, welch_psd

# bins whose auto spectra fall below this fraction of the peak are degenerate
_DEGENERATE_REL = 1e-20


@dataclass(frozen=True, eq=False)
class CoherenceSpectrum:
    freqs_hz: np.ndarray
    coherence: np.ndarray
    n_segments: int
    eeg_channel: str = "x"
    emg_channel: str = "y"
    degenerate: np.ndarray | None = None

    @property
    def df_hz(self):
        return self.freqs_hz[1] - self.freqs_hz[0]

    def band_mean(self, band):
        """Mean coherence over grid bins inside [lo, hi]."""
        m = (self.freqs_hz >= band.lo_hz) & (self.freqs_hz <= band.hi_hz)
        if not m.any():
            raise ValueError(f"no frequency bins inside band {band.name}")
        return float(self.coherence[m].mean())


@dataclass(frozen=True)
class CmcFeature:
    band: BandSpec
    threshold: float
    significant_area: float
    n_significant_bins: int
    eeg_channel: str = "x"
    emg_channel: str = "y"


def coherence(x, y, cfg, eeg_channel="x", emg_channel="y"):
    """Magnitude-squared coherence |Pxy|^2 / (Pxx Pyy).

    Needs at least two Welch segments; a single segment gives coherence 1 at
    every bin regardless of the inputs. Bins where either auto spectrum is
    zero are set to 0 and flagged in ``degenerate``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    cfg.check(x.size, min_segments=2)
    pxx = welch_psd(x, cfg).values
    pyy = welch_psd(y, cfg).values
    pxy = cross_psd(x, y, cfg)
    denom = pxx * pyy
    floor = _DEGENERATE_REL * max(pxx.max(initial=0.0), 0.0) * max(pyy.max(initial=0.0), 0.0)
    degenerate = (denom <= floor) | (pxx <= 0) | (pyy <= 0)
    coh = np.zeros_like(pxx)
    ok = ~degenerate
    coh[ok] = np.abs(pxy.values[ok]) ** 2 / denom[ok]
    # Cauchy-Schwarz bounds coherence by 1 up to rounding
    coh = np.clip(coh, 0.0, 1.0)
    return CoherenceSpectrum(pxy.freqs_hz, coh, pxy.n_segments, eeg_channel, emg_channel,
                             degenerate)


def coherence_threshold(alpha, df, form="sqrt"):
    """Coherence significance level for ``df`` segments at level ``alpha``."""
    if not (0 < alpha < 1):
        raise ValueError("alpha must lie in (0, 1)")
    if int(df) != df or df < 2:
        raise ValueError("df must be an integer >= 2")
    level = 1.0 - alpha ** (1.0 / (df - 1))
    if form == "sqrt":
        return float(np.sqrt(level))
    if form == "conventional":
        return float(level)
    raise ValueError(f"unknown threshold form {form!r}")


def significant_area(coh, band, alpha=0.05, form="sqrt"):
    """Integral of supra-threshold coherence over a band.

    Bins at or below the threshold contribute zero; the masked coherence is
    integrated with the trapezoidal rule over [lo, hi], so a band of width B
    held at coherence 1 has area exactly B.
    """
    f = coh.freqs_hz
    if band.lo_hz < f[0] or band.hi_hz > f[-1]:
        raise ValueError(f"band {band.name} lies outside the coherence grid")
    thr = coherence_threshold(alpha, coh.n_segments, form)
    sig = coh.coherence > thr
    masked = np.where(sig, coh.coherence, 0.0)
    area = integrate_band(f, masked, band.lo_hz, band.hi_hz)
    in_band = (f >= band.lo_hz) & (f <= band.hi_hz)
    return CmcFeature(band, thr, max(area, 0.0), int(np.sum(sig & in_band)),
                      coh.eeg_channel, coh.emg_channel)


def cmc_features(x, y, bands, cfg=None, alpha=0.05, fs=None, eeg_channel="x", emg_channel="y"):
    """Coherence spectrum plus one :class:`CmcFeature` per band."""
    if cfg is None:
        if fs is None:
            raise ValueError("pass either cfg or fs")
        cfg = WelchConfig.eighths(len(x), fs)
    coh = coherence(x, y, cfg, eeg_channel, emg_channel)
    return coh, [significant_area(coh, b, alpha) for b in bands]
