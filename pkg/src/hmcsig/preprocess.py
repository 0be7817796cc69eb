"""Filtering, resampling, artifact rejection and epoching.

All filters are applied forward and backward (zero phase). Channels are
filtered independently, so results do not depend on channel order.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import signal

FILTER_ORDER = 4
KAISER_BETA = 8.0
DEFAULT_NOTCH_Q = 30.0
DEFAULT_Z_THRESHOLD = 5.0
DEFAULT_ARTIFACT_WINDOW_S = 1.0


@dataclass(frozen=True, eq=False)
class Epoch:
    start_sample: int
    samples: np.ndarray
    sample_rate_hz: float

    @property
    def start_s(self):
        return self.start_sample / self.sample_rate_hz


@dataclass(frozen=True)
class ArtifactMask:
    """Keep/reject flag per non-overlapping window, plus reasons for rejects."""

    keep: tuple
    reasons: dict
    window_samples: int

    def __len__(self):
        return len(self.keep)

    @property
    def n_rejected(self):
        return sum(not k for k in self.keep)

    def sample_mask(self, n_samples):
        """Boolean per-sample keep mask; samples past the last window are kept."""
        out = np.ones(n_samples, dtype=bool)
        for i, k in enumerate(self.keep):
            if not k:
                out[i * self.window_samples:(i + 1) * self.window_samples] = False
        return out


def n_samples_for(duration_s, rate_hz):
    """Whole samples in ``duration_s``, rounding toward zero.

    A relative slack of 1e-9 absorbs binary representation error, so
    0.29 s at 100 Hz gives 29 samples, not 28.
    """
    x = duration_s * rate_hz
    return int(math.floor(x + 1e-9 * max(1.0, abs(x))))


def _as_2d(x):
    x = np.asarray(x, dtype=float)
    return (x[:, None], True) if x.ndim == 1 else (x, False)


def _apply(rec_or_array, fn):
    # Recordings go in and out as Recordings; bare arrays stay arrays.
    if hasattr(rec_or_array, "samples"):
        return rec_or_array.with_samples(fn(rec_or_array.samples))
    x, flat = _as_2d(rec_or_array)
    y = fn(x)
    return y[:, 0] if flat else y


def _rate_of(rec_or_array, fs):
    if hasattr(rec_or_array, "sample_rate_hz"):
        return rec_or_array.sample_rate_hz
    if fs is None:
        raise ValueError("fs is required for bare arrays")
    return float(fs)


def bandpass_sos(lo_hz, hi_hz, fs):
    """Second-order sections of the Butterworth band-pass used by :func:`bandpass`.

    ``lo_hz == 0`` gives a low-pass.
    """
    nyq = fs / 2.0
    if not (0 <= lo_hz < hi_hz < nyq):
        raise ValueError(f"band edges must satisfy 0 <= lo < hi < {nyq} Hz, got {lo_hz}, {hi_hz}")
    if lo_hz == 0:
        return signal.butter(FILTER_ORDER, hi_hz, btype="lowpass", fs=fs, output="sos")
    return signal.butter(FILTER_ORDER, [lo_hz, hi_hz], btype="bandpass", fs=fs, output="sos")


def _filtfilt(sos, x):
    padlen = min(x.shape[0] - 1, 3 * (2 * len(sos) + 1))
    return signal.sosfiltfilt(sos, x, axis=0, padtype="odd", padlen=padlen)


def bandpass(rec, lo_hz, hi_hz, fs=None):
    """Zero-phase 4th-order Butterworth band-pass."""
    rate = _rate_of(rec, fs)
    sos = bandpass_sos(lo_hz, hi_hz, rate)
    return _apply(rec, lambda x: _filtfilt(sos, x))


def notch(rec, f0_hz, quality=DEFAULT_NOTCH_Q, fs=None):
    """Zero-phase band-stop at ``f0_hz`` (e.g. 60 Hz mains)."""
    rate = _rate_of(rec, fs)
    if not (0 < f0_hz < rate / 2.0):
        raise ValueError(f"notch frequency must lie in (0, {rate / 2.0}) Hz, got {f0_hz}")
    if quality <= 0:
        raise ValueError("quality must be positive")
    b, a = signal.iirnotch(f0_hz, quality, fs=rate)
    sos = signal.tf2sos(b, a)
    return _apply(rec, lambda x: _filtfilt(sos, x))


def resample(rec, target_rate_hz, fs=None):
    """Polyphase resampling with a Kaiser-windowed sinc (beta 8).

    The channel mean is removed before filtering and restored afterwards so
    constant offsets pass through exactly.
    """
    rate = _rate_of(rec, fs)
    if not target_rate_hz > 0:
        raise ValueError("target rate must be positive")
    ratio = Fraction(target_rate_hz / rate).limit_denominator(10000)
    if ratio == 1:
        out = rec if hasattr(rec, "samples") else np.array(rec, dtype=float)
        return out

    def run(x):
        mean = x.mean(axis=0)
        y = signal.resample_poly(x - mean, ratio.numerator, ratio.denominator, axis=0,
                                 window=("kaiser", KAISER_BETA))
        return y + mean

    if hasattr(rec, "samples"):
        y = run(rec.samples)
        scale = y.shape[0] / rec.n_samples
        markers = []
        for m in rec.markers:
            s = min(int(round(m.start_sample * scale)), y.shape[0] - 1)
            e = min(max(int(round(m.end_sample * scale)), s + 1), y.shape[0])
            markers.append(type(m)(m.name, s, e))
        return rec.with_samples(y, sample_rate_hz=float(target_rate_hz), markers=tuple(markers))
    x, flat = _as_2d(rec)
    y = run(x)
    return y[:, 0] if flat else y


def reject_artifacts(rec, window_s=DEFAULT_ARTIFACT_WINDOW_S, z_threshold=DEFAULT_Z_THRESHOLD,
                     fs=None):
    """Flag windows whose peak-to-peak amplitude is an outlier.

    The recording is tiled into non-overlapping windows. For each channel the
    peak-to-peak amplitude of every window is compared with the mean and
    standard deviation of that channel's peak-to-peak values; a window is
    rejected if any channel exceeds ``mean + z_threshold * std``.
    """
    if window_s <= 0 or z_threshold <= 0:
        raise ValueError("window_s and z_threshold must be positive")
    rate = _rate_of(rec, fs)
    x = rec.samples if hasattr(rec, "samples") else _as_2d(rec)[0]
    names = rec.channel_names if hasattr(rec, "channel_names") else [str(i) for i in range(x.shape[1])]
    w = n_samples_for(window_s, rate)
    n_win = x.shape[0] // w if w > 0 else 0
    if n_win < 1:
        raise ValueError("recording is shorter than one artifact window")
    tiles = x[:n_win * w].reshape(n_win, w, x.shape[1])
    p2p = tiles.max(axis=1) - tiles.min(axis=1)
    mean = p2p.mean(axis=0)
    std = p2p.std(axis=0)
    # Slack of a few ulps so numerically flat channels never trip.
    slack = 64 * np.finfo(float).eps * np.maximum(np.abs(mean), 1.0)
    over = p2p > mean + z_threshold * std + slack
    keep, reasons = [], {}
    for i in range(n_win):
        bad = [names[c] for c in np.flatnonzero(over[i])]
        keep.append(not bad)
        if bad:
            reasons[i] = "peak-to-peak outlier on " + ", ".join(bad)
    return ArtifactMask(tuple(keep), reasons, w)


def epoch_starts(n_samples, window_samples, step_samples):
    if window_samples < 1 or step_samples < 1:
        raise ValueError("window and step must each cover at least one sample")
    if step_samples > window_samples:
        raise ValueError("step must not exceed the window")
    if window_samples > n_samples:
        raise ValueError("window is longer than the recording")
    count = (n_samples - window_samples) // step_samples + 1
    return np.arange(count) * step_samples


def epoch(rec, window_s, step_s, fs=None):
    """Fixed-length sliding windows at starts 0, step, 2*step, ..."""
    if not (0 < step_s <= window_s):
        raise ValueError("need 0 < step_s <= window_s")
    rate = _rate_of(rec, fs)
    x = rec.samples if hasattr(rec, "samples") else _as_2d(rec)[0]
    w = n_samples_for(window_s, rate)
    s = n_samples_for(step_s, rate)
    return [Epoch(int(i), x[i:i + w], rate) for i in epoch_starts(x.shape[0], w, s)]
