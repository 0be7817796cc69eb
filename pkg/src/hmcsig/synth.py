"""Synthetic signals and features with known ground truth.

``gen_shared_source`` builds an EEG/EMG-like pair x = s + n1, y = s + n2
where s is white noise passed through the zero-phase band-pass of
:mod:`hmcsig.preprocess` and n1, n2 are independent white noises. The noise
levels are set from the *theoretical* in-band power of s (the filter's
squared magnitude response integrated over the band), so the in-band
shared-to-noise power ratios equal ``snr1`` and ``snr2`` in expectation and
the in-band coherence is 1 / ((1 + 1/snr1) (1 + 1/snr2)).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from . import preprocess
from .signal_io import ChannelMeta, Marker, Recording
from .spectral import BandSpec
from .state_engine.features import FeatureSchema
from .state_engine.labels import StateKind

MIN_SEGMENT = 8


@dataclass(frozen=True)
class SharedSourceSpec:
    duration_s: float
    sample_rate_hz: float
    band: BandSpec
    snr1: float
    snr2: float
    seed: int

    def __post_init__(self):
        if self.snr1 < 0 or self.snr2 < 0:
            raise ValueError("snr must be non-negative")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")
        if self.n_samples < 8 * MIN_SEGMENT * 2:
            raise ValueError("duration too short for a Welch estimate")
        if not self.band.hi_hz < self.sample_rate_hz / 2:
            raise ValueError("band must lie below Nyquist")

    @property
    def n_samples(self):
        return preprocess.n_samples_for(self.duration_s, self.sample_rate_hz)


def expected_coherence(snr1, snr2):
    """In-band coherence of x = s + n1, y = s + n2 with the given power ratios."""
    def share(snr):
        if math.isinf(snr):
            return 1.0
        return snr / (1.0 + snr)
    return share(snr1) * share(snr2)


def filtered_inband_power(band, fs, white_var=1.0):
    """Expected in-band power of zero-phase band-passed white noise.

    One-sided white PSD is 2 var / fs; forward-backward filtering applies |H|^4.
    """
    sos = preprocess.bandpass_sos(band.lo_hz, band.hi_hz, fs)
    f = np.linspace(band.lo_hz, band.hi_hz, 4001)
    _, h = signal.sosfreqz(sos, worN=f, fs=fs)
    return float(np.trapezoid(2.0 * white_var / fs * np.abs(h) ** 4, f))


def _noise_std(shared_power, band, fs, snr):
    # white noise of variance v has in-band power 2 v B / fs
    if math.isinf(snr):
        return 0.0
    ratio = snr if snr > 0 else 1.0
    var = shared_power / ratio * fs / (2.0 * band.width_hz)
    return math.sqrt(var)


def gen_shared_source(spec):
    """Return ``(x, y, expected_coherence)`` for a shared-source pair.

    ``snr = inf`` removes that channel's noise; ``snr = 0`` removes the shared
    component from that channel (its noise keeps the level snr = 1 would give).
    """
    rng = np.random.default_rng(spec.seed)
    n, fs, band = spec.n_samples, spec.sample_rate_hz, spec.band
    w = rng.standard_normal(n)
    e1 = rng.standard_normal(n)
    e2 = rng.standard_normal(n)
    s = preprocess.bandpass(w, band.lo_hz, band.hi_hz, fs=fs)
    p_s = filtered_inband_power(band, fs)
    x = (s if spec.snr1 > 0 else 0.0) + _noise_std(p_s, band, fs, spec.snr1) * e1
    y = (s if spec.snr2 > 0 else 0.0) + _noise_std(p_s, band, fs, spec.snr2) * e2
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float), expected_coherence(spec.snr1, spec.snr2)


def shared_source_recording(spec, eeg_name="C3", emg_name="EMG1", scale_uv=10.0):
    """The pair from :func:`gen_shared_source` as a two-channel recording.

    Samples are scaled to microvolt-like magnitudes; coherence is unaffected.
    """
    x, y, _ = gen_shared_source(spec)
    channels = (ChannelMeta.eeg(eeg_name), ChannelMeta.emg(emg_name))
    samples = np.column_stack([x, y]) * scale_uv
    return Recording(spec.sample_rate_hz, channels, samples,
                     (Marker("synthetic", 0, samples.shape[0]),))


# Baseline feature levels: powers and CMC areas well clear of zero so the
# non-negativity clip never binds at separations used in practice.
BASELINE_MEAN = {"alpha_power": 20.0, "beta_power": 20.0, "cmc_beta": 12.0, "cmc_gamma": 12.0}
BASELINE_STD = 1.0

# +1: the feature is higher in the intuitive state
INTUITIVE_DIRECTION = {"alpha_power": +1, "beta_power": -1, "cmc_beta": +1, "cmc_gamma": +1}


def _state_sign(state):
    state = StateKind(state)
    if state is StateKind.INTUITIVE:
        return +1
    if state is StateKind.INTELLECTUAL:
        return -1
    raise ValueError(f"cannot generate features for state {state.value!r}")


def _draw(schema, n, shift_sd, rng):
    mean = np.array([BASELINE_MEAN[k] for k in schema.kinds])
    direction = np.array([INTUITIVE_DIRECTION[k] for k in schema.kinds], dtype=float)
    x = mean + BASELINE_STD * rng.standard_normal((n, len(schema)))
    x += shift_sd * BASELINE_STD * direction
    return np.maximum(x, 0.0)


def gen_state_features(state, n, separation, seed, schema=None):
    """``n`` feature vectors for one operator state.

    Coordinates are independent normals around a shared baseline. Intuitive
    samples are shifted by ``separation`` standard deviations towards higher
    alpha power, lower beta power and higher CMC area; intellectual samples
    are shifted the opposite way.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if separation < 0:
        raise ValueError("separation must be non-negative")
    sign = _state_sign(state)
    schema = schema or FeatureSchema.default()
    rng = np.random.default_rng(seed)
    return _draw(schema, n, sign * separation, rng)


def gen_baseline_features(n, seed, schema=None):
    """Calibration vectors drawn at the shared baseline (no state shift)."""
    schema = schema or FeatureSchema.default()
    return _draw(schema, n, 0.0, np.random.default_rng(seed))


def gen_labeled_features(n_per_class, separation, seed, schema=None):
    """Balanced dataset: ``(X, labels)`` with intuitive rows first."""
    ss = np.random.SeedSequence(seed).spawn(2)
    a = gen_state_features(StateKind.INTUITIVE, n_per_class, separation,
                           np.random.default_rng(ss[0]), schema)
    b = gen_state_features(StateKind.INTELLECTUAL, n_per_class, separation,
                           np.random.default_rng(ss[1]), schema)
    labels = [StateKind.INTUITIVE] * n_per_class + [StateKind.INTELLECTUAL] * n_per_class
    return np.vstack([a, b]), labels


def gen_state_stream(segments, step_s, separation, seed, schema=None):
    """Timestamped feature stream from ``[(state, duration_s), ...]``.

    Returns ``(t_s, X)``; one row per ``step_s``.
    """
    schema = schema or FeatureSchema.default()
    rng = np.random.default_rng(seed)
    times, rows = [], []
    k = 0
    for state, duration in segments:
        count = preprocess.n_samples_for(duration, 1.0 / step_s)
        sign = _state_sign(state)
        rows.append(_draw(schema, count, sign * separation, rng))
        times.append((k + np.arange(count)) * step_s)
        k += count
    return np.concatenate(times), np.vstack(rows)


# Amplitude profiles for synthetic subjects. Experts follow the intuitive
# signatures (more alpha, less beta, stronger EEG-EMG coupling); novices the
# intellectual ones.
SUBJECT_PROFILES = {
    "expert": {"alpha": 3.0, "beta": 1.5, "coupling": 1.0},
    "novice": {"alpha": 2.0, "beta": 2.5, "coupling": 0.3},
}
COUPLED_CHANNELS = ("Cz", "C3", "C4")


def gen_subject_recording(group, seed, duration_s=30.0, sample_rate_hz=1024.0,
                          channels=None, line_noise_hz=60.0, line_amplitude=2.0):
    """Eight-channel EEG plus one EMG recording for a synthetic subject.

    Each EEG channel mixes white background noise, band-limited alpha and
    beta activity and 60 Hz line pickup. A shared 15-45 Hz motor drive feeds
    the EMG and, scaled by the group's coupling, the central electrodes.
    Amplitudes vary between subjects by a lognormal factor (sd 0.1).
    """
    from .montage import DEFAULT_EEG_CHANNELS

    if group not in SUBJECT_PROFILES:
        raise ValueError(f"unknown group {group!r}")
    prof = SUBJECT_PROFILES[group]
    channels = tuple(channels or DEFAULT_EEG_CHANNELS)
    rng = np.random.default_rng(seed)
    fs = float(sample_rate_hz)
    n = preprocess.n_samples_for(duration_s, fs)
    t = np.arange(n) / fs
    jitter = np.exp(0.1 * rng.standard_normal(3))
    drive = preprocess.bandpass(rng.standard_normal(n), 15.0, 45.0, fs=fs)
    drive /= drive.std()
    line = line_amplitude * np.sin(2 * np.pi * line_noise_hz * t + rng.uniform(0, 2 * np.pi))
    cols = []
    for ch in channels:
        a = preprocess.bandpass(rng.standard_normal(n), 8.0, 12.0, fs=fs)
        b = preprocess.bandpass(rng.standard_normal(n), 15.0, 30.0, fs=fs)
        x = (rng.standard_normal(n)
             + prof["alpha"] * jitter[0] * a / a.std()
             + prof["beta"] * jitter[1] * b / b.std()
             + line)
        if ch in COUPLED_CHANNELS:
            x = x + prof["coupling"] * jitter[2] * drive
        cols.append(x)
    emg = drive + rng.standard_normal(n) + line
    samples = 10.0 * np.column_stack(cols + [emg])
    meta = tuple(ChannelMeta.eeg(c) for c in channels) + (ChannelMeta.emg("EMG1"),)
    return Recording(fs, meta, samples, (Marker("trench_finding", 0, n),))
