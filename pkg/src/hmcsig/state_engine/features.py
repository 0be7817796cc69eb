"""Per-window feature vectors: EEG band powers and EEG-EMG CMC areas.

Schema order is two channel-major blocks: first ``<ch>.alpha_power``,
``<ch>.beta_power`` for every EEG channel, then ``<ch>.cmc_beta``,
``<ch>.cmc_gamma`` for every EEG channel. Eight EEG channels give 32
features.
"""

from dataclasses import dataclass, field

import numpy as np

from ..cmc import coherence, significant_area
from ..montage import DEFAULT_EEG_CHANNELS
from ..spectral import ALPHA, BETA, GAMMA, WelchConfig, band_power, welch_psd

PSD_KINDS = ("alpha_power", "beta_power")
CMC_KINDS = ("cmc_beta", "cmc_gamma")


@dataclass(frozen=True)
class FeatureSchema:
    channels: tuple

    @classmethod
    def default(cls):
        return cls(DEFAULT_EEG_CHANNELS)

    @property
    def names(self):
        psd = [f"{c}.{k}" for c in self.channels for k in PSD_KINDS]
        cmc = [f"{c}.{k}" for c in self.channels for k in CMC_KINDS]
        return psd + cmc

    @property
    def kinds(self):
        return [n.split(".", 1)[1] for n in self.names]

    def index(self, channel, kind):
        return self.names.index(f"{channel}.{kind}")

    def __len__(self):
        return 4 * len(self.channels)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    schema: FeatureSchema
    window_start_s: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.schema),):
            raise ValueError(f"expected {len(self.schema)} features, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("features must be finite")
        object.__setattr__(self, "values", v)

    def as_dict(self):
        return dict(zip(self.schema.names, self.values.tolist()))


@dataclass(frozen=True)
class FeatureConfig:
    """Knobs for :func:`extract_features`.

    Welch segments are ``segment_fraction`` of the window with
    ``overlap_fraction`` overlap, shared by the PSD and the coherence.
    """

    segment_fraction: float = 1 / 8
    overlap_fraction: float = 0.5
    alpha: float = 0.05
    psd_bands: tuple = (ALPHA, BETA)
    cmc_bands: tuple = (BETA, GAMMA)
    threshold_form: str = "sqrt"

    def welch(self, n_samples, fs):
        seg = max(int(n_samples * self.segment_fraction + 1e-9), 8)
        return WelchConfig(seg, fs, self.overlap_fraction)


def extract_features(eeg_window, emg_window, cfg=None, schema=None):
    """Feature vector for one aligned pair of EEG and EMG windows.

    ``eeg_window.samples`` holds one column per schema channel; the first
    column of ``emg_window.samples`` is the EMG reference.
    """
    cfg = cfg or FeatureConfig()
    eeg = np.asarray(eeg_window.samples, dtype=float)
    emg = np.asarray(emg_window.samples, dtype=float)
    if eeg.ndim == 1:
        eeg = eeg[:, None]
    if emg.ndim == 2:
        emg = emg[:, 0]
    schema = schema or FeatureSchema(tuple(f"ch{i}" for i in range(eeg.shape[1])))
    if eeg.shape[1] != len(schema.channels):
        raise ValueError(f"EEG window has {eeg.shape[1]} channels, schema expects {len(schema.channels)}")
    if (eeg_window.sample_rate_hz != emg_window.sample_rate_hz
            or eeg_window.start_sample != emg_window.start_sample
            or eeg.shape[0] != emg.shape[0]):
        raise ValueError("EEG and EMG windows are not aligned")
    fs = eeg_window.sample_rate_hz
    welch = cfg.welch(eeg.shape[0], fs)
    psd, cmc = [], []
    for c in range(eeg.shape[1]):
        spec = welch_psd(eeg[:, c], welch)
        psd.extend(band_power(spec, b) for b in cfg.psd_bands)
        coh = coherence(eeg[:, c], emg, welch)
        cmc.extend(significant_area(coh, b, cfg.alpha, cfg.threshold_form).significant_area
                   for b in cfg.cmc_bands)
    return FeatureVector(np.array(psd + cmc), schema, eeg_window.start_s)


def schema_from_names(names):
    """Rebuild a schema from its feature names, checking the canonical order."""
    channels = []
    for n in names:
        ch = n.split(".", 1)[0]
        if ch not in channels:
            channels.append(ch)
    schema = FeatureSchema(tuple(channels))
    if list(names) != schema.names:
        raise ValueError("feature columns are not in schema order")
    return schema


def write_feature_csv(path, x, schema, labels=None, t_s=None):
    """One row per vector; optional leading ``label`` and ``t_s`` columns."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    head = (["label"] if labels is not None else []) + (["t_s"] if t_s is not None else [])
    lines = [",".join(head + schema.names)]
    for i, row in enumerate(x):
        pre = []
        if labels is not None:
            pre.append(getattr(labels[i], "value", labels[i]))
        if t_s is not None:
            pre.append(repr(round(float(t_s[i]), 9)))
        lines.append(",".join(pre + [repr(float(v)) for v in row]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_feature_csv(path):
    """Inverse of :func:`write_feature_csv`: ``(x, schema, labels, t_s)``."""
    import csv

    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty feature table")
    head = rows[0]
    labels = [] if "label" in head else None
    t_s = [] if "t_s" in head else None
    skip = (labels is not None) + (t_s is not None)
    schema = schema_from_names(head[skip:])
    x = []
    for i, r in enumerate(rows[1:], start=2):
        if len(r) != len(head):
            raise ValueError(f"{path}: line {i} has {len(r)} fields, expected {len(head)}")
        j = 0
        if labels is not None:
            labels.append(r[0])
            j = 1
        if t_s is not None:
            t_s.append(float(r[j]))
            j += 1
        x.append([float(v) for v in r[j:]])
    x = np.array(x, dtype=float).reshape(len(x), len(schema))
    return x, schema, labels, None if t_s is None else np.array(t_s)
