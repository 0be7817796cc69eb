"""Streaming simulation: windows -> features -> state label -> assistance mode.

Windows are processed strictly in order by a single consumer. Each window's
processing time is compared against the window step; overruns are counted
and logged but the window is never dropped.
"""

import json
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .. import preprocess
from ..signal_io import ChannelKind, Recording
from .controller import ControllerState, DEFAULT_HYSTERESIS_K, step_controller
from .features import FeatureConfig, FeatureSchema, FeatureVector, extract_features
from .labels import AssistanceMode, StateKind
from .rules import Baseline, fit_baseline, rule_classify
from .tree import TreeModel, tree_classify

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FeatureStream:
    """Precomputed features, one row per window, with window start times."""

    t_s: np.ndarray
    values: np.ndarray
    schema: FeatureSchema = field(default_factory=FeatureSchema.default)
    step_s: float = 0.02

    def __post_init__(self):
        if self.values.shape != (len(self.t_s), len(self.schema)):
            raise ValueError("stream values do not match timestamps and schema")


@dataclass
class SimulationConfig:
    hysteresis_k: int = DEFAULT_HYSTERESIS_K
    initial_mode: AssistanceMode = AssistanceMode.MINIMAL
    model: TreeModel | None = None  # None selects the rule classifier
    baseline: Baseline | None = None
    calibration_s: float = 5.0
    window_s: float = 0.25
    step_s: float = 0.02
    features: FeatureConfig = field(default_factory=FeatureConfig)
    eeg_channels: tuple | None = None
    emg_channel: str | None = None
    decision_threshold: float = 0.5


@dataclass(frozen=True)
class SimulationRecord:
    t_s: float
    label: StateKind
    confidence: float
    mode: AssistanceMode
    features: FeatureVector | None = None

    def as_json(self):
        return {"t_s": round(self.t_s, 9), "label": self.label.value,
                "confidence": self.confidence, "mode": self.mode.value}


@dataclass
class SimulationLog:
    records: list
    overruns: int = 0

    @property
    def modes(self):
        return [r.mode for r in self.records]

    def switches(self):
        """``(index, t_s, from_mode, to_mode)`` for every mode change."""
        out = []
        for i in range(1, len(self.records)):
            a, b = self.records[i - 1].mode, self.records[i].mode
            if a is not b:
                out.append((i, self.records[i].t_s, a, b))
        return out

    def to_ndjson(self):
        return "".join(json.dumps(r.as_json(), sort_keys=False) + "\n" for r in self.records)

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_ndjson())

    @staticmethod
    def read_ndjson(path):
        with open(path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]


def _recording_windows(rec, cfg):
    eeg_names = list(cfg.eeg_channels or rec.channels_of(ChannelKind.EEG))
    emg_names = rec.channels_of(ChannelKind.EMG)
    emg_name = cfg.emg_channel or (emg_names[0] if emg_names else None)
    if not eeg_names or emg_name is None:
        raise ValueError("recording needs EEG channels and an EMG channel")
    eeg = rec.samples[:, [rec.index(n) for n in eeg_names]]
    emg = rec.channel(emg_name)
    w = preprocess.n_samples_for(cfg.window_s, rec.sample_rate_hz)
    if w > rec.n_samples:
        raise ValueError("stream is shorter than one window")
    schema = FeatureSchema(tuple(eeg_names))
    fs = rec.sample_rate_hz
    eeg_epochs = preprocess.epoch(eeg, cfg.window_s, cfg.step_s, fs=fs)
    emg_epochs = preprocess.epoch(emg, cfg.window_s, cfg.step_s, fs=fs)

    def gen():
        for e, m in zip(eeg_epochs, emg_epochs):
            yield extract_features(e, m, cfg.features, schema)

    return schema, gen(), len(eeg_epochs)


def _stream_windows(stream):
    def gen():
        for t, row in zip(stream.t_s, stream.values):
            yield FeatureVector(row, stream.schema, float(t))

    return stream.schema, gen(), len(stream.t_s)


def run_simulation(stream, cfg=None):
    """Run the dual-loop controller over a recording or a :class:`FeatureStream`.

    With the rule classifier and no baseline in ``cfg``, the first
    ``calibration_s`` seconds of windows (at least five) calibrate the
    baseline; those windows are still classified and logged.
    """
    cfg = cfg or SimulationConfig()
    if isinstance(stream, Recording):
        schema, windows, count = _recording_windows(stream, cfg)
        step_s = preprocess.n_samples_for(cfg.step_s, stream.sample_rate_hz) / stream.sample_rate_hz
    elif isinstance(stream, FeatureStream):
        schema, windows, count = _stream_windows(stream)
        step_s = stream.step_s
    else:
        raise TypeError("stream must be a Recording or FeatureStream")
    if count < 1:
        raise ValueError("stream is shorter than one window")

    baseline = cfg.baseline
    windows = list(windows) if (cfg.model is None and baseline is None) else windows
    if cfg.model is None and baseline is None:
        n_cal = max(5, int(round(cfg.calibration_s / step_s)))
        if len(windows) < n_cal:
            raise ValueError(f"need {n_cal} windows to calibrate the baseline, stream has {len(windows)}")
        baseline = fit_baseline([fv.values for fv in windows[:n_cal]], schema)

    state = ControllerState(cfg.initial_mode, 0, cfg.hysteresis_k)
    records, overruns = [], 0
    it = iter(windows)
    while True:
        # timing covers feature extraction, which happens lazily in next()
        t0 = time.perf_counter()
        fv = next(it, None)
        if fv is None:
            break
        if cfg.model is None:
            label = rule_classify(fv.values, baseline)
        else:
            label = tree_classify(cfg.model, fv.values, cfg.decision_threshold)
        state, mode = step_controller(state, label)
        elapsed = time.perf_counter() - t0
        if elapsed > step_s:
            overruns += 1
            log.debug("window at %.3f s took %.4f s (step %.4f s)", fv.window_start_s, elapsed, step_s)
        records.append(SimulationRecord(fv.window_start_s, label.kind, label.confidence, mode, fv))
    if overruns:
        log.warning("%d of %d windows exceeded the real-time budget", overruns, len(records))
    return SimulationLog(records, overruns)
