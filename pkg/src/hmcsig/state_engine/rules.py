"""Rule classifier built on the four intuitive-state signatures.

Relative to a calibration baseline, the intuitive state shows higher alpha
power and lower beta power over frontal/parietal sites, higher beta-band CMC
over the central and left parietal sites (Cz, C3) and higher gamma-band CMC
centrally (Cz). Each signature casts one vote: within its region every
usable feature reports the sign of its deviation from the baseline median,
and the region votes with the majority (a tied region casts half a vote).
Three or more votes mean Intuitive, one or fewer Intellectual, otherwise
Unknown. Confidence is ``|votes - 2| / 2``.

Only signs of deviations matter, so the outcome is unchanged by any strictly
increasing per-feature transform applied to features and baseline alike.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .features import FeatureSchema, FeatureVector
from .labels import StateKind, StateLabel

FRONTAL_PARIETAL = ("Fpz", "Fp1", "Fp2", "Fz", "F3", "F4", "Pz", "P3", "P4")

# (feature kind, intuitive direction, region)
SIGNATURES = (
    ("alpha_power", +1, FRONTAL_PARIETAL),
    ("beta_power", -1, FRONTAL_PARIETAL),
    ("cmc_beta", +1, ("Cz", "C3")),
    ("cmc_gamma", +1, ("Cz",)),
)
MIN_CALIBRATION = 5
MAD_TO_SD = 1.4826


@dataclass(frozen=True, eq=False)
class Baseline:
    medians: np.ndarray
    scales: np.ndarray
    schema: FeatureSchema

    @property
    def usable(self):
        return self.scales > 0


def _matrix(vectors, schema):
    if isinstance(vectors, np.ndarray):
        return np.atleast_2d(np.asarray(vectors, dtype=float)), schema
    vectors = list(vectors)
    if vectors and isinstance(vectors[0], FeatureVector):
        schema = schema or vectors[0].schema
        if any(v.schema != schema for v in vectors):
            raise ValueError("feature vectors use different schemas")
        return np.vstack([v.values for v in vectors]), schema
    return np.atleast_2d(np.asarray(vectors, dtype=float)), schema


def fit_baseline(calibration, schema=None):
    """Per-feature median and scaled median absolute deviation.

    Features with zero spread are dropped from classification with a warning.
    """
    x, schema = _matrix(calibration, schema)
    schema = schema or FeatureSchema.default()
    if x.shape[0] < MIN_CALIBRATION:
        raise ValueError(f"need at least {MIN_CALIBRATION} calibration vectors, got {x.shape[0]}")
    if x.shape[1] != len(schema):
        raise ValueError("calibration width does not match the schema")
    med = np.median(x, axis=0)
    mad = MAD_TO_SD * np.median(np.abs(x - med), axis=0)
    if np.any(mad <= 0):
        dropped = [n for n, s in zip(schema.names, mad) if s <= 0]
        warnings.warn(f"dropping degenerate baseline features: {', '.join(dropped)}", stacklevel=2)
    return Baseline(med, mad, schema)


def _region_columns(schema, kind, region):
    return [schema.index(c, kind) for c in schema.channels if c in region]


def votes(x, baseline):
    """Intuitive votes (0..4, halves on ties) for each row of ``x``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != len(baseline.schema):
        raise ValueError(f"feature width {x.shape[1]} does not match baseline schema {len(baseline.schema)}")
    usable = baseline.usable
    total = np.zeros(x.shape[0])
    for kind, direction, region in SIGNATURES:
        cols = [c for c in _region_columns(baseline.schema, kind, region) if usable[c]]
        if not cols:
            total += 0.5
            continue
        signs = np.sign(x[:, cols] - baseline.medians[cols]) * direction
        tally = signs.sum(axis=1)
        total += np.where(tally > 0, 1.0, np.where(tally < 0, 0.0, 0.5))
    return total


def _label(v):
    confidence = abs(v - 2.0) / 2.0
    if v >= 3:
        return StateLabel(StateKind.INTUITIVE, confidence)
    if v <= 1:
        return StateLabel(StateKind.INTELLECTUAL, confidence)
    return StateLabel(StateKind.UNKNOWN, confidence)


def rule_classify(fv, baseline):
    """Classify one feature vector against a baseline."""
    if isinstance(fv, FeatureVector):
        if fv.schema != baseline.schema:
            raise ValueError("feature vector schema does not match the baseline")
        fv = fv.values
    return _label(float(votes(fv, baseline)[0]))


def rule_classify_many(x, baseline):
    return [_label(float(v)) for v in votes(x, baseline)]


def rule_accuracy(x, y, baseline):
    """``(accuracy, decided_fraction)`` of the rule classifier on labelled rows.

    Accuracy is measured over rows that received a decision; Unknown labels
    are abstentions and only lower the decided fraction.
    """
    pred = np.array([lab.kind.value for lab in rule_classify_many(x, baseline)])
    truth = np.array([StateKind(v).value for v in y])
    decided = pred != StateKind.UNKNOWN.value
    if not decided.any():
        return float("nan"), 0.0
    return float(np.mean(pred[decided] == truth[decided])), float(decided.mean())
