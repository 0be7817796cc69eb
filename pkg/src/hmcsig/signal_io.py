"""Recordings and their on-disk format.

A recording lives in two files: a JSON metadata file (sample rate, channel
list, task markers) and a CSV data file with one column per channel, in the
same order as the metadata. Sample values are written with the shortest
decimal representation that parses back to the identical double, so
``load_recording(save_recording(rec))`` is bit-exact.
"""

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import AmbiguityError, DataError, FormatError, NotFoundError, SchemaError
from . import montage

FORMAT_VERSION = 1
UNIT_TOL = 1e-6


class ChannelKind(str, enum.Enum):
    EEG = "EEG"
    EMG = "EMG"


@dataclass(frozen=True)
class ChannelMeta:
    name: str
    kind: ChannelKind
    position: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        if self.kind is ChannelKind.EEG:
            if self.position is None:
                raise SchemaError(f"EEG channel {self.name!r} needs a position")
            pos = tuple(float(c) for c in self.position)
            if len(pos) != 3:
                raise SchemaError(f"channel {self.name!r}: position must have 3 coordinates")
            if abs(sum(c * c for c in pos) - 1.0) > UNIT_TOL:
                raise SchemaError(f"channel {self.name!r}: position is not on the unit sphere")
            object.__setattr__(self, "position", pos)
        elif self.position is not None:
            raise SchemaError(f"EMG channel {self.name!r} must not carry a position")

    @classmethod
    def eeg(cls, name, position=None):
        """EEG channel; the position defaults to the built-in 10-20 table."""
        if position is None:
            position = montage.position(name)
            if position is None:
                raise NotFoundError(f"no standard position for electrode {name!r}")
        return cls(name, ChannelKind.EEG, position)

    @classmethod
    def emg(cls, name):
        return cls(name, ChannelKind.EMG, None)


@dataclass(frozen=True)
class Marker:
    name: str
    start_sample: int
    end_sample: int


@dataclass(frozen=True, eq=False)
class Recording:
    """Multichannel recording; ``samples`` is [time x channel] in microvolts."""

    sample_rate_hz: float
    channels: tuple
    samples: np.ndarray
    markers: tuple = field(default_factory=tuple)

    def __post_init__(self):
        rate = float(self.sample_rate_hz)
        if not (math.isfinite(rate) and rate > 0):
            raise DataError("sample_rate_hz must be positive and finite")
        channels = tuple(self.channels)
        names = [c.name for c in channels]
        if len(set(names)) != len(names):
            raise SchemaError("channel names must be unique")
        samples = np.array(self.samples, dtype=float)
        if samples.ndim == 1 and len(channels) == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[1] != len(channels):
            raise SchemaError(
                f"samples have shape {samples.shape}, expected (n, {len(channels)})")
        if not np.all(np.isfinite(samples)):
            raise DataError("samples contain non-finite values")
        samples.setflags(write=False)
        markers = tuple(self.markers)
        n = samples.shape[0]
        for m in markers:
            if not (0 <= m.start_sample < m.end_sample <= n):
                raise SchemaError(
                    f"marker {m.name!r} [{m.start_sample}, {m.end_sample}) out of range for {n} samples")
        object.__setattr__(self, "sample_rate_hz", rate)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "markers", markers)

    @property
    def n_samples(self):
        return self.samples.shape[0]

    @property
    def duration_s(self):
        return self.n_samples / self.sample_rate_hz

    @property
    def channel_names(self):
        return [c.name for c in self.channels]

    def index(self, name):
        for i, c in enumerate(self.channels):
            if c.name == name:
                return i
        raise NotFoundError(f"no channel named {name!r}")

    def channel(self, name):
        """1-D view of one channel's samples."""
        return self.samples[:, self.index(name)]

    def channels_of(self, kind):
        kind = ChannelKind(kind)
        return [c.name for c in self.channels if c.kind is kind]

    def with_samples(self, samples, sample_rate_hz=None, markers=None):
        """Copy with new sample data (same channels)."""
        return replace(
            self,
            samples=samples,
            sample_rate_hz=self.sample_rate_hz if sample_rate_hz is None else sample_rate_hz,
            markers=self.markers if markers is None else markers,
        )

    def __eq__(self, other):
        if not isinstance(other, Recording):
            return NotImplemented
        return (self.sample_rate_hz == other.sample_rate_hz
                and self.channels == other.channels
                and self.markers == other.markers
                and np.array_equal(self.samples, other.samples))

    __hash__ = None


def _format_value(v, digits):
    if digits is None:
        return repr(float(v))
    return f"{v:.{digits}g}"


def metadata_dict(rec):
    chans = []
    for c in rec.channels:
        d = {"name": c.name, "kind": c.kind.value}
        if c.position is not None:
            d["position"] = list(c.position)
        chans.append(d)
    return {
        "version": FORMAT_VERSION,
        "sample_rate_hz": rec.sample_rate_hz,
        "channels": chans,
        "markers": [
            {"name": m.name, "start_sample": m.start_sample, "end_sample": m.end_sample}
            for m in rec.markers
        ],
    }


def save_recording(rec, metadata_path, data_path, digits=None):
    """Write ``rec`` as JSON metadata plus CSV data.

    ``digits=None`` writes shortest round-trip decimals (bit-exact reload).
    ``digits=9`` writes 9 significant digits, which is exact for values that
    are representable as 32-bit floats.
    """
    meta = json.dumps(metadata_dict(rec), indent=2) + "\n"
    buf = io.StringIO()
    buf.write(",".join(rec.channel_names) + "\n")
    fmt = _format_value
    for row in rec.samples:
        buf.write(",".join(fmt(v, digits) for v in row))
        buf.write("\n")
    Path(metadata_path).write_text(meta, encoding="utf-8", newline="\n")
    Path(data_path).write_text(buf.getvalue(), encoding="utf-8", newline="\n")


def _parse_metadata(text):
    try:
        meta = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(meta, dict):
        raise SchemaError("metadata must be a JSON object")
    if meta.get("version") != FORMAT_VERSION:
        raise SchemaError(f"unsupported metadata version {meta.get('version')!r}")
    try:
        rate = float(meta["sample_rate_hz"])
        channels = []
        for c in meta["channels"]:
            pos = c.get("position")
            channels.append(ChannelMeta(c["name"], c["kind"], None if pos is None else tuple(pos)))
        markers = [Marker(str(m["name"]), int(m["start_sample"]), int(m["end_sample"]))
                   for m in meta.get("markers", [])]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed metadata: {exc!r}") from None
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"malformed metadata: {exc}") from None
    return rate, channels, markers


def load_recording(metadata_path, data_path):
    """Read a recording written by :func:`save_recording`.

    Raises FormatError (with line number) for unparsable files, SchemaError
    when the CSV header disagrees with the metadata channel order, and
    DataError for non-finite samples.
    """
    rate, channels, markers = _parse_metadata(Path(metadata_path).read_text(encoding="utf-8"))
    names = [c.name for c in channels]
    rows = []
    with open(data_path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError("data file is empty", line=1) from None
        except csv.Error as exc:
            raise FormatError(str(exc), line=1) from None
        if header != names:
            raise SchemaError(f"CSV header {header} does not match metadata channels {names}")
        try:
            for row in reader:
                line = reader.line_num
                if len(row) != len(names):
                    raise FormatError(f"expected {len(names)} fields, got {len(row)}", line=line)
                try:
                    vals = [float(v) for v in row]
                except ValueError:
                    raise FormatError(f"not a decimal number in {row}", line=line) from None
                if not all(math.isfinite(v) for v in vals):
                    raise DataError(f"line {line}: non-finite sample")
                rows.append(vals)
        except csv.Error as exc:
            raise FormatError(str(exc), line=reader.line_num) from None
    samples = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return Recording(rate, channels, samples, markers)


def recording_paths(base):
    """Metadata/data paths for a base name: ``rec`` -> ``rec.json``, ``rec.csv``."""
    base = Path(base)
    if base.suffix in (".json", ".csv"):
        base = base.with_suffix("")
    return base.with_suffix(".json"), base.with_suffix(".csv")


def find_marker(rec, marker_name):
    hits = [m for m in rec.markers if m.name == marker_name]
    if not hits:
        raise NotFoundError(f"no marker named {marker_name!r}")
    if len(hits) > 1:
        raise AmbiguityError(f"marker name {marker_name!r} occurs {len(hits)} times")
    return hits[0]


def slice_samples(rec, start, end):
    """Rows [start, end) with markers clipped and rebased to the slice."""
    if not (0 <= start < end <= rec.n_samples):
        raise ValueError(f"invalid slice [{start}, {end}) for {rec.n_samples} samples")
    markers = []
    for m in rec.markers:
        s, e = max(m.start_sample, start), min(m.end_sample, end)
        if s < e:
            markers.append(Marker(m.name, s - start, e - start))
    return rec.with_samples(rec.samples[start:end], markers=tuple(markers))


def slice_by_marker(rec, marker_name):
    """Sub-recording covering one named task phase."""
    m = find_marker(rec, marker_name)
    return slice_samples(rec, m.start_sample, m.end_sample)
