"""Command-line entry point: ``python -m hmcsig <subcommand> ...``.

Exit codes: 0 success, 1 validation error (including bad usage), 2 I/O
error. Every subcommand computes all of its results before writing any
output file, so a validation failure never leaves partial artifacts.
"""

import argparse
import copy
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import cmc, preprocess, spectral, stats, synth, topomap
from .errors import HmcsigError
from .signal_io import ChannelKind, load_recording, recording_paths, save_recording, slice_by_marker
from .state_engine import (
    AssistanceMode,
    ControllerState,
    FeatureSchema,
    FeatureStream,
    SimulationConfig,
    StateKind,
    TreeModel,
    fit_baseline,
    rule_classify_many,
    run_simulation,
    train_tree,
    tree_classify,
)
from .state_engine.features import FeatureConfig, read_feature_csv, write_feature_csv

log = logging.getLogger("hmcsig")

THREADS_ENV = "CMC_PIPELINE_THREADS"

DEFAULT_CONFIG = {
    "alpha": 0.05,
    "threshold_form": "sqrt",
    "one_sided": False,
    "seed": None,
    "welch": {"segment_fraction": 0.125, "overlap_fraction": 0.5},
    "preprocess": {
        "bandpass": [0.01, 100.0],
        "notch_hz": 60.0,
        "notch_q": 30.0,
        "resample_hz": 256.0,
        "reject_z": 5.0,
        "reject_window_s": 1.0,
    },
    "window_s": 0.25,
    "step_s": 0.02,
    "depth": 3,
    "hysteresis_k": 5,
    "psd_bands": ["alpha", "beta"],
    "cmc_bands": ["beta", "gamma"],
    "topomap": {"resolution": 64, "order_m": 4, "n_terms": 20, "lambda": 1e-5},
    "pipeline": {
        "output_dir": None,
        "marker": None,
        "emg": None,
        "subjects": [],
        "cohort": {"n_per_group": 7, "duration_s": 30.0, "sample_rate_hz": 1024.0},
    },
}


class UsageError(HmcsigError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; this CLI reserves 2 for I/O failures.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------- config


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def validate_config(cfg):
    """Re-check every knob against the constraints of the module that uses it."""
    if not 0 < cfg["alpha"] < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if cfg["threshold_form"] not in ("sqrt", "conventional"):
        raise ValueError("threshold_form must be 'sqrt' or 'conventional'")
    w = cfg["welch"]
    if not 0 < w["segment_fraction"] <= 0.5:
        raise ValueError("welch.segment_fraction must lie in (0, 0.5]")
    if not 0 <= w["overlap_fraction"] < 1:
        raise ValueError("welch.overlap_fraction must lie in [0, 1)")
    p = cfg["preprocess"]
    if p["bandpass"] is not None:
        lo, hi = p["bandpass"]
        if not 0 <= lo < hi:
            raise ValueError("preprocess.bandpass needs 0 <= lo < hi")
    if p["notch_q"] <= 0:
        raise ValueError("preprocess.notch_q must be positive")
    if p["resample_hz"] is not None and p["resample_hz"] <= 0:
        raise ValueError("preprocess.resample_hz must be positive")
    if p["reject_z"] is not None and p["reject_z"] <= 0:
        raise ValueError("preprocess.reject_z must be positive")
    if not 0 < cfg["step_s"] <= cfg["window_s"]:
        raise ValueError("need 0 < step_s <= window_s")
    if int(cfg["depth"]) < 1:
        raise ValueError("depth must be at least 1")
    if int(cfg["hysteresis_k"]) < 1:
        raise ValueError("hysteresis_k must be at least 1")
    for name in cfg["psd_bands"] + cfg["cmc_bands"]:
        spectral.BandSpec.parse(name)
    t = cfg["topomap"]
    if t["resolution"] < 16:
        raise ValueError("topomap.resolution must be at least 16")
    if t["lambda"] < 0:
        raise ValueError("topomap.lambda must be non-negative")
    if cfg["seed"] is not None and int(cfg["seed"]) != cfg["seed"]:
        raise ValueError("seed must be an integer")
    return cfg


def load_config(path=None, overrides=None):
    cfg = DEFAULT_CONFIG
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        try:
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        if not isinstance(user, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        unknown = set(user) - set(DEFAULT_CONFIG)
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        cfg = _merge(cfg, user)
    cfg = _merge(cfg, {k: v for k, v in (overrides or {}).items() if v is not None})
    return validate_config(cfg)


def _overrides(args):
    """Flag values that take precedence over the config file."""
    out = {}
    for name in ("alpha", "seed", "depth", "hysteresis_k", "window_s", "step_s"):
        v = getattr(args, name, None)
        if v is not None:
            out[name] = v
    if getattr(args, "one_sided", False):
        out["one_sided"] = True
    return out


def _threads():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


# ---------------------------------------------------------------- helpers


def _load(args):
    meta, data = recording_paths(args.input)
    if getattr(args, "metadata", None):
        meta = Path(args.metadata)
        data = Path(args.input)
    return load_recording(meta, data)


def _emit(text, output):
    """Write text to ``output`` (a path) or stdout."""
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8", newline="\n")


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v):
    return repr(float(v))


def _require_seed(cfg):
    if cfg["seed"] is None:
        raise UsageError("a seed is required (--seed or \"seed\" in the config)")
    return int(cfg["seed"])


def _welch(cfg, n, fs):
    w = cfg["welch"]
    seg = int(n * w["segment_fraction"])
    return spectral.WelchConfig(seg, fs, w["overlap_fraction"])


def _parse_float(text):
    return float(text)


# ---------------------------------------------------------------- subcommands


def cmd_synth(args, cfg):
    seed = _require_seed(cfg)
    if args.mode == "signals":
        band = spectral.BandSpec.parse(args.band or "15:30")
        spec = synth.SharedSourceSpec(args.duration, args.rate, band, args.snr1, args.snr2, seed)
        rec = synth.shared_source_recording(spec, args.eeg or "C3", args.emg or "EMG1")
        meta, data = recording_paths(args.output)
        save_recording(rec, meta, data)
        return 0
    schema = FeatureSchema.default()
    if args.mode == "features":
        x, labels = synth.gen_labeled_features(args.n, args.separation, seed, schema)
        write_feature_csv(args.output, x, schema, labels=labels)
        return 0
    step = cfg["step_s"]
    half = args.duration / 2.0
    t, x = synth.gen_state_stream([(StateKind.INTUITIVE, half), (StateKind.INTELLECTUAL, half)],
                                  step, args.separation, seed, schema)
    write_feature_csv(args.output, x, schema, t_s=t)
    return 0


def preprocess_recording(rec, cfg):
    """Band-pass, notch, resample and artifact-reject one recording."""
    p = cfg["preprocess"]
    if p["bandpass"] is not None:
        lo, hi = p["bandpass"]
        hi = min(hi, 0.45 * rec.sample_rate_hz)
        rec = preprocess.bandpass(rec, lo, hi)
    if p["notch_hz"] is not None and p["notch_hz"] < rec.sample_rate_hz / 2:
        rec = preprocess.notch(rec, p["notch_hz"], p["notch_q"])
    if p["resample_hz"] is not None:
        rec = preprocess.resample(rec, p["resample_hz"])
    mask = None
    if p["reject_z"] is not None:
        mask = preprocess.reject_artifacts(rec, p["reject_window_s"], p["reject_z"])
    return rec, mask


def _drop_rejected(rec, mask):
    if mask is None or mask.n_rejected == 0:
        return rec
    keep = mask.sample_mask(rec.n_samples)
    return rec.with_samples(rec.samples[keep], markers=())


def cmd_preprocess(args, cfg):
    rec = _load(args)
    if args.marker:
        rec = slice_by_marker(rec, args.marker)
    if args.band:
        b = spectral.BandSpec.parse(args.band)
        cfg["preprocess"]["bandpass"] = [b.lo_hz, b.hi_hz]
    rec, mask = preprocess_recording(rec, cfg)
    meta, data = recording_paths(args.output)
    mask_text = None
    if mask is not None:
        mask_text = _csv_text(["window", "start_sample", "keep", "reason"],
                              [[i, i * mask.window_samples, int(k), mask.reasons.get(i, "")]
                               for i, k in enumerate(mask.keep)])
    save_recording(rec, meta, data)
    if mask_text is not None:
        Path(meta).with_suffix(".mask.csv").write_text(mask_text, encoding="utf-8", newline="\n")
    return 0


def psd_rows(rec, bands, cfg, channels=None):
    channels = channels or rec.channel_names
    welch = _welch(cfg, rec.n_samples, rec.sample_rate_hz)
    rows = []
    for ch in channels:
        spec = spectral.welch_psd(rec.channel(ch), welch)
        for b in bands:
            rows.append([ch, b.name, _fmt(b.lo_hz), _fmt(b.hi_hz), _fmt(spectral.band_power(spec, b))])
    return rows


def cmd_psd(args, cfg):
    rec = _load(args)
    bands = [spectral.BandSpec.parse(args.band)] if args.band else [spectral.BandSpec.parse(b) for b in cfg["psd_bands"]]
    channels = [args.eeg] if args.eeg else None
    text = _csv_text(["channel", "band", "lo_hz", "hi_hz", "power"], psd_rows(rec, bands, cfg, channels))
    _emit(text, args.output)
    return 0


CMC_COLUMNS = ["eeg", "emg", "band", "lo_hz", "hi_hz", "n_segments", "threshold",
               "significant_area", "n_significant_bins", "mean_coherence"]


def cmc_row(rec, eeg, emg, band, cfg):
    welch = _welch(cfg, rec.n_samples, rec.sample_rate_hz)
    coh = cmc.coherence(rec.channel(eeg), rec.channel(emg), welch, eeg, emg)
    feat = cmc.significant_area(coh, band, cfg["alpha"], cfg["threshold_form"])
    row = [eeg, emg, band.name, _fmt(band.lo_hz), _fmt(band.hi_hz), coh.n_segments,
           _fmt(feat.threshold), _fmt(feat.significant_area), feat.n_significant_bins,
           _fmt(coh.band_mean(band))]
    return row, coh


def cmd_cmc(args, cfg):
    rec = _load(args)
    eeg = args.eeg or rec.channels_of(ChannelKind.EEG)[0]
    emgs = rec.channels_of(ChannelKind.EMG)
    emg = args.emg or (emgs[0] if emgs else None)
    if emg is None:
        raise ValueError("recording has no EMG channel; pass --emg")
    band = spectral.BandSpec.parse(args.band or "beta")
    row, coh = cmc_row(rec, eeg, emg, band, cfg)
    spectrum = None
    if args.spectrum_out:
        spectrum = _csv_text(["freq_hz", "coherence"],
                             [[_fmt(f), _fmt(c)] for f, c in zip(coh.freqs_hz, coh.coherence)])
    _emit(_csv_text(CMC_COLUMNS, [row]), args.output)
    if spectrum is not None:
        Path(args.spectrum_out).write_text(spectrum, encoding="utf-8", newline="\n")
    return 0


def cmd_stats(args, cfg):
    expert = stats.read_feature_table(args.expert)
    novice = stats.read_feature_table(args.novice)
    alt = "greater" if cfg["one_sided"] else "two-sided"
    rows = stats.group_compare(expert, novice, alt)
    buf = io.StringIO()
    stats.write_comparison_csv(rows, buf)
    _emit(buf.getvalue(), args.output)
    return 0


def _read_values(path):
    vals = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"channel", "value"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: needs columns channel,value")
        for row in reader:
            vals[row["channel"]] = float(row["value"])
    return vals


def _topo(values, cfg):
    t = cfg["topomap"]
    model = topomap.fit_electrodes(values, order_m=t["order_m"], n_terms=t["n_terms"], lam=t["lambda"])
    return topomap.evaluate_field(model, t["resolution"])


def cmd_topomap(args, cfg):
    if args.output is None:
        raise UsageError("topomap needs --output")
    values = _read_values(args.input)
    if args.resolution:
        cfg["topomap"]["resolution"] = args.resolution
    field = _topo(values, cfg)
    vmin = args.vmin if args.vmin is not None else float(np.nanmin(field.values))
    vmax = args.vmax if args.vmax is not None else float(np.nanmax(field.values))
    if not vmin < vmax:
        raise ValueError("colour scale needs min < max")
    img = topomap.render_image(field, vmin, vmax)
    topomap.write_ppm(img, args.output)
    if args.grid_out:
        topomap.write_grid_csv(field, args.grid_out)
    return 0


def cmd_train(args, cfg):
    x, schema, labels, _ = read_feature_csv(args.input)
    if labels is None:
        raise ValueError("training table needs a label column")
    model = train_tree(x, labels, int(cfg["depth"]), cfg["seed"] or 0, tuple(schema.names))
    _emit(model.to_json(), args.output)
    return 0


def _baseline_from(path, schema):
    x, bschema, _, _ = read_feature_csv(path)
    if bschema != schema:
        raise ValueError("baseline table schema differs from the input")
    return fit_baseline(x, schema)


def cmd_classify(args, cfg):
    x, schema, _, t_s = read_feature_csv(args.input)
    if args.model:
        model = TreeModel.from_json(Path(args.model).read_text(encoding="utf-8"))
        labels = [tree_classify(model, row) for row in x]
    else:
        baseline = _baseline_from(args.baseline, schema) if args.baseline else fit_baseline(x, schema)
        labels = rule_classify_many(x, baseline)
    rows = [[i, lab.kind.value, _fmt(lab.confidence)] for i, lab in enumerate(labels)]
    _emit(_csv_text(["row", "label", "confidence"], rows), args.output)
    return 0


def _is_feature_stream(path):
    path = Path(path)
    if path.suffix != ".csv" or not path.exists():
        return False
    with path.open(encoding="utf-8") as fh:
        return "t_s" in fh.readline().split(",")


def cmd_simulate(args, cfg):
    model = TreeModel.from_json(Path(args.model).read_text(encoding="utf-8")) if args.model else None
    sim = SimulationConfig(hysteresis_k=int(cfg["hysteresis_k"]), model=model,
                           window_s=cfg["window_s"], step_s=cfg["step_s"])
    if _is_feature_stream(args.input):
        x, schema, _, t_s = read_feature_csv(args.input)
        step = float(np.median(np.diff(t_s))) if len(t_s) > 1 else cfg["step_s"]
        stream = FeatureStream(t_s, x, schema, step)
    else:
        stream = _load(args)
        schema = FeatureSchema(tuple(stream.channels_of(ChannelKind.EEG)))
    if args.baseline and model is None:
        sim.baseline = _baseline_from(args.baseline, schema)
    result = run_simulation(stream, sim)
    _emit(result.to_ndjson(), args.output)
    return 0


# ---------------------------------------------------------------- pipeline


def subject_features(rec, cfg, emg=None):
    """Long-format feature dict {(channel, band, metric): value} for one subject."""
    eeg = rec.channels_of(ChannelKind.EEG)
    emgs = rec.channels_of(ChannelKind.EMG)
    emg = emg or (emgs[0] if emgs else None)
    if emg is None:
        raise ValueError("recording has no EMG channel")
    welch = _welch(cfg, rec.n_samples, rec.sample_rate_hz)
    out = {}
    psd_bands = [spectral.BandSpec.parse(b) for b in cfg["psd_bands"]]
    cmc_bands = [spectral.BandSpec.parse(b) for b in cfg["cmc_bands"]]
    for ch in eeg:
        spec = spectral.welch_psd(rec.channel(ch), welch)
        for b in psd_bands:
            out[(ch, b.name, "psd")] = spectral.band_power(spec, b)
        coh = cmc.coherence(rec.channel(ch), rec.channel(emg), welch, ch, emg)
        for b in cmc_bands:
            out[(ch, b.name, "cmc")] = cmc.significant_area(coh, b, cfg["alpha"], cfg["threshold_form"]).significant_area
    return out


def _cohort(cfg, seed):
    p = cfg["pipeline"]
    if p["subjects"]:
        subjects = []
        for s in p["subjects"]:
            if s.get("group") not in ("expert", "novice"):
                raise ValueError(f"subject {s.get('id')!r}: group must be expert or novice")
            subjects.append((s["id"], s["group"], ("file", s["input"])))
        return subjects
    c = p["cohort"]
    ss = np.random.SeedSequence(seed).spawn(2 * c["n_per_group"])
    out = []
    for g, group in enumerate(("expert", "novice")):
        for i in range(c["n_per_group"]):
            child = ss[g * c["n_per_group"] + i]
            out.append((f"{group[0].upper()}{i + 1:02d}", group, ("synthetic", child)))
    return out


def _run_subject(item, cfg):
    sid, group, (kind, src) = item
    if kind == "file":
        meta, data = recording_paths(src)
        rec = load_recording(meta, data)
    else:
        c = cfg["pipeline"]["cohort"]
        rec = synth.gen_subject_recording(group, np.random.default_rng(src), c["duration_s"], c["sample_rate_hz"])
    if cfg["pipeline"]["marker"]:
        rec = slice_by_marker(rec, cfg["pipeline"]["marker"])
    rec, mask = preprocess_recording(rec, cfg)
    rec = _drop_rejected(rec, mask)
    feats = subject_features(rec, cfg, cfg["pipeline"]["emg"])
    return sid, group, feats, (mask.n_rejected if mask is not None else 0)


def run_pipeline(cfg, out_dir):
    """Preprocess -> features -> group statistics, topomaps and classification.

    Returns ``{relative filename: bytes}``; nothing is written here.
    """
    seed = _require_seed(cfg)
    cohort = _cohort(cfg, seed)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda it: _run_subject(it, cfg), cohort))

    files = {}
    long_rows = []
    for sid, group, feats, n_rej in results:
        for (ch, band, metric), v in sorted(feats.items()):
            long_rows.append([sid, group, ch, band, metric, _fmt(v)])
    files["features.csv"] = _csv_text(["subject", "group", "channel", "band", "metric", "value"], long_rows)
    files["artifacts.csv"] = _csv_text(["subject", "rejected_windows"], [[r[0], r[3]] for r in results])

    by_group = {"expert": {}, "novice": {}}
    for sid, group, feats, _ in results:
        for k, v in feats.items():
            by_group[group].setdefault(k, []).append(v)
    if not by_group["expert"] or not by_group["novice"]:
        raise ValueError("pipeline needs at least one expert and one novice")
    alt = "greater" if cfg["one_sided"] else "two-sided"
    buf = io.StringIO()
    stats.write_comparison_csv(stats.group_compare(by_group["expert"], by_group["novice"], alt), buf)
    files["comparison.csv"] = buf.getvalue()

    # group-mean PSD maps, min-max normalised per band across both groups
    for band in cfg["psd_bands"]:
        name = spectral.BandSpec.parse(band).name
        means = {g: {ch: float(np.mean(v)) for (ch, b, m), v in by_group[g].items() if b == name and m == "psd"}
                 for g in by_group}
        norm = topomap.minmax_normalize(means)
        for g in by_group:
            field = _topo(norm[g], cfg)
            img = topomap.render_image(field, 0.0, 1.0)
            h, w, _ = img.shape
            files[f"topomap_{g}_{name}.ppm"] = f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes()

    # rule classification of each subject against the pooled baseline
    schema = FeatureSchema(tuple(dict.fromkeys(k[0] for k in results[0][2])))
    rows = []
    try:
        x = np.array([_vector(feats, schema) for _, _, feats, _ in results])
    except KeyError:
        x = None  # custom band sets do not cover the rule signatures
    if x is not None and x.shape[0] >= 5:
        baseline = fit_baseline(x, schema)
        for (sid, group, _, _), lab in zip(results, rule_classify_many(x, baseline)):
            rows.append([sid, group, lab.kind.value, _fmt(lab.confidence)])
    files["classification.csv"] = _csv_text(["subject", "group", "label", "confidence"], rows)
    files["config.json"] = json.dumps(cfg, indent=2, sort_keys=True) + "\n"
    return files


def _vector(feats, schema):
    """Map a long-format subject dict onto the rule-classifier schema."""
    alpha, beta, gamma = "alpha", "beta", "gamma"
    v = []
    for ch in schema.channels:
        v += [feats[(ch, alpha, "psd")], feats[(ch, beta, "psd")]]
    for ch in schema.channels:
        v += [feats[(ch, beta, "cmc")], feats[(ch, gamma, "cmc")]]
    return v


def cmd_pipeline(args, cfg):
    out_dir = args.output or cfg["pipeline"]["output_dir"]
    if out_dir is None:
        raise UsageError("pipeline needs --output or pipeline.output_dir in the config")
    files = run_pipeline(cfg, out_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in sorted(files):
        data = files[name]
        if isinstance(data, str):
            data = data.encode("utf-8")
        (out / name).write_bytes(data)
    return 0


# ---------------------------------------------------------------- parser


def _common(p, *names):
    adders = {
        "input": lambda: p.add_argument("--input", help="input file (recording base name or table)"),
        "metadata": lambda: p.add_argument("--metadata", help="recording metadata JSON (default: <input>.json)"),
        "output": lambda: p.add_argument("--output", help="output path (default: stdout where applicable)"),
        "config": lambda: p.add_argument("--config", help="JSON run configuration"),
        "band": lambda: p.add_argument("--band", help="band name (alpha, beta, gamma, theta) or lo:hi in Hz"),
        "alpha": lambda: p.add_argument("--alpha", type=float, help="significance level"),
        "seed": lambda: p.add_argument("--seed", type=int, help="random seed"),
        "eeg": lambda: p.add_argument("--eeg", help="EEG channel name"),
        "emg": lambda: p.add_argument("--emg", help="EMG channel name"),
        "window_s": lambda: p.add_argument("--window-s", dest="window_s", type=float, help="window length (s)"),
        "step_s": lambda: p.add_argument("--step-s", dest="step_s", type=float, help="window step (s)"),
        "depth": lambda: p.add_argument("--depth", type=int, help="decision-tree depth"),
        "hysteresis_k": lambda: p.add_argument("--hysteresis-k", dest="hysteresis_k", type=int,
                                               help="consecutive contradicting windows before a mode switch"),
        "one_sided": lambda: p.add_argument("--one-sided", dest="one_sided", action="store_true",
                                            help="one-sided test (expert > novice)"),
    }
    for n in names:
        adders[n]()


def build_parser():
    parser = _Parser(prog="hmcsig", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate synthetic signals or feature tables")
    _common(p, "output", "config", "band", "seed", "eeg", "emg", "step_s")
    p.add_argument("--mode", choices=("signals", "features", "stream"), default="signals")
    p.add_argument("--snr1", type=_parse_float, default=1.0)
    p.add_argument("--snr2", type=_parse_float, default=1.0)
    p.add_argument("--duration", type=float, default=120.0, help="seconds")
    p.add_argument("--rate", type=float, default=256.0, help="sample rate (Hz)")
    p.add_argument("--separation", type=float, default=4.0)
    p.add_argument("--n", type=int, default=200, help="vectors per class (features mode)")
    p.set_defaults(func=cmd_synth, needs=("output",))

    p = sub.add_parser("preprocess", help="filter, resample and artifact-reject a recording")
    _common(p, "input", "metadata", "output", "config", "band")
    p.add_argument("--marker", help="restrict to one named task phase")
    p.set_defaults(func=cmd_preprocess, needs=("input", "output"))

    p = sub.add_parser("psd", help="Welch band power per channel")
    _common(p, "input", "metadata", "output", "config", "band", "eeg")
    p.set_defaults(func=cmd_psd, needs=("input",))

    p = sub.add_parser("cmc", help="corticomuscular coherence and significant area")
    _common(p, "input", "metadata", "output", "config", "band", "alpha", "eeg", "emg")
    p.add_argument("--spectrum-out", dest="spectrum_out", help="also write the coherence spectrum")
    p.set_defaults(func=cmd_cmc, needs=("input",))

    p = sub.add_parser("stats", help="Mann-Whitney comparison of expert and novice tables")
    _common(p, "output", "config", "one_sided")
    p.add_argument("--expert", required=True, help="long-format feature table")
    p.add_argument("--novice", required=True, help="long-format feature table")
    p.set_defaults(func=cmd_stats, needs=())

    p = sub.add_parser("topomap", help="spherical-spline scalp map from electrode values")
    _common(p, "input", "output", "config")
    p.add_argument("--grid-out", dest="grid_out")
    p.add_argument("--vmin", type=float)
    p.add_argument("--vmax", type=float)
    p.add_argument("--resolution", type=int)
    p.set_defaults(func=cmd_topomap, needs=("input",))

    p = sub.add_parser("train", help="train a Gini decision tree on labeled features")
    _common(p, "input", "output", "config", "depth", "seed")
    p.set_defaults(func=cmd_train, needs=("input",))

    p = sub.add_parser("classify", help="label feature vectors (tree or rule classifier)")
    _common(p, "input", "output", "config")
    p.add_argument("--model", help="tree model JSON; omit for the rule classifier")
    p.add_argument("--baseline", help="calibration feature table for the rule classifier")
    p.set_defaults(func=cmd_classify, needs=("input",))

    p = sub.add_parser("simulate", help="run the dual-loop controller over a stream")
    _common(p, "input", "metadata", "output", "config", "window_s", "step_s", "hysteresis_k")
    p.add_argument("--model", help="tree model JSON; omit for the rule classifier")
    p.add_argument("--baseline", help="calibration feature table for the rule classifier")
    p.set_defaults(func=cmd_simulate, needs=("input",))

    p = sub.add_parser("pipeline", help="end-to-end batch run from a config file")
    _common(p, "output", "config", "seed", "alpha", "one_sided")
    p.set_defaults(func=cmd_pipeline, needs=())
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        for name in args.needs:
            if getattr(args, name, None) is None:
                raise UsageError(f"{args.command}: --{name} is required")
        cfg = load_config(getattr(args, "config", None), _overrides(args))
        return args.func(args, cfg)
    except OSError as exc:
        print(f"hmcsig: I/O error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError) as exc:
        print(f"hmcsig: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else 0


if __name__ == "__main__":
    sys.exit(main())
