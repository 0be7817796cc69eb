import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from hmcsig.cli import main
from hmcsig.signal_io import load_recording, recording_paths

SUBCOMMANDS = ["synth", "preprocess", "psd", "cmc", "stats", "topomap", "train", "classify",
               "simulate", "pipeline"]


def run(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help_exits_zero(cmd, capsys):
    assert run(cmd, "--help") == 0
    assert "usage" in capsys.readouterr().out


def test_top_level_help():
    assert run("--help") == 0


def test_unknown_subcommand(capsys):
    assert run("frobnicate") == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_flag(capsys):
    assert run("psd", "--input", "x", "--bogus") == 1
    assert "usage" in capsys.readouterr().err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "hmcsig", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "pipeline" in out.stdout


def test_synth_requires_seed(tmp_path):
    assert run("synth", "--output", tmp_path / "r", "--duration", 10) == 1
    assert not list(tmp_path.iterdir())


def test_missing_input_is_io_error(tmp_path):
    assert run("psd", "--input", tmp_path / "nope") == 2


def test_bad_band_no_partial_output(tmp_path):
    assert run("synth", "--output", tmp_path / "r", "--duration", 10, "--seed", 1) == 0
    out = tmp_path / "cmc.csv"
    assert run("cmc", "--input", tmp_path / "r", "--band", "30:15", "--output", out) == 1
    assert not out.exists()


def test_bad_alpha_rejected(tmp_path):
    assert run("synth", "--output", tmp_path / "r", "--duration", 10, "--seed", 1) == 0
    assert run("cmc", "--input", tmp_path / "r", "--alpha", 1.5, "--output", tmp_path / "c.csv") == 1
    assert not (tmp_path / "c.csv").exists()


def test_unwritable_output(tmp_path):
    assert run("synth", "--output", tmp_path / "missing" / "r", "--duration", 10, "--seed", 1) == 2


def test_config_overrides(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"alpha": 0.01, "seed": 3}))
    assert run("synth", "--config", tmp_path / "c.json", "--output", tmp_path / "r", "--duration", 10) == 0
    assert run("cmc", "--config", tmp_path / "c.json", "--input", tmp_path / "r",
               "--alpha", 0.05, "--output", tmp_path / "c.csv") == 0
    row = read_csv(tmp_path / "c.csv")[0]
    from hmcsig.cmc import coherence_threshold
    assert float(row["threshold"]) == pytest.approx(coherence_threshold(0.05, 15))


def test_unknown_config_key(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"alpah": 0.01}))
    assert run("psd", "--config", tmp_path / "c.json", "--input", tmp_path / "r") == 1


def test_synth_cmc_chain(tmp_path):
    base = tmp_path / "pair"
    assert run("synth", "--snr1", 9, "--snr2", 9, "--band", "15:30", "--duration", 120,
               "--seed", 7, "--output", base) == 0
    meta, data = recording_paths(base)
    rec = load_recording(meta, data)
    assert rec.sample_rate_hz == 256 and rec.n_samples == 30720
    assert run("cmc", "--input", base, "--eeg", "C3", "--emg", "EMG1", "--band", "beta",
               "--alpha", 0.05, "--output", tmp_path / "cmc.csv", "--spectrum-out", tmp_path / "s.csv") == 0
    row = read_csv(tmp_path / "cmc.csv")[0]
    assert row["eeg"] == "C3" and row["emg"] == "EMG1" and int(row["n_segments"]) == 15
    assert abs(float(row["mean_coherence"]) - 0.81) <= 0.05
    assert float(row["significant_area"]) > 0
    spectrum = read_csv(tmp_path / "s.csv")
    assert len(spectrum) == 30720 // 8 // 2 + 1


def test_psd_rows(tmp_path):
    assert run("synth", "--output", tmp_path / "r", "--duration", 10, "--seed", 1) == 0
    assert run("psd", "--input", tmp_path / "r", "--output", tmp_path / "p.csv") == 0
    rows = read_csv(tmp_path / "p.csv")
    assert {r["channel"] for r in rows} == {"C3", "EMG1"}
    assert all(float(r["power"]) >= 0 for r in rows)


def test_preprocess_writes_mask(tmp_path):
    assert run("synth", "--output", tmp_path / "r", "--duration", 10, "--rate", 512, "--seed", 1) == 0
    assert run("preprocess", "--input", tmp_path / "r", "--output", tmp_path / "clean") == 0
    rec = load_recording(*recording_paths(tmp_path / "clean"))
    assert rec.sample_rate_hz == 256
    assert (tmp_path / "clean.mask.csv").exists()


def test_stats_command(tmp_path):
    lines = ["subject,channel,band,metric,value"]
    lines += [f"e{i},C3,alpha,psd,{10 + i}" for i in range(7)]
    (tmp_path / "e.csv").write_text("\n".join(lines) + "\n")
    lines = ["subject,channel,band,metric,value"] + [f"n{i},C3,alpha,psd,{i}" for i in range(7)]
    (tmp_path / "n.csv").write_text("\n".join(lines) + "\n")
    assert run("stats", "--expert", tmp_path / "e.csv", "--novice", tmp_path / "n.csv",
               "--output", tmp_path / "s.csv") == 0
    row = read_csv(tmp_path / "s.csv")[0]
    assert float(row["U"]) == 49 and float(row["p"]) == pytest.approx(2 / 3432)
    assert run("stats", "--expert", tmp_path / "e.csv", "--novice", tmp_path / "n.csv",
               "--one-sided", "--output", tmp_path / "s1.csv") == 0
    assert float(read_csv(tmp_path / "s1.csv")[0]["p"]) == pytest.approx(1 / 3432)


def test_topomap_command(tmp_path):
    vals = {"Fpz": 1, "Fz": 2, "F3": 3, "F4": 1, "C3": 5, "Cz": 2, "C4": 0, "Pz": 1}
    (tmp_path / "v.csv").write_text("channel,value\n" + "".join(f"{k},{v}\n" for k, v in vals.items()))
    args = ("topomap", "--input", tmp_path / "v.csv", "--output", tmp_path / "m.ppm",
            "--grid-out", tmp_path / "g.csv", "--vmin", 0, "--vmax", 5, "--resolution", 32)
    assert run(*args) == 0
    first = (tmp_path / "m.ppm").read_bytes()
    assert run(*args) == 0
    assert (tmp_path / "m.ppm").read_bytes() == first and first.startswith(b"P6\n32 32\n")
    assert run("topomap", "--input", tmp_path / "v.csv", "--output", tmp_path / "bad.ppm",
               "--vmin", 1, "--vmax", 1) == 1
    assert not (tmp_path / "bad.ppm").exists()


def test_train_classify_simulate(tmp_path):
    assert run("synth", "--mode", "features", "--n", 100, "--seed", 1, "--output", tmp_path / "f.csv") == 0
    assert run("train", "--input", tmp_path / "f.csv", "--depth", 3, "--output", tmp_path / "m.json") == 0
    model = json.loads((tmp_path / "m.json").read_text())
    assert model["max_depth"] == 3 and model["nodes"]
    assert run("classify", "--input", tmp_path / "f.csv", "--model", tmp_path / "m.json",
               "--output", tmp_path / "c.csv") == 0
    rows = read_csv(tmp_path / "c.csv")
    assert [r["label"] for r in rows[:3]] == ["Intuitive"] * 3
    assert run("synth", "--mode", "stream", "--duration", 60, "--seed", 2, "--output", tmp_path / "s.csv") == 0
    assert run("simulate", "--input", tmp_path / "s.csv", "--model", tmp_path / "m.json",
               "--hysteresis-k", 5, "--output", tmp_path / "log.ndjson") == 0
    log = [json.loads(l) for l in (tmp_path / "log.ndjson").read_text().splitlines()]
    modes = [r["mode"] for r in log]
    switches = [i for i in range(1, len(modes)) if modes[i] != modes[i - 1]]
    assert len(switches) == 1 and 1500 <= switches[0] < 1505
    assert set(log[0]) == {"t_s", "label", "confidence", "mode"}


def test_simulate_recording(tmp_path):
    assert run("synth", "--output", tmp_path / "r", "--duration", 8, "--seed", 1) == 0
    assert run("simulate", "--input", tmp_path / "r", "--output", tmp_path / "log.ndjson") == 0
    lines = (tmp_path / "log.ndjson").read_text().splitlines()
    assert len(lines) == (2048 - 64) // 5 + 1


def _pipeline_config(path, out):
    cfg = {"seed": 5, "pipeline": {"output_dir": str(out), "cohort": {"n_per_group": 3, "duration_s": 8.0}}}
    path.write_text(json.dumps(cfg))


def test_pipeline_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        cfg = tmp_path / f"{name}.json"
        _pipeline_config(cfg, tmp_path / name)
        assert run("pipeline", "--config", cfg) == 0
        outs.append({p.name: p.read_bytes() for p in sorted((tmp_path / name).iterdir())})
    a, b = outs
    a.pop("config.json"), b.pop("config.json")
    assert a == b
    assert {"features.csv", "comparison.csv", "classification.csv"} <= set(a)
    assert any(n.endswith(".ppm") for n in a)


def test_pipeline_thread_count_does_not_change_output(tmp_path, monkeypatch):
    results = []
    for threads in ("1", "4"):
        monkeypatch.setenv("CMC_PIPELINE_THREADS", threads)
        out = tmp_path / f"t{threads}"
        cfg = tmp_path / f"c{threads}.json"
        _pipeline_config(cfg, out)
        assert run("pipeline", "--config", cfg) == 0
        results.append((out / "features.csv").read_bytes())
    assert results[0] == results[1]


def test_pipeline_bad_threads(tmp_path, monkeypatch):
    monkeypatch.setenv("CMC_PIPELINE_THREADS", "zero")
    cfg = tmp_path / "c.json"
    _pipeline_config(cfg, tmp_path / "out")
    assert run("pipeline", "--config", cfg) == 1
    assert not (tmp_path / "out").exists()
