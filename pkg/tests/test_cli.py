import filecmp
import json

import numpy as np
import pytest

from modules import db_utils
from modules.cli import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, run
from modules.dsp import read_spectrogram, read_wav
from modules.model import save_checkpoint


@pytest.fixture
def ckpt(small_model, tmp_path):
    return str(save_checkpoint(tmp_path / "model.stck", small_model))


def test_help_exits_cleanly(capsys):
    assert run(["--help"]) == EXIT_OK
    assert "corpus" in capsys.readouterr().out
    assert run(["synth", "--help"]) == EXIT_OK


def test_usage_errors():
    assert run([]) == EXIT_USAGE
    assert run(["dance"]) == EXIT_USAGE
    assert run(["corpus", "--out", "x", "--n", "many"]) == EXIT_USAGE
    assert run(["corpus", "--out", "x", "--bogus"]) == EXIT_USAGE


def test_corpus_is_reproducible(tmp_path, capsys):
    for name in ("a", "b"):
        assert run(["corpus", "--n", "2", "--seed", "1", "--out", str(tmp_path / name)]) == EXIT_OK
    assert "seed: 1" in capsys.readouterr().out
    cmp = filecmp.dircmp(tmp_path / "a", tmp_path / "b")
    assert not cmp.diff_files and not cmp.left_only and not cmp.right_only
    for sub in ("wav", "spec"):
        inner = filecmp.cmpfiles(tmp_path / "a" / sub, tmp_path / "b" / sub, cmp.subdirs[sub].common_files, shallow=False)
        assert not inner[1] and not inner[2]


def test_seed_override_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("STYLE_TOKENS_SEED", "99")
    assert run(["corpus", "--n", "1", "--seed", "1", "--out", str(tmp_path / "c")]) == EXIT_OK
    assert "seed: 99" in capsys.readouterr().out
    assert json.loads((tmp_path / "c" / "dataset.json").read_text())["seed"] == 99


def test_synth_writes_all_outputs(ckpt, tmp_path):
    prefix = tmp_path / "out" / "utt"
    code = run(["synth", "--text", "1,2,3", "--ckpt", ckpt, "--out-prefix", str(prefix), "--force", "2", "--max-steps", "5"])
    assert code == EXIT_OK
    mel = read_spectrogram(f"{prefix}.mel")
    lin = read_spectrogram(f"{prefix}.lin")
    assert mel.shape[0] == lin.shape[0] and mel.shape[1] == 40 and lin.shape[1] == 257
    assert read_wav(f"{prefix}.wav").sample_rate == 8000
    trace = json.loads((tmp_path / "out" / "utt.trace.json").read_text())
    assert trace["directive"] == {"kind": "force", "index": 2}
    assert np.asarray(trace["A_style"])[:, 2].tolist() == [1.0] * len(trace["A_style"])
    assert len(trace["G"]) * 2 == mel.shape[0]


def test_synth_directive_flags(ckpt, tmp_path):
    base = ["synth", "--text", "1,2", "--ckpt", ckpt, "--out-prefix", str(tmp_path / "s"), "--max-steps", "3"]
    assert run(base + ["--force", "1", "--interp", "0,1,0,0"]) == EXIT_USAGE
    assert run(base + ["--scale", "2"]) == EXIT_USAGE
    assert run(base + ["--bias", "0,1", "--scale", "1"]) == EXIT_USAGE
    assert run(base + ["--interp", "0.5,x"]) == EXIT_USAGE
    assert run(base + ["--bias", "1", "--scale", "0.5"]) == EXIT_OK
    schedule = tmp_path / "schedule.csv"
    schedule.write_text("1,0,0,0\n0,0,0,1\n")
    assert run(base + ["--schedule", str(schedule)]) == EXIT_OK
    assert run(base + ["--interp", "0.5,0.5"]) == EXIT_USAGE
    assert run(base + ["--force", "9"]) == EXIT_USAGE


def test_synth_runtime_errors(ckpt, tmp_path, capsys):
    prefix = str(tmp_path / "s")
    assert run(["synth", "--text", "1", "--ckpt", str(tmp_path / "missing.stck"), "--out-prefix", prefix]) == EXIT_RUNTIME
    assert "missing.stck" in capsys.readouterr().err
    assert run(["synth", "--text", "a,b", "--ckpt", ckpt, "--out-prefix", prefix]) == EXIT_USAGE


def test_profile_on_untrained_checkpoint(ckpt, tmp_path):
    texts = tmp_path / "texts.txt"
    texts.write_text("1,2,3\n4,5,6\n")
    prefix = tmp_path / "prof" / "run"
    code = run(["profile", "--ckpt", ckpt, "--texts-file", str(texts), "--tokens", "0,3", "--out-prefix", str(prefix), "--max-steps", "6"])
    assert code == EXIT_OK
    rows = (tmp_path / "prof" / "run_profile.csv").read_text().strip().splitlines()
    assert len(rows) == 1 + 2 * 2
    assert (tmp_path / "prof" / "run_f0.csv").is_file()
    assert (tmp_path / "prof" / "run_f0.svg").read_text().count("<polyline") == 2
    assert run(["profile", "--ckpt", ckpt, "--texts-file", str(texts), "--out-prefix", str(prefix), "--plot-text", "5"]) == EXIT_USAGE


def test_purity_and_overlay(ckpt, tiny_corpus, tmp_path):
    report = tmp_path / "purity.json"
    assert run(["purity", "--ckpt", ckpt, "--dataset", str(tiny_corpus), "--out", str(report)]) == EXIT_OK
    data = json.loads(report.read_text())
    assert 0.0 < data["purity"] <= 1.0
    assert sum(map(sum, data["table"])) == 6
    assert run(["purity", "--ckpt", ckpt, "--dataset", str(tmp_path / "nope")]) == EXIT_RUNTIME

    svg = tmp_path / "overlay.svg"
    assert run(["overlay", "--ckpt", ckpt, "--text", "3,4", "--out", str(svg), "--max-steps", "4"]) == EXIT_OK
    assert 'id="g_text"' in svg.read_text()


def test_train_records_run(tiny_corpus, tmp_path, small_config, capsys):
    config = tmp_path / "train.json"
    config.write_text(json.dumps({
        "corpus": str(tiny_corpus),
        "out_dir": str(tmp_path / "run"),
        "steps": 2,
        "batch_size": 3,
        "checkpoint_interval": 1,
        "model": small_config.to_dict(),
    }))
    assert run(["train", "--config", str(config)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "seed: 7" in out and "step_000002.stck" in out
    runs = db_utils.list_runs(str(tmp_path / "runs.db"))
    assert len(runs) == 1 and runs[0]["final_step"] == 2

    config.write_text(json.dumps({"corpus": str(tiny_corpus), "stepz": 2}))
    assert run(["train", "--config", str(config)]) == EXIT_RUNTIME
    assert run(["train", "--config", str(tmp_path / "absent.json")]) == EXIT_RUNTIME
