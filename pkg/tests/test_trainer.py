import json

import numpy as np
import pandas as pd
import pytest

from modules import db_utils
from modules.corpus import load_training_view
from modules.numcore import Tape, Tensor, backward
from modules.trainer import (
    LOSS_COLUMNS,
    BatchStream,
    ConfigError,
    DatasetError,
    TrainConfig,
    Trainer,
    TrainingError,
    checkpoint_path,
    collate,
    fit,
    optimizer_path,
    reconstruction_loss,
    to_examples,
)
from modules.model import StyleTokenModel


def _config(tiny_corpus, out_dir, small_config, **overrides):
    values = dict(
        corpus=str(tiny_corpus),
        out_dir=str(out_dir),
        steps=6,
        batch_size=2,
        learning_rate=1e-2,
        checkpoint_interval=3,
        seed=7,
        model=small_config.to_dict(),
    )
    values.update(overrides)
    return TrainConfig(**values)


@pytest.fixture
def examples(tiny_corpus, small_config):
    return to_examples(load_training_view(tiny_corpus), small_config)


def test_loss_values():
    pred = Tensor(np.zeros((1, 4, 2)))
    target = np.ones((1, 4, 2))
    mask = np.array([[1, 1, 1, 0]], dtype=bool)
    total, report = reconstruction_loss(pred, Tensor(np.zeros((1, 4, 3))), target, np.full((1, 4, 3), 0.5), mask, 1.0, 2.0)
    assert report.mel_l1 == pytest.approx(1.0)
    assert report.lin_l1 == pytest.approx(0.5)
    assert float(total.values) == pytest.approx(2.0)
    same, report = reconstruction_loss(Tensor(target), None, target, None, mask)
    assert report.total == 0.0 and report.lin_l1 == 0.0


def test_loss_ignores_padding():
    target = np.zeros((1, 3, 2))
    pred = np.zeros((1, 3, 2))
    pred[0, 2] = 100.0
    _, report = reconstruction_loss(Tensor(pred), None, target, None, np.array([[1, 1, 0]], dtype=bool))
    assert report.mel_l1 == 0.0


def test_doubling_mel_weight_doubles_mel_share():
    rng = np.random.default_rng(4)
    pred, target = Tensor(rng.uniform(size=(2, 4, 3))), rng.uniform(size=(2, 4, 3))
    pred_lin, target_lin = Tensor(rng.uniform(size=(2, 4, 5))), rng.uniform(size=(2, 4, 5))
    mask = np.array([[1, 1, 1, 1], [1, 1, 0, 0]], dtype=bool)
    _, once = reconstruction_loss(pred, pred_lin, target, target_lin, mask, 1.0, 0.5)
    _, twice = reconstruction_loss(pred, pred_lin, target, target_lin, mask, 2.0, 0.5)
    assert twice.mel_l1 == once.mel_l1
    assert twice.total - once.total == pytest.approx(once.mel_l1, rel=1e-12)
    assert once.total == pytest.approx(once.mel_l1 + 0.5 * once.lin_l1, rel=1e-12)


def test_examples_are_normalized_features(examples, small_config):
    assert len(examples) == 6
    for example in examples:
        assert example.mel.dtype == np.float32
        assert example.mel.min() >= 0 and example.mel.max() <= 1
        assert example.linear.shape == (example.n_frames, small_config.n_linear_bins)


def test_bad_records_name_the_record(tiny_corpus, small_config):
    records = load_training_view(tiny_corpus)
    records[1].symbols = [99]
    with pytest.raises(DatasetError) as err:
        to_examples(records, small_config)
    assert err.value.record_id == records[1].id


def test_collate_pads_to_multiple_of_r(examples):
    batch = collate(examples[:3], r=2)
    longest = max(e.n_frames for e in examples[:3])
    assert batch.mel.shape[1] == longest + longest % 2
    assert batch.frame_mask.sum(axis=1).tolist() == [e.n_frames for e in examples[:3]]
    assert batch.text_mask.sum(axis=1).tolist() == [len(e.symbols) for e in examples[:3]]


def test_batch_stream_is_step_addressable(examples):
    fresh = BatchStream(examples, 4, 2, seed=1)
    walked = BatchStream(examples, 4, 2, seed=1)
    for step in range(5):
        walked.batch_for_step(step)
    assert fresh.batch_for_step(4).record_ids == walked.batch_for_step(4).record_ids
    epoch = [rid for step in range(walked.per_epoch) for rid in walked.batch_for_step(step).record_ids]
    assert sorted(epoch) == sorted(e.id for e in examples)


def test_config_rejects_bad_values(tmp_path, small_config):
    with pytest.raises(ConfigError, match="unknown"):
        TrainConfig.from_dict({"steps": 3, "momentum": 0.9})
    with pytest.raises(ConfigError):
        TrainConfig(steps=0)
    with pytest.raises(ConfigError):
        TrainConfig(model={**small_config.to_dict(), "use_postnet": False}, w_lin=1.0)
    with pytest.raises(ConfigError):
        TrainConfig(model={"n_layers": 2})
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        TrainConfig.load(path)


def test_config_file_round_trip(tmp_path, small_config):
    config = TrainConfig(steps=12, model=small_config.to_dict())
    config.save(tmp_path / "c.json")
    assert TrainConfig.load(tmp_path / "c.json") == config


def test_training_reduces_loss_on_a_fixed_batch(examples, small_model, tmp_path, small_config, tiny_corpus):
    trainer = Trainer(small_model, _config(tiny_corpus, tmp_path, small_config))
    batch = collate(examples[:2], small_config.r)
    tokens = small_model.tokens.copy()
    reports = [trainer.train_step(batch) for _ in range(15)]
    assert trainer.step == 15
    assert reports[-1].total < reports[0].total
    assert not np.array_equal(small_model.tokens, tokens)
    assert all(r.grad_norm > 0 for r in reports)


def test_reported_grad_norm_is_the_pre_clip_global_norm(examples, small_config, tmp_path, tiny_corpus):
    batch = collate(examples[:2], small_config.r)
    reference = StyleTokenModel.initialize(small_config, seed=5)
    with Tape():
        result = reference.forward_batch(batch.ids, batch.text_mask, batch.mel, batch.frame_mask)
        total, _ = reconstruction_loss(result.mel, result.linear, batch.mel, batch.linear, batch.frame_mask)
        backward(total)
    expected = np.sqrt(sum(float(np.sum(np.square(g, dtype=np.float64))) for g in reference.params.grads().values()))

    trainer = Trainer(StyleTokenModel.initialize(small_config, seed=5), _config(tiny_corpus, tmp_path, small_config, clip_norm=1e-3))
    report = trainer.train_step(batch)
    assert expected > 1e-3
    assert report.grad_norm == pytest.approx(expected, rel=1e-5)


def test_non_finite_loss_stops_training(examples, small_model, tmp_path, small_config, tiny_corpus):
    trainer = Trainer(small_model, _config(tiny_corpus, tmp_path, small_config))
    small_model.params["dec_out.b"].values[:] = np.nan
    with pytest.raises(TrainingError) as err:
        trainer.train_step(collate(examples[:2], small_config.r))
    assert err.value.step == 0


def test_fit_writes_curve_checkpoints_and_registry(tiny_corpus, tmp_path, small_config):
    registry = tmp_path / "runs.db"
    result = fit(_config(tiny_corpus, tmp_path / "run", small_config), registry=registry, progress=False)
    curve = pd.read_csv(result.loss_curve)
    assert list(curve.columns) == LOSS_COLUMNS
    assert curve["step"].tolist() == list(range(6))
    assert result.checkpoint == checkpoint_path(tmp_path / "run", 6)
    assert checkpoint_path(tmp_path / "run", 3).is_file()
    assert optimizer_path(result.checkpoint).is_file()
    saved = json.loads((tmp_path / "run" / "train_config.json").read_text())
    assert saved["steps"] == 6

    runs = db_utils.list_runs(registry)
    assert len(runs) == 1 and runs[0]["status"] == "finished" and runs[0]["final_step"] == 6
    assert [c["step"] for c in db_utils.list_checkpoints(runs[0]["id"], registry)] == [3, 6]


def test_resume_is_bitwise_identical(tiny_corpus, tmp_path, small_config):
    straight = fit(_config(tiny_corpus, tmp_path / "a", small_config), progress=False)
    config = _config(tiny_corpus, tmp_path / "b", small_config)
    halfway = fit(config, progress=False, stop_after=3)
    assert halfway.checkpoint == checkpoint_path(tmp_path / "b", 3)
    resumed = fit(config, resume=halfway.checkpoint, progress=False)

    assert resumed.checkpoint.read_bytes() == straight.checkpoint.read_bytes()
    a = pd.read_csv(straight.loss_curve).drop(columns="seconds")
    b = pd.read_csv(resumed.loss_curve).drop(columns="seconds")
    pd.testing.assert_frame_equal(a, b)
    model = StyleTokenModel.initialize(small_config, 7)
    assert Trainer.resume(resumed.checkpoint, config).model.params.size() == model.params.size()


def test_fit_reports_missing_corpus(tmp_path, small_config):
    with pytest.raises(DatasetError):
        fit(_config(tmp_path / "nowhere", tmp_path / "run", small_config), progress=False)
