"""Teacher-forced training with Adam, checkpoints and a CSV loss curve"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from modules import db_utils
from modules.corpus import CorpusIOError, load_training_view
from modules.dsp import DEFAULT_AUDIO, AudioConfig
from modules.model import CheckpointError, StyleTokenModel, load_checkpoint, save_checkpoint
from modules.numcore import Tape, adam_update, backward, clip_by_global_norm

from .config import TrainConfig
from .data import Batch, BatchStream, to_examples
from .errors import DatasetError, TrainingError
from .loss import LOSS_COLUMNS, LossReport, reconstruction_loss

logger = logging.getLogger(__name__)

LOSS_CURVE = "loss_curve.csv"


@dataclass
class FitResult:
    checkpoint: Path
    loss_curve: Path
    reports: List[LossReport] = field(default_factory=list)
    run_id: Optional[str] = None


def optimizer_path(checkpoint: Path) -> Path:
    return checkpoint.with_suffix(".opt.npz")


def checkpoint_path(out_dir: Path, step: int) -> Path:
    return Path(out_dir) / "checkpoints" / f"step_{step:06d}.stck"


class Trainer:
    def __init__(self, model: StyleTokenModel, config: TrainConfig):
        self.model = model
        self.config = config
        self.step = 0

    def train_step(self, batch: Batch) -> LossReport:
        """Forward, backward, clip and one Adam update"""
        cfg, store = self.config, self.model.params
        started = time.perf_counter()
        store.zero_grad()
        with Tape():
            result = self.model.forward_batch(batch.ids, batch.text_mask, batch.mel, batch.frame_mask)
            total, report = reconstruction_loss(
                result.mel,
                result.linear,
                batch.mel,
                batch.linear if result.linear is not None else None,
                batch.frame_mask,
                cfg.w_mel,
                cfg.w_lin,
                step=self.step,
            )
            if not np.isfinite(report.total):
                raise TrainingError(f"non-finite loss {report.total} on batch {batch.record_ids}", self.step)
            backward(total)
        grads, report.grad_norm = clip_by_global_norm(store.grads(), cfg.clip_norm)
        if not np.isfinite(report.grad_norm):
            raise TrainingError("non-finite gradient norm", self.step)
        adam_update(store, grads, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps)
        store.zero_grad()
        report.seconds = time.perf_counter() - started
        self.step += 1
        return report

    def save(self, path: Path) -> Path:
        save_checkpoint(path, self.model)
        state = self.model.params.optimizer_state()
        state["step"] = np.asarray(self.step, dtype=np.int64)
        np.savez(optimizer_path(path), **state)
        return path

    @classmethod
    def resume(cls, path, config: TrainConfig) -> "Trainer":
        path = Path(path)
        model = load_checkpoint(path)
        trainer = cls(model, config)
        try:
            with np.load(optimizer_path(path)) as state:
                model.params.load_optimizer_state(state)
                trainer.step = int(state["step"])
        except OSError as e:
            raise CheckpointError(f"cannot read optimizer state next to {path}: {e}") from e
        return trainer


def _write_curve(path: Path, reports: List[LossReport]):
    pd.DataFrame([r.to_row() for r in reports], columns=LOSS_COLUMNS).to_csv(path, index=False)


def _previous_reports(path: Path, upto: int) -> List[LossReport]:
    if not path.is_file():
        return []
    frame = pd.read_csv(path)
    frame = frame[frame["step"] < upto]
    return [LossReport(**{k: row[k] for k in LOSS_COLUMNS}) for row in frame.to_dict("records")]


def fit(
    config: TrainConfig,
    resume: Optional[Path] = None,
    registry=None,
    audio: AudioConfig = DEFAULT_AUDIO,
    progress: bool = True,
    stop_after: Optional[int] = None,
) -> FitResult:
    """Train for config.steps steps (or until stop_after), checkpointing every interval.

    `registry` is a path to the SQLite run registry; runs and checkpoints are
    recorded there when given.
    """
    model_config = config.model_config()
    model_config.check_audio(audio)
    try:
        records = load_training_view(config.corpus)
    except CorpusIOError as e:
        raise DatasetError(str(e), "<manifest>") from e
    examples = to_examples(records, model_config, audio)
    stream = BatchStream(examples, config.batch_size, model_config.r, config.seed)

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config.save(out_dir / "train_config.json")
    curve = out_dir / LOSS_CURVE

    if resume is not None:
        trainer = Trainer.resume(resume, config)
        if trainer.model.config != model_config:
            raise CheckpointError(f"{resume}: model config differs from the training config")
        logger.info("Resuming from %s at step %d", resume, trainer.step)
    else:
        trainer = Trainer(StyleTokenModel.initialize(model_config, config.seed), config)
    reports = _previous_reports(curve, trainer.step) if resume is not None else []

    run_id = None
    if registry is not None:
        run_id = db_utils.start_run(registry, config, trainer.model.params.size())

    last = stop_after if stop_after is not None else config.steps
    last = min(last, config.steps)
    latest = None
    logger.info(
        "Training %d parameters for steps %d..%d (seed %d)", trainer.model.params.size(), trainer.step, last, config.seed
    )
    for step in tqdm(range(trainer.step, last), desc="train", disable=not progress):
        report = trainer.train_step(stream.batch_for_step(step))
        reports.append(report)
        if step % 50 == 0:
            logger.info("step %d total %.4f mel %.4f lin %.4f |g| %.3f", step, report.total, report.mel_l1, report.lin_l1, report.grad_norm)
        if trainer.step % config.checkpoint_interval == 0 or trainer.step == config.steps:
            latest = trainer.save(checkpoint_path(out_dir, trainer.step))
            _write_curve(curve, reports)
            if run_id is not None:
                db_utils.record_checkpoint(registry, run_id, trainer.step, latest, report.total)

    if latest is None or trainer.step != int(latest.stem.split("_")[-1]):
        latest = trainer.save(checkpoint_path(out_dir, trainer.step))
    _write_curve(curve, reports)
    if run_id is not None:
        final_total = reports[-1].total if reports else None
        db_utils.finish_run(registry, run_id, trainer.step, latest, final_total)
    return FitResult(latest, curve, reports, run_id)
