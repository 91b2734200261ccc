"""Training examples and length-bucketed batches"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from modules.corpus import TrainingRecord
from modules.dsp import DEFAULT_AUDIO, AudioConfig, amplitude_to_feature
from modules.model import ModelConfig, pad_symbols
from modules.numcore import Rng

from .errors import DatasetError


@dataclass
class Example:
    id: str
    symbols: List[int]
    mel: np.ndarray  # frames × n_mels, normalized dB features
    linear: np.ndarray  # frames × bins

    @property
    def n_frames(self) -> int:
        return self.mel.shape[0]


@dataclass
class Batch:
    record_ids: List[str]
    ids: np.ndarray  # B × T_enc
    text_mask: np.ndarray
    mel: np.ndarray  # B × T_dec × n_mels
    linear: np.ndarray  # B × T_dec × bins
    frame_mask: np.ndarray  # B × T_dec

    @property
    def size(self) -> int:
        return len(self.record_ids)


def to_examples(records: Sequence[TrainingRecord], model: ModelConfig, audio: AudioConfig = DEFAULT_AUDIO) -> List[Example]:
    out = []
    for record in records:
        if len(record.symbols) == 0:
            raise DatasetError("empty symbol sequence", record.id)
        if any(not 0 <= s < model.n_symbols for s in record.symbols):
            raise DatasetError(f"symbol outside alphabet of {model.n_symbols}", record.id)
        if record.mel.ndim != 2 or record.mel.shape[1] != model.n_mels:
            raise DatasetError(f"mel has shape {record.mel.shape}, model expects {model.n_mels} bands", record.id)
        if record.linear.shape != (record.mel.shape[0], model.n_linear_bins):
            raise DatasetError(f"linear spectrogram has shape {record.linear.shape}", record.id)
        if not (np.isfinite(record.mel).all() and np.isfinite(record.linear).all()):
            raise DatasetError("non-finite spectrogram values", record.id)
        out.append(
            Example(
                record.id,
                list(record.symbols),
                amplitude_to_feature(record.mel, audio).astype(model.np_dtype),
                amplitude_to_feature(record.linear, audio).astype(model.np_dtype),
            )
        )
    return out


def collate(examples: Sequence[Example], r: int) -> Batch:
    """Pad texts to the longest and frames to the longest rounded up to r"""
    ids, text_mask = pad_symbols([e.symbols for e in examples])
    longest = max(e.n_frames for e in examples)
    frames = -(-longest // r) * r
    dtype = examples[0].mel.dtype
    mel = np.zeros((len(examples), frames, examples[0].mel.shape[1]), dtype=dtype)
    linear = np.zeros((len(examples), frames, examples[0].linear.shape[1]), dtype=dtype)
    frame_mask = np.zeros((len(examples), frames), dtype=bool)
    for i, e in enumerate(examples):
        mel[i, : e.n_frames] = e.mel
        linear[i, : e.n_frames] = e.linear
        frame_mask[i, : e.n_frames] = True
    return Batch([e.id for e in examples], ids, text_mask, mel, linear, frame_mask)


class BatchStream:
    """Step-addressable batches: epoch e is planned from rng.child("batches", e).

    Within an epoch examples are sorted by frame count (random tie-break),
    cut into buckets of batch_size and the buckets visited in random order.
    """

    def __init__(self, examples: Sequence[Example], batch_size: int, r: int, seed: int):
        if not examples:
            raise DatasetError("no training examples", "<dataset>")
        self.examples = list(examples)
        self.batch_size = min(batch_size, len(self.examples))
        self.r = r
        self.rng = Rng(seed)
        self.per_epoch = -(-len(self.examples) // self.batch_size)
        self._plans: Dict[int, List[np.ndarray]] = {}

    def plan(self, epoch: int) -> List[np.ndarray]:
        if epoch not in self._plans:
            rng = self.rng.child("batches", epoch)
            lengths = np.array([e.n_frames for e in self.examples])
            order = np.lexsort((rng.permutation(len(lengths)), lengths))
            buckets = [order[i:i + self.batch_size] for i in range(0, len(order), self.batch_size)]
            self._plans = {epoch: [buckets[j] for j in rng.permutation(len(buckets))]}
        return self._plans[epoch]

    def batch_for_step(self, step: int) -> Batch:
        epoch, index = divmod(step, self.per_epoch)
        return collate([self.examples[i] for i in self.plan(epoch)[index]], self.r)
