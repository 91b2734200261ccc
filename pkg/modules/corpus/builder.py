"""Writes a synthetic dataset directory and reads it back"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from modules.dsp import DEFAULT_AUDIO, AudioConfig, FileFormatError, read_spectrogram, read_spectrogram_header, write_spectrogram, write_wav
from modules.numcore import ContractError, Rng

from .errors import CorpusIOError
from .generator import Utterance, render_utterance, sample_text
from .styles import DEFAULT_STYLES, StyleClass, style_distribution

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.jsonl"
DATASET_NAME = "dataset.json"


@dataclass
class ManifestRecord:
    id: str
    symbols: List[int]
    style_id: int
    n_frames: int
    n_samples: int
    wav: str
    lin: str
    mel: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass
class DatasetManifest:
    seed: int
    style_distribution: Dict[str, float]
    records: List[ManifestRecord] = field(default_factory=list)
    root: Optional[Path] = None
    audio: Dict = field(default_factory=lambda: DEFAULT_AUDIO.to_dict())

    def __len__(self):
        return len(self.records)

    def style_histogram(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for record in self.records:
            counts[record.style_id] = counts.get(record.style_id, 0) + 1
        return counts

    def save(self, root: Path):
        root = Path(root)
        try:
            with open(root / MANIFEST_NAME, "w", encoding="utf-8") as fh:
                for record in self.records:
                    fh.write(record.to_json() + "\n")
            header = {"seed": self.seed, "style_distribution": self.style_distribution, "audio": self.audio}
            with open(root / DATASET_NAME, "w", encoding="utf-8") as fh:
                json.dump(header, fh, sort_keys=True, indent=2)
        except OSError as e:
            raise CorpusIOError(f"cannot write manifest under {root}: {e}") from e
        self.root = root


@dataclass
class TrainingRecord:
    """What the trainer may see of an utterance: no style label"""

    id: str
    symbols: List[int]
    mel: np.ndarray
    linear: np.ndarray


def draw_styles(rng: Rng, n: int, styles: Sequence[StyleClass] = DEFAULT_STYLES) -> List[StyleClass]:
    probs = np.asarray(list(style_distribution(styles).values()))
    picks = rng.choice(len(styles), size=n, p=probs)
    return [styles[i] for i in picks]


def _write_utterance(root: Path, uid: str, utt: Utterance) -> ManifestRecord:
    record = ManifestRecord(
        id=uid,
        symbols=utt.symbols,
        style_id=utt.style_id,
        n_frames=utt.n_frames,
        n_samples=len(utt.waveform),
        wav=f"wav/{uid}.wav",
        lin=f"spec/{uid}.lin",
        mel=f"spec/{uid}.mel",
    )
    try:
        write_wav(root / record.wav, utt.waveform)
        write_spectrogram(root / record.lin, utt.linear.magnitudes)
        write_spectrogram(root / record.mel, utt.mel.magnitudes)
    except OSError as e:
        raise CorpusIOError(f"cannot write utterance {uid} under {root}: {e}") from e
    return record


def build_corpus(
    n: int,
    seed: int,
    out_dir,
    audio: AudioConfig = DEFAULT_AUDIO,
    styles: Sequence[StyleClass] = DEFAULT_STYLES,
    min_len: int = 3,
    max_len: int = 8,
    progress: bool = True,
) -> DatasetManifest:
    """Render n utterances into out_dir; identical seeds give identical bytes"""
    if n < 1:
        raise ContractError(f"corpus size must be at least 1, got {n}")
    root = Path(out_dir)
    try:
        (root / "wav").mkdir(parents=True, exist_ok=True)
        (root / "spec").mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise CorpusIOError(f"cannot create dataset directory {root}: {e}") from e

    base = Rng(seed)
    drawn = draw_styles(base.child("styles"), n, styles)
    manifest = DatasetManifest(seed=seed, style_distribution=style_distribution(styles), audio=audio.to_dict())
    logger.info("Building %d utterances into %s (seed %d)", n, root, seed)
    for i in tqdm(range(n), desc="corpus", disable=not progress):
        rng = base.child("utterance", i)
        symbols = sample_text(rng.child("text"), min_len, max_len)
        utt = render_utterance(symbols, drawn[i], rng.child("render"), audio)
        manifest.records.append(_write_utterance(root, f"utt{i:05d}", utt))
    manifest.save(root)
    logger.info("Style histogram: %s", manifest.style_histogram())
    return manifest


def load_manifest(root, verify: bool = True) -> DatasetManifest:
    """Read manifest.jsonl and dataset.json, checking every file against its record"""
    root = Path(root)
    try:
        with open(root / DATASET_NAME, encoding="utf-8") as fh:
            header = json.load(fh)
        with open(root / MANIFEST_NAME, encoding="utf-8") as fh:
            records = [ManifestRecord(**json.loads(line)) for line in fh if line.strip()]
    except (OSError, json.JSONDecodeError, TypeError) as e:
        raise CorpusIOError(f"cannot read dataset manifest under {root}: {e}") from e

    manifest = DatasetManifest(
        seed=header["seed"],
        style_distribution=header["style_distribution"],
        records=records,
        root=root,
        audio=header.get("audio", DEFAULT_AUDIO.to_dict()),
    )
    if verify:
        for record in records:
            _verify_record(root, record)
    return manifest


def _verify_record(root: Path, record: ManifestRecord):
    if not (root / record.wav).is_file():
        raise CorpusIOError(f"{root / record.wav}: missing audio for {record.id}")
    for rel in (record.lin, record.mel):
        path = root / rel
        try:
            frames, _ = read_spectrogram_header(path)
        except (OSError, FileFormatError) as e:
            raise CorpusIOError(f"{path}: {e}") from e
        if frames != record.n_frames:
            raise CorpusIOError(f"{path}: holds {frames} frames, manifest says {record.n_frames}")


def load_training_view(root) -> List[TrainingRecord]:
    """Spectrograms and symbols for every record; style labels stay behind"""
    manifest = load_manifest(root)
    out = []
    for record in manifest.records:
        try:
            mel = read_spectrogram(manifest.root / record.mel)
            linear = read_spectrogram(manifest.root / record.lin)
        except (OSError, FileFormatError) as e:
            raise CorpusIOError(f"cannot load {record.id}: {e}") from e
        out.append(TrainingRecord(record.id, list(record.symbols), mel, linear))
    return out
