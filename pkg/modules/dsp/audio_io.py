"""WAV (PCM16) and flat SPG1 spectrogram files"""
from __future__ import annotations

import logging
import struct
from pathlib import Path
from typing import Tuple

import numpy as np
from scipy.io import wavfile

from .errors import FileFormatError
from .signals import Waveform

logger = logging.getLogger(__name__)

SPG_MAGIC = b"SPG1"
_PCM_SCALE = 32767.0


def to_pcm16(samples: np.ndarray) -> np.ndarray:
    return np.clip(np.round(np.asarray(samples) * _PCM_SCALE), -32768, 32767).astype(np.int16)


def write_wav(path, w: Waveform):
    path = Path(path)
    try:
        wavfile.write(str(path), w.sample_rate, to_pcm16(w.samples))
    except OSError as e:
        logger.error("Error writing WAV %s: %s", path, e)
        raise


def read_wav(path) -> Waveform:
    path = Path(path)
    try:
        sample_rate, data = wavfile.read(str(path))
    except (OSError, ValueError) as e:
        raise FileFormatError(f"cannot read WAV {path}: {e}") from e
    if data.dtype != np.int16 or data.ndim != 1:
        raise FileFormatError(f"{path}: expected mono 16-bit PCM, got {data.dtype} with shape {data.shape}")
    return Waveform(data.astype(np.float64) / _PCM_SCALE, int(sample_rate))


def write_spectrogram(path, array: np.ndarray):
    """magic, u32 frames, u32 bins, then float32 row-major, all little-endian"""
    array = np.ascontiguousarray(array, dtype="<f4")
    if array.ndim != 2:
        raise FileFormatError(f"spectrogram to write must be 2-D, got shape {array.shape}")
    path = Path(path)
    try:
        with open(path, "wb") as fh:
            fh.write(SPG_MAGIC)
            fh.write(struct.pack("<II", *array.shape))
            fh.write(array.tobytes())
    except OSError as e:
        logger.error("Error writing spectrogram %s: %s", path, e)
        raise


def read_spectrogram_header(path) -> Tuple[int, int]:
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(12)
    if len(head) < 12 or head[:4] != SPG_MAGIC:
        raise FileFormatError(f"{path}: not an SPG1 spectrogram")
    return struct.unpack("<II", head[4:12])


def read_spectrogram(path) -> np.ndarray:
    path = Path(path)
    frames, bins = read_spectrogram_header(path)
    data = np.fromfile(path, dtype="<f4", offset=12)
    if data.size != frames * bins:
        raise FileFormatError(f"{path}: header says {frames}×{bins} but holds {data.size} values")
    return data.reshape(frames, bins).astype(np.float32)
