"""Waveform and spectrogram containers"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SignalContractError


@dataclass
class Waveform:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.sample_rate <= 0:
            raise SignalContractError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.samples.ndim != 1:
            raise SignalContractError(f"waveform must be mono, got shape {self.samples.shape}")
        if not np.isfinite(self.samples).all():
            raise SignalContractError("waveform contains non-finite samples")

    def __len__(self):
        return self.samples.shape[0]

    @property
    def seconds(self) -> float:
        return len(self) / self.sample_rate


@dataclass
class ComplexSpectrogram:
    """frames × bins complex STFT with the metadata needed to invert it"""

    values: np.ndarray
    n_fft: int
    hop: int
    window: str
    sample_rate: int
    center: bool = True
    length: Optional[int] = None

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    def magnitude(self) -> "Spectrogram":
        return Spectrogram(np.abs(self.values), self.n_fft, self.hop, self.window, self.sample_rate)


@dataclass
class Spectrogram:
    """frames × (n_fft/2 + 1) non-negative magnitudes"""

    magnitudes: np.ndarray
    n_fft: int
    hop: int
    window: str
    sample_rate: int

    def __post_init__(self):
        self.magnitudes = np.asarray(self.magnitudes)
        if self.magnitudes.ndim != 2 or self.magnitudes.shape[1] != self.n_fft // 2 + 1:
            raise SignalContractError(
                f"spectrogram must be frames × {self.n_fft // 2 + 1}, got {self.magnitudes.shape}"
            )
        if (self.magnitudes < 0).any():
            raise SignalContractError("spectrogram magnitudes must be non-negative")

    @property
    def n_frames(self) -> int:
        return self.magnitudes.shape[0]


@dataclass
class MelSpectrogram:
    """frames × n_mels magnitudes"""

    magnitudes: np.ndarray
    hop: int
    sample_rate: int

    @property
    def n_frames(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def n_mels(self) -> int:
        return self.magnitudes.shape[1]
