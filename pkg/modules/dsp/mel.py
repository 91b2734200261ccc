"""Triangular mel filterbank on the HTK scale, mel(f) = 2595 log10(1 + f/700)"""
from __future__ import annotations

from dataclasses import dataclass

import librosa
import numpy as np

from .errors import SignalContractError
from .signals import MelSpectrogram, Spectrogram


@dataclass
class MelFilterbank:
    weights: np.ndarray  # n_mels × bins
    fmin: float
    fmax: float
    sample_rate: int
    n_fft: int

    @property
    def n_mels(self) -> int:
        return self.weights.shape[0]

    def center_frequencies(self) -> np.ndarray:
        edges = librosa.mel_frequencies(self.n_mels + 2, fmin=self.fmin, fmax=self.fmax, htk=True)
        return edges[1:-1]


def mel_filterbank(sample_rate: int, n_fft: int, n_mels: int, fmin: float, fmax: float) -> MelFilterbank:
    if not 0 <= fmin < fmax <= sample_rate / 2:
        raise SignalContractError(
            f"mel band [{fmin}, {fmax}] Hz invalid for sample rate {sample_rate} (need 0 <= fmin < fmax <= sr/2)"
        )
    if n_mels < 1:
        raise SignalContractError(f"n_mels must be positive, got {n_mels}")
    weights = librosa.filters.mel(
        sr=sample_rate, n_fft=n_fft, n_mels=n_mels, fmin=fmin, fmax=fmax, htk=True, norm=None, dtype=np.float64
    )
    return MelFilterbank(weights, fmin, fmax, sample_rate, n_fft)


def apply_mel(lin: Spectrogram, fb: MelFilterbank) -> MelSpectrogram:
    if lin.magnitudes.shape[1] != fb.weights.shape[1]:
        raise SignalContractError(
            f"spectrogram has {lin.magnitudes.shape[1]} bins, filterbank expects {fb.weights.shape[1]}"
        )
    return MelSpectrogram(lin.magnitudes @ fb.weights.T, lin.hop, lin.sample_rate)
