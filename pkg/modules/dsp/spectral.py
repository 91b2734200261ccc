"""STFT, inverse STFT and Griffin-Lim phase reconstruction.

Analysis is unnormalized: X[t, k] = sum_n w[n] x[t*hop + n - n_fft/2] e^(-2πikn/n_fft),
with reflect padding of n_fft/2 samples at both ends when `center` is set.
The inverse is the least-squares overlap-add, dividing by the summed squared
window, so `istft(stft(x))` reproduces x exactly under a COLA hop.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import librosa
import numpy as np

from modules.numcore import Rng

from .errors import SignalContractError
from .signals import ComplexSpectrogram, Spectrogram, Waveform

logger = logging.getLogger(__name__)

WINDOWS = {"hann": "hann", "rectangular": "boxcar"}


def _window(kind: str) -> str:
    if kind not in WINDOWS:
        raise SignalContractError(f"unknown window {kind!r}; expected one of {sorted(WINDOWS)}")
    return WINDOWS[kind]


def _check_frame_params(n_fft: int, hop: int):
    if n_fft < 2 or n_fft & (n_fft - 1):
        raise SignalContractError(f"n_fft must be a power of two, got {n_fft}")
    if not 1 <= hop <= n_fft:
        raise SignalContractError(f"hop must be in [1, n_fft={n_fft}], got {hop}")


def stft(w: Waveform, n_fft: int = 512, hop: int = 128, window: str = "hann", center: bool = True) -> ComplexSpectrogram:
    """Short-time Fourier transform; 1 + len // hop frames when centered"""
    _check_frame_params(n_fft, hop)
    if len(w) < n_fft:
        raise SignalContractError(f"signal of {len(w)} samples is shorter than one window ({n_fft})")
    values = librosa.stft(
        w.samples,
        n_fft=n_fft,
        hop_length=hop,
        win_length=n_fft,
        window=_window(window),
        center=center,
        pad_mode="reflect",
    )
    return ComplexSpectrogram(values.T, n_fft, hop, window, w.sample_rate, center=center, length=len(w))


def istft(spec: ComplexSpectrogram, length: Optional[int] = None) -> Waveform:
    """Least-squares overlap-add inverse of `stft`"""
    _check_frame_params(spec.n_fft, spec.hop)
    if spec.values.ndim != 2 or spec.values.shape[1] != spec.n_fft // 2 + 1:
        raise SignalContractError(
            f"spectrogram shape {spec.values.shape} inconsistent with n_fft={spec.n_fft}"
        )
    if length is None:
        length = spec.length
    if length is None:
        length = (spec.n_frames - 1) * spec.hop + (0 if spec.center else spec.n_fft)
    samples = librosa.istft(
        spec.values.T,
        hop_length=spec.hop,
        win_length=spec.n_fft,
        n_fft=spec.n_fft,
        window=_window(spec.window),
        center=spec.center,
        length=length,
    )
    return Waveform(samples, spec.sample_rate)


@dataclass
class GriffinLimResult:
    """`errors` track the internal iterate on the padded grid; `output_error`
    is measured on the centered STFT of the returned waveform"""

    waveform: Waveform
    errors: List[float] = field(default_factory=list)
    output_error: float = float("nan")

    @property
    def final_error(self) -> float:
        return self.errors[-1]


def _two_sided_weights(n_bins: int, n_fft: int) -> np.ndarray:
    # interior bins appear twice in the full spectrum, DC and Nyquist once
    weights = np.full(n_bins, 2.0)
    weights[0] = 1.0
    if n_fft % 2 == 0:
        weights[-1] = 1.0
    return weights[:, None]


def spectral_convergence(estimate: np.ndarray, target: np.ndarray, n_fft: int) -> float:
    """‖|X| − A‖_F / ‖A‖_F over the two-sided spectrum; arrays are bins × frames"""
    weights = _two_sided_weights(target.shape[0], n_fft)
    num = np.sqrt(np.sum(weights * (np.abs(estimate) - target) ** 2))
    den = np.sqrt(np.sum(weights * target ** 2))
    return float(num / den)


def _output_error(waveform: Waveform, target: np.ndarray, mag: Spectrogram) -> float:
    if len(waveform) < mag.n_fft:
        return float("nan")
    rebuilt = stft(waveform, mag.n_fft, mag.hop, mag.window).values.T
    frames = min(rebuilt.shape[1], target.shape[1])
    return spectral_convergence(rebuilt[:, :frames], target[:, :frames], mag.n_fft)


def griffin_lim(
    mag: Spectrogram,
    iterations: int = 60,
    rng: Optional[Rng] = None,
    phase_init: str = "random",
    length: Optional[int] = None,
) -> GriffinLimResult:
    """Recover a waveform whose STFT magnitude approximates `mag`.

    Iterates on the uncentered frame grid of the padded signal so each
    inverse is an exact least-squares projection, then trims back to the
    centered convention. `errors[i]` is the spectral convergence of the
    i-th iterate; `output_error` rescores the trimmed waveform, whose edge
    frames see reflect padding instead of the iterate's own samples.
    """
    if iterations < 1:
        raise SignalContractError(f"iterations must be >= 1, got {iterations}")
    target = np.asarray(mag.magnitudes, dtype=np.float64).T
    if not np.isfinite(target).all():
        raise SignalContractError("magnitudes must be finite")
    if np.linalg.norm(target) == 0.0:
        raise SignalContractError("cannot invert an all-zero magnitude spectrogram")
    n_fft, hop = mag.n_fft, mag.hop
    _check_frame_params(n_fft, hop)
    window = _window(mag.window)

    if phase_init == "random":
        rng = rng if rng is not None else Rng(0)
        phase = np.exp(1j * rng.phase(target.shape))
    elif phase_init == "zero":
        phase = np.ones(target.shape, dtype=np.complex128)
    else:
        raise SignalContractError(f"phase_init must be 'random' or 'zero', got {phase_init!r}")

    padded_len = (target.shape[1] - 1) * hop + n_fft
    signal = librosa.istft(
        target * phase, hop_length=hop, win_length=n_fft, n_fft=n_fft, window=window, center=False, length=padded_len
    )
    errors = []
    for i in range(iterations):
        rebuilt = librosa.stft(signal, n_fft=n_fft, hop_length=hop, win_length=n_fft, window=window, center=False)
        errors.append(spectral_convergence(rebuilt, target, n_fft))
        if i == iterations - 1:
            break
        projected = target * np.exp(1j * np.angle(rebuilt))
        signal = librosa.istft(
            projected, hop_length=hop, win_length=n_fft, n_fft=n_fft, window=window, center=False, length=padded_len
        )
    logger.debug("griffin_lim: %d iterations, final spectral convergence %.4f", iterations, errors[-1])

    out_len = length if length is not None else (target.shape[1] - 1) * hop
    start = n_fft // 2
    samples = signal[start:start + out_len]
    if samples.shape[0] < out_len:
        samples = np.pad(samples, (0, out_len - samples.shape[0]))
    waveform = Waveform(samples, mag.sample_rate)
    return GriffinLimResult(waveform, errors, _output_error(waveform, target, mag))
