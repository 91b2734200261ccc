"""Harmonic-source renderer for synthetic expressive utterances"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy.ndimage import uniform_filter1d

from modules.dsp import (
    DEFAULT_AUDIO,
    AudioConfig,
    F0Track,
    MelSpectrogram,
    Spectrogram,
    Waveform,
    analyze,
)
from modules.numcore import ContractError, Rng

from .errors import GenerationError
from .styles import ALPHABET_SIZE, BASE_F0, F0_CEILING, F0_FLOOR, SYMBOLS, StyleClass, SymbolSpec

logger = logging.getLogger(__name__)

N_HARMONICS = 5
LEAD_FRAMES = 2
TRAIL_FRAMES = 6
PEAK = 0.5
# fade at voicing edges, in samples
RAMP = 64


@dataclass
class Utterance:
    symbols: List[int]
    style_id: int
    waveform: Waveform
    linear: Spectrogram
    mel: MelSpectrogram
    ref_f0: F0Track
    durations: List[int]

    @property
    def n_frames(self) -> int:
        return self.linear.n_frames


def sample_text(rng: Rng, min_len: int = 3, max_len: int = 8, alphabet: int = ALPHABET_SIZE) -> List[int]:
    """Uniform length in [min_len, max_len], uniform symbols"""
    if not 1 <= min_len <= max_len <= 30:
        raise ContractError(f"text length bounds must satisfy 1 ≤ {min_len} ≤ {max_len} ≤ 30")
    length = int(rng.integers(min_len, max_len + 1))
    return [int(s) for s in rng.integers(0, alphabet, size=length)]


def symbol_durations(symbols: Sequence[int], style: StyleClass, inventory=SYMBOLS) -> List[int]:
    return [max(1, int(round(inventory[s].base_frames * style.duration_scale))) for s in symbols]


def _f0_per_sample(
    symbols: Sequence[int],
    durations: Sequence[int],
    style: StyleClass,
    inventory: Sequence[SymbolSpec],
    hop: int,
    sample_rate: int,
) -> np.ndarray:
    pieces = []
    for s, frames in zip(symbols, durations):
        n = frames * hop
        u = (np.arange(n) + 0.5) / n
        offset = np.zeros(n) if style.f0_flatten else inventory[s].contour(u)
        pieces.append(BASE_F0 + offset)
    f0 = np.concatenate(pieces) * style.f0_scale
    return f0 + style.f0_slope * np.arange(f0.shape[0]) / sample_rate


def _formant_gain(harmonic_hz: np.ndarray, centers: np.ndarray, widths: np.ndarray) -> np.ndarray:
    gain = np.full_like(harmonic_hz, 0.3)
    for j in range(centers.shape[0]):
        gain += 1.0 / (1.0 + ((harmonic_hz - centers[j]) / widths[j]) ** 2)
    return gain


def render_utterance(
    symbols: Sequence[int],
    style: StyleClass,
    rng: Rng,
    audio: AudioConfig = DEFAULT_AUDIO,
    inventory: Sequence[SymbolSpec] = SYMBOLS,
) -> Utterance:
    """Render `symbols` in `style` and analyze the result.

    Voicing spans the symbols, framed by LEAD_FRAMES of silence before and
    TRAIL_FRAMES after. Formant tracks are piecewise constant per symbol and
    smoothed over one hop so transitions stay click-free.
    """
    if len(symbols) == 0:
        raise ContractError("cannot render an empty symbol sequence")
    bad = [s for s in symbols if not 0 <= s < len(inventory)]
    if bad:
        raise GenerationError(f"symbol {bad[0]} outside the inventory of {len(inventory)}")

    sr, hop = audio.sample_rate, audio.hop
    durations = symbol_durations(symbols, style, inventory)
    f0 = _f0_per_sample(symbols, durations, style, inventory, hop, sr)
    if f0.min() < F0_FLOOR or f0.max() > F0_CEILING:
        raise GenerationError(
            f"style {style.label!r} drives F0 to [{f0.min():.1f}, {f0.max():.1f}] Hz, "
            f"outside [{F0_FLOOR}, {F0_CEILING}]"
        )

    per_sample = np.repeat(np.asarray(symbols), np.asarray(durations) * hop)
    centers = np.stack([[inventory[s].formants[j][0] for s in per_sample] for j in range(2)])
    widths = np.stack([[inventory[s].formants[j][1] for s in per_sample] for j in range(2)])
    centers = uniform_filter1d(centers, size=hop, axis=1, mode="nearest")
    widths = uniform_filter1d(widths, size=hop, axis=1, mode="nearest")

    phases = rng.phase(N_HARMONICS)
    voiced = np.zeros_like(f0)
    cycles = 2.0 * np.pi * np.cumsum(f0) / sr
    for h in range(1, N_HARMONICS + 1):
        amplitude = _formant_gain(h * f0, centers, widths) / h
        voiced += amplitude * np.sin(h * cycles + phases[h - 1])

    ramp = np.minimum(1.0, np.minimum(np.arange(voiced.shape[0]) + 1, np.arange(voiced.shape[0])[::-1] + 1) / RAMP)
    voiced *= ramp
    samples = np.concatenate([np.zeros(LEAD_FRAMES * hop), voiced, np.zeros(TRAIL_FRAMES * hop)])
    samples *= PEAK / np.abs(samples).max()
    waveform = Waveform(samples, sr)

    linear, mel = analyze(waveform, audio)
    ref_f0 = _reference_track(f0, linear.n_frames, hop, sr)
    return Utterance(list(symbols), style.id, waveform, linear, mel, ref_f0, durations)


def _reference_track(f0: np.ndarray, n_frames: int, hop: int, sample_rate: int) -> F0Track:
    """Analytic F0 at each frame center; frames centered in silence are 0"""
    hz = np.zeros(n_frames)
    centers = np.arange(n_frames) * hop - LEAD_FRAMES * hop
    inside = (centers >= 0) & (centers < f0.shape[0])
    hz[inside] = f0[centers[inside]]
    return F0Track(hz, hop, sample_rate)
