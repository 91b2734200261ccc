"""Style-steered synthesis and Griffin-Lim vocoding"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from modules.dsp import DEFAULT_AUDIO, AudioConfig, Spectrogram, Waveform, feature_to_amplitude, griffin_lim
from modules.model import AttentionTrace, StyleDirective, StyleTokenModel, load_checkpoint
from modules.numcore import ContractError, DimensionError, OutOfRangeError, Rng

logger = logging.getLogger(__name__)

ModelSource = Union[StyleTokenModel, str, Path]
DEFAULT_MAX_STEPS = 200


@dataclass
class SynthOutput:
    mel: np.ndarray  # frames × n_mels features
    linear: Optional[np.ndarray]
    trace: AttentionTrace
    waveform: Optional[Waveform]
    directive: StyleDirective


def resolve_model(source: ModelSource) -> StyleTokenModel:
    return source if isinstance(source, StyleTokenModel) else load_checkpoint(source)


def vocode(linear_features: np.ndarray, audio: AudioConfig = DEFAULT_AUDIO, iterations: Optional[int] = None, seed: int = 0) -> Waveform:
    """Linear-spectrogram features → waveform via Griffin-Lim with a seeded initial phase"""
    magnitudes = feature_to_amplitude(linear_features, audio)
    spec = Spectrogram(magnitudes, audio.n_fft, audio.hop, audio.window, audio.sample_rate)
    result = griffin_lim(spec, iterations or audio.griffin_lim_iters, rng=Rng(seed).child("griffin_lim"))
    return result.waveform


def synthesize_with(
    source: ModelSource,
    symbols: Sequence[int],
    directive: StyleDirective,
    max_steps: int = DEFAULT_MAX_STEPS,
    waveform: bool = True,
    audio: AudioConfig = DEFAULT_AUDIO,
    seed: int = 0,
) -> SynthOutput:
    model = resolve_model(source)
    if waveform and not model.config.use_postnet:
        raise ContractError("waveform requested but the checkpoint has no post-net")
    result = model.synthesize(symbols, directive, max_steps)
    wav = vocode(result.linear, audio, seed=seed) if waveform else None
    return SynthOutput(result.mel, result.linear, result.trace, wav, result.directive)


def synth_forced(source: ModelSource, symbols, k: int, **kwargs) -> SynthOutput:
    """Attend only to token k at every decoder step"""
    return synthesize_with(source, symbols, StyleDirective.force(k), **kwargs)


def token_bias(source: ModelSource, tokens: Sequence[Tuple[int, float]]) -> np.ndarray:
    """Σ scale·E[k]: the vector broadcast-added to the bank for one or more tokens"""
    model = resolve_model(source)
    bank = model.tokens
    bias = np.zeros(bank.shape[1], dtype=np.float64)
    for k, scale in tokens:
        if not 0 <= k < bank.shape[0]:
            raise OutOfRangeError(f"token {k} outside bank of {bank.shape[0]}")
        if not np.isfinite(scale):
            raise ContractError(f"bias scale must be finite, got {scale}")
        bias = bias + scale * bank[k].astype(np.float64)
    return bias


def synth_biased(source: ModelSource, symbols, k, scale=1.0, **kwargs) -> SynthOutput:
    """Bias every token row toward token k (or a list of tokens with matching scales)"""
    model = resolve_model(source)
    ks = list(k) if isinstance(k, (list, tuple)) else [k]
    scales = list(scale) if isinstance(scale, (list, tuple)) else [scale] * len(ks)
    if len(scales) != len(ks):
        raise DimensionError(f"{len(ks)} bias tokens but {len(scales)} scales")
    directive = StyleDirective.bias(token_bias(model, list(zip(ks, scales))))
    return synthesize_with(model, symbols, directive, **kwargs)


def synth_interpolated(source: ModelSource, symbols, weights, **kwargs) -> SynthOutput:
    """Replace style attention with `weights` (length K) at every step"""
    return synthesize_with(source, symbols, StyleDirective.interpolate(weights), **kwargs)


def synth_scheduled(source: ModelSource, symbols, schedule, **kwargs) -> SynthOutput:
    """Style attention at step t taken from row min(t, S-1) of the S × K schedule"""
    return synthesize_with(source, symbols, StyleDirective.schedule(schedule), **kwargs)
