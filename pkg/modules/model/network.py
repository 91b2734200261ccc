"""The style-token sequence-to-sequence network"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from modules.numcore import ContractError, ParamStore, Rng, Tensor, constant
from modules.numcore import ops

from . import layers
from .config import ModelConfig, StyleDirective
from .params import init_params

logger = logging.getLogger(__name__)

# consecutive quiet decoder steps that end free-running synthesis
QUIET_STEPS = 3


@dataclass
class EncoderOutput:
    H: Tensor  # T_enc × D_enc


@dataclass
class AttentionTrace:
    """Per decoder step: text weights, style weights and (g_text, g_style).

    Arrays carry an optional leading batch axis when produced by a batched pass.
    """

    text: np.ndarray
    style: np.ndarray
    gates: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.text.shape[-2]

    @property
    def g_text(self) -> np.ndarray:
        return self.gates[..., 0]

    @property
    def g_style(self) -> np.ndarray:
        return self.gates[..., 1]

    def select(self, i: int) -> "AttentionTrace":
        return AttentionTrace(self.text[i], self.style[i], self.gates[i])

    def to_dict(self):
        return {"A_text": self.text.tolist(), "A_style": self.style.tolist(), "G": self.gates.tolist()}

    @classmethod
    def from_steps(cls, steps: Sequence[layers.StepOutput]) -> "AttentionTrace":
        return cls(
            np.stack([s.text_weights for s in steps], axis=1),
            np.stack([s.style_weights for s in steps], axis=1),
            np.stack([s.gates for s in steps], axis=1),
        )


@dataclass
class ForwardResult:
    mel: Tensor  # B × T_dec × n_mels
    linear: Optional[Tensor]
    trace: AttentionTrace
    frame_mask: np.ndarray  # B × T_dec, 0 on padding


@dataclass
class SynthesisResult:
    mel: np.ndarray  # T × n_mels features
    linear: Optional[np.ndarray]
    trace: AttentionTrace
    directive: StyleDirective


def pad_symbols(sequences: Sequence[Sequence[int]]):
    """Right-pad id sequences with 0; returns (ids B × T, mask B × T)"""
    longest = max(len(s) for s in sequences)
    ids = np.zeros((len(sequences), longest), dtype=np.int64)
    mask = np.zeros((len(sequences), longest), dtype=bool)
    for i, seq in enumerate(sequences):
        ids[i, : len(seq)] = seq
        mask[i, : len(seq)] = True
    return ids, mask


def pad_frames(target: np.ndarray, r: int):
    """Pad T × n_mels with silence (0) up to a multiple of r; returns (padded, mask)"""
    frames = target.shape[0]
    padded_len = -(-frames // r) * r
    padded = np.zeros((padded_len,) + target.shape[1:], dtype=target.dtype)
    padded[:frames] = target
    mask = np.zeros(padded_len, dtype=bool)
    mask[:frames] = True
    return padded, mask


class StyleTokenModel:
    """Text encoder, K shared style tokens, two attention pathways mixed by a
    sigmoid controller, an autoregressive mel decoder and an optional
    linear-spectrogram post-net."""

    def __init__(self, config: ModelConfig, params: ParamStore):
        self.config = config
        self.params = params

    @classmethod
    def initialize(cls, config: ModelConfig, seed: int) -> "StyleTokenModel":
        return cls(config, init_params(config, Rng(seed)))

    @property
    def tokens(self) -> np.ndarray:
        return self.params["style.tokens"].values

    def _check_symbols(self, symbols) -> np.ndarray:
        ids = np.asarray(symbols, dtype=np.int64)
        if ids.ndim != 1 or ids.size == 0:
            raise ContractError("symbol sequence must be a non-empty 1-D list of ids")
        return ids

    def encode_text(self, symbols: Sequence[int]) -> EncoderOutput:
        ids = self._check_symbols(symbols)
        H = layers.encode_text(self.params, ids[None, :], np.ones((1, ids.size), dtype=bool))
        return EncoderOutput(ops.take(H, 0, axis=0))

    def style_encode(self, directive: Optional[StyleDirective] = None) -> Tensor:
        if directive is not None:
            directive.validate(self.config.n_tokens, self.config.d_tok)
        return layers.style_encode(self.params, directive)

    def _memory(self, ids, text_mask, directive):
        encoded = layers.encode_text(self.params, ids, text_mask)
        return layers.build_memory(self.params, encoded, text_mask, self.style_encode(directive))

    def forward_batch(
        self,
        ids: np.ndarray,
        text_mask: np.ndarray,
        targets: np.ndarray,
        frame_mask: np.ndarray,
        directive: Optional[StyleDirective] = None,
    ) -> ForwardResult:
        """Teacher-forced pass over a padded batch; target frames B × T_dec × n_mels, T_dec % r == 0"""
        c = self.config
        targets = np.asarray(targets, dtype=c.np_dtype)
        batch, frames = targets.shape[0], targets.shape[1]
        if frames == 0:
            raise ContractError("teacher-forced pass needs at least one target frame")
        if frames % c.r:
            raise ContractError(f"target frame count {frames} is not a multiple of r={c.r}")

        memory = self._memory(ids, text_mask, directive)
        state = layers.DecoderState.zeros(batch, c)
        prev = constant(np.zeros((batch, c.n_mels)), dtype=c.np_dtype)
        steps: List[layers.StepOutput] = []
        for t in range(frames // c.r):
            if t > 0:
                prev = constant(targets[:, c.r * t - 1], dtype=c.np_dtype)
            out = layers.decoder_step(self.params, c, prev, state, memory, directive, t)
            steps.append(out)
            state = out.state

        mel = ops.concat([s.frames for s in steps], axis=1)
        linear = layers.postnet(self.params, mel, frame_mask) if c.use_postnet else None
        return ForwardResult(mel, linear, AttentionTrace.from_steps(steps), np.asarray(frame_mask, dtype=bool))

    def forward_teacher_forced(self, symbols: Sequence[int], target_mel: np.ndarray, directive=None) -> ForwardResult:
        """Single utterance; targets are padded with silence to a multiple of r"""
        ids = self._check_symbols(symbols)
        target_mel = np.asarray(target_mel)
        if target_mel.ndim != 2 or target_mel.shape[0] == 0:
            raise ContractError(f"target mel must be a non-empty frames × n_mels array, got {target_mel.shape}")
        padded, mask = pad_frames(target_mel, self.config.r)
        result = self.forward_batch(ids[None, :], np.ones((1, ids.size), dtype=bool), padded[None], mask[None], directive)
        return ForwardResult(
            ops.take(result.mel, 0, axis=0),
            None if result.linear is None else ops.take(result.linear, 0, axis=0),
            result.trace.select(0),
            mask,
        )

    def synthesize(
        self, symbols: Sequence[int], directive: Optional[StyleDirective] = None, max_steps: int = 200
    ) -> SynthesisResult:
        """Free-running decoding, stopping at max_steps or after QUIET_STEPS near-silent steps"""
        if max_steps < 1:
            raise ContractError(f"max_steps must be at least 1, got {max_steps}")
        c = self.config
        directive = directive or StyleDirective.none()
        directive.validate(c.n_tokens, c.d_tok)
        ids = self._check_symbols(symbols)
        memory = self._memory(ids[None, :], np.ones((1, ids.size), dtype=bool), directive)
        state = layers.DecoderState.zeros(1, c)
        prev = constant(np.zeros((1, c.n_mels)), dtype=c.np_dtype)

        steps: List[layers.StepOutput] = []
        quiet = 0
        for t in range(max_steps):
            out = layers.decoder_step(self.params, c, prev, state, memory, directive, t)
            steps.append(out)
            state = out.state
            prev = constant(out.frames.values[:, -1], dtype=c.np_dtype)
            quiet = quiet + 1 if float(out.frames.values.mean()) < c.silence_threshold else 0
            if quiet >= QUIET_STEPS:
                break
        logger.debug("synthesized %d steps with %s", len(steps), directive)

        mel = np.concatenate([s.frames.values[0] for s in steps], axis=0)
        linear = None
        if c.use_postnet:
            mel_t = Tensor(mel[None])
            linear = layers.postnet(self.params, mel_t, np.ones((1, mel.shape[0]), dtype=bool)).values[0]
        return SynthesisResult(mel, linear, AttentionTrace.from_steps(steps).select(0), directive)
