"""Encoder, attention, controller, decoder step and post-net as taped ops"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from modules.numcore import DimensionError, GRUWeights, ParamStore, Tensor, constant, gru_step
from modules.numcore import ops

from .config import ModelConfig, StyleDirective
from .params import gru_weights


@dataclass
class AttentionWeights:
    U: Tensor  # query → D_att
    V: Tensor  # key → D_att
    w: Tensor  # D_att × 1
    b: Tensor

    @classmethod
    def from_store(cls, store: ParamStore, prefix: str) -> "AttentionWeights":
        return cls(store[f"{prefix}.U"], store[f"{prefix}.V"], store[f"{prefix}.w"], store[f"{prefix}.b"])


def _dense(x: Tensor, W: Tensor, b: Optional[Tensor] = None) -> Tensor:
    """Affine map over the last axis of an input of any rank"""
    lead = x.shape[:-1]
    flat = ops.reshape(x, (-1, x.shape[-1])) if x.ndim != 2 else x
    out = ops.matmul(flat, W)
    if b is not None:
        out = ops.add(out, b)
    return ops.reshape(out, lead + (W.shape[1],)) if x.ndim != 2 else out


def bidirectional_gru(x: Tensor, mask: np.ndarray, fw: GRUWeights, bw: GRUWeights) -> Tensor:
    """B × T × D → B × T × 2H; padded steps (mask 0) carry the state through unchanged"""
    batch, steps = x.shape[0], x.shape[1]
    mask = np.asarray(mask, dtype=x.dtype).reshape(batch, steps)
    inputs = [ops.take(x, t, axis=1) for t in range(steps)]
    keep = [constant(mask[:, t:t + 1], like=x) for t in range(steps)]
    hold = [constant(1.0 - mask[:, t:t + 1], like=x) for t in range(steps)]

    def run(weights: GRUWeights, order):
        h = constant(np.zeros((batch, weights.hidden_size)), like=x)
        out = [None] * steps
        for t in order:
            h = ops.add(ops.mul(keep[t], gru_step(inputs[t], h, weights)), ops.mul(hold[t], h))
            out[t] = h
        return out

    forward = run(fw, range(steps))
    backward = run(bw, reversed(range(steps)))
    return ops.stack([ops.concat([f, b], axis=-1) for f, b in zip(forward, backward)], axis=1)


def encode_text(store: ParamStore, ids: np.ndarray, mask: np.ndarray) -> Tensor:
    """Symbol ids B × T → encoder states B × T × D_enc"""
    embedded = ops.embedding_lookup(store["text.embed"], ids)
    return bidirectional_gru(embedded, mask, gru_weights(store, "text.fw"), gru_weights(store, "text.bw"))


def style_encode(store: ParamStore, directive: Optional[StyleDirective] = None) -> Tensor:
    """K × D_att keys/values: tanh(E'·W + b), E' = E or E + bias"""
    tokens = store["style.tokens"]
    if directive is not None and directive.kind == "bias":
        if directive.vector.shape != (tokens.shape[1],):
            raise DimensionError(f"bias vector has shape {directive.vector.shape}, expected ({tokens.shape[1]},)")
        tokens = ops.broadcast_add(tokens, constant(directive.vector, like=tokens))
    return ops.tanh(ops.broadcast_add(ops.matmul(tokens, store["style.W"]), store["style.b"]))


def project_keys(keys: Tensor, att: AttentionWeights) -> Tensor:
    if keys.shape[-1] != att.V.shape[0]:
        raise DimensionError(f"attention keys of width {keys.shape[-1]} do not fit V {att.V.shape}")
    return _dense(keys, att.V)


def attention_weights(
    query: Tensor, projected_keys: Tensor, att: AttentionWeights, mask: Optional[np.ndarray] = None
) -> Tensor:
    """softmax_i(wᵀ tanh(U·q + V·k_i + b)) for a B × D_q query batch"""
    if query.ndim != 2 or query.shape[1] != att.U.shape[0]:
        raise DimensionError(f"attention query {query.shape} does not fit U {att.U.shape}")
    batch, d_att = query.shape[0], att.U.shape[1]
    n = projected_keys.shape[-2]
    q = ops.reshape(ops.matmul(query, att.U), (batch, 1, d_att))
    hidden = ops.tanh(ops.add(ops.add(q, projected_keys), att.b))
    scores = ops.reshape(ops.matmul(ops.reshape(hidden, (batch * n, d_att)), att.w), (batch, n))
    return ops.softmax(scores, mask)


def weighted_context(weights: Tensor, values: Tensor) -> Tensor:
    """Σ_i weights[b, i] · values[(b,) i]"""
    batch, n = weights.shape
    if values.shape[-2] != n:
        raise DimensionError(f"{n} attention weights for {values.shape[-2]} values")
    return ops.sum(ops.mul(ops.reshape(weights, (batch, n, 1)), values), axis=1)


def attend(query: Tensor, keys: Tensor, values: Tensor, att: AttentionWeights, mask=None):
    """Content-based attention for one query; returns (weights N, context D_v)"""
    if keys.ndim != 2 or keys.shape[0] < 1 or values.ndim != 2 or values.shape[0] != keys.shape[0]:
        raise DimensionError(f"attend needs N ≥ 1 keys and matching values, got {keys.shape} and {values.shape}")
    single = query.ndim == 1
    q = ops.reshape(query, (1, -1)) if single else query
    weights = attention_weights(q, project_keys(keys, att), att, mask)
    context = weighted_context(weights, values)
    if single:
        return ops.reshape(weights, (keys.shape[0],)), ops.reshape(context, (values.shape[1],))
    return weights, context


def controller(step_input: Tensor, W: Tensor, b: Tensor, mode: str = "independent"):
    """Sigmoid gates (g_text, g_style), each B × 1"""
    gates = ops.sigmoid(ops.add(ops.matmul(step_input, W), b))
    g_text = ops.narrow(gates, 0, 1)
    g_style = ops.one_minus(g_text) if mode == "complementary" else ops.narrow(gates, 1, 2)
    return g_text, g_style


def prenet(store: ParamStore, frame: Tensor) -> Tensor:
    hidden = ops.tanh(_dense(frame, store["prenet.W1"], store["prenet.b1"]))
    return ops.tanh(_dense(hidden, store["prenet.W2"], store["prenet.b2"]))


@dataclass
class DecoderMemory:
    """Per-utterance inputs every decoder step reads"""

    text: Tensor  # B × T_enc × D_enc
    text_keys: Tensor  # projected, B × T_enc × D_att
    text_mask: np.ndarray  # B × T_enc
    style: Tensor  # K × D_att
    style_keys: Tensor  # projected, K × D_att


@dataclass
class DecoderState:
    attention: Tensor  # B × D_dec
    decoder: Tensor  # B × D_dec

    @classmethod
    def zeros(cls, batch: int, config: ModelConfig) -> "DecoderState":
        z = np.zeros((batch, config.d_dec), dtype=config.np_dtype)
        return cls(Tensor(z), Tensor(z.copy()))


@dataclass
class StepOutput:
    frames: Tensor  # B × r × n_mels
    state: DecoderState
    text_weights: np.ndarray
    style_weights: np.ndarray
    gates: np.ndarray  # B × 2, (g_text, g_style)
    text_context: Tensor  # projected to D_att
    style_context: Tensor  # raw, D_att
    style_projected: Tensor
    combined: Tensor


def build_memory(store: ParamStore, encoded: Tensor, text_mask: np.ndarray, style: Tensor) -> DecoderMemory:
    return DecoderMemory(
        text=encoded,
        text_keys=project_keys(encoded, AttentionWeights.from_store(store, "att_text")),
        text_mask=np.asarray(text_mask, dtype=bool),
        style=style,
        style_keys=project_keys(style, AttentionWeights.from_store(store, "att_style")),
    )


def decoder_step(
    store: ParamStore,
    config: ModelConfig,
    prev_frame: Tensor,
    state: DecoderState,
    memory: DecoderMemory,
    directive: Optional[StyleDirective] = None,
    step: int = 0,
) -> StepOutput:
    """One autoregressive step emitting r mel frames"""
    batch = prev_frame.shape[0]
    if prev_frame.ndim != 2 or prev_frame.shape[1] != config.n_mels:
        raise DimensionError(f"decoder input must be B × {config.n_mels}, got {prev_frame.shape}")

    step_input = prenet(store, prev_frame)
    h_att = gru_step(step_input, state.attention, gru_weights(store, "att_rnn"))

    text_att = AttentionWeights.from_store(store, "att_text")
    a_text = attention_weights(h_att, memory.text_keys, text_att, memory.text_mask)
    c_text = weighted_context(a_text, memory.text)

    override = None if directive is None else directive.style_weights(step, config.n_tokens)
    if override is None:
        style_att = AttentionWeights.from_store(store, "att_style")
        a_style = attention_weights(h_att, memory.style_keys, style_att)
    else:
        a_style = constant(np.broadcast_to(override, (batch, config.n_tokens)), like=prev_frame)
    c_style = weighted_context(a_style, memory.style)

    g_text, g_style = controller(step_input, store["controller.W"], store["controller.b"], config.controller_mode)
    text_projected = ops.matmul(c_text, store["proj.text"])
    style_projected = ops.matmul(c_style, store["proj.style"])
    combined = ops.add(ops.mul(g_text, text_projected), ops.mul(g_style, style_projected))

    h_dec = gru_step(ops.concat([combined, step_input], axis=-1), state.decoder, gru_weights(store, "dec_rnn"))
    out = ops.add(ops.matmul(h_dec, store["dec_out.W"]), store["dec_out.b"])
    frames = ops.reshape(out, (batch, config.r, config.n_mels))

    return StepOutput(
        frames=frames,
        state=DecoderState(h_att, h_dec),
        text_weights=a_text.values.copy(),
        style_weights=a_style.values.copy(),
        gates=np.concatenate([g_text.values, g_style.values], axis=-1),
        text_context=text_projected,
        style_context=c_style,
        style_projected=style_projected,
        combined=combined,
    )


def postnet(store: ParamStore, mel: Tensor, frame_mask: np.ndarray) -> Tensor:
    """Predicted mel B × T × n_mels → linear spectrogram features B × T × bins"""
    hidden = bidirectional_gru(mel, frame_mask, gru_weights(store, "post.fw"), gru_weights(store, "post.bw"))
    return _dense(hidden, store["post_out.W"], store["post_out.b"])
