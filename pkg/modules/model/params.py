"""Parameter layout and seeded initialization"""
from __future__ import annotations

from typing import Dict, List, Tuple

import numpy as np

from modules.numcore import GRUWeights, ParamStore, Rng, Tensor

from .config import ModelConfig

# embeddings are drawn from ±EMBED_RANGE; weights from ±1/sqrt(fan_in); biases start at 0
EMBED_RANGE = 0.05


def _gru_shapes(prefix: str, d_in: int, d_h: int) -> List[Tuple[str, tuple, str]]:
    return [
        (f"{prefix}.w_x", (d_in, 3 * d_h), "weight"),
        (f"{prefix}.w_h", (d_h, 3 * d_h), "weight"),
        (f"{prefix}.b_x", (3 * d_h,), "bias"),
        (f"{prefix}.b_h", (3 * d_h,), "bias"),
    ]


def _attention_shapes(prefix: str, d_query: int, d_key: int, d_att: int):
    return [
        (f"{prefix}.U", (d_query, d_att), "weight"),
        (f"{prefix}.V", (d_key, d_att), "weight"),
        (f"{prefix}.w", (d_att, 1), "weight"),
        (f"{prefix}.b", (d_att,), "bias"),
    ]


def parameter_shapes(config: ModelConfig) -> List[Tuple[str, tuple, str]]:
    """(name, shape, kind) for every parameter, in checkpoint order"""
    c = config
    half = c.d_enc // 2
    shapes = [("text.embed", (c.n_symbols, c.d_txt), "embedding")]
    shapes += _gru_shapes("text.fw", c.d_txt, half)
    shapes += _gru_shapes("text.bw", c.d_txt, half)
    shapes += [
        ("style.tokens", (c.n_tokens, c.d_tok), "embedding"),
        ("style.W", (c.d_tok, c.d_att), "weight"),
        ("style.b", (c.d_att,), "bias"),
        ("prenet.W1", (c.n_mels, c.prenet_1), "weight"),
        ("prenet.b1", (c.prenet_1,), "bias"),
        ("prenet.W2", (c.prenet_1, c.prenet_2), "weight"),
        ("prenet.b2", (c.prenet_2,), "bias"),
    ]
    shapes += _gru_shapes("att_rnn", c.prenet_2, c.d_dec)
    shapes += _attention_shapes("att_text", c.d_dec, c.d_enc, c.d_att)
    shapes += _attention_shapes("att_style", c.d_dec, c.d_att, c.d_att)
    shapes += [
        ("proj.text", (c.d_enc, c.d_att), "weight"),
        ("proj.style", (c.d_att, c.d_att), "weight"),
        ("controller.W", (c.prenet_2, 2), "weight"),
        ("controller.b", (2,), "bias"),
    ]
    shapes += _gru_shapes("dec_rnn", c.d_att + c.prenet_2, c.d_dec)
    shapes += [
        ("dec_out.W", (c.d_dec, c.r * c.n_mels), "weight"),
        ("dec_out.b", (c.r * c.n_mels,), "bias"),
    ]
    if c.use_postnet:
        shapes += _gru_shapes("post.fw", c.n_mels, c.d_post // 2)
        shapes += _gru_shapes("post.bw", c.n_mels, c.d_post // 2)
        shapes += [
            ("post_out.W", (c.d_post, c.n_linear_bins), "weight"),
            ("post_out.b", (c.n_linear_bins,), "bias"),
        ]
    return shapes


def init_params(config: ModelConfig, rng: Rng) -> ParamStore:
    dtype = config.np_dtype
    store = ParamStore()
    for name, shape, kind in parameter_shapes(config):
        stream = rng.child("init", name)
        if kind == "bias":
            values = np.zeros(shape)
        elif kind == "embedding":
            values = stream.uniform(-EMBED_RANGE, EMBED_RANGE, size=shape)
        else:
            limit = 1.0 / np.sqrt(shape[0])
            values = stream.uniform(-limit, limit, size=shape)
        store.add(name, Tensor(values, dtype=dtype))
    return store


def gru_weights(store: ParamStore, prefix: str) -> GRUWeights:
    return GRUWeights(
        store[f"{prefix}.w_x"], store[f"{prefix}.w_h"], store[f"{prefix}.b_x"], store[f"{prefix}.b_h"]
    )


def snapshot(store: ParamStore) -> Dict[str, np.ndarray]:
    return {name: tensor.values.copy() for name, tensor in store.items()}
