"""Gated recurrent unit built from taped ops"""
from __future__ import annotations

from dataclasses import dataclass

from . import ops
from .errors import DimensionError
from .tensor import Tensor


@dataclass
class GRUWeights:
    """Input/hidden projections for the update, reset and candidate gates.

    Gate blocks are laid out [z | r | n] along the last axis of every array.
    """

    w_x: Tensor  # D_in × 3·D_h
    w_h: Tensor  # D_h × 3·D_h
    b_x: Tensor  # 3·D_h
    b_h: Tensor  # 3·D_h

    @property
    def hidden_size(self) -> int:
        return self.w_h.shape[0]

    @property
    def input_size(self) -> int:
        return self.w_x.shape[0]

    def tensors(self):
        return [self.w_x, self.w_h, self.b_x, self.b_h]


def gru_step(x: Tensor, h: Tensor, weights: GRUWeights) -> Tensor:
    """One GRU update: h' = (1 - z) * h + z * n.

    x is [B × D_in] (or a single D_in vector), h matches it with D_h.
    """
    size = weights.hidden_size
    if weights.w_h.shape != (size, 3 * size) or weights.w_x.shape[1] != 3 * size:
        raise DimensionError(
            f"gru_step: weight shapes {weights.w_x.shape}, {weights.w_h.shape} are not a GRU of size {size}"
        )
    if x.shape[-1] != weights.input_size or h.shape[-1] != size or x.shape[:-1] != h.shape[:-1]:
        raise DimensionError(
            f"gru_step: input {x.shape} / state {h.shape} do not fit weights "
            f"{weights.w_x.shape}, {weights.w_h.shape}"
        )
    vector = x.ndim == 1
    if vector:
        x = ops.reshape(x, (1, -1))
        h = ops.reshape(h, (1, -1))

    gx = ops.add(ops.matmul(x, weights.w_x), weights.b_x)
    gh = ops.add(ops.matmul(h, weights.w_h), weights.b_h)
    z = ops.sigmoid(ops.add(ops.narrow(gx, 0, size), ops.narrow(gh, 0, size)))
    r = ops.sigmoid(ops.add(ops.narrow(gx, size, 2 * size), ops.narrow(gh, size, 2 * size)))
    n = ops.tanh(ops.add(ops.narrow(gx, 2 * size, 3 * size), ops.mul(r, ops.narrow(gh, 2 * size, 3 * size))))
    h_new = ops.add(ops.mul(ops.one_minus(z), h), ops.mul(z, n))

    if vector:
        h_new = ops.reshape(h_new, (size,))
    return h_new
