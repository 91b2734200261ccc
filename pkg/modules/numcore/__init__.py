"""Dense tensors with reverse-mode autodiff and Adam"""
from .cells import GRUWeights, gru_step
from .errors import ContractError, DimensionError, NumcoreError, OutOfRangeError
from .gradcheck import check_gradients, gradient_errors, numeric_gradient, relative_error
from .ops import (
    add,
    broadcast_add,
    concat,
    embedding_lookup,
    l1_loss,
    matmul,
    mul,
    narrow,
    one_minus,
    reshape,
    scale,
    sigmoid,
    softmax,
    stack,
    sub,
    sum,
    take,
    tanh,
)
from .optim import ParamStore, adam_update, clip_by_global_norm, global_norm
from .rng import Rng
from .tensor import Tape, Tensor, backward, constant, zero_grad
