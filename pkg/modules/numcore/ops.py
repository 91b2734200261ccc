"""Differentiable operations on Tensor"""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import ContractError, DimensionError, OutOfRangeError
from .tensor import Tensor, record


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`"""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, extent in enumerate(shape) if extent == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _broadcast_shape(a: Tensor, b: Tensor, op: str) -> tuple:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as e:
        raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} do not broadcast") from e


def add(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_shape(a, b, "add")

    def backward_fn(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(grad, b.shape)

    return record("add", (a, b), a.values + b.values, backward_fn)


def sub(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_shape(a, b, "sub")

    def backward_fn(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(-grad, b.shape)

    return record("sub", (a, b), a.values - b.values, backward_fn)


def mul(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_shape(a, b, "mul")

    def backward_fn(grad):
        return _unbroadcast(grad * b.values, a.shape), _unbroadcast(grad * a.values, b.shape)

    return record("mul", (a, b), a.values * b.values, backward_fn)


def scale(a: Tensor, factor: float) -> Tensor:
    factor = a.dtype.type(factor)

    def backward_fn(grad):
        return (grad * factor,)

    return record("scale", (a,), a.values * factor, backward_fn)


def one_minus(a: Tensor) -> Tensor:
    def backward_fn(grad):
        return (-grad,)

    return record("one_minus", (a,), 1.0 - a.values, backward_fn)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product of a[m×k] and b[k×n]"""
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul: cannot multiply {a.shape} by {b.shape}")

    def backward_fn(grad):
        return grad @ b.values.T, a.values.T @ grad

    return record("matmul", (a, b), a.values @ b.values, backward_fn)


def broadcast_add(m: Tensor, v: Tensor) -> Tensor:
    """out[i, j] = m[i, j] + v[j]"""
    if m.ndim != 2 or v.ndim != 1 or m.shape[1] != v.shape[0]:
        raise DimensionError(f"broadcast_add: matrix {m.shape} and vector {v.shape} disagree")
    return add(m, v)


def sigmoid(x: Tensor) -> Tensor:
    # exp(-|x|) never overflows
    values = x.values
    decay = np.exp(-np.abs(values))
    out = np.where(values >= 0, 1.0 / (1.0 + decay), decay / (1.0 + decay)).astype(values.dtype)

    def backward_fn(grad):
        return (grad * out * (1.0 - out),)

    return record("sigmoid", (x,), out, backward_fn)


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.values)

    def backward_fn(grad):
        return (grad * (1.0 - out * out),)

    return record("tanh", (x,), out, backward_fn)


def softmax(x: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
    """Softmax over the last axis; entries where `mask` is 0 get exactly 0"""
    if x.ndim == 0 or x.shape[-1] == 0:
        raise DimensionError(f"softmax: needs a non-empty last axis, got shape {x.shape}")
    values = x.values
    if mask is not None:
        mask = np.broadcast_to(np.asarray(mask, dtype=bool), x.shape)
        if not mask.any(axis=-1).all():
            raise ContractError("softmax: a row is fully masked")
        values = np.where(mask, values, -np.inf)
    shifted = values - values.max(axis=-1, keepdims=True)
    exps = np.exp(shifted)
    out = exps / exps.sum(axis=-1, keepdims=True)

    def backward_fn(grad):
        inner = (grad * out).sum(axis=-1, keepdims=True)
        return (out * (grad - inner),)

    return record("softmax", (x,), out, backward_fn)


def sum(x: Tensor, axis=None) -> Tensor:  # noqa: A001
    out = x.values.sum(axis=axis)

    def backward_fn(grad):
        if axis is None:
            return (np.broadcast_to(grad, x.shape).copy(),)
        return (np.broadcast_to(np.expand_dims(grad, axis), x.shape).copy(),)

    return record("sum", (x,), out, backward_fn)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    try:
        out = x.values.reshape(shape)
    except ValueError as e:
        raise DimensionError(f"reshape: cannot view {x.shape} as {tuple(shape)}") from e

    def backward_fn(grad):
        return (grad.reshape(x.shape),)

    return record("reshape", (x,), out, backward_fn)


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    try:
        out = np.concatenate([t.values for t in tensors], axis=axis)
    except ValueError as e:
        shapes = [t.shape for t in tensors]
        raise DimensionError(f"concat: incompatible shapes {shapes}") from e
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward_fn(grad):
        return tuple(np.split(grad, bounds, axis=axis))

    return record("concat", tuple(tensors), out, backward_fn)


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    try:
        out = np.stack([t.values for t in tensors], axis=axis)
    except ValueError as e:
        shapes = [t.shape for t in tensors]
        raise DimensionError(f"stack: incompatible shapes {shapes}") from e

    def backward_fn(grad):
        return tuple(np.moveaxis(grad, axis, 0))

    return record("stack", tuple(tensors), out, backward_fn)


def take(x: Tensor, index: int, axis: int = 0) -> Tensor:
    """Select one position along `axis`, dropping that axis"""
    extent = x.shape[axis]
    if not -extent <= index < extent:
        raise OutOfRangeError(f"take: index {index} outside axis of length {extent}")
    out = np.take(x.values, index, axis=axis)

    def backward_fn(grad):
        full = np.zeros_like(x.values)
        slicer = [slice(None)] * x.ndim
        slicer[axis] = index
        full[tuple(slicer)] = grad
        return (full,)

    return record("take", (x,), out, backward_fn)


def narrow(x: Tensor, start: int, stop: int, axis: int = -1) -> Tensor:
    """Contiguous slice [start, stop) along `axis`"""
    slicer = [slice(None)] * x.ndim
    slicer[axis] = slice(start, stop)
    slicer = tuple(slicer)
    out = x.values[slicer]

    def backward_fn(grad):
        full = np.zeros_like(x.values)
        full[slicer] = grad
        return (full,)

    return record("narrow", (x,), out, backward_fn)


def embedding_lookup(table: Tensor, ids) -> Tensor:
    """Gather rows of `table`; repeated ids accumulate gradient"""
    ids = np.asarray(ids, dtype=np.int64)
    if table.ndim != 2:
        raise DimensionError(f"embedding_lookup: table must be 2-D, got {table.shape}")
    vocab = table.shape[0]
    bad = ids[(ids < 0) | (ids >= vocab)]
    if bad.size:
        raise OutOfRangeError(f"embedding_lookup: id {int(bad[0])} outside table of {vocab} rows")
    out = table.values[ids]

    def backward_fn(grad):
        full = np.zeros_like(table.values)
        np.add.at(full, ids.reshape(-1), grad.reshape(-1, table.shape[1]))
        return (full,)

    return record("embedding_lookup", (table,), out, backward_fn)


def l1_loss(pred: Tensor, target: Tensor, mask: Tensor) -> Tensor:
    """sum(|pred - target| * mask) / max(1, sum(mask))"""
    if not (pred.shape == target.shape == mask.shape):
        raise DimensionError(
            f"l1_loss: pred {pred.shape}, target {target.shape} and mask {mask.shape} must match"
        )
    diff = pred.values - target.values
    denom = max(1.0, float(mask.values.sum()))
    out = np.asarray((np.abs(diff) * mask.values).sum() / denom, dtype=pred.dtype)

    def backward_fn(grad):
        g = grad * np.sign(diff) * mask.values / denom
        return g, -g, None

    return record("l1_loss", (pred, target, mask), out, backward_fn)
