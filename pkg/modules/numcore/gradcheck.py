"""Central finite-difference gradient checks"""
from __future__ import annotations

from typing import Callable, List, Sequence

import numpy as np

from .tensor import Tape, Tensor, backward


def numeric_gradient(fn: Callable[[], Tensor], tensor: Tensor, h: float = 1e-5) -> np.ndarray:
    """d fn() / d tensor by central differences, perturbing `tensor.values` in place"""
    tensor.values = np.ascontiguousarray(tensor.values)
    grad = np.zeros_like(tensor.values, dtype=np.float64)
    flat = tensor.values.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        plus = float(fn().values)
        flat[i] = original - h
        minus = float(fn().values)
        flat[i] = original
        grad.reshape(-1)[i] = (plus - minus) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-12) -> float:
    """‖a − n‖ / max(‖a‖ + ‖n‖, floor); the floor bounds the ratio for near-zero gradients"""
    diff = np.linalg.norm(np.ravel(analytic) - np.ravel(numeric))
    scale = np.linalg.norm(np.ravel(analytic)) + np.linalg.norm(np.ravel(numeric))
    return float(diff / max(scale, floor))


def gradient_errors(
    fn: Callable[[], Tensor], tensors: Sequence[Tensor], h: float = 1e-5, floor: float = 1e-12
) -> List[float]:
    """Relative error between taped and finite-difference gradients of `fn`, one per tensor"""
    for tensor in tensors:
        tensor.requires_grad = True
        tensor.grad = None
    with Tape():
        loss = fn()
        backward(loss)
    analytic = [np.zeros_like(t.values) if t.grad is None else t.grad.copy() for t in tensors]
    return [relative_error(grad, numeric_gradient(fn, tensor, h), floor) for tensor, grad in zip(tensors, analytic)]


def check_gradients(fn: Callable[[], Tensor], tensors: Sequence[Tensor], h: float = 1e-5, floor: float = 1e-12) -> float:
    """Largest relative error between taped and finite-difference gradients of `fn`"""
    return max(gradient_errors(fn, tensors, h, floor), default=0.0)
