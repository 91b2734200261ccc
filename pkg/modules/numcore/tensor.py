"""Dense tensors and the reverse-mode tape"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ContractError

# Tapes entered with `with Tape():`, per thread; ops record onto the innermost one
_LOCAL = threading.local()


def _active_tapes() -> list:
    if not hasattr(_LOCAL, "tapes"):
        _LOCAL.tapes = []
    return _LOCAL.tapes


class Tensor:
    """Row-major numeric array with an optional gradient"""

    __slots__ = ("values", "requires_grad", "grad", "name", "_node", "_tape")

    def __init__(self, values, requires_grad: bool = False, name: Optional[str] = None, dtype=None):
        array = np.asarray(values, dtype=dtype)
        if not np.issubdtype(array.dtype, np.floating):
            array = array.astype(np.float64)
        self.values = array
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._node: Optional[_Node] = None
        self._tape: Optional[Tape] = None

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @property
    def dtype(self):
        return self.values.dtype

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def is_taped(self) -> bool:
        return self._node is not None

    def item(self) -> float:
        return float(self.values)

    def numpy(self) -> np.ndarray:
        return self.values

    def zero_grad(self):
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.values)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<Tensor{label} shape={self.shape} dtype={self.dtype} requires_grad={self.requires_grad}>"


@dataclass
class _Node:
    op: str
    inputs: Sequence[Tensor]
    output: Tensor
    backward_fn: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]
    index: int


class Tape:
    """Ordered record of differentiable operations"""

    def __init__(self):
        self.nodes: list[_Node] = []
        self.consumed = False

    def __enter__(self) -> "Tape":
        _active_tapes().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _active_tapes().remove(self)
        return False

    def __len__(self):
        return len(self.nodes)

    def record(self, op: str, inputs: Sequence[Tensor], output: Tensor, backward_fn) -> Tensor:
        if self.consumed:
            raise ContractError("tape already replayed; call reset() before recording again")
        node = _Node(op, tuple(inputs), output, backward_fn, len(self.nodes))
        self.nodes.append(node)
        output._node = node
        output._tape = self
        return output

    def reset(self):
        """Drop recorded operations so the tape can be reused"""
        for node in self.nodes:
            node.output._node = None
            node.output._tape = None
        self.nodes = []
        self.consumed = False

    def backward(self, loss: Tensor) -> int:
        """Replay the tape in reverse from `loss`; returns the number of nodes visited"""
        if loss.values.size != 1:
            raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
        if loss._node is None or loss._tape is not self:
            raise ContractError("loss was not produced through taped operations")
        if self.consumed:
            raise ContractError("backward already ran on this tape; reset gradients and re-tape")

        grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.values)}
        visited = 0
        for node in reversed(self.nodes[: loss._node.index + 1]):
            grad_out = grads.pop(id(node.output), None)
            if grad_out is None:
                continue
            visited += 1
            node.output.grad = grad_out
            input_grads = node.backward_fn(grad_out)
            for tensor, grad in zip(node.inputs, input_grads):
                if grad is None or not tensor.requires_grad:
                    continue
                if tensor._node is not None and tensor._tape is self:
                    key = id(tensor)
                    grads[key] = grads[key] + grad if key in grads else grad
                else:
                    # leaf: parameters and inputs accumulate until zero_grad()
                    tensor.grad = grad if tensor.grad is None else tensor.grad + grad
        self.consumed = True
        return visited


def active_tape() -> Optional[Tape]:
    tapes = _active_tapes()
    return tapes[-1] if tapes else None


def record(op: str, inputs: Sequence[Tensor], values: np.ndarray, backward_fn) -> Tensor:
    """Wrap `values` as the output of `op`, taping it when any input needs a gradient"""
    requires_grad = any(t.requires_grad for t in inputs)
    out = Tensor(values, requires_grad=requires_grad)
    tape = active_tape()
    if requires_grad and tape is not None:
        tape.record(op, inputs, out, backward_fn)
    return out


def backward(loss: Tensor) -> int:
    """Populate gradients of every requires_grad tensor reachable from `loss`"""
    if loss.values.size != 1:
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
    if loss._tape is None:
        raise ContractError("loss was not produced through taped operations")
    return loss._tape.backward(loss)


def constant(values, like: Optional[Tensor] = None, dtype=None) -> Tensor:
    """Non-differentiable tensor, cast to the dtype of `like` when given"""
    if like is not None:
        dtype = like.dtype
    return Tensor(np.asarray(values, dtype=dtype))


def zero_grad(tensors):
    for tensor in tensors:
        tensor.zero_grad()
