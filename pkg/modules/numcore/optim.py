"""Parameter storage, Adam and gradient clipping"""
from __future__ import annotations

from typing import Dict, Optional

import numpy as np

from .errors import ContractError, DimensionError
from .tensor import Tensor


class ParamStore:
    """Named parameters with Adam moments and a step counter"""

    def __init__(self, params: Optional[Dict[str, Tensor]] = None):
        self.params: Dict[str, Tensor] = {}
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}
        self.t = 0
        for name, tensor in (params or {}).items():
            self.add(name, tensor)

    def add(self, name: str, tensor: Tensor) -> Tensor:
        if name in self.params:
            raise ContractError(f"parameter {name!r} registered twice")
        tensor.requires_grad = True
        tensor.name = name
        self.params[name] = tensor
        self.m[name] = np.zeros_like(tensor.values)
        self.v[name] = np.zeros_like(tensor.values)
        return tensor

    def __getitem__(self, name: str) -> Tensor:
        return self.params[name]

    def __contains__(self, name: str) -> bool:
        return name in self.params

    def __iter__(self):
        return iter(self.params)

    def __len__(self):
        return len(self.params)

    def names(self):
        return list(self.params)

    def items(self):
        return self.params.items()

    def zero_grad(self):
        for tensor in self.params.values():
            tensor.grad = None

    def grads(self) -> Dict[str, np.ndarray]:
        """Current gradients, zeros for parameters the last backward did not reach"""
        return {
            name: (t.grad if t.grad is not None else np.zeros_like(t.values))
            for name, t in self.params.items()
        }

    def size(self) -> int:
        return int(sum(t.values.size for t in self.params.values()))

    def optimizer_state(self) -> Dict[str, np.ndarray]:
        state = {"t": np.asarray(self.t, dtype=np.int64)}
        for name in self.params:
            state[f"m/{name}"] = self.m[name]
            state[f"v/{name}"] = self.v[name]
        return state

    def load_optimizer_state(self, state):
        for name, tensor in self.params.items():
            for prefix, target in (("m", self.m), ("v", self.v)):
                key = f"{prefix}/{name}"
                if key not in state:
                    raise ContractError(f"optimizer state missing {key!r}")
                moment = np.asarray(state[key], dtype=tensor.dtype)
                if moment.shape != tensor.shape:
                    raise DimensionError(f"optimizer moment {key!r} has shape {moment.shape}, expected {tensor.shape}")
                target[name] = moment.copy()
        self.t = int(state["t"])


def global_norm(grads: Dict[str, np.ndarray]) -> float:
    """L2 norm of all gradients concatenated, accumulated in float64"""
    total = 0.0
    for name in sorted(grads):
        g = np.asarray(grads[name], dtype=np.float64)
        total += float(np.dot(g.ravel(), g.ravel()))
    return float(np.sqrt(total))


def clip_by_global_norm(grads: Dict[str, np.ndarray], max_norm: float):
    """Scale gradients so their global norm is at most `max_norm`; returns (grads, pre-clip norm)"""
    norm = global_norm(grads)
    if max_norm is None or max_norm <= 0 or norm <= max_norm:
        return grads, norm
    factor = max_norm / (norm + 1e-12)
    return {name: (g * factor).astype(g.dtype) for name, g in grads.items()}, norm


def adam_update(
    store: ParamStore,
    grads: Dict[str, np.ndarray],
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> ParamStore:
    """One bias-corrected Adam step over every parameter in `store`"""
    for name, tensor in store.params.items():
        g = grads.get(name)
        if g is not None and np.shape(g) != tensor.shape:
            raise DimensionError(f"adam_update: gradient for {name!r} has shape {np.shape(g)}, expected {tensor.shape}")

    store.t += 1
    t = store.t
    correction1 = 1.0 - beta1 ** t
    correction2 = 1.0 - beta2 ** t
    for name, tensor in store.params.items():
        dtype = tensor.dtype
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(tensor.values)
        g = np.asarray(g, dtype=dtype)
        store.m[name] = (beta1 * store.m[name] + (1.0 - beta1) * g).astype(dtype)
        store.v[name] = (beta2 * store.v[name] + (1.0 - beta2) * g * g).astype(dtype)
        m_hat = store.m[name] / correction1
        v_hat = store.v[name] / correction2
        tensor.values = (tensor.values - lr * m_hat / (np.sqrt(v_hat) + eps)).astype(dtype)
    return store
