"""Network hyperparameters and inference-time style directives"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from modules.numcore import ContractError, DimensionError, OutOfRangeError

CONTROLLER_MODES = ("independent", "complementary")
DTYPES = ("float32", "float64")


@dataclass(frozen=True)
class ModelConfig:
    n_symbols: int = 16
    n_tokens: int = 10
    d_tok: int = 64
    d_txt: int = 64
    d_enc: int = 128  # both directions together
    d_att: int = 64
    d_dec: int = 128
    r: int = 2
    n_mels: int = 40
    n_linear_bins: int = 257
    use_postnet: bool = True
    d_post: int = 64
    prenet_1: int = 64
    prenet_2: int = 32
    controller_mode: str = "independent"
    silence_threshold: float = 0.05
    dtype: str = "float32"

    def __post_init__(self):
        sizes = {f.name: getattr(self, f.name) for f in fields(self) if f.type in ("int", int)}
        bad = [name for name, value in sizes.items() if value < 1]
        if bad:
            raise ContractError(f"model sizes must be positive: {', '.join(bad)}")
        if self.d_enc % 2 or self.d_post % 2:
            raise ContractError("d_enc and d_post are split across two directions and must be even")
        if self.controller_mode not in CONTROLLER_MODES:
            raise ContractError(f"controller_mode must be one of {CONTROLLER_MODES}, got {self.controller_mode!r}")
        if self.dtype not in DTYPES:
            raise ContractError(f"dtype must be one of {DTYPES}, got {self.dtype!r}")

    @property
    def np_dtype(self):
        return np.dtype(self.dtype)

    def check_audio(self, audio):
        if self.n_mels != audio.n_mels or self.n_linear_bins != audio.n_bins:
            raise ContractError(
                f"model expects {self.n_mels} mels / {self.n_linear_bins} bins, "
                f"audio config gives {audio.n_mels} / {audio.n_bins}"
            )

    def to_dict(self):
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data) -> "ModelConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ContractError(f"unknown model config keys: {', '.join(unknown)}")
        return cls(**data)


class StyleDirective:
    """How inference steers the style pathway.

    none         learned style attention
    force        one-hot attention at `index`
    bias         `vector` added to every token row before style encoding
    interpolate  attention replaced by `weights` (not renormalized)
    schedule     attention at decoder step t replaced by row min(t, S-1) of `weights`
    """

    KINDS = ("none", "force", "bias", "interpolate", "schedule")

    def __init__(self, kind: str = "none", index: Optional[int] = None, vector=None, weights=None):
        if kind not in self.KINDS:
            raise ContractError(f"unknown directive kind {kind!r}")
        self.kind = kind
        self.index = index
        self.vector = None if vector is None else np.asarray(vector, dtype=np.float64)
        self.weights = None if weights is None else np.asarray(weights, dtype=np.float64)

    @classmethod
    def none(cls):
        return cls("none")

    @classmethod
    def force(cls, k: int):
        return cls("force", index=int(k))

    @classmethod
    def bias(cls, vector):
        return cls("bias", vector=vector)

    @classmethod
    def interpolate(cls, weights):
        return cls("interpolate", weights=weights)

    @classmethod
    def schedule(cls, weights):
        return cls("schedule", weights=weights)

    def validate(self, n_tokens: int, d_tok: int) -> "StyleDirective":
        if self.kind == "force" and not 0 <= self.index < n_tokens:
            raise OutOfRangeError(f"force index {self.index} outside {n_tokens} tokens")
        if self.kind == "bias" and self.vector.shape != (d_tok,):
            raise DimensionError(f"bias vector has shape {self.vector.shape}, expected ({d_tok},)")
        if self.kind == "interpolate" and self.weights.shape != (n_tokens,):
            raise DimensionError(f"interpolation weights have shape {self.weights.shape}, expected ({n_tokens},)")
        if self.kind == "schedule" and (self.weights.ndim != 2 or self.weights.shape[1] != n_tokens or len(self.weights) == 0):
            raise DimensionError(f"schedule has shape {self.weights.shape}, expected (S, {n_tokens}) with S ≥ 1")
        for array in (self.vector, self.weights):
            if array is not None and not np.isfinite(array).all():
                raise ContractError(f"{self.kind} directive values must be finite")
        return self

    def style_weights(self, step: int, n_tokens: int) -> Optional[np.ndarray]:
        """Attention row that replaces the learned one at `step`, or None"""
        if self.kind == "force":
            row = np.zeros(n_tokens)
            row[self.index] = 1.0
            return row
        if self.kind == "interpolate":
            return self.weights
        if self.kind == "schedule":
            return self.weights[min(step, len(self.weights) - 1)]
        return None

    def to_dict(self):
        out = {"kind": self.kind}
        if self.index is not None:
            out["index"] = self.index
        if self.vector is not None:
            out["vector"] = self.vector.tolist()
        if self.weights is not None:
            out["weights"] = self.weights.tolist()
        return out

    def __repr__(self):
        return f"StyleDirective({self.to_dict()})"
