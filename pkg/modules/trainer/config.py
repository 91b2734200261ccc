"""Training configuration read from JSON"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict

from modules.model import ModelConfig
from modules.numcore import ContractError

from .errors import ConfigError

LR_SCHEDULES = ("constant",)


@dataclass
class TrainConfig:
    corpus: str = "data/corpus"
    out_dir: str = "runs/default"
    steps: int = 2000
    batch_size: int = 8
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: float = 5.0
    lr_schedule: str = "constant"
    w_mel: float = 1.0
    w_lin: float = 1.0
    seed: int = 7
    checkpoint_interval: int = 500
    model: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("steps", "batch_size", "checkpoint_interval"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.learning_rate <= 0 or self.eps <= 0:
            raise ConfigError("learning_rate and eps must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError("Adam betas must lie in [0, 1)")
        if self.w_mel <= 0 or self.w_lin < 0:
            raise ConfigError(f"need w_mel > 0 and w_lin ≥ 0, got {self.w_mel} and {self.w_lin}")
        if self.lr_schedule not in LR_SCHEDULES:
            raise ConfigError(f"lr_schedule must be one of {LR_SCHEDULES}, got {self.lr_schedule!r}")
        model = self.model_config()
        if not model.use_postnet and self.w_lin != 0:
            raise ConfigError("w_lin must be 0 when the post-net is disabled")

    def model_config(self) -> ModelConfig:
        try:
            return ModelConfig.from_dict(self.model)
        except (ContractError, TypeError) as e:
            raise ConfigError(f"bad model section: {e}") from e

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        if not isinstance(data, dict):
            raise ConfigError("training config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown training config keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "TrainConfig":
        path = Path(path)
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON: {e}") from e
        return cls.from_dict(data)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
