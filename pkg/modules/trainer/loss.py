"""Masked L1 reconstruction loss"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from modules.numcore import Tensor, constant, ops

LOSS_COLUMNS = ["step", "mel_l1", "lin_l1", "total", "grad_norm", "seconds"]


@dataclass
class LossReport:
    step: int
    mel_l1: float
    lin_l1: float
    total: float
    grad_norm: float = 0.0
    seconds: float = 0.0

    def to_row(self):
        return asdict(self)


def _expanded_mask(frame_mask: np.ndarray, like: Tensor) -> Tensor:
    mask = np.asarray(frame_mask, dtype=like.dtype)[..., None]
    return constant(np.broadcast_to(mask, like.shape).copy(), like=like)


def reconstruction_loss(
    pred_mel: Tensor,
    pred_linear: Optional[Tensor],
    target_mel: np.ndarray,
    target_linear: Optional[np.ndarray],
    frame_mask: np.ndarray,
    w_mel: float = 1.0,
    w_lin: float = 1.0,
    step: int = 0,
) -> Tuple[Tensor, LossReport]:
    """total = w_mel·L1(mel) + w_lin·L1(linear), padded frames excluded"""
    mel = ops.l1_loss(pred_mel, constant(target_mel, like=pred_mel), _expanded_mask(frame_mask, pred_mel))
    total = ops.scale(mel, w_mel)
    lin_value = 0.0
    if pred_linear is not None and target_linear is not None:
        lin = ops.l1_loss(pred_linear, constant(target_linear, like=pred_linear), _expanded_mask(frame_mask, pred_linear))
        lin_value = float(lin.values)
        total = ops.add(total, ops.scale(lin, w_lin))
    report = LossReport(step=step, mel_l1=float(mel.values), lin_l1=lin_value, total=float(total.values))
    return total, report
