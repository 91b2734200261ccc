"""Latent style classes and the synthetic symbol inventory"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from modules.numcore import Rng

from .errors import GenerationError

ALPHABET_SIZE = 16
BASE_F0 = 200.0
F0_FLOOR = 80.0
F0_CEILING = 380.0
INVENTORY_SEED = 20170322


@dataclass(frozen=True)
class StyleClass:
    id: int
    label: str
    f0_scale: float = 1.0
    f0_slope: float = 0.0
    f0_flatten: bool = False
    duration_scale: float = 1.0
    weight: float = 0.0

    def __post_init__(self):
        if self.f0_scale <= 0 or self.duration_scale <= 0:
            raise GenerationError(f"style {self.label!r}: scales must be positive")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SymbolSpec:
    symbol_id: int
    base_frames: int
    formants: Tuple[Tuple[float, float], Tuple[float, float]]  # (center Hz, bandwidth Hz)
    contour_hz: float  # amplitude of one sine cycle over the symbol

    def contour(self, u: np.ndarray) -> np.ndarray:
        """F0 offset at normalized position u in [0, 1) of the symbol"""
        return self.contour_hz * np.sin(2.0 * np.pi * u)


NEUTRAL = StyleClass(0, "neutral", weight=0.70)
HIGH = StyleClass(1, "high", f0_scale=1.4, weight=0.10)
ROBOTIC = StyleClass(2, "robotic", f0_scale=0.85, f0_flatten=True, weight=0.10)
RISING = StyleClass(3, "rising", f0_slope=60.0, weight=0.10)

DEFAULT_STYLES: Tuple[StyleClass, ...] = (NEUTRAL, HIGH, ROBOTIC, RISING)


def style_distribution(styles: Sequence[StyleClass] = DEFAULT_STYLES) -> Dict[str, float]:
    total = sum(s.weight for s in styles)
    if total <= 0:
        raise GenerationError("style weights must sum to a positive value")
    return {s.label: s.weight / total for s in styles}


def symbol_inventory(
    seed: int = INVENTORY_SEED,
    size: int = ALPHABET_SIZE,
    fmin: float = 50.0,
    fmax: float = 4000.0,
) -> Tuple[SymbolSpec, ...]:
    """Fixed per-symbol durations, formants and contours drawn from `seed`"""
    rng = Rng(seed).child("inventory")
    specs = []
    for symbol_id in range(size):
        f1 = float(rng.uniform(max(fmin, 300.0), 900.0))
        f2 = float(rng.uniform(1000.0, min(fmax, 2600.0)))
        bw1 = float(rng.uniform(80.0, 160.0))
        bw2 = float(rng.uniform(120.0, 240.0))
        specs.append(
            SymbolSpec(
                symbol_id=symbol_id,
                base_frames=int(rng.integers(6, 15)),
                formants=((f1, bw1), (f2, bw2)),
                contour_hz=float(rng.uniform(-15.0, 15.0)),
            )
        )
    return tuple(specs)


SYMBOLS = symbol_inventory()
