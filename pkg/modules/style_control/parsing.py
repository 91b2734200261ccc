"""Parsers for symbol lists, weight vectors and schedules given as text"""
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd


def parse_symbols(text: str) -> List[int]:
    """'3,1,4' → [3, 1, 4]"""
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise ValueError("expected comma-separated symbol ids")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"symbol ids must be integers, got {text!r}")


def parse_floats(text: str) -> List[float]:
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise ValueError("expected comma-separated numbers")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {text!r}")
    if not all(np.isfinite(values)):
        raise ValueError(f"values must be finite, got {text!r}")
    return values


def parse_ints(text: str) -> List[int]:
    return parse_symbols(text)


def read_texts(path) -> List[List[int]]:
    """One comma-separated symbol list per non-empty line"""
    with open(Path(path), encoding="utf-8") as fh:
        return [parse_symbols(line) for line in fh if line.strip()]


def read_schedule(path) -> np.ndarray:
    """CSV without header, one row of K weights per decoder step"""
    frame = pd.read_csv(Path(path), header=None)
    values = frame.to_numpy(dtype=np.float64)
    if values.ndim != 2 or values.size == 0 or not np.isfinite(values).all():
        raise ValueError(f"{path}: schedule must be a non-empty numeric table")
    return values
