"""Normalized-autocorrelation F0 tracking and trajectory smoothing"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.ndimage import median_filter, uniform_filter1d

from .errors import SignalContractError
from .signals import Waveform

# a later lag must reach this share of the best peak to lose to an earlier one
_OCTAVE_RATIO = 0.9


@dataclass
class F0Track:
    """Per-frame F0 in Hz; 0.0 marks an unvoiced frame"""

    hz: np.ndarray
    hop: int
    sample_rate: int

    def __post_init__(self):
        self.hz = np.asarray(self.hz, dtype=np.float64)

    def __len__(self):
        return self.hz.shape[0]

    @property
    def voiced(self) -> np.ndarray:
        return self.hz > 0.0

    def seconds(self) -> np.ndarray:
        return np.arange(len(self)) * self.hop / self.sample_rate

    def voiced_values(self) -> np.ndarray:
        return self.hz[self.voiced]

    def mean(self) -> float:
        values = self.voiced_values()
        return float(values.mean()) if values.size else 0.0

    def std(self) -> float:
        values = self.voiced_values()
        return float(values.std()) if values.size else 0.0

    def slope(self) -> float:
        """Least-squares slope over voiced frames, Hz per second"""
        mask = self.voiced
        if mask.sum() < 2:
            return 0.0
        return float(np.polyfit(self.seconds()[mask], self.hz[mask], 1)[0])


def voiced_runs(hz: np.ndarray) -> List[Tuple[int, int]]:
    """[start, stop) index pairs of consecutive voiced frames"""
    voiced = np.concatenate([[False], np.asarray(hz) > 0.0, [False]])
    edges = np.flatnonzero(np.diff(voiced.astype(np.int8)))
    return list(zip(edges[::2].tolist(), edges[1::2].tolist()))


def _frame_nccf(frame: np.ndarray, lags: np.ndarray) -> np.ndarray:
    n = frame.shape[0]
    energy = np.cumsum(frame * frame)
    total = energy[-1]
    corr = np.correlate(frame, frame, mode="full")[n - 1:]
    head = energy[n - lags - 1]
    tail = total - energy[lags - 1]
    den = np.sqrt(head * tail)
    out = np.zeros(lags.shape[0])
    ok = den > 1e-12
    out[ok] = corr[lags[ok]] / den[ok]
    return out


def _pick_period(nccf: np.ndarray, lags: np.ndarray, lo: float, hi: float, threshold: float):
    """Earliest strong local maximum in [lo, hi], refined by a parabola through its neighbours"""
    inner = np.arange(1, nccf.shape[0] - 1)
    is_peak = (nccf[inner] >= nccf[inner - 1]) & (nccf[inner] > nccf[inner + 1])
    in_band = (lags[inner] >= np.floor(lo)) & (lags[inner] <= np.ceil(hi))
    candidates = inner[is_peak & in_band]
    if candidates.size == 0:
        return None
    best = nccf[candidates].max()
    if best < threshold:
        return None
    chosen = candidates[nccf[candidates] >= _OCTAVE_RATIO * best][0]
    a, b, c = nccf[chosen - 1], nccf[chosen], nccf[chosen + 1]
    curvature = a - 2.0 * b + c
    shift = 0.5 * (a - c) / curvature if curvature < 0 else 0.0
    return lags[chosen] + float(np.clip(shift, -0.5, 0.5))


def estimate_f0(
    w: Waveform,
    frame_len: int = 384,
    hop: int = 128,
    fmin_f0: float = 60.0,
    fmax_f0: float = 400.0,
    voicing_threshold: float = 0.3,
) -> F0Track:
    """Frame-wise F0 from the normalized autocorrelation peak.

    Frames are centered like the STFT (reflect padding of frame_len/2), so
    a signal of n samples yields 1 + n // hop frames.
    """
    sr = w.sample_rate
    if not 0 < fmin_f0 < fmax_f0:
        raise SignalContractError(f"F0 band [{fmin_f0}, {fmax_f0}] Hz is empty")
    if fmin_f0 < sr / frame_len:
        raise SignalContractError(
            f"fmin_f0={fmin_f0} Hz needs a frame of at least {sr / fmin_f0:.0f} samples, got {frame_len}"
        )
    if fmax_f0 > sr / 2:
        raise SignalContractError(f"fmax_f0={fmax_f0} Hz is above Nyquist for {sr} Hz audio")
    if len(w) <= frame_len // 2:
        raise SignalContractError(f"signal of {len(w)} samples is too short for frame_len={frame_len}")

    lo, hi = sr / fmax_f0, sr / fmin_f0
    lags = np.arange(max(1, int(np.floor(lo)) - 1), min(frame_len - 2, int(np.ceil(hi)) + 1) + 1)
    n_frames = 1 + len(w) // hop
    padded = np.pad(w.samples, frame_len // 2, mode="reflect")
    frames = sliding_window_view(padded, frame_len)[::hop][:n_frames]

    hz = np.zeros(n_frames)
    for i, frame in enumerate(frames):
        frame = frame - frame.mean()
        if float(np.dot(frame, frame)) < 1e-10:
            continue
        period = _pick_period(_frame_nccf(frame, lags), lags, lo, hi, voicing_threshold)
        if period is not None:
            hz[i] = float(np.clip(sr / period, fmin_f0, fmax_f0))
    return F0Track(hz, hop, sr)


def smooth_f0(track: F0Track, median_width: int = 5, mean_width: int = 9) -> F0Track:
    """Median then moving-average filter applied inside each voiced run"""
    for width in (median_width, mean_width):
        if width < 1 or width % 2 == 0:
            raise SignalContractError(f"smoothing widths must be odd and positive, got {width}")
    out = track.hz.copy()
    for start, stop in voiced_runs(track.hz):
        segment = median_filter(track.hz[start:stop], size=median_width, mode="nearest")
        out[start:stop] = uniform_filter1d(segment, size=mean_width, mode="nearest")
    return F0Track(out, track.hop, track.sample_rate)


def total_variation(hz: np.ndarray) -> float:
    return float(np.abs(np.diff(np.asarray(hz, dtype=np.float64))).sum())
