"""Token F0 profiles and purity of style attention against ground-truth styles"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import kendalltau
from tqdm import tqdm

from modules.corpus import DatasetManifest, load_manifest
from modules.dsp import DEFAULT_AUDIO, AudioConfig, F0Track, amplitude_to_feature, read_spectrogram, track_f0
from modules.model import StyleDirective

from .synthesis import DEFAULT_MAX_STEPS, ModelSource, resolve_model, synthesize_with, token_bias

logger = logging.getLogger(__name__)

PROFILE_MODES = ("force", "bias")


@dataclass
class TokenProfile:
    token: int
    mode: str
    means: List[float]  # per text, nan when unvoiced
    slopes: List[float]
    stds: List[float]
    voiced: List[bool]
    tracks: List[F0Track] = field(default_factory=list, repr=False)
    scale: float = 1.0

    @property
    def n_texts(self) -> int:
        return len(self.means)

    @property
    def n_voiced(self) -> int:
        return int(sum(self.voiced))

    def _agg(self, values) -> np.ndarray:
        return np.asarray([v for v, ok in zip(values, self.voiced) if ok])

    @property
    def mean(self) -> float:
        values = self._agg(self.means)
        return float(values.mean()) if values.size else float("nan")

    @property
    def std(self) -> float:
        """Spread of per-text mean F0"""
        values = self._agg(self.means)
        return float(values.std()) if values.size else float("nan")

    @property
    def mean_track_std(self) -> float:
        """Average within-utterance smoothed-F0 standard deviation"""
        values = self._agg(self.stds)
        return float(values.mean()) if values.size else float("nan")

    @property
    def mean_slope(self) -> float:
        values = self._agg(self.slopes)
        return float(values.mean()) if values.size else float("nan")

    def rows(self):
        for i in range(self.n_texts):
            yield {
                "token": self.token,
                "mode": self.mode,
                "scale": self.scale,
                "text": i,
                "voiced": self.voiced[i],
                "mean_f0": self.means[i],
                "slope": self.slopes[i],
                "std_f0": self.stds[i],
            }


def token_f0_profile(
    source: ModelSource,
    texts: Sequence[Sequence[int]],
    tokens: Sequence[int],
    mode: str = "force",
    scale: float = 1.0,
    audio: AudioConfig = DEFAULT_AUDIO,
    max_steps: int = DEFAULT_MAX_STEPS,
    progress: bool = False,
) -> List[TokenProfile]:
    """For every (token, text): synthesize, vocode, track and smooth F0, summarize voiced frames"""
    if not texts:
        raise ValueError("token_f0_profile needs at least one text")
    if mode not in PROFILE_MODES:
        raise ValueError(f"profile mode must be one of {PROFILE_MODES}, got {mode!r}")
    model = resolve_model(source)
    profiles = []
    for k in tqdm(tokens, desc="profile", disable=not progress):
        if mode == "force":
            directive = StyleDirective.force(k)
        else:
            directive = StyleDirective.bias(token_bias(model, [(k, scale)]))
        profile = TokenProfile(int(k), mode, [], [], [], [], scale=scale)
        for text in texts:
            out = synthesize_with(model, text, directive, max_steps=max_steps, audio=audio)
            track = track_f0(out.waveform, audio)
            voiced = bool(track.voiced.any())
            if not voiced:
                logger.warning("token %d: synthesis of %s is entirely unvoiced", k, list(text))
            profile.means.append(track.mean() if voiced else float("nan"))
            profile.slopes.append(track.slope() if voiced else float("nan"))
            profile.stds.append(track.std() if voiced else float("nan"))
            profile.voiced.append(voiced)
            profile.tracks.append(track)
        profiles.append(profile)
    return profiles


def ranking_agreement(first: Sequence[TokenProfile], second: Sequence[TokenProfile]) -> float:
    """Kendall tau between per-token mean-F0 rankings of two profile sets"""
    a = {p.token: p.mean for p in first}
    b = {p.token: p.mean for p in second}
    shared = [k for k in sorted(a) if k in b and np.isfinite(a[k]) and np.isfinite(b[k])]
    if len(shared) < 2:
        return float("nan")
    tau, _ = kendalltau([a[k] for k in shared], [b[k] for k in shared])
    return float(tau)


@dataclass
class PurityReport:
    table: np.ndarray  # tokens × styles counts of dominant token
    style_ids: List[int]
    purity: float
    style_consistency: float
    dominant: Dict[int, int]  # style id → its most frequent dominant token

    def token_for_style(self, style_id: int) -> int:
        return self.dominant[style_id]

    def to_dict(self):
        return {
            "purity": self.purity,
            "style_consistency": self.style_consistency,
            "style_ids": self.style_ids,
            "table": self.table.tolist(),
            "dominant": {str(k): v for k, v in self.dominant.items()},
        }


def purity_from_assignments(dominant_tokens: Sequence[int], style_ids: Sequence[int], n_tokens: int) -> PurityReport:
    """Cluster purity: Σ over tokens of the largest style count, over the total"""
    if len(dominant_tokens) != len(style_ids):
        raise ValueError("one dominant token per utterance is required")
    styles = sorted(set(int(s) for s in style_ids))
    column = {s: j for j, s in enumerate(styles)}
    table = np.zeros((n_tokens, len(styles)), dtype=np.int64)
    for k, s in zip(dominant_tokens, style_ids):
        table[int(k), column[int(s)]] += 1
    total = table.sum()
    if total == 0:
        return PurityReport(table, styles, 0.0, 0.0, {})
    purity = float(table.max(axis=1).sum() / total)
    consistency = float(table.max(axis=0).sum() / total)
    dominant = {s: int(table[:, column[s]].argmax()) for s in styles}
    return PurityReport(table, styles, purity, consistency, dominant)


def dominant_token(trace) -> int:
    """argmax of the time-averaged style attention"""
    return int(np.asarray(trace.style).mean(axis=0).argmax())


def token_purity(
    source: ModelSource,
    manifest,
    audio: AudioConfig = DEFAULT_AUDIO,
    limit: Optional[int] = None,
    progress: bool = False,
) -> PurityReport:
    """Teacher-forced pass per utterance; ground-truth styles read from the manifest"""
    model = resolve_model(source)
    if not isinstance(manifest, DatasetManifest):
        manifest = load_manifest(manifest)
    records = manifest.records[:limit] if limit else manifest.records
    tokens, styles = [], []
    for record in tqdm(records, desc="purity", disable=not progress):
        mel = amplitude_to_feature(read_spectrogram(manifest.root / record.mel), audio)
        result = model.forward_teacher_forced(record.symbols, mel)
        tokens.append(dominant_token(result.trace))
        styles.append(record.style_id)
    report = purity_from_assignments(tokens, styles, model.config.n_tokens)
    logger.info("purity %.3f over %d utterances", report.purity, len(records))
    return report
