"""Normalized-dB features the network reads and writes"""
import numpy as np

from .config import AudioConfig, DEFAULT_AUDIO


def amplitude_to_feature(magnitudes, audio: AudioConfig = DEFAULT_AUDIO) -> np.ndarray:
    """Magnitudes → [0, 1]; silence maps to 0"""
    db = 20.0 * np.log10(np.maximum(np.asarray(magnitudes, dtype=np.float64), 1e-5)) - audio.ref_db
    return np.clip((db - audio.min_db) / -audio.min_db, 0.0, 1.0)


def feature_to_amplitude(features, audio: AudioConfig = DEFAULT_AUDIO) -> np.ndarray:
    features = np.clip(np.asarray(features, dtype=np.float64), 0.0, 1.0)
    db = features * -audio.min_db + audio.min_db + audio.ref_db
    return np.power(10.0, db / 20.0)
