"""Synthetic expressive corpus with known latent styles"""
from .builder import (
    DatasetManifest,
    ManifestRecord,
    TrainingRecord,
    build_corpus,
    draw_styles,
    load_manifest,
    load_training_view,
)
from .errors import CorpusError, CorpusIOError, GenerationError
from .generator import Utterance, render_utterance, sample_text, symbol_durations
from .styles import (
    ALPHABET_SIZE,
    DEFAULT_STYLES,
    HIGH,
    NEUTRAL,
    RISING,
    ROBOTIC,
    SYMBOLS,
    StyleClass,
    SymbolSpec,
    style_distribution,
    symbol_inventory,
)
