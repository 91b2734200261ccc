import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from modules.corpus import build_corpus  # noqa: E402
from modules.model import ModelConfig, StyleTokenModel  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config():
    """Every width 8, float64: the gradient-check model"""
    return ModelConfig(
        n_symbols=16,
        n_tokens=3,
        d_tok=8,
        d_txt=8,
        d_enc=8,
        d_att=8,
        d_dec=8,
        r=2,
        n_mels=8,
        n_linear_bins=9,
        d_post=8,
        prenet_1=8,
        prenet_2=8,
        dtype="float64",
    )


@pytest.fixture
def tiny_model(tiny_config):
    return StyleTokenModel.initialize(tiny_config, seed=11)


@pytest.fixture
def small_config():
    """Audio-sized outputs with small hidden widths, for corpus-driven tests"""
    return ModelConfig(
        n_tokens=4, d_tok=8, d_txt=8, d_enc=16, d_att=8, d_dec=16, d_post=16, prenet_1=16, prenet_2=8
    )


@pytest.fixture
def small_model(small_config):
    return StyleTokenModel.initialize(small_config, seed=5)


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    build_corpus(6, seed=3, out_dir=root, progress=False)
    return root


@pytest.fixture(autouse=True)
def isolated_registry(tmp_path, monkeypatch):
    monkeypatch.setenv("STYLE_TOKENS_DB", str(tmp_path / "runs.db"))
    monkeypatch.delenv("STYLE_TOKENS_SEED", raising=False)
