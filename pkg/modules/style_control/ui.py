"""Style Explorer page"""
import io
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
import streamlit as st
from scipy.io import wavfile

from modules.dsp import DEFAULT_AUDIO, track_f0
from modules.dsp.audio_io import to_pcm16
from modules.model import StyleDirective, load_checkpoint

from .parsing import parse_floats, parse_symbols
from .plots import emit_mixing_overlay
from .synthesis import synthesize_with, token_bias

DIRECTIVES = ["none", "force", "bias", "interpolate"]


@st.cache_resource
def _load_model(path, mtime):
    return load_checkpoint(path)


def _directive(model, kind):
    """Sidebar-free directive controls; returns a StyleDirective or None on bad input"""
    k_count = model.config.n_tokens
    if kind == "force":
        return StyleDirective.force(st.number_input("Token", 0, k_count - 1, 0))
    if kind == "bias":
        k = st.number_input("Token", 0, k_count - 1, 0)
        scale = st.slider("Scale", -2.0, 2.0, 1.0, 0.1)
        return StyleDirective.bias(token_bias(model, [(int(k), scale)]))
    if kind == "interpolate":
        raw = st.text_input("Weights (one per token)", ",".join(["0"] * k_count))
        try:
            weights = parse_floats(raw)
        except ValueError as e:
            st.error(str(e))
            return None
        if len(weights) != k_count:
            st.error(f"Need {k_count} weights, got {len(weights)}")
            return None
        return StyleDirective.interpolate(weights)
    return StyleDirective.none()


def style_explorer_ui():
    """Pick a checkpoint, steer the style pathway, inspect the result"""
    st.title("Style Explorer")

    ckpt = st.text_input("Checkpoint", value=st.session_state.get("explorer_ckpt", ""))
    if not ckpt:
        st.info("Enter the path of a .stck checkpoint")
        return
    path = Path(ckpt)
    if not path.is_file():
        st.error(f"No checkpoint at {path}")
        return
    st.session_state.explorer_ckpt = ckpt
    try:
        model = _load_model(str(path), path.stat().st_mtime)
    except Exception as e:
        st.error(f"Error loading checkpoint: {e}")
        return

    col1, col2 = st.columns(2)
    with col1:
        text = st.text_input("Symbol ids", "0,1,2,3")
        max_steps = st.number_input("Max decoder steps", 1, 1000, 200)
    with col2:
        kind = st.selectbox("Directive", DIRECTIVES, index=1)
        directive = _directive(model, kind)

    if directive is None or not st.button("Synthesize"):
        return
    try:
        symbols = parse_symbols(text)
        with st.spinner("Synthesizing..."):
            out = synthesize_with(model, symbols, directive, int(max_steps), waveform=model.config.use_postnet)
    except Exception as e:
        st.error(f"Error synthesizing: {e}")
        return

    overlay = Path(tempfile.gettempdir()) / "style_explorer_overlay.svg"
    emit_mixing_overlay(out.mel, out.trace, overlay, model.config.r)
    st.subheader("Mel spectrogram with text weight")
    st.image(str(overlay), use_container_width=True)

    st.subheader("Style attention")
    st.dataframe(pd.DataFrame(out.trace.style, columns=[f"token {k}" for k in range(model.config.n_tokens)]))

    if out.waveform is not None:
        track = track_f0(out.waveform, DEFAULT_AUDIO)
        st.subheader("Smoothed F0")
        st.line_chart(pd.DataFrame({"f0_hz": np.where(track.voiced, track.hz, np.nan)}, index=track.seconds()))
        buffer = io.BytesIO()
        wavfile.write(buffer, out.waveform.sample_rate, to_pcm16(out.waveform.samples))
        st.audio(buffer.getvalue(), format="audio/wav")
