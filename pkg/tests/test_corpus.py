import filecmp

import numpy as np
import pytest

from modules.corpus import (
    DEFAULT_STYLES,
    HIGH,
    NEUTRAL,
    RISING,
    ROBOTIC,
    SYMBOLS,
    CorpusIOError,
    GenerationError,
    StyleClass,
    build_corpus,
    draw_styles,
    load_manifest,
    load_training_view,
    render_utterance,
    sample_text,
    style_distribution,
    symbol_durations,
)
from modules.dsp import DEFAULT_AUDIO, estimate_f0, read_spectrogram_header, track_f0
from modules.numcore import ContractError, Rng

TEXT = [3, 7, 1, 12, 5, 9, 0, 14]


def render(style, text=TEXT, seed=0):
    return render_utterance(text, style, Rng(seed).child("render"))


def test_sample_text_bounds_and_determinism():
    assert len(sample_text(Rng(1), 1, 1)) == 1
    assert sample_text(Rng(5), 3, 8) == sample_text(Rng(5), 3, 8)
    for i in range(50):
        assert 2 <= len(sample_text(Rng(i), 2, 4)) <= 4
    for bad in [(0, 3), (5, 4), (1, 31)]:
        with pytest.raises(ContractError):
            sample_text(Rng(0), *bad)


def test_sample_text_is_uniform_over_alphabet():
    draws = []
    for i in range(400):
        draws.extend(sample_text(Rng(i), 25, 25))
    counts = np.bincount(draws, minlength=16)
    expected = len(draws) / 16
    assert len(draws) == 10000
    assert (np.abs(counts - expected) <= 0.2 * expected).all()


def test_styles_and_inventory_are_well_formed():
    assert sum(style_distribution().values()) == pytest.approx(1.0)
    assert [s.id for s in DEFAULT_STYLES] == [0, 1, 2, 3]
    for spec in SYMBOLS:
        assert 6 <= spec.base_frames <= 14
        for center, width in spec.formants:
            assert DEFAULT_AUDIO.fmin < center < DEFAULT_AUDIO.fmax
            assert width > 0
    with pytest.raises(GenerationError):
        StyleClass(9, "bad", f0_scale=0.0)


def test_render_frame_counts_agree():
    utt = render(NEUTRAL)
    assert utt.linear.n_frames == utt.mel.n_frames == len(utt.ref_f0)
    assert utt.linear.magnitudes.shape[1] == DEFAULT_AUDIO.n_bins
    assert utt.mel.n_mels == DEFAULT_AUDIO.n_mels
    assert np.abs(utt.waveform.samples).max() == pytest.approx(0.5)


def test_render_errors():
    with pytest.raises(ContractError):
        render(NEUTRAL, text=[])
    with pytest.raises(GenerationError):
        render(NEUTRAL, text=[16])
    with pytest.raises(GenerationError):
        render(StyleClass(9, "shrill", f0_scale=2.5))


def test_neutral_f0_is_centered_on_base():
    track = estimate_f0(render(NEUTRAL).waveform)
    assert abs(track.mean() - 200.0) <= 5.0


def test_estimator_agrees_with_analytic_reference():
    for style in DEFAULT_STYLES:
        utt = render(style)
        est = estimate_f0(utt.waveform).hz
        ref = utt.ref_f0.hz
        both = (est > 0) & (ref > 0)
        assert both.sum() >= 0.8 * (ref > 0).sum()
        assert np.mean(np.abs(est[both] - ref[both])) <= 5.0


def test_duration_scale_stretches_symbols():
    slow = StyleClass(9, "slow", duration_scale=1.3)
    neutral = sum(symbol_durations(TEXT, NEUTRAL))
    stretched = render(slow)
    assert sum(stretched.durations) == sum(symbol_durations(TEXT, slow))
    assert abs(sum(stretched.durations) - 1.3 * neutral) <= len(TEXT)
    assert stretched.n_frames - render(NEUTRAL).n_frames == sum(stretched.durations) - neutral


def test_robotic_style_is_flat():
    neutral_std, robotic_std = [], []
    for i in range(20):
        text = sample_text(Rng(100 + i), 5, 8)
        neutral_std.append(track_f0(render(NEUTRAL, text, i).waveform).std())
        robotic_std.append(track_f0(render(ROBOTIC, text, i).waveform).std())
    assert np.mean(robotic_std) <= 0.25 * np.mean(neutral_std)


def test_styles_are_separable_by_construction():
    means = {s.label: render(s).ref_f0.mean() for s in DEFAULT_STYLES}
    assert means["high"] > means["neutral"] > means["robotic"]
    assert render(RISING).ref_f0.slope() >= 40.0
    assert abs(render(HIGH).ref_f0.mean() - 1.4 * means["neutral"]) < 1.0


def test_style_histogram_follows_distribution():
    picks = draw_styles(Rng(42), 20000)
    counts = np.bincount([s.id for s in picks], minlength=4) / len(picks)
    np.testing.assert_allclose(counts, [0.70, 0.10, 0.10, 0.10], atol=0.03)


def test_build_corpus_is_byte_identical(tmp_path):
    a = build_corpus(2, seed=1, out_dir=tmp_path / "a", progress=False)
    build_corpus(2, seed=1, out_dir=tmp_path / "b", progress=False)
    names = ["manifest.jsonl", "dataset.json"]
    for record in a.records:
        names += [record.wav, record.lin, record.mel]
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
    assert not mismatch and not errors
    assert len(match) == len(names)


def test_manifest_matches_stored_headers(tiny_corpus):
    manifest = load_manifest(tiny_corpus)
    assert len(manifest) == 6
    assert manifest.seed == 3
    assert sum(manifest.style_histogram().values()) == 6
    for record in manifest.records:
        assert record.id.startswith("utt")
        for rel in (record.lin, record.mel):
            frames, _ = read_spectrogram_header(tiny_corpus / rel)
            assert frames == record.n_frames


def test_training_view_has_no_style_labels(tiny_corpus):
    view = load_training_view(tiny_corpus)
    assert len(view) == 6
    for record in view:
        assert not hasattr(record, "style_id")
        assert record.mel.shape == (record.linear.shape[0], DEFAULT_AUDIO.n_mels)


def test_load_manifest_detects_damage(tmp_path):
    build_corpus(1, seed=2, out_dir=tmp_path, progress=False)
    record = load_manifest(tmp_path).records[0]
    (tmp_path / record.mel).write_bytes(b"SPG1" + (3).to_bytes(4, "little") + (40).to_bytes(4, "little"))
    with pytest.raises(CorpusIOError, match="frames"):
        load_manifest(tmp_path)
    with pytest.raises(CorpusIOError):
        load_manifest(tmp_path / "missing")
