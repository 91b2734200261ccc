import numpy as np
import pytest

from modules.dsp import (
    DEFAULT_AUDIO,
    ComplexSpectrogram,
    F0Track,
    FileFormatError,
    SignalContractError,
    Spectrogram,
    Waveform,
    amplitude_to_feature,
    apply_mel,
    estimate_f0,
    feature_to_amplitude,
    griffin_lim,
    istft,
    mel_filterbank,
    read_spectrogram,
    read_spectrogram_header,
    read_wav,
    smooth_f0,
    stft,
    total_variation,
    voiced_runs,
    write_spectrogram,
    write_wav,
)
from modules.dsp.audio_io import to_pcm16
from modules.dsp.spectral import spectral_convergence
from modules.numcore import Rng

SR = 8000


def tone(freq, seconds=1.0, sr=SR, amp=0.5):
    t = np.arange(int(seconds * sr)) / sr
    return Waveform(amp * np.sin(2 * np.pi * freq * t), sr)


def test_stft_frame_count_and_peak_bin():
    w = tone(1000.0)
    spec = stft(w, 512, 128)
    assert spec.n_frames == 1 + len(w) // 128
    peaks = np.abs(spec.values).argmax(axis=1)
    assert (peaks[4:-4] == round(1000.0 * 512 / SR)).all()


def test_stft_zero_in_zero_out():
    mag = stft(Waveform(np.zeros(2048), SR)).magnitude()
    assert (mag.magnitudes == 0).all()


def test_stft_rejects_short_signal_and_bad_params():
    with pytest.raises(SignalContractError):
        stft(Waveform(np.zeros(100), SR), 512, 128)
    with pytest.raises(SignalContractError):
        stft(Waveform(np.zeros(2048), SR), 500, 128)
    with pytest.raises(SignalContractError):
        stft(Waveform(np.zeros(2048), SR), 512, 600)


def test_stft_round_trip(rng):
    for _ in range(100):
        x = Waveform(rng.uniform(-1, 1, size=int(rng.integers(1024, 4096))), SR)
        back = istft(stft(x, 512, 128))
        assert len(back) == len(x)
        assert np.max(np.abs(back.samples - x.samples)) <= 1e-6


def test_istft_single_frame_rectangular_identity(rng):
    x = Waveform(rng.normal(size=64), SR)
    spec = stft(x, 64, 64, window="rectangular", center=False)
    assert spec.n_frames == 1
    np.testing.assert_allclose(istft(spec, length=64).samples, x.samples, atol=1e-12)


def test_istft_inconsistent_metadata():
    bad = ComplexSpectrogram(np.zeros((4, 100), dtype=complex), 512, 128, "hann", SR)
    with pytest.raises(SignalContractError):
        istft(bad)


def _sinusoid_sum(seed):
    r = np.random.default_rng(seed)
    t = np.arange(SR) / SR
    freqs = r.uniform(100, 3000, size=4)
    return Waveform(sum(r.uniform(0.1, 0.5) * np.sin(2 * np.pi * f * t + r.uniform(0, 6)) for f in freqs), SR)


def test_griffin_lim_converges_on_sinusoid_sums():
    for seed in range(3):
        mag = stft(_sinusoid_sum(seed)).magnitude()
        result = griffin_lim(mag, iterations=50, rng=Rng(seed))
        assert result.final_error <= 0.1
        assert len(result.errors) == 50


def test_griffin_lim_output_error_scores_the_returned_waveform():
    mag = stft(_sinusoid_sum(6)).magnitude()
    result = griffin_lim(mag, iterations=50, rng=Rng(6))
    rebuilt = stft(result.waveform).magnitude().magnitudes
    expected = spectral_convergence(rebuilt.T, mag.magnitudes.T, 512)
    assert result.output_error == pytest.approx(expected, rel=1e-9)
    assert result.output_error <= 0.3


def test_griffin_lim_error_is_monotone():
    for seed in range(20):
        r = np.random.default_rng(seed)
        mag = Spectrogram(r.uniform(0, 1, size=(20, 257)), 512, 128, "hann", SR)
        errors = np.asarray(griffin_lim(mag, iterations=15, rng=Rng(seed)).errors)
        assert (np.diff(errors) <= 1e-7).all()


def test_griffin_lim_single_zero_phase_iteration_is_istft():
    mag = stft(_sinusoid_sum(4)).magnitude()
    out = griffin_lim(mag, iterations=1, phase_init="zero").waveform
    direct = istft(ComplexSpectrogram(mag.magnitudes.astype(complex), 512, 128, "hann", SR))
    np.testing.assert_allclose(out.samples, direct.samples, atol=1e-8)


def test_griffin_lim_is_seeded():
    mag = stft(_sinusoid_sum(5)).magnitude()
    a = griffin_lim(mag, iterations=5, rng=Rng(9)).waveform.samples
    b = griffin_lim(mag, iterations=5, rng=Rng(9)).waveform.samples
    assert a.tobytes() == b.tobytes()


def test_griffin_lim_contract_errors():
    zeros = Spectrogram(np.zeros((5, 257)), 512, 128, "hann", SR)
    with pytest.raises(SignalContractError):
        griffin_lim(zeros)
    ones = Spectrogram(np.ones((5, 257)), 512, 128, "hann", SR)
    with pytest.raises(SignalContractError):
        griffin_lim(ones, iterations=0)


def test_mel_rows_are_unimodal():
    fb = mel_filterbank(SR, 512, 40, 50.0, 4000.0)
    for row in fb.weights:
        nz = row[row > 0]
        peak = nz.argmax()
        assert (np.diff(nz[: peak + 1]) >= 0).all()
        assert (np.diff(nz[peak:]) <= 0).all()


def test_mel_covers_band():
    fb = mel_filterbank(SR, 512, 40, 50.0, 4000.0)
    freqs = np.arange(257) * SR / 512
    inside = (freqs > 50.0) & (freqs < 4000.0)
    assert (fb.weights[:, inside].sum(axis=0) > 0).all()


def test_mel_zero_and_band_errors():
    fb = mel_filterbank(SR, 512, 40, 50.0, 4000.0)
    zeros = Spectrogram(np.zeros((3, 257)), 512, 128, "hann", SR)
    assert (apply_mel(zeros, fb).magnitudes == 0).all()
    with pytest.raises(SignalContractError):
        mel_filterbank(SR, 512, 40, 500.0, 100.0)
    with pytest.raises(SignalContractError):
        mel_filterbank(SR, 512, 40, 50.0, 5000.0)


def test_mel_tone_concentrates_in_nearest_filter():
    fb = mel_filterbank(SR, 512, 40, 50.0, 4000.0)
    centers = fb.center_frequencies()
    freq = centers[20]
    mel = apply_mel(stft(tone(freq)).magnitude(), fb).magnitudes
    row = mel[mel.shape[0] // 2]
    assert row[20] >= 0.6 * row.sum()


@pytest.mark.parametrize("freq", np.arange(60.0, 401.0, 10.0))
def test_f0_pure_tones(freq):
    track = estimate_f0(tone(freq), 384, 128, 60.0, 400.0)
    interior = track.hz[2:-2]
    assert (interior > 0).all()
    assert np.max(np.abs(interior - freq)) <= 2.0


def test_f0_silence_is_unvoiced():
    track = estimate_f0(Waveform(np.zeros(4000), SR))
    assert not track.voiced.any()
    assert track.mean() == 0.0


def test_f0_chirp_follows_frequency_law():
    seconds = 1.0
    t = np.arange(int(seconds * SR)) / SR
    phase = 2 * np.pi * (150.0 * t + 0.5 * 150.0 * t * t / seconds)
    track = estimate_f0(Waveform(0.5 * np.sin(phase), SR))
    frames = np.arange(len(track))[3:-3]
    expected = 150.0 + 150.0 * frames * 128 / SR
    got = track.hz[frames]
    assert np.max(np.abs(got - expected)) <= 5.0
    assert (np.diff(got) >= -0.5).all()


def test_f0_band_contract():
    with pytest.raises(SignalContractError):
        estimate_f0(tone(200.0), 384, 128, 10.0, 400.0)
    with pytest.raises(SignalContractError):
        estimate_f0(tone(200.0), 384, 128, 300.0, 200.0)


def test_smooth_constant_and_spike():
    flat = F0Track(np.full(30, 180.0), 128, SR)
    np.testing.assert_allclose(smooth_f0(flat).hz, flat.hz)
    spiky = np.full(30, 180.0)
    spiky[15] = 360.0
    assert np.allclose(smooth_f0(F0Track(spiky, 128, SR), 5, 1).hz, 180.0)


def test_smooth_keeps_unvoiced_and_runs_separate():
    hz = np.concatenate([np.full(10, 150.0), np.zeros(5), np.full(10, 250.0)])
    out = smooth_f0(F0Track(hz, 128, SR)).hz
    assert (out[10:15] == 0).all()
    np.testing.assert_allclose(out[:10], 150.0)
    np.testing.assert_allclose(out[15:], 250.0)
    assert voiced_runs(hz) == [(0, 10), (15, 25)]


def test_smooth_reduces_total_variation(rng):
    for _ in range(100):
        hz = rng.uniform(80.0, 380.0, size=int(rng.integers(5, 60)))
        smoothed = smooth_f0(F0Track(hz, 128, SR)).hz
        assert total_variation(smoothed) <= total_variation(hz) + 1e-7


def test_smooth_rejects_even_width():
    with pytest.raises(SignalContractError):
        smooth_f0(F0Track(np.ones(5), 128, SR), median_width=4)


def test_wav_round_trip_is_bit_exact(tmp_path, rng):
    ints = rng.integers(-32767, 32768, size=3000).astype(np.int16)
    path = tmp_path / "x.wav"
    write_wav(path, Waveform(ints / 32767.0, SR))
    back = read_wav(path)
    assert back.sample_rate == SR
    np.testing.assert_array_equal(to_pcm16(back.samples), ints)


def test_read_wav_rejects_garbage(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(b"not a wave file")
    with pytest.raises(FileFormatError):
        read_wav(path)


def test_spectrogram_file_format(tmp_path, rng):
    values = rng.uniform(0, 2, size=(7, 5)).astype(np.float32)
    path = tmp_path / "a.lin"
    write_spectrogram(path, values)
    raw = path.read_bytes()
    assert raw[:4] == b"SPG1"
    assert len(raw) == 12 + 7 * 5 * 4
    assert read_spectrogram_header(path) == (7, 5)
    np.testing.assert_array_equal(read_spectrogram(path), values)


def test_spectrogram_file_errors(tmp_path):
    bad = tmp_path / "bad.mel"
    bad.write_bytes(b"XXXX" + b"\0" * 8)
    with pytest.raises(FileFormatError):
        read_spectrogram(bad)
    short = tmp_path / "short.mel"
    write_spectrogram(short, np.ones((3, 3)))
    short.write_bytes(short.read_bytes()[:-4])
    with pytest.raises(FileFormatError):
        read_spectrogram(short)


def test_features_invert_inside_range():
    mags = np.array([1e-2, 0.1, 1.0, 10.0, 90.0])
    features = amplitude_to_feature(mags, DEFAULT_AUDIO)
    assert ((features >= 0) & (features <= 1)).all()
    np.testing.assert_allclose(feature_to_amplitude(features, DEFAULT_AUDIO), mags, rtol=1e-9)
    assert amplitude_to_feature(np.zeros(1))[0] == 0.0
