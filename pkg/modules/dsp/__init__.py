"""Signal processing: STFT, Griffin-Lim, mel filterbank, F0 tracking"""
from .audio_io import read_spectrogram, read_spectrogram_header, read_wav, write_spectrogram, write_wav
from .config import DEFAULT_AUDIO, AudioConfig
from .errors import DspError, FileFormatError, SignalContractError
from .features import amplitude_to_feature, feature_to_amplitude
from .mel import MelFilterbank, apply_mel, mel_filterbank
from .pitch import F0Track, estimate_f0, smooth_f0, total_variation, voiced_runs
from .signals import ComplexSpectrogram, MelSpectrogram, Spectrogram, Waveform
from .spectral import GriffinLimResult, griffin_lim, istft, spectral_convergence, stft


def analyze(w: Waveform, audio: AudioConfig = DEFAULT_AUDIO):
    """Linear and mel magnitude spectrograms with the shared audio parameters"""
    lin = stft(w, audio.n_fft, audio.hop, audio.window).magnitude()
    fb = mel_filterbank(audio.sample_rate, audio.n_fft, audio.n_mels, audio.fmin, audio.fmax)
    return lin, apply_mel(lin, fb)


def track_f0(w: Waveform, audio: AudioConfig = DEFAULT_AUDIO, smooth: bool = True) -> F0Track:
    track = estimate_f0(w, audio.f0_frame_len, audio.hop, audio.fmin_f0, audio.fmax_f0, audio.voicing_threshold)
    return smooth_f0(track, audio.median_width, audio.mean_width) if smooth else track
