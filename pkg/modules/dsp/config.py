"""Audio analysis parameters shared by corpus, trainer and synthesis"""
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class AudioConfig:
    sample_rate: int = 8000
    n_fft: int = 512
    hop: int = 128
    window: str = "hann"
    n_mels: int = 40
    fmin: float = 50.0
    fmax: float = 4000.0
    # pitch analysis
    f0_frame_len: int = 384
    fmin_f0: float = 60.0
    fmax_f0: float = 400.0
    voicing_threshold: float = 0.3
    median_width: int = 5
    mean_width: int = 9
    # Griffin-Lim
    griffin_lim_iters: int = 60
    # feature scaling
    ref_db: float = 40.0
    min_db: float = -100.0

    @property
    def n_bins(self) -> int:
        return self.n_fft // 2 + 1

    def to_dict(self):
        return asdict(self)


DEFAULT_AUDIO = AudioConfig()
