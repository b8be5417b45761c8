"""
config.py — pipeline constants and run-time knobs.

Defaults reproduce the analysis front end (16 kHz, fft 2048, 50 ms frames,
12.5 ms hop, pre-emphasis 0.97, log delta 1e-2) and the sGL1 / nGL vocoders.

Env knobs (malformed values fall back to the defaults below):
  SPECINVERT_FFT_SIZE      = "2048"
  SPECINVERT_FRAME_SIZE    = "800"
  SPECINVERT_FRAME_STEP    = "200"
  SPECINVERT_PREEMPH       = "0.97"
  SPECINVERT_LOG_DELTA     = "0.01"
  SPECINVERT_W_SIZE        = "4"
  SPECINVERT_N_ITERS       = "4"
  SPECINVERT_IND           = "2"
  SPECINVERT_SEED          = ""      # seeded random MelGAN weights when set
  SPECINVERT_LOG_LEVEL     = ""      # DEBUG / INFO / WARNING
"""

import os
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError

# --- analysis front end ---
SAMPLE_RATE = 16000
FFT_SIZE = 2048
FRAME_SIZE = 800
FRAME_STEP = 200
PREEMPH_COEF = 0.97
LOG_DELTA = 1e-2

# --- Griffin-Lim ---
W_SIZE = 4
N_ITERS = 4
IND = 2
NGL_ITERS = 70
NORM_FLOOR = 1e-8

# --- MelGAN generator ---
IN_CONV = (512, 7)
UPSCALE_BLOCKS = [(256, 10, 5), (128, 10, 5), (64, 8, 4), (32, 4, 2)]
RES_DILATIONS = (1, 3, 9)
RES_KS = 3
OUT_KS = 7

VOCODERS = ["ngl", "sgl", "melgan", "nmelgan"]


def _get_number(name, default):
    val = os.environ.get(name, "").strip()
    if not val:
        return default
    try:
        return int(val) if isinstance(default, int) else float(val)
    except ValueError:
        return default


def env_seed() -> Optional[int]:
    val = os.environ.get("SPECINVERT_SEED", "").strip()
    try:
        return int(val) if val else None
    except ValueError:
        return None


@dataclass(frozen=True)
class StreamConfig:
    sample_rate: int = SAMPLE_RATE
    fft_size: int = FFT_SIZE
    frame_size: int = FRAME_SIZE
    frame_step: int = FRAME_STEP
    preemph_coef: float = PREEMPH_COEF
    log_delta: float = LOG_DELTA

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ConfigError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.fft_size % 2:
            raise ConfigError(f"fft_size must be even, got {self.fft_size}")
        if not (0 < self.frame_step <= self.frame_size <= self.fft_size):
            raise ConfigError(
                "need 0 < frame_step <= frame_size <= fft_size, got "
                f"{self.frame_step}/{self.frame_size}/{self.fft_size}")
        if not (0.0 <= self.preemph_coef < 1.0):
            raise ConfigError(f"preemph_coef must be in [0, 1), got {self.preemph_coef}")
        if self.log_delta <= 0:
            raise ConfigError(f"log_delta must be positive, got {self.log_delta}")

    @property
    def num_bins(self) -> int:
        return self.fft_size // 2 + 1

    @classmethod
    def from_env(cls, **overrides) -> "StreamConfig":
        kw = dict(
            fft_size=_get_number("SPECINVERT_FFT_SIZE", FFT_SIZE),
            frame_size=_get_number("SPECINVERT_FRAME_SIZE", FRAME_SIZE),
            frame_step=_get_number("SPECINVERT_FRAME_STEP", FRAME_STEP),
            preemph_coef=_get_number("SPECINVERT_PREEMPH", PREEMPH_COEF),
            log_delta=_get_number("SPECINVERT_LOG_DELTA", LOG_DELTA),
        )
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)


@dataclass(frozen=True)
class GlConfig:
    w_size: int = W_SIZE
    n_iters: int = N_ITERS
    ind: int = IND
    base: StreamConfig = field(default_factory=StreamConfig)

    def __post_init__(self):
        if self.w_size < 1:
            raise ConfigError(f"w_size must be >= 1, got {self.w_size}")
        if self.n_iters < 0:
            raise ConfigError(f"n_iters must be >= 0, got {self.n_iters}")
        if not (0 <= self.ind < self.w_size):
            raise ConfigError(f"ind must satisfy 0 <= ind < w_size, got ind={self.ind} w_size={self.w_size}")

    @property
    def lookahead_frames(self) -> int:
        return self.w_size - 1 - self.ind

    @property
    def lookahead_samples(self) -> int:
        return self.lookahead_frames * self.base.frame_step

    @property
    def istft_delay_samples(self) -> int:
        return self.base.frame_size - self.base.frame_step

    @property
    def total_delay_samples(self) -> int:
        return self.lookahead_samples + self.istft_delay_samples

    @property
    def span(self) -> int:
        """Samples covered by the sliding window of w_size frames."""
        return (self.w_size - 1) * self.base.frame_step + self.base.frame_size

    @classmethod
    def from_env(cls, base: Optional[StreamConfig] = None, **overrides) -> "GlConfig":
        kw = dict(
            w_size=_get_number("SPECINVERT_W_SIZE", W_SIZE),
            n_iters=_get_number("SPECINVERT_N_ITERS", N_ITERS),
            ind=_get_number("SPECINVERT_IND", IND),
        )
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(base=base or StreamConfig.from_env(), **kw)
