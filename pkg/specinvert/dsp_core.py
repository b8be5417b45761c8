"""
dsp_core.py — windowing, framing, STFT / iSTFT (batch and streaming), emphasis.

Conventions:
- Frames start at sample 0, no center padding, a trailing partial frame is dropped.
- Analysis and synthesis both use the periodic Hann window; the inverse divides
  by the overlap-added squared window (weighted overlap-add), floored at NORM_FLOOR.
- Spectra are half-spectra of real signals: shape (num_frames, fft_size//2 + 1).
- Everything runs in float64 / complex128.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import get_window, lfilter

from .config import NORM_FLOOR, StreamConfig
from .errors import ConfigError, SignalError, StateError
from .utils import as_finite


# -----------------------------
# Emphasis filters
# -----------------------------
def _check_coef(coef: float):
    if not (0.0 <= coef < 1.0):
        raise ConfigError(f"emphasis coefficient must be in [0, 1), got {coef}")


def preemphasis(x, coef: float) -> np.ndarray:
    """y[0] = x[0]; y[n] = x[n] - coef * x[n-1]."""
    _check_coef(coef)
    x = as_finite(x, "preemphasis input")
    if x.size == 0:
        return x.copy()
    return lfilter([1.0, -coef], [1.0], x)


class Deemphasis:
    """Recursive inverse of `preemphasis`, normalized by (1 + coef).

    Carries the last unnormalized output across calls so a stream can be
    filtered hop by hop.
    """

    def __init__(self, coef: float):
        _check_coef(coef)
        self.coef = float(coef)
        self.prev = 0.0

    def reset(self):
        self.prev = 0.0

    def __call__(self, x) -> np.ndarray:
        x = as_finite(x, "deemphasis input")
        if x.size == 0:
            return x.copy()
        y, _ = lfilter([1.0], [1.0, -self.coef], x, zi=[self.coef * self.prev])
        self.prev = float(y[-1])
        return y / (1.0 + self.coef)


def deemphasis(x, coef: float) -> np.ndarray:
    return Deemphasis(coef)(x)


# -----------------------------
# Window and framing
# -----------------------------
def hann_window(length: int) -> np.ndarray:
    """Periodic Hann: w[n] = 0.5 * (1 - cos(2*pi*n / length))."""
    if int(length) != length or length < 2:
        raise ConfigError(f"window length must be an integer >= 2, got {length}")
    return get_window("hann", int(length), fftbins=True).astype(np.float64)


def num_frames(num_samples: int, cfg: StreamConfig) -> int:
    if num_samples < cfg.frame_size:
        return 0
    return (num_samples - cfg.frame_size) // cfg.frame_step + 1


def istft_length(n_frames: int, cfg: StreamConfig) -> int:
    return (n_frames - 1) * cfg.frame_step + cfg.frame_size


def ola_norm(n_frames: int, window: np.ndarray, hop: int) -> np.ndarray:
    """Overlap-added squared window over n_frames, floored at NORM_FLOOR."""
    sq = window ** 2
    frame_size = len(window)
    total = np.zeros((n_frames - 1) * hop + frame_size)
    for t in range(n_frames):
        total[t * hop:t * hop + frame_size] += sq
    return np.maximum(total, NORM_FLOOR)


def frame_signal(x: np.ndarray, cfg: StreamConfig) -> np.ndarray:
    return sliding_window_view(x, cfg.frame_size)[::cfg.frame_step]


# -----------------------------
# Batch STFT / iSTFT
# -----------------------------
def batch_stft(x, cfg: StreamConfig) -> np.ndarray:
    x = as_finite(x, "stft input")
    if x.ndim != 1:
        raise SignalError(f"expected a mono sample sequence, got shape {x.shape}")
    if len(x) < cfg.frame_size:
        raise SignalError(f"input has {len(x)} samples, need at least frame_size={cfg.frame_size}")
    frames = frame_signal(x, cfg) * hann_window(cfg.frame_size)
    return np.fft.rfft(frames, n=cfg.fft_size, axis=-1)


def _check_spectrum(spec, cfg: StreamConfig) -> np.ndarray:
    spec = np.asarray(spec, dtype=np.complex128)
    if spec.ndim == 1:
        spec = spec[None, :]
    if spec.ndim != 2 or spec.shape[1] != cfg.num_bins:
        raise SignalError(f"expected frames of {cfg.num_bins} bins, got shape {spec.shape}")
    if not np.all(np.isfinite(spec)):
        raise SignalError("spectrum has non-finite values")
    return spec


def synthesis_frames(spec: np.ndarray, cfg: StreamConfig, window: np.ndarray) -> np.ndarray:
    """Inverse real FFT per frame, truncated to frame_size and windowed."""
    return np.fft.irfft(spec, n=cfg.fft_size, axis=-1)[:, :cfg.frame_size] * window


def overlap_add(frames: np.ndarray, hop: int) -> np.ndarray:
    n, size = frames.shape
    out = np.zeros((n - 1) * hop + size)
    for t in range(n):
        out[t * hop:t * hop + size] += frames[t]
    return out


def batch_istft(spec, cfg: StreamConfig) -> np.ndarray:
    spec = np.asarray(spec)
    if spec.size == 0 or (spec.ndim == 2 and spec.shape[0] == 0):
        raise SignalError("cannot invert an empty spectrogram")
    spec = _check_spectrum(spec, cfg)
    window = hann_window(cfg.frame_size)
    out = overlap_add(synthesis_frames(spec, cfg, window), cfg.frame_step)
    return out / ola_norm(spec.shape[0], window, cfg.frame_step)


# -----------------------------
# Streaming iSTFT
# -----------------------------
class StreamingIstftState:
    """Overlap-add accumulator emitting frame_step samples per pushed frame.

    `overlap_buffer` holds the pending windowed samples and `norm` the
    matching squared-window sum, so the emitted samples are identical to the
    batch inverse over the same frames (the batch normalization at the start
    of a sequence is partial, and so is this one).
    """

    def __init__(self, cfg: StreamConfig = None):
        self.cfg = None
        if cfg is not None:
            self.init(cfg)

    def init(self, cfg: StreamConfig):
        if cfg.frame_size % cfg.frame_step:
            raise ConfigError(
                f"streaming iSTFT needs frame_size ({cfg.frame_size}) to be a multiple "
                f"of frame_step ({cfg.frame_step})")
        self.cfg = cfg
        self.window = hann_window(cfg.frame_size)
        self._sq = self.window ** 2
        self.overlap_buffer = np.zeros(cfg.frame_size)
        self.norm = np.zeros(cfg.frame_size)
        self.frames_pushed = 0
        return self

    def reset(self):
        self._require()
        return self.init(self.cfg)

    @property
    def delay_samples(self) -> int:
        return self.cfg.frame_size - self.cfg.frame_step

    def nbytes(self) -> int:
        return self.overlap_buffer.nbytes + self.norm.nbytes + self.window.nbytes + self._sq.nbytes

    def _require(self):
        if self.cfg is None:
            raise StateError("streaming iSTFT state is not initialized")

    def push(self, frame) -> np.ndarray:
        self._require()
        cfg = self.cfg
        spec = _check_spectrum(frame, cfg)
        if spec.shape[0] != 1:
            raise SignalError(f"push takes one frame, got {spec.shape[0]}")
        self.overlap_buffer += synthesis_frames(spec, cfg, self.window)[0]
        self.norm += self._sq
        hop = cfg.frame_step
        out = self.overlap_buffer[:hop] / np.maximum(self.norm[:hop], NORM_FLOOR)
        self.overlap_buffer = np.concatenate([self.overlap_buffer[hop:], np.zeros(hop)])
        self.norm = np.concatenate([self.norm[hop:], np.zeros(hop)])
        self.frames_pushed += 1
        return out

    def flush(self) -> np.ndarray:
        """Return the frame_size - frame_step pending samples and clear the buffer."""
        self._require()
        pending = self.delay_samples
        out = self.overlap_buffer[:pending] / np.maximum(self.norm[:pending], NORM_FLOOR)
        self.overlap_buffer = np.zeros(self.cfg.frame_size)
        self.norm = np.zeros(self.cfg.frame_size)
        return out


def streaming_istft_push(state: StreamingIstftState, frame) -> np.ndarray:
    if state is None:
        raise StateError("streaming iSTFT state is not initialized")
    return state.push(frame)


def streaming_istft_flush(state: StreamingIstftState) -> np.ndarray:
    if state is None:
        raise StateError("streaming iSTFT state is not initialized")
    return state.flush()
