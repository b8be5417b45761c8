"""
griffin_lim.py — non-streaming Griffin-Lim (nGL) and the streaming sliding-window
variant with look-ahead (sGL).

Streaming: every pushed log-magnitude frame enters two queues of w_size frames,
`mag_w` (target magnitudes) and `stft_w` (complex estimates). Frames at window
positions < ind are committed: their complex values are carried over verbatim,
so their phase never changes during the iterations. Positions >= ind get their
phase re-estimated n_iters times from an iSTFT/STFT round trip over the local
span of the window. The frame at position ind is then sent through the streaming
iSTFT, de-emphasized and normalized by (1 + coef).

Delay with defaults (w_size=4, ind=2): one hop of look-ahead (200 samples)
plus the iSTFT overlap (600 samples) = 800 samples = one frame.
"""

from functools import lru_cache

import numpy as np

from .config import NGL_ITERS, GlConfig, StreamConfig
from .dsp_core import (Deemphasis, StreamingIstftState, batch_istft, batch_stft,
                       frame_signal, hann_window, ola_norm, overlap_add,
                       synthesis_frames)
from .errors import ConfigError, SignalError
from .metrics import SC_FLOOR_DB, spectral_convergence
from .specpipe import LogMagSpectrogram, log_expand
from .utils import as_finite, log


def phasor(X: np.ndarray) -> np.ndarray:
    """X / |X| with the phase of a zero value taken as 0."""
    mag = np.abs(X)
    out = np.ones_like(X, dtype=np.complex128)
    np.divide(X, mag, out=out, where=mag > 0)
    return out


@lru_cache(maxsize=16)
def _local_kernel(cfg: StreamConfig, w_size: int):
    window = hann_window(cfg.frame_size)
    return window, ola_norm(w_size, window, cfg.frame_step)


def gl_window_iterations(mag_w, stft_w, ind: int, n_iters: int, cfg: StreamConfig,
                         w_size: int = None) -> np.ndarray:
    """Run n_iters GL iterations over one sliding window; returns the new stft_w."""
    mag_w = np.asarray(mag_w, dtype=np.float64)
    stft_w = np.asarray(stft_w, dtype=np.complex128)
    want = w_size if w_size is not None else mag_w.shape[0]
    if mag_w.ndim != 2 or mag_w.shape != stft_w.shape or mag_w.shape[0] != want or want == 0:
        raise SignalError(f"window queues must both hold {want} frames, got {mag_w.shape} and {stft_w.shape}")
    if mag_w.shape[1] != cfg.num_bins:
        raise SignalError(f"expected frames of {cfg.num_bins} bins, got {mag_w.shape[1]}")
    if not (0 <= ind < want):
        raise ConfigError(f"ind={ind} outside window of {want} frames")
    if n_iters < 0:
        raise ConfigError(f"n_iters must be >= 0, got {n_iters}")

    window, norm = _local_kernel(cfg, want)
    committed = stft_w[:ind].copy()
    target = mag_w[ind:]
    stft = stft_w.copy()
    for _ in range(n_iters):
        local = overlap_add(synthesis_frames(stft, cfg, window), cfg.frame_step) / norm
        est = np.fft.rfft(frame_signal(local, cfg) * window, n=cfg.fft_size, axis=-1)
        stft[ind:] = target * phasor(est[ind:])
        stft[:ind] = committed
    return stft


class GlStreamState:
    """Streaming GL machine: one instance per stream, pushes are not thread-safe."""

    def __init__(self, gl_cfg: GlConfig = None):
        self.gl_cfg = gl_cfg or GlConfig()
        self.cfg = self.gl_cfg.base
        self.istft = StreamingIstftState(self.cfg)
        self.deemph = Deemphasis(self.cfg.preemph_coef)
        self.reset()

    def reset(self):
        w, bins = self.gl_cfg.w_size, self.cfg.num_bins
        self.mag_w = np.zeros((w, bins))
        self.stft_w = np.zeros((w, bins), dtype=np.complex128)
        self.frames_pushed = 0
        self.istft.reset()
        self.deemph.reset()

    # --- delay bookkeeping ---
    @property
    def lookahead_samples(self) -> int:
        return self.gl_cfg.lookahead_samples

    @property
    def total_delay_samples(self) -> int:
        return self.gl_cfg.total_delay_samples

    @property
    def output_offset_samples(self) -> int:
        """out[n + offset] lines up with the analyzed input x[n]."""
        return self.gl_cfg.lookahead_samples

    def nbytes(self) -> int:
        span, fft_bins = self.gl_cfg.span, self.cfg.num_bins
        work = span * 8 + self.gl_cfg.w_size * fft_bins * 16 * 2
        return self.mag_w.nbytes + self.stft_w.nbytes + self.istft.nbytes() + work

    def _push_magnitude(self, mag: np.ndarray) -> np.ndarray:
        g = self.gl_cfg
        self.mag_w = np.concatenate([self.mag_w[1:], mag[None, :]])
        self.stft_w = np.concatenate([self.stft_w[1:], mag[None, :].astype(np.complex128)])
        self.stft_w = gl_window_iterations(self.mag_w, self.stft_w, g.ind, g.n_iters, self.cfg, g.w_size)
        self.frames_pushed += 1
        return self.deemph(self.istft.push(self.stft_w[g.ind]))

    def push(self, logmag_frame) -> np.ndarray:
        frame = as_finite(logmag_frame, "log-magnitude frame")
        if frame.shape != (self.cfg.num_bins,):
            raise SignalError(f"expected one frame of {self.cfg.num_bins} bins, got shape {frame.shape}")
        return self._push_magnitude(log_expand(frame, self.cfg.log_delta))

    def flush(self) -> np.ndarray:
        """Drain the look-ahead with silent frames, flush the iSTFT, reset."""
        if self.frames_pushed == 0:
            log.warning("flushing a GL stream that never received a frame")
        silence = np.zeros(self.cfg.num_bins)
        tail = [self._push_magnitude(silence) for _ in range(self.gl_cfg.lookahead_frames)]
        tail.append(self.deemph(self.istft.flush()))
        out = np.concatenate(tail)
        self.reset()
        return out


def gl_stream_push(state: GlStreamState, logmag_frame) -> np.ndarray:
    return state.push(logmag_frame)


def gl_stream_flush(state: GlStreamState) -> np.ndarray:
    return state.flush()


def gl_stream(spec: LogMagSpectrogram, gl_cfg: GlConfig = None) -> np.ndarray:
    """Push every frame of `spec` through a fresh stream and flush it."""
    state = GlStreamState(gl_cfg or GlConfig(base=spec.config()))
    hops = [state.push(f) for f in spec.frames]
    hops.append(state.flush())
    return np.concatenate(hops)


def _convergence(mag: np.ndarray, X: np.ndarray) -> float:
    # a silent target is matched exactly by the all-zero estimate
    if not np.any(mag):
        return SC_FLOOR_DB
    return spectral_convergence(mag, np.abs(X))


def gl_nonstreaming(spec: LogMagSpectrogram, n_iters: int = NGL_ITERS, cfg: StreamConfig = None,
                    init: str = "zero", seed: int = None, history: bool = False):
    """Whole-sequence Griffin-Lim.

    init="zero" starts from zero phase, init="random" from a seeded uniform phase.
    With history=True also returns the spectral convergence (dB) of the estimate
    before the first and after every iteration (n_iters + 1 values).
    """
    cfg = cfg or spec.config()
    if spec.num_frames == 0:
        raise SignalError("cannot invert an empty spectrogram")
    if n_iters < 0:
        raise ConfigError(f"n_iters must be >= 0, got {n_iters}")
    mag = log_expand(np.asarray(spec.frames, dtype=np.float64), cfg.log_delta)
    if init == "zero":
        S = mag.astype(np.complex128)
    elif init == "random":
        rng = np.random.default_rng(seed)
        S = mag * np.exp(2j * np.pi * rng.random(mag.shape))
    else:
        raise ConfigError(f"unknown phase init {init!r} (expected 'zero' or 'random')")

    sc = []
    y = batch_istft(S, cfg)
    for _ in range(n_iters):
        X = batch_stft(y, cfg)
        if history:
            sc.append(_convergence(mag, X))
        S = mag * phasor(X)
        y = batch_istft(S, cfg)
    if history:
        sc.append(_convergence(mag, batch_stft(y, cfg)))
        log.info("nGL %d iterations: SC %.2f dB -> %.2f dB", n_iters, sc[0], sc[-1])
    out = Deemphasis(cfg.preemph_coef)(y)
    return (out, sc) if history else out
