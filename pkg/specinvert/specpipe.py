"""
specpipe.py — waveform -> log-magnitude spectrogram, and the .lms interchange file.

Pipeline: pre-emphasis -> STFT (Hann, no centering) -> |X| -> ln(|X| + delta).

.lms layout (all little-endian):
  "LMS1" | u32 version=1 | u32 sample_rate | u32 fft_size | u32 frame_size
  | u32 frame_step | u32 num_bins | u64 num_frames
  | num_frames x num_bins float32, time-major
"""

import struct
from dataclasses import dataclass

import numpy as np

from .config import StreamConfig
from .dsp_core import batch_stft, preemphasis
from .errors import (BadMagicError, FormatError, SignalError, TruncatedFileError,
                     VersionMismatchError)
from .utils import as_finite, atomic_write_bytes, log

LMS_MAGIC = b"LMS1"
LMS_VERSION = 1
_HEADER = struct.Struct("<4sIIIIIIQ")


@dataclass
class LogMagSpectrogram:
    frames: np.ndarray          # (num_frames, num_bins)
    sample_rate: int
    fft_size: int
    frame_size: int
    frame_step: int

    @property
    def num_bins(self) -> int:
        return self.fft_size // 2 + 1

    @property
    def num_frames(self) -> int:
        return int(self.frames.shape[0])

    def __len__(self):
        return self.num_frames

    def config(self, **overrides) -> StreamConfig:
        kw = dict(sample_rate=self.sample_rate, fft_size=self.fft_size,
                  frame_size=self.frame_size, frame_step=self.frame_step)
        kw.update(overrides)
        return StreamConfig(**kw)

    def duration_seconds(self) -> float:
        return self.num_frames * self.frame_step / self.sample_rate

    @classmethod
    def from_frames(cls, frames, cfg: StreamConfig) -> "LogMagSpectrogram":
        frames = np.asarray(frames)
        if frames.ndim == 1 and frames.size == 0:
            frames = frames.reshape(0, cfg.num_bins)
        if frames.ndim != 2 or frames.shape[1] != cfg.num_bins:
            raise SignalError(f"expected frames of {cfg.num_bins} bins, got shape {frames.shape}")
        return cls(frames, cfg.sample_rate, cfg.fft_size, cfg.frame_size, cfg.frame_step)


def log_compress(mag, delta: float) -> np.ndarray:
    mag = as_finite(mag, "magnitude")
    if np.any(mag < 0):
        raise SignalError(f"magnitude must be non-negative, min={mag.min():.3g}")
    return np.log(mag + delta)


def log_expand(logmag, delta: float) -> np.ndarray:
    logmag = as_finite(logmag, "log-magnitude")
    # delta * expm1(v - ln delta) == exp(v) - delta, exact zero at v = ln(delta)
    return np.maximum(delta * np.expm1(logmag - np.log(delta)), 0.0)


def analyze(x, cfg: StreamConfig) -> LogMagSpectrogram:
    spec = batch_stft(preemphasis(x, cfg.preemph_coef), cfg)
    frames = log_compress(np.abs(spec), cfg.log_delta)
    log.debug("analyzed %d samples into %d frames", len(x), frames.shape[0])
    return LogMagSpectrogram.from_frames(frames, cfg)


# -----------------------------
# .lms file format
# -----------------------------
def save_spectrogram(spec: LogMagSpectrogram, path: str):
    frames = np.ascontiguousarray(spec.frames, dtype="<f4")
    if frames.ndim != 2 or frames.shape[1] != spec.num_bins:
        raise SignalError(f"expected frames of {spec.num_bins} bins, got shape {frames.shape}")
    header = _HEADER.pack(LMS_MAGIC, LMS_VERSION, spec.sample_rate, spec.fft_size,
                          spec.frame_size, spec.frame_step, spec.num_bins, frames.shape[0])
    atomic_write_bytes(path, header + frames.tobytes())


def load_spectrogram(path: str) -> LogMagSpectrogram:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 4 or blob[:4] != LMS_MAGIC:
        raise BadMagicError(f"{path}: not a spectrogram file (magic {blob[:4]!r}, expected {LMS_MAGIC!r})")
    if len(blob) < _HEADER.size:
        raise TruncatedFileError(f"{path}: header truncated ({len(blob)} of {_HEADER.size} bytes)")
    _, version, sr, fft_size, frame_size, frame_step, num_bins, n = _HEADER.unpack_from(blob)
    if version != LMS_VERSION:
        raise VersionMismatchError(f"{path}: version {version}, this reader supports {LMS_VERSION}")
    if num_bins != fft_size // 2 + 1:
        raise FormatError(f"{path}: num_bins={num_bins} inconsistent with fft_size={fft_size}")
    want = n * num_bins * 4
    payload = blob[_HEADER.size:]
    if len(payload) < want:
        raise TruncatedFileError(f"{path}: payload truncated ({len(payload)} of {want} bytes)")
    if len(payload) > want:
        raise FormatError(f"{path}: {len(payload) - want} unexpected trailing bytes after {n} frames")
    frames = np.frombuffer(payload, dtype="<f4", count=n * num_bins).reshape(n, num_bins)
    return LogMagSpectrogram(frames.astype(np.float32), sr, fft_size, frame_size, frame_step)
