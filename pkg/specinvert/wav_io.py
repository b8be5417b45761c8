"""
wav_io.py — mono PCM16 WAV read/write.

Samples are floats in [-1, 1): int16 / 32768 on read. On write they are clamped
to [-1, 1 - 2**-15] and quantized with round-half-away-from-zero, so a read ->
write -> read cycle is bit-exact.
"""

import os
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

from .config import SAMPLE_RATE
from .errors import ChannelCountError, NotPcm16Error, SampleRateError, WavFormatError
from .utils import as_finite, ensure_dir

PCM_SCALE = 32768.0
PCM_MAX = 1.0 - 1.0 / PCM_SCALE


@dataclass
class WavClip:
    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE

    def __len__(self):
        return len(self.samples)

    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate


def quantize(samples) -> np.ndarray:
    x = np.clip(as_finite(samples, "wav samples"), -1.0, PCM_MAX) * PCM_SCALE
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int16)


def wav_read(path: str, sample_rate: int = SAMPLE_RATE) -> WavClip:
    try:
        rate, data = wavfile.read(path)
    except ValueError as e:
        raise WavFormatError(f"{path}: unreadable WAV ({e})") from e
    if data.dtype != np.int16:
        raise NotPcm16Error(f"{path}: sample format {data.dtype}, expected 16-bit PCM")
    if data.ndim != 1:
        raise ChannelCountError(f"{path}: {data.shape[1]} channels, expected mono")
    if sample_rate is not None and rate != sample_rate:
        raise SampleRateError(f"{path}: sample rate {rate} Hz, expected {sample_rate} Hz")
    return WavClip(data.astype(np.float64) / PCM_SCALE, int(rate))


def wav_write(path: str, clip: WavClip):
    parent = os.path.dirname(path)
    if parent:
        ensure_dir(parent)
    wavfile.write(path, int(clip.sample_rate), quantize(clip.samples))
